"""Partial-transpose moments, the Newton-Girard determinant and the four-copy witness."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .linalg import COPY_ORDER, as_real, cyclic_shift, eigvalsh, embed_on_copies, partial_transpose, subsystem_permutation
from .states import as_matrix, dims_of

W4_MAGIC = b"W4UNIV01"
W4_DIM = 256


@dataclass(frozen=True)
class MomentVector:
    """Power sums ``pi_k = sum_i lambda_i^k`` of the PT spectrum, k = 1..4."""

    pi1: float
    pi2: float
    pi3: float
    pi4: float

    def __iter__(self):
        return iter((self.pi1, self.pi2, self.pi3, self.pi4))

    def is_physical(self, tol: float = 1e-10) -> bool:
        return (abs(self.pi1 - 1) <= tol and self.pi2 + tol >= self.pi4 >= -tol
                and self.pi2 <= 1 + tol)


def _pt_of(rho) -> np.ndarray:
    m = as_matrix(rho)
    if m.shape != (4, 4) or dims_of(rho, (2, 2)) != (2, 2):
        raise ValueError("expected a two-qubit state")
    return partial_transpose(m, (2, 2), "B")


def pt_moments(rho, cross_check: bool = True) -> MomentVector:
    """Moments of ``rho^Gamma`` from its spectrum.

    Works for any Hermitian 4x4 input, positive or not. With ``cross_check`` the
    values are compared against traces of explicit matrix powers.
    """
    pt = _pt_of(rho)
    lam = eigvalsh(pt)
    moments = [float(np.sum(lam**k)) for k in range(1, 5)]
    if cross_check:
        power = np.eye(4, dtype=complex)
        scale = max(1.0, float(np.max(np.abs(lam))))
        for k in range(1, 5):
            power = power @ pt
            direct = np.trace(power).real
            if abs(direct - moments[k - 1]) > 1e-10 * scale**k:
                raise ArithmeticError(f"moment {k}: spectral {moments[k - 1]!r} vs direct {direct!r}")
    return MomentVector(*moments)


def newton_girard_det(m: MomentVector) -> float:
    """Determinant of a 4x4 unit-trace matrix from its power sums."""
    if abs(m.pi1 - 1) > 1e-10:
        raise ValueError(f"pi1 must be 1, got {m.pi1!r}")
    return (1 - 6 * m.pi4 + 8 * m.pi3 + 3 * m.pi2**2 - 6 * m.pi2) / 24


@lru_cache(maxsize=None)
def _moment_operator_pt(k: int) -> np.ndarray:
    n = 2 * k
    perm = [0] * n
    for j in range(k):
        perm[2 * j] = 2 * ((j - 1) % k)          # cyclic shift on the A halves
        perm[2 * j + 1] = 2 * ((j + 1) % k) + 1  # its transpose (inverse) on the B halves
    op = subsystem_permutation(perm, 2)
    op.setflags(write=False)
    return op


def moment_operator_pt(k: int) -> np.ndarray:
    """``V~(k) x V~(k)^T`` on k interleaved two-qubit copies.

    Its expectation on ``rho^{(x)k}`` is ``Tr[(rho^Gamma)^k]``.
    """
    if k not in (1, 2, 3, 4):
        raise ValueError(f"k must be 1..4, got {k}")
    return _moment_operator_pt(k)


def moment_observable(k: int, d: int) -> np.ndarray:
    """Hermitian part ``(V + V^dagger)/2`` of the k-copy cyclic shift."""
    v = cyclic_shift(k, d)
    return (v + v.conj().T) / 2


def copy_swap(c1: int, c2: int, total_copies: int = 4) -> np.ndarray:
    """Full swap of two-qubit copies ``c1`` and ``c2`` (zero based)."""
    return embed_on_copies(cyclic_shift(2, 4), "both", [c1, c2], total_copies)


@dataclass(frozen=True)
class WitnessOperator:
    matrix: np.ndarray
    copy_ordering: tuple[str, ...] = COPY_ORDER

    def expectation_dense(self, rho) -> float:
        return witness_expectation(self, rho)


def w4_terms() -> dict[str, np.ndarray]:
    """The five building blocks of W4 under the frozen copy ordering."""
    t4 = moment_operator_pt(4).astype(complex)
    t3 = embed_on_copies(moment_operator_pt(3), "both", [0, 1, 2])
    return {
        "identity": np.eye(W4_DIM, dtype=complex),
        "four_copy": t4 + t4.T,
        "three_copy": t3 + t3.T,
        "swap12_swap34": copy_swap(0, 1) @ copy_swap(2, 3),
        "swap34": copy_swap(2, 3),
    }


W4_COEFFICIENTS = {
    "identity": 1 / 24,
    "four_copy": -1 / 8,
    "three_copy": 1 / 6,
    "swap12_swap34": 1 / 8,
    "swap34": -1 / 4,
}


@lru_cache(maxsize=1)
def _build_w4_matrix() -> np.ndarray:
    terms = w4_terms()
    w = sum(W4_COEFFICIENTS[name] * terms[name] for name in W4_COEFFICIENTS)
    w.setflags(write=False)
    return w


def build_w4() -> WitnessOperator:
    """The 256x256 observable whose mean on four copies of rho is ``det rho^Gamma``."""
    return WitnessOperator(_build_w4_matrix())


def tensor_power(m: np.ndarray, n: int) -> np.ndarray:
    out = np.asarray(m, dtype=complex)
    for _ in range(n - 1):
        out = np.kron(out, m)
    return out


def witness_expectation(w: WitnessOperator | np.ndarray, rho, route: str = "dense") -> float:
    """``Tr[W rho^{(x)4}]``.

    ``route="dense"`` contracts the materialised 256x256 operator; ``route="moments"``
    evaluates the same polynomial from PT moments without building ``rho^{(x)4}``.
    """
    m = as_matrix(rho)
    if m.shape != (4, 4):
        raise ValueError("expected a two-qubit state")
    if route == "moments":
        return newton_girard_det(pt_moments(m, cross_check=False))
    if route != "dense":
        raise ValueError(f"unknown route {route!r}")
    wm = w.matrix if isinstance(w, WitnessOperator) else np.asarray(w)
    r4 = tensor_power(m, 4)
    return as_real(np.einsum("ij,ji->", wm, r4), "witness expectation")


def copy_expectation(op: np.ndarray, rho, copies: int) -> complex:
    """``Tr[op rho^{(x)copies}]``."""
    return complex(np.einsum("ij,ji->", op, tensor_power(as_matrix(rho), copies)))


def dump_w4(w: WitnessOperator, path: str | Path) -> None:
    """Binary dump: magic header, then little-endian float64 (re, im) pairs, row-major."""
    data = np.empty((W4_DIM, W4_DIM, 2), dtype="<f8")
    data[..., 0] = w.matrix.real
    data[..., 1] = w.matrix.imag
    with open(path, "wb") as fh:
        fh.write(W4_MAGIC)
        fh.write(data.tobytes(order="C"))


def load_w4(path: str | Path) -> WitnessOperator:
    raw = Path(path).read_bytes()
    if raw[:8] != W4_MAGIC:
        raise ValueError("not a W4 dump (bad magic header)")
    body = np.frombuffer(raw[8:], dtype="<f8")
    if body.size != W4_DIM * W4_DIM * 2:
        raise ValueError(f"W4 dump has {body.size} float64 values, expected {W4_DIM * W4_DIM * 2}")
    data = body.reshape(W4_DIM, W4_DIM, 2)
    return WitnessOperator(data[..., 0] + 1j * data[..., 1])
