"""Named states, random ensembles, local filters, instruments and embeddings."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .linalg import HERMITIAN_TOL, is_hermitian, kron, partial_trace

TRACE_TOL = 1e-12
PSD_TOL = 1e-10
ZERO_PROB = 1e-14


class StateValidationError(ValueError):
    """Raised when a matrix violates one or more density-matrix invariants."""

    def __init__(self, failures: list[str]):
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))


class ZeroProbabilityError(ValueError):
    pass


def validation_failures(matrix: np.ndarray, dims: Sequence[int]) -> list[str]:
    """Names of every violated invariant (empty when the state is valid)."""
    failures = []
    m = np.asarray(matrix)
    size = int(np.prod(dims)) if len(dims) else 0
    if any(int(d) < 1 for d in dims):
        failures.append(f"dims: all subsystem dimensions must be positive, got {list(dims)}")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        failures.append(f"shape: matrix must be square, got {m.shape}")
        return failures
    if m.shape[0] != size:
        failures.append(f"dims: matrix dimension {m.shape[0]} != product of dims {size}")
    if not np.all(np.isfinite(m)):
        failures.append("finite: matrix has non-finite entries")
        return failures
    if not is_hermitian(m, HERMITIAN_TOL):
        dev = np.max(np.abs(m - m.conj().T))
        failures.append(f"hermitian: max |M - M^dagger| = {dev:.3e} > {HERMITIAN_TOL:g}")
        return failures
    tr = np.trace(m).real
    if abs(tr - 1) > TRACE_TOL:
        failures.append(f"trace: trace = {tr!r}, expected 1 within {TRACE_TOL:g}")
    lam_min = np.linalg.eigvalsh((m + m.conj().T) / 2)[0]
    if lam_min < -PSD_TOL:
        failures.append(f"psd: minimum eigenvalue {lam_min:.3e} < -{PSD_TOL:g}")
    return failures


@dataclass(frozen=True)
class DensityMatrix:
    """A validated density matrix on ``len(dims)`` subsystems."""

    matrix: np.ndarray
    dims: tuple[int, ...] = (2, 2)
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if self.validate:
            failures = validation_failures(m, self.dims)
            if failures:
                raise StateValidationError(failures)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def reduced(self, keep: str = "A") -> np.ndarray:
        return partial_trace(self.matrix, self.dims, keep)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    dims: tuple[int, ...] = (2, 2)

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if a.size != int(np.prod(self.dims)):
            raise ValueError(f"{a.size} amplitudes do not match dims {self.dims}")
        if abs(np.linalg.norm(a) - 1) > 1e-12:
            raise ValueError(f"amplitudes have norm {np.linalg.norm(a)!r}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    def coefficient_matrix(self) -> np.ndarray:
        """The dA x dB matrix A with |psi> = sum_ij A_ij |i>|j>."""
        return self.amplitudes.reshape(self.dims[0], self.dims[1])

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


def as_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def dims_of(rho, default: Sequence[int] | None = None) -> tuple[int, ...]:
    if isinstance(rho, DensityMatrix):
        return rho.dims
    if default is not None:
        return tuple(default)
    n = np.asarray(rho).shape[0]
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise ValueError(f"cannot infer square dims for a {n}x{n} matrix")
    return (d, d)


# --- RNG -----------------------------------------------------------------

def make_rng(seed: int | None = None) -> np.random.Generator:
    return np.random.default_rng(seed)


def split_rng(rng: np.random.Generator, n: int) -> list[np.random.Generator]:
    """Independent child streams, for parallel Monte-Carlo workers."""
    return rng.spawn(n)


# --- named states --------------------------------------------------------

_S = 1 / np.sqrt(2)
BELL_VECTORS = {
    "phi+": np.array([_S, 0, 0, _S], dtype=complex),
    "phi-": np.array([_S, 0, 0, -_S], dtype=complex),
    "psi+": np.array([0, _S, _S, 0], dtype=complex),
    "psi-": np.array([0, _S, -_S, 0], dtype=complex),
}
# ordering used by bell_diagonal
BELL_ORDER = ("psi-", "psi+", "phi-", "phi+")


def bell_state(which: str = "psi-") -> DensityMatrix:
    v = BELL_VECTORS[which]
    return DensityMatrix(np.outer(v, v.conj()))


def werner(p: float) -> DensityMatrix:
    """``p |psi-><psi-| + (1-p) I/4``."""
    if not 0 <= p <= 1:
        raise ValueError(f"werner parameter must lie in [0, 1], got {p}")
    v = BELL_VECTORS["psi-"]
    return DensityMatrix(p * np.outer(v, v.conj()) + (1 - p) * np.eye(4) / 4)


def bell_diagonal(p1: float, p2: float, p3: float, p4: float) -> DensityMatrix:
    """Mixture of the Bell states in :data:`BELL_ORDER` with the given weights."""
    probs = np.array([p1, p2, p3, p4], dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-12:
        raise ValueError(f"invalid probability vector {probs.tolist()}")
    m = sum(p * np.outer(BELL_VECTORS[k], BELL_VECTORS[k].conj()) for p, k in zip(probs, BELL_ORDER))
    return DensityMatrix(m)


def maximally_mixed(dims: Sequence[int] = (2, 2)) -> DensityMatrix:
    n = int(np.prod(dims))
    return DensityMatrix(np.eye(n) / n, dims)


def product_state(rho_a, rho_b) -> DensityMatrix:
    a, b = as_matrix(rho_a), as_matrix(rho_b)
    return DensityMatrix(kron(a, b), (a.shape[0], b.shape[0]))


# --- random ensembles ----------------------------------------------------

def ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_density(d_total: int, rank: int | None = None, rng: np.random.Generator | None = None,
                   dims: Sequence[int] | None = None) -> DensityMatrix:
    """Hilbert-Schmidt (Ginibre-induced) random state ``G G^dagger / Tr``."""
    rng = make_rng() if rng is None else rng
    rank = d_total if rank is None else rank
    if not 1 <= rank <= d_total:
        raise ValueError(f"rank must lie in [1, {d_total}], got {rank}")
    if dims is None:
        r = int(round(np.sqrt(d_total)))
        dims = (r, r) if r * r == d_total and r > 1 else (d_total,)
    g = ginibre(d_total, rank, rng)
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.trace(m).real, dims)


def random_unitary(d: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Haar unitary from the QR decomposition of a Ginibre matrix."""
    rng = make_rng() if rng is None else rng
    q, r = np.linalg.qr(ginibre(d, d, rng))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_pure(dims: Sequence[int] = (2, 2), rng: np.random.Generator | None = None) -> PureState:
    d = int(np.prod(dims))
    u = random_unitary(d, rng)
    return PureState(u[:, 0], tuple(dims))


def random_product_mixture(n_terms: int = 20, dims: Sequence[int] = (2, 2),
                           rng: np.random.Generator | None = None) -> DensityMatrix:
    """Convex mixture of random product states, separable by construction."""
    rng = make_rng() if rng is None else rng
    da, db = dims
    w = rng.dirichlet(np.ones(n_terms))
    m = np.zeros((da * db, da * db), dtype=complex)
    for wi in w:
        a = random_density(da, rng=rng, dims=(da,)).matrix
        b = random_density(db, rng=rng, dims=(db,)).matrix
        m += wi * np.kron(a, b)
    return DensityMatrix(m, dims)


# --- filters and instruments ---------------------------------------------

def apply_filter(rho: DensityMatrix, f_a: np.ndarray, f_b: np.ndarray) -> tuple[DensityMatrix, float]:
    """Local filtering ``(f_a x f_b) rho (f_a x f_b)^dagger``, renormalised.

    Returns the filtered state and the success probability (its pre-normalisation trace).
    """
    f_a, f_b = np.asarray(f_a, dtype=complex), np.asarray(f_b, dtype=complex)
    da, db = rho.dims
    if f_a.shape != (da, da) or f_b.shape != (db, db):
        raise ValueError(f"filters {f_a.shape}, {f_b.shape} do not match dims {rho.dims}")
    f = np.kron(f_a, f_b)
    out = f @ rho.matrix @ f.conj().T
    p = np.trace(out).real
    if p <= ZERO_PROB:
        raise ZeroProbabilityError(f"filter succeeds with probability {p:.3e}")
    out = (out + out.conj().T) / 2
    return DensityMatrix(out / p, rho.dims), float(p)


def normalizing_filter(rho: DensityMatrix) -> np.ndarray:
    """The filter ``(rho_A^{-1}/2)^{1/2}`` that maps rho_A to the maximally mixed state."""
    rho_a = rho.reduced("A")
    return scipy.linalg.sqrtm(np.linalg.inv(rho_a) / 2)


@dataclass(frozen=True)
class LocalInstrument:
    """Single-Kraus-per-outcome instrument acting on subsystem B."""

    kraus_b: tuple[np.ndarray, ...]

    def __post_init__(self):
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus_b)
        if not ks:
            raise ValueError("instrument needs at least one Kraus operator")
        d = ks[0].shape[0]
        for k in ks:
            if k.shape != (d, d):
                raise ValueError("Kraus operators must be square and of equal size")
        total = sum(k.conj().T @ k for k in ks)
        top = np.linalg.eigvalsh((total + total.conj().T) / 2)[-1]
        if top > 1 + 1e-10:
            raise ValueError(f"sum M^dagger M exceeds identity (largest eigenvalue {top:.6g})")
        object.__setattr__(self, "kraus_b", ks)

    @property
    def dim(self) -> int:
        return self.kraus_b[0].shape[0]


def apply_instrument(rho: DensityMatrix, inst: LocalInstrument) -> list[tuple[float, DensityMatrix]]:
    """Outcomes ``(p_i, rho_i)`` of ``(I x M_i) rho (I x M_i)^dagger``; null outcomes dropped."""
    da, db = rho.dims
    if inst.dim != db:
        raise ValueError(f"instrument acts on dimension {inst.dim}, subsystem B has {db}")
    outcomes = []
    eye = np.eye(da)
    for m in inst.kraus_b:
        k = np.kron(eye, m)
        out = k @ rho.matrix @ k.conj().T
        p = np.trace(out).real
        if p <= ZERO_PROB:
            continue
        out = (out + out.conj().T) / 2
        outcomes.append((float(p), DensityMatrix(out / p, rho.dims)))
    return outcomes


def random_two_outcome_instrument(d: int, rng: np.random.Generator | None = None) -> LocalInstrument:
    """``{M, U (I - M^dagger M)^{1/2}}`` with a random contraction M and Haar U.

    The pair is trace preserving: the Kraus operators' ``M^dagger M`` sum to the identity.
    """
    rng = make_rng() if rng is None else rng
    g = ginibre(d, d, rng)
    m = g / np.linalg.norm(g, 2) * rng.uniform(0.05, 1.0)
    rest = np.eye(d) - m.conj().T @ m
    w, v = np.linalg.eigh((rest + rest.conj().T) / 2)
    root = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    return LocalInstrument((m, random_unitary(d, rng) @ root))


def embed(rho: DensityMatrix, new_dims: Sequence[int]) -> DensityMatrix:
    """Pad each subsystem with zero rows/columns up to ``new_dims``."""
    new_dims = tuple(int(d) for d in new_dims)
    if len(new_dims) != len(rho.dims) or any(n < o for n, o in zip(new_dims, rho.dims)):
        raise ValueError(f"cannot embed dims {rho.dims} into {new_dims}")
    t = rho.matrix.reshape(rho.dims + rho.dims)
    out = np.zeros(new_dims + new_dims, dtype=complex)
    out[tuple(slice(0, d) for d in rho.dims * 2)] = t
    size = int(np.prod(new_dims))
    return DensityMatrix(out.reshape(size, size), new_dims)
