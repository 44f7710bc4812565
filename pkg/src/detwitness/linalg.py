"""Dense complex linear algebra shared by every other module.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
Multi-copy operators use the global slot ordering ``(A1, B1, A2, B2, ...)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
IMAG_TOL = 1e-10


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def _require_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, tol):
        raise ValueError("matrix is not Hermitian within %g" % tol)
    return m


def as_real(value: complex, what: str = "value") -> float:
    """Drop a negligible imaginary part; refuse anything above ``IMAG_TOL``."""
    value = complex(value)
    im = abs(value.imag)
    if im > IMAG_TOL:
        raise ValueError(f"{what} has imaginary part {value.imag:.3e}")
    if im > HERMITIAN_TOL:
        log.warning("%s: truncating imaginary part %.3e", what, value.imag)
    return value.real


def kron(a: np.ndarray, b: np.ndarray, *rest: np.ndarray) -> np.ndarray:
    out = np.kron(a, b)
    for m in rest:
        out = np.kron(out, m)
    return out


def _check_bipartite(m: np.ndarray, dims: Sequence[int]) -> tuple[int, int]:
    if len(dims) != 2:
        raise ValueError(f"expected two subsystem dimensions, got {tuple(dims)}")
    da, db = int(dims[0]), int(dims[1])
    if m.ndim != 2 or m.shape != (da * db, da * db):
        raise ValueError(f"matrix shape {m.shape} does not match dims ({da}, {db})")
    return da, db


def partial_transpose(m: np.ndarray, dims: Sequence[int] = (2, 2), subsystem: str = "B") -> np.ndarray:
    """Transpose the indices of one subsystem of a bipartite operator."""
    m = np.asarray(m)
    da, db = _check_bipartite(m, dims)
    t = m.reshape(da, db, da, db)
    if subsystem == "B":
        t = t.transpose(0, 3, 2, 1)
    elif subsystem == "A":
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return t.reshape(da * db, da * db)


def partial_trace(m: np.ndarray, dims: Sequence[int] = (2, 2), keep: str = "A") -> np.ndarray:
    m = np.asarray(m)
    da, db = _check_bipartite(m, dims)
    t = m.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


@dataclass(frozen=True)
class Spectrum:
    """Ascending real eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __iter__(self):
        return iter((self.eigenvalues, self.eigenvectors))


def herm_eig(m: np.ndarray) -> Spectrum:
    m = _require_hermitian(m)
    # symmetrize so LAPACK sees an exactly Hermitian input
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return Spectrum(w, v)


def eigvalsh(m: np.ndarray) -> np.ndarray:
    m = _require_hermitian(m)
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


def det_hermitian(m: np.ndarray, method: str = "eig") -> float:
    """Determinant of a Hermitian matrix.

    ``method="eig"`` multiplies eigenvalues (default, stable near singularity);
    ``method="lu"`` goes through an LU factorisation and is kept as a cross-check.
    """
    m = _require_hermitian(m)
    if method == "eig":
        return float(np.prod(eigvalsh(m))) + 0.0  # no negative zero
    if method == "lu":
        lu, piv = scipy.linalg.lu_factor(m)
        sign = (-1) ** int(np.sum(piv != np.arange(len(piv))))
        return as_real(sign * np.prod(np.diag(lu)), "LU determinant")
    raise ValueError(f"unknown method {method!r}")


def subsystem_permutation(perm: Sequence[int], d: int) -> np.ndarray:
    """Permutation matrix on ``len(perm)`` slots of local dimension ``d``.

    Output slot ``j`` receives the state of input slot ``perm[j]``:
    ``P |x_0 ... x_{n-1}> = |x_perm[0] ... x_perm[n-1]>``.
    """
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm!r} is not a permutation")
    size = d**n
    idx = np.arange(size).reshape((d,) * n)
    # source index for every output basis state
    src = idx.transpose(perm).reshape(-1)
    p = np.zeros((size, size))
    p[np.arange(size), src] = 1.0
    return p


def cyclic_shift(k: int, d: int) -> np.ndarray:
    """``V|phi_1>...|phi_k> = |phi_k>|phi_1>...|phi_{k-1}>`` on ``k`` copies of C^d."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return subsystem_permutation([(j - 1) % k for j in range(k)], d)


def embed_operator(op: np.ndarray, targets: Sequence[int], n_slots: int, d: int = 2) -> np.ndarray:
    """Act with ``op`` on the listed slots (in that order), identity elsewhere."""
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise ValueError("target slots must be distinct")
    if any(t < 0 or t >= n_slots for t in targets):
        raise IndexError(f"target slots {targets} out of range for {n_slots} slots")
    m = len(targets)
    op = np.asarray(op, dtype=complex)
    if op.shape != (d**m, d**m):
        raise ValueError(f"operator shape {op.shape} does not act on {m} slots of dim {d}")
    rest = [s for s in range(n_slots) if s not in targets]
    full = np.kron(op, np.eye(d ** len(rest)))
    # p maps the natural ordering to (targets, rest)
    p = subsystem_permutation(targets + rest, d)
    return p.T @ full @ p


COPY_ORDER = ("A1", "B1", "A2", "B2", "A3", "B3", "A4", "B4")


def copy_slots(side: str, copy_indices: Sequence[int]) -> list[int]:
    """Slot numbers for zero-based copy indices under the (A1,B1,...,A4,B4) ordering."""
    if side == "A":
        return [2 * c for c in copy_indices]
    if side == "B":
        return [2 * c + 1 for c in copy_indices]
    if side == "both":
        return [s for c in copy_indices for s in (2 * c, 2 * c + 1)]
    raise ValueError(f"side must be 'A', 'B' or 'both', got {side!r}")


def embed_on_copies(op: np.ndarray, side: str, copy_indices: Sequence[int], total_copies: int = 4) -> np.ndarray:
    """Place ``op`` on the given copies of a two-qubit register.

    With ``side="both"`` the operator acts on ``(A_c, B_c)`` pairs in the order
    listed; with ``"A"`` or ``"B"`` only on that half of each listed copy.
    """
    if any(c < 0 or c >= total_copies for c in copy_indices):
        raise IndexError(f"copy indices {list(copy_indices)} out of range")
    return embed_operator(op, copy_slots(side, copy_indices), 2 * total_copies, 2)
