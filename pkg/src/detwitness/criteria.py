"""Determinant-based separability tests.

Positive maps on subsystem B are given by their action matrix ``L`` on
column-stacked operators: ``vec(Lambda(X)) = L @ vec(X)`` with
``vec(X) = X.reshape(-1, order="F")``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .linalg import det_hermitian, eigvalsh, partial_transpose
from .measures import negativity
from .states import DensityMatrix, as_matrix, bell_state, dims_of, embed

DECISION_TOL = 1e-12


class Decision(str, enum.Enum):
    SEPARABLE = "SEPARABLE"
    ENTANGLED = "ENTANGLED"


class Criterion(str, enum.Enum):
    PPT_DET = "PPT_DET"
    REDUCTION_DET = "REDUCTION_DET"
    MAP_DET = "MAP_DET"
    CIRCUIT = "CIRCUIT"


@dataclass(frozen=True)
class Verdict:
    decision: Decision
    det_value: float
    criterion: Criterion
    witness_eigenvalue: float
    note: str = ""

    @property
    def entangled(self) -> bool:
        return self.decision is Decision.ENTANGLED


def decide(det_value: float, tol: float = DECISION_TOL) -> Decision:
    return Decision.ENTANGLED if det_value < -tol else Decision.SEPARABLE


def _two_qubit(rho) -> np.ndarray:
    if dims_of(rho, (2, 2)) != (2, 2):
        raise ValueError("expected a two-qubit state")
    m = as_matrix(rho)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {m.shape}")
    return m


def det_ppt_test(rho) -> Verdict:
    """Two-qubit separability from the sign of ``det rho^Gamma``."""
    pt = partial_transpose(_two_qubit(rho), (2, 2), "B")
    det = det_hermitian(pt)
    return Verdict(decide(det), det, Criterion.PPT_DET, float(eigvalsh(pt)[0]))


def ppt_min_eig_decision(rho, dims=(2, 2), tol: float = DECISION_TOL) -> Decision:
    lam = eigvalsh(partial_transpose(as_matrix(rho), dims_of(rho, dims), "B"))[0]
    return Decision.ENTANGLED if lam < -tol else Decision.SEPARABLE


def reduction_apply(rho) -> np.ndarray:
    """``[I x Lambda_r](rho) = rho_A x I_d - rho`` for a 2 x d state."""
    dims = dims_of(rho)
    if len(dims) != 2 or dims[0] != 2:
        raise ValueError(f"reduction test needs a 2 x d state, got dims {dims}")
    m = as_matrix(rho)
    rho_a = np.einsum("ijkj->ik", m.reshape(dims[0], dims[1], dims[0], dims[1]))
    return np.kron(rho_a, np.eye(dims[1])) - m


def reduction_det_test(rho, singular_tol: float = 1e-12) -> Verdict:
    mapped = reduction_apply(rho)
    lam = eigvalsh(mapped)
    rho_a = DensityMatrix(as_matrix(rho), dims_of(rho), validate=False).reduced("A")
    if np.linalg.eigvalsh(rho_a)[0] < singular_tol:
        # a singular rho_A on a qubit means a pure marginal, hence a product state
        return Verdict(Decision.SEPARABLE, float(np.prod(lam)), Criterion.REDUCTION_DET, float(lam[0]),
                       note="singular rho_A: product state")
    det = float(np.prod(lam))
    return Verdict(decide(det), det, Criterion.REDUCTION_DET, float(lam[0]))


# --- general positive maps ------------------------------------------------

def _vec(x: np.ndarray) -> np.ndarray:
    return x.reshape(-1, order="F")


def _unvec(v: np.ndarray, d: int) -> np.ndarray:
    return v.reshape(d, d, order="F")


def identity_map(d: int) -> np.ndarray:
    return np.eye(d * d, dtype=complex)


def transpose_map(d: int) -> np.ndarray:
    m = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            # vec index of E_ij is i + d j
            m[j + d * i, i + d * j] = 1
    return m


def reduction_map(d: int) -> np.ndarray:
    vi = _vec(np.eye(d)).astype(complex)
    return np.outer(vi, vi) - np.eye(d * d)


def choi_map() -> np.ndarray:
    """Choi's positive, indecomposable map on 3 x 3 matrices.

    ``X -> diag(2x11 + x33, 2x22 + x11, 2x33 + x22) - X``.
    """
    cols = []
    for j in range(3):
        for i in range(3):
            x = np.zeros((3, 3))
            x[i, j] = 1
            cols.append(_vec(_choi(x)))
    return np.array(cols, dtype=complex).T


def _choi(x: np.ndarray) -> np.ndarray:
    d = np.diag(x)
    return np.diag([2 * d[0] + d[2], 2 * d[1] + d[0], 2 * d[2] + d[1]]) - x


def apply_map_to_matrix(action: np.ndarray, x: np.ndarray) -> np.ndarray:
    d = x.shape[0]
    return _unvec(action @ _vec(x), d)


def preserves_hermiticity(action: np.ndarray, tol: float = 1e-12) -> bool:
    d = int(round(np.sqrt(action.shape[0])))
    for i in range(d):
        for j in range(d):
            e_ij = np.zeros((d, d))
            e_ij[i, j] = 1
            if np.max(np.abs(apply_map_to_matrix(action, e_ij.T) - apply_map_to_matrix(action, e_ij).conj().T)) > tol:
                return False
    return True


def apply_map_on_b(rho, action: np.ndarray) -> np.ndarray:
    """``[I x Lambda](rho)`` with Lambda given by its action matrix."""
    da, db = dims_of(rho)
    action = np.asarray(action, dtype=complex)
    if action.shape != (db * db, db * db):
        raise ValueError(f"map action {action.shape} does not act on {db}x{db} matrices")
    if not preserves_hermiticity(action):
        raise ValueError("map does not preserve Hermiticity")
    blocks = as_matrix(rho).reshape(da, db, da, db).transpose(0, 2, 1, 3)
    out = np.empty_like(blocks)
    for i in range(da):
        for j in range(da):
            out[i, j] = apply_map_to_matrix(action, blocks[i, j])
    return out.transpose(0, 2, 1, 3).reshape(da * db, da * db)


def map_det(rho, action: np.ndarray) -> float:
    """``det [I x Lambda](rho)``."""
    return map_det_test(rho, action).det_value


def map_det_test(rho, action: np.ndarray) -> Verdict:
    mapped = apply_map_on_b(rho, action)
    mapped = (mapped + mapped.conj().T) / 2
    lam = eigvalsh(mapped)
    det = float(np.prod(lam)) + 0.0
    return Verdict(decide(det), det, Criterion.MAP_DET, float(lam[0]))


@dataclass(frozen=True)
class Counterexample:
    state: DensityMatrix
    map_det: float
    negativity: float
    two_qubit_det: float


def converse_counterexample() -> Counterexample:
    """A Bell state padded into 3 x 3: non-negative map determinant, yet entangled."""
    bell = bell_state()
    big = embed(bell, (3, 3))
    return Counterexample(
        state=big,
        map_det=map_det(big, transpose_map(3)),
        negativity=negativity(big),
        two_qubit_det=det_ppt_test(bell).det_value,
    )
