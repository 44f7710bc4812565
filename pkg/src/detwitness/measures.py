"""Entanglement quantities: negativity, concurrence, pi_d, G-concurrence and their bounds."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .linalg import eigvalsh, partial_transpose
from .states import DensityMatrix, PureState, as_matrix, dims_of

DET_CLAMP = 1e-12

_SY = np.array([[0, -1j], [1j, 0]])
_SYSY = np.kron(_SY, _SY)


def pt_spectrum(rho, dims=None) -> np.ndarray:
    dims = dims_of(rho, dims)
    return eigvalsh(partial_transpose(as_matrix(rho), dims, "B"))


def pt_det(rho, dims=None) -> float:
    """``det rho^Gamma`` as the product of partially transposed eigenvalues."""
    return float(np.prod(pt_spectrum(rho, dims)))


def negativity(rho, dims=None) -> float:
    """Twice the magnitude of the negative part of the PT spectrum, so N(Bell) = 1."""
    lam = pt_spectrum(rho, dims)
    return float(-2 * lam[lam < 0].sum()) + 0.0


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit state.

    Uses the singular values of ``W^T (sy x sy) W`` with ``rho = W W^dagger``; these
    are the square roots of the eigenvalues of ``rho rho~`` without the loss of
    precision that taking square roots of tiny eigenvalues would cause.
    """
    m = as_matrix(rho)
    if m.shape != (4, 4) or dims_of(rho, (2, 2)) != (2, 2):
        raise ValueError("concurrence is defined here for two-qubit states only")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    w = np.where(w > 1e-14, w, 0.0)
    root = v * np.sqrt(w)
    s = np.linalg.svd(root.T @ _SYSY @ root, compute_uv=False)
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))


def pi_d(rho, d: int | None = None) -> float:
    """``d |det rho^Gamma|^{1/(2d)}`` for NPT determinants, 0 otherwise."""
    dims = dims_of(rho)
    if len(dims) != 2 or dims[0] != dims[1]:
        raise ValueError(f"pi_d needs a d x d state, got dims {dims}")
    if d is None:
        d = dims[0]
    elif d != dims[0]:
        raise ValueError(f"d={d} does not match state dims {dims}")
    det = pt_det(rho, dims)
    if det >= -DET_CLAMP:
        return 0.0
    return float(d * abs(det) ** (1 / (2 * d)))


def pi2(rho) -> float:
    return pi_d(rho, 2)


def g_concurrence_pure(psi: PureState, d: int | None = None) -> float:
    """``d |det A|^{2/d}`` for the coefficient matrix A of a d x d pure state."""
    da, db = psi.dims
    if da != db:
        raise ValueError(f"G-concurrence needs a d x d state, got dims {psi.dims}")
    if d is not None and d != da:
        raise ValueError(f"d={d} does not match state dims {psi.dims}")
    return float(da * abs(np.linalg.det(psi.coefficient_matrix())) ** (2 / da))


def eq6_bound(n: float) -> float:
    """Upper bound on pi_2 from a negativity or concurrence value."""
    return float((n * (n + 2) ** 3 / 27) ** 0.25)


def half_n_plus_one_bound(n: float) -> float:
    return (n + 1) / 2


@dataclass(frozen=True)
class MeasureReport:
    negativity: float
    concurrence: float
    pi2: float
    lower_bound_eq6: float
    upper_bound_fig1: float

    def as_dict(self) -> dict:
        return asdict(self)

    def chain_slacks(self) -> dict[str, float]:
        """Slack of every inequality in the bound chain; all are >= 0 up to round-off."""
        return {
            "C - N": self.concurrence - self.negativity,
            "pi2 - C": self.pi2 - self.concurrence,
            "eq6(N) - pi2": self.lower_bound_eq6 - self.pi2,
            "eq6(C) - eq6(N)": eq6_bound(self.concurrence) - self.lower_bound_eq6,
            "(N+1)/2 - pi2": self.upper_bound_fig1 - self.pi2,
        }


def bound_report(rho) -> MeasureReport:
    n = negativity(rho, (2, 2))
    return MeasureReport(
        negativity=n,
        concurrence=concurrence(rho),
        pi2=pi2(rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)),
        lower_bound_eq6=eq6_bound(n),
        upper_bound_fig1=half_n_plus_one_bound(n),
    )


def filter_factor(rho, f_a: np.ndarray, f_b: np.ndarray) -> float:
    """``|det(A) det(B)| / Tr[(A^dag A x B^dag B) rho]``, the scaling of pi_2 and C under filtering."""
    m = as_matrix(rho)
    g = np.kron(f_a.conj().T @ f_a, f_b.conj().T @ f_b)
    return float(abs(np.linalg.det(f_a) * np.linalg.det(f_b)) / np.trace(g @ m).real)


# --- twirling ------------------------------------------------------------

_SWAP = np.eye(4)[[0, 2, 1, 3]]
_P_SYM = (np.eye(4) + _SWAP) / 2
_P_ANTI = (np.eye(4) - _SWAP) / 2


def werner_twirl(rho) -> DensityMatrix:
    """Exact ``U x U`` twirl: projection onto span{P_sym, P_anti}."""
    m = as_matrix(rho)
    t_anti = np.trace(_P_ANTI @ m).real
    return DensityMatrix((1 - t_anti) * _P_SYM / 3 + t_anti * _P_ANTI)


@dataclass(frozen=True)
class TwirlIncrease:
    probabilities: tuple[float, float, float, float]
    pi2_before: float
    pi2_after: float


def find_twirl_increase(rng: np.random.Generator, max_tries: int = 10_000) -> TwirlIncrease:
    """Search Bell-diagonal entangled states for one whose twirl raises pi_2."""
    from .states import bell_diagonal

    for _ in range(max_tries):
        p = rng.dirichlet(np.ones(4))
        # bell_diagonal puts the singlet first; the U x U twirl preserves its weight
        p = p[np.argsort(-p)]
        if p[0] <= 0.5:
            continue
        rho = bell_diagonal(*p)
        before, after = pi2(rho), pi2(werner_twirl(rho))
        if after > before:
            return TwirlIncrease(tuple(float(x) for x in p), before, after)
    raise RuntimeError("no pi_2-increasing twirl found")
