"""Statevector simulation of the single-control-qubit entanglement network.

Register layout (qubit 0 is the most significant bit)::

    control, sel1, sel2, A1, B1, A2, B2, A3, B3, A4, B4

The control starts in |+>, the two selector qubits in |phi>, and for each
selector basis state a signed swap combination acts on the four copies,
conditioned on the control. A final Hadamard maps the interference term to
``<sigma_z>`` on the control, which equals ``(24 det rho^Gamma - 1) / 23``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .criteria import Criterion, Decision, Verdict
from .linalg import embed_on_copies
from .states import as_matrix
from .witness import copy_swap, moment_operator_pt, tensor_power

QUBIT_LABELS = ("control", "sel1", "sel2", "A1", "B1", "A2", "B2", "A3", "B3", "A4", "B4")
N_QUBITS = len(QUBIT_LABELS)
CONTROL, SEL1, SEL2 = 0, 1, 2
COPY_QUBITS = tuple(range(3, 11))
THRESHOLD = -1 / 23
DECISION_TOL = 1e-12

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class RegisterState:
    amplitudes: np.ndarray
    qubit_labels: tuple[str, ...] = QUBIT_LABELS

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = len(self.qubit_labels)
        if a.size != 2**n:
            raise ValueError(f"{a.size} amplitudes for {n} qubits")
        if abs(np.linalg.norm(a) - 1) > 1e-10:
            raise ValueError(f"register state has norm {np.linalg.norm(a)!r}")
        object.__setattr__(self, "amplitudes", a)

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_labels)

    @classmethod
    def zero(cls, labels: Sequence[str] = QUBIT_LABELS) -> "RegisterState":
        a = np.zeros(2 ** len(labels), dtype=complex)
        a[0] = 1
        return cls(a, tuple(labels))


def _check_unitary(gate: np.ndarray, tol: float = 1e-10) -> None:
    d = gate.shape[0]
    if gate.shape != (d, d) or np.max(np.abs(gate.conj().T @ gate - np.eye(d))) > tol:
        raise ValueError("gate is not unitary")


def _apply(amps: np.ndarray, n: int, gate: np.ndarray, targets: Sequence[int],
           controls: Mapping[int, int] | None = None, inplace: bool = False) -> np.ndarray:
    """Apply ``gate`` to ``targets`` of a (2^n,) or (2^n, batch) amplitude array."""
    controls = dict(controls or {})
    targets = list(targets)
    m = len(targets)
    if len(set(targets)) != m:
        raise ValueError("target qubits must be distinct")
    if set(targets) & set(controls):
        raise ValueError("control and target qubits overlap")
    if any(q < 0 or q >= n for q in [*targets, *controls]):
        raise IndexError("qubit index out of range")
    if gate.shape != (2**m, 2**m):
        raise ValueError(f"gate shape {gate.shape} does not act on {m} qubits")
    batched = amps.ndim == 2
    t = (amps if inplace else np.array(amps, dtype=complex)).reshape((2,) * n + (-1,))
    index = tuple(controls.get(q, slice(None)) for q in range(n))
    sub = t[index]
    # axes of sub after the controlled axes are removed
    free = [q for q in range(n) if q not in controls]
    axes = [free.index(q) for q in targets]
    moved = np.moveaxis(sub, axes, range(m))
    shape = moved.shape
    flat = moved.reshape(2**m, -1)
    if np.count_nonzero(gate) == gate.shape[0]:
        # monomial (signed permutation) gate: gather instead of a dense product
        src = np.argmax(gate != 0, axis=1)
        out = (gate[np.arange(gate.shape[0]), src][:, None] * flat[src]).reshape(shape)
    else:
        out = (gate @ flat).reshape(shape)
    t[index] = np.moveaxis(out, range(m), axes)
    return t.reshape(2**n, -1) if batched else t.reshape(-1)


def apply_gate(state: RegisterState, gate: np.ndarray, targets: Sequence[int]) -> RegisterState:
    gate = np.asarray(gate, dtype=complex)
    _check_unitary(gate)
    return RegisterState(_apply(state.amplitudes, state.n_qubits, gate, targets), state.qubit_labels)


def controlled_apply(state: RegisterState, gate: np.ndarray, control_pattern: Mapping[int, int],
                     targets: Sequence[int]) -> RegisterState:
    """Apply ``gate`` on ``targets`` only where each control qubit holds its given bit."""
    gate = np.asarray(gate, dtype=complex)
    _check_unitary(gate)
    return RegisterState(_apply(state.amplitudes, state.n_qubits, gate, targets, control_pattern),
                         state.qubit_labels)


# --- network --------------------------------------------------------------

BRANCHES = ("pi2_squared", "pi2", "pi3", "pi4")


@lru_cache(maxsize=None)
def branch_unitary(tag: str) -> np.ndarray:
    """Swap combination on the eight copy qubits for one selector branch."""
    if tag == "pi2_squared":
        u = copy_swap(0, 1) @ copy_swap(2, 3)
    elif tag == "pi2":
        u = copy_swap(2, 3)
    elif tag == "pi3":
        u = embed_on_copies(moment_operator_pt(3), "both", [0, 1, 2])
    elif tag == "pi4":
        u = moment_operator_pt(4).astype(complex)
    else:
        raise ValueError(f"unknown branch {tag!r}")
    u.setflags(write=False)
    return u


@dataclass(frozen=True)
class NetworkSpec:
    selector_amplitudes: tuple[float, ...] = tuple(np.sqrt(np.array([3, 6, 8, 6]) / 23))
    branch_signs: tuple[int, ...] = (1, -1, 1, -1)
    branch_tags: tuple[str, ...] = BRANCHES
    # copies (zero based) each branch touches; the rest see the identity
    branch_copies: tuple[tuple[int, ...], ...] = field(
        default=((0, 1, 2, 3), (2, 3), (0, 1, 2), (0, 1, 2, 3)))

    def __post_init__(self):
        w = np.asarray(self.selector_amplitudes, dtype=float)
        if w.shape != (4,) or np.any(w < 0) or abs(np.sum(w**2) - 1) > 1e-12:
            raise ValueError("selector amplitudes must be four non-negative reals of unit norm")
        if len(self.branch_signs) != 4 or any(s not in (1, -1) for s in self.branch_signs):
            raise ValueError("branch signs must be four values in {+1, -1}")

    @property
    def weights(self) -> np.ndarray:
        return np.asarray(self.selector_amplitudes) ** 2

    def branch_operator(self, i: int) -> np.ndarray:
        return self.branch_signs[i] * branch_unitary(self.branch_tags[i])


DEFAULT_NETWORK = NetworkSpec()


def selector_preparation(amplitudes: Sequence[float]) -> list[tuple[np.ndarray, dict, list]]:
    """Ry gates taking |00> to ``sum_ab amplitudes[2a+b] |ab>`` (amplitudes real, >= 0)."""
    a = np.asarray(amplitudes, dtype=float)
    top = np.hypot(a[0], a[1])
    bottom = np.hypot(a[2], a[3])
    ops = [(ry(2 * np.arctan2(bottom, top)), {}, [SEL1])]
    ops.append((ry(2 * np.arctan2(a[1], a[0])), {SEL1: 0}, [SEL2]))
    ops.append((ry(2 * np.arctan2(a[3], a[2])), {SEL1: 1}, [SEL2]))
    return ops


def network_operations(spec: NetworkSpec = DEFAULT_NETWORK) -> list[tuple[np.ndarray, dict, list]]:
    """Gate list ``(matrix, controls, targets)`` of the whole network."""
    ops = [(H, {}, [CONTROL])]
    ops += selector_preparation(spec.selector_amplitudes)
    for i in range(4):
        bits = {CONTROL: 1, SEL1: i >> 1, SEL2: i & 1}
        ops.append((spec.branch_operator(i), bits, list(COPY_QUBITS)))
    ops.append((H, {}, [CONTROL]))
    return ops


def _run_batch(columns: np.ndarray, spec: NetworkSpec) -> np.ndarray:
    """Evolve a batch of copy-register vectors; returns the final (2048, batch) amplitudes."""
    batch = columns.shape[1]
    amps = np.zeros((2**N_QUBITS, batch), dtype=complex)
    amps[: columns.shape[0]] = columns  # control = 0, selector = 00
    for gate, controls, targets in network_operations(spec):
        amps = _apply(amps, N_QUBITS, gate, targets, controls, inplace=True)
    norms = np.linalg.norm(amps, axis=0)
    if np.max(np.abs(norms - np.linalg.norm(columns, axis=0))) > 1e-10:
        raise ArithmeticError("norm not preserved by the network")
    return amps


def _sigma_z_per_column(amps: np.ndarray) -> np.ndarray:
    half = amps.shape[0] // 2
    p = np.abs(amps) ** 2
    return p[:half].sum(axis=0) - p[half:].sum(axis=0)


def _ensemble(rho) -> tuple[np.ndarray, np.ndarray]:
    """Weights and product eigenvectors of ``rho^{(x)4}``."""
    m = as_matrix(rho)
    if m.shape != (4, 4):
        raise ValueError("expected a two-qubit state")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    keep = w > 0
    w, v = w[keep], v[:, keep]
    weights = tensor_power(w[None, :], 4).real.reshape(-1)
    vectors = tensor_power(v, 4)
    return weights, vectors


def run_exact(rho, spec: NetworkSpec = DEFAULT_NETWORK) -> float:
    """Exact ``<sigma_z>`` on the control, averaging pure runs over the eigen-ensemble of rho^{(x)4}."""
    weights, vectors = _ensemble(rho)
    z = _sigma_z_per_column(_run_batch(vectors, spec))
    return float(np.dot(weights, z))


def run_density(rho, spec: NetworkSpec = DEFAULT_NETWORK) -> float:
    """Same quantity via explicit density-matrix evolution (slow cross-check)."""
    m = as_matrix(rho)
    # only the control=0, selector=00 block of the input is populated
    u = _run_batch(np.eye(256, dtype=complex), spec)
    out = u @ tensor_power(m, 4) @ u.conj().T
    diag = np.real(np.diag(out))
    half = diag.size // 2
    return float(diag[:half].sum() - diag[half:].sum())


def branch_contributions(rho, spec: NetworkSpec = DEFAULT_NETWORK) -> dict[str, float]:
    """Per-branch share of ``<sigma_z>``: run with the selector pinned to each basis state."""
    weights, vectors = _ensemble(rho)
    out = {}
    for i, tag in enumerate(spec.branch_tags):
        pinned = np.zeros(4)
        pinned[i] = 1.0
        single = NetworkSpec(tuple(pinned), spec.branch_signs, spec.branch_tags, spec.branch_copies)
        z = float(np.dot(weights, _sigma_z_per_column(_run_batch(vectors, single))))
        out[tag] = spec.weights[i] * z
    return out


def sigma_z_from_det(det: float) -> float:
    return (24 * det - 1) / 23


def det_from_sigma_z(z: float) -> float:
    return (23 * z + 1) / 24


@dataclass(frozen=True)
class ShotResult:
    estimate: float
    stderr: float
    outcomes: np.ndarray = field(repr=False)
    exact: float

    def __iter__(self):
        return iter((self.estimate, self.stderr))


def run_shots(rho, spec: NetworkSpec = DEFAULT_NETWORK, shots: int = 1000,
              rng: np.random.Generator | None = None, exact: float | None = None) -> ShotResult:
    """Sample ``shots`` control measurements with ``p(+1) = (1 + <sigma_z>)/2``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng() if rng is None else rng
    z = run_exact(rho, spec) if exact is None else exact
    p_plus = min(1.0, max(0.0, (1 + z) / 2))
    outcomes = np.where(rng.random(shots) < p_plus, 1, -1).astype(np.int8)
    est = float(outcomes.mean())
    stderr = float(np.sqrt(max(1 - est**2, 0.0) / shots))
    return ShotResult(est, stderr, outcomes, z)


@dataclass(frozen=True)
class CircuitVerdict(Verdict):
    sigma_z: float = float("nan")
    stderr: float = 0.0
    margin: float = float("inf")  # distance below the threshold, in stderr units


def verdict_from_sigma_z(z: float) -> CircuitVerdict:
    """Exact-mode verdict for a known control expectation value."""
    decision = Decision.ENTANGLED if z < THRESHOLD - DECISION_TOL else Decision.SEPARABLE
    return CircuitVerdict(decision, det_from_sigma_z(z), Criterion.CIRCUIT, float("nan"),
                          note="exact", sigma_z=z)


def verdict_from_circuit(rho, spec: NetworkSpec = DEFAULT_NETWORK, shots: int | None = None,
                         rng: np.random.Generator | None = None) -> CircuitVerdict:
    """Entangled iff the control's ``<sigma_z>`` falls below -1/23."""
    exact = run_exact(rho, spec)
    if not shots:
        return verdict_from_sigma_z(exact)
    res = run_shots(rho, spec, shots, rng, exact=exact)
    decision = Decision.ENTANGLED if res.estimate < THRESHOLD else Decision.SEPARABLE
    gap = THRESHOLD - res.estimate
    if res.stderr > 0:
        margin = gap / res.stderr
    else:
        margin = float("inf") if gap > 0 else float("-inf")
    return CircuitVerdict(decision, det_from_sigma_z(res.estimate), Criterion.CIRCUIT, float("nan"),
                          note=f"{shots} shots", sigma_z=res.estimate, stderr=res.stderr, margin=float(margin))


def write_shot_csv(path: str | Path, outcomes: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["shot_index", "outcome"])
        for i, o in enumerate(outcomes):
            writer.writerow([i, int(o)])
