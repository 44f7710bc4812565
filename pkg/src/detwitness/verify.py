"""Seeded Monte-Carlo verification suites.

Each suite returns a :class:`SuiteResult`; the CLI ``verify`` command and the
acceptance tests both drive them.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import circuit, criteria, measures, states, witness
from .linalg import det_hermitian, eigvalsh, partial_transpose

BAND = 1e-12


@dataclass
class SuiteResult:
    name: str
    passed: bool
    max_violation: float
    tolerance: float
    samples: int
    details: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: max violation {self.max_violation:.3e} "
                f"(tol {self.tolerance:g}, n={self.samples}, {self.seconds:.1f}s)")


def sample_states(rng: np.random.Generator, n: int, dims=(2, 2), ranks=None):
    """HS-random states, cycling through every rank so low-rank states are covered."""
    d = int(np.prod(dims))
    ranks = ranks or list(range(1, d + 1))
    for i in range(n):
        yield states.random_density(d, ranks[i % len(ranks)], rng, dims)


def _timed(fn: Callable[..., SuiteResult]) -> Callable[..., SuiteResult]:
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def witness_suite(samples: int = 1000, seed: int = 0) -> SuiteResult:
    """max |Tr[W rho^{(x)4}] - det rho^Gamma| over random states."""
    rng = states.make_rng(seed)
    w = witness.build_w4()
    worst = 0.0
    for rho in sample_states(rng, samples):
        worst = max(worst, abs(witness.witness_expectation(w, rho) - measures.pt_det(rho)))
    return SuiteResult("witness identity", worst <= 1e-10, worst, 1e-10, samples)


@_timed
def prop1_suite(samples: int = 10_000, separable_samples: int = 1000, seed: int = 0) -> SuiteResult:
    """Determinant sign vs minimum PT eigenvalue on random and product-mixture states."""
    rng = states.make_rng(seed)
    mismatches = boundary = entangled = 0
    pool = list(sample_states(rng, samples))
    mixtures = [states.random_product_mixture(20, (2, 2), rng) for _ in range(separable_samples)]
    mixture_flagged = 0
    for i, rho in enumerate(pool + mixtures):
        v = criteria.det_ppt_test(rho)
        if abs(v.det_value) <= BAND:
            boundary += 1
            continue
        ref = criteria.ppt_min_eig_decision(rho)
        mismatches += v.decision is not ref
        entangled += v.entangled
        if i >= len(pool) and v.entangled:
            mixture_flagged += 1
    total = samples + separable_samples
    details = [f"{total - boundary} decided, {boundary} in boundary band, {entangled} entangled, "
               f"{mismatches} mismatches, {mixture_flagged} product mixtures flagged"]
    ok = mismatches == 0 and mixture_flagged == 0
    return SuiteResult("det test matches PPT", ok, float(mismatches + mixture_flagged), 0, total, details)


@_timed
def fixed_points_suite(seed: int = 0) -> SuiteResult:
    bell = states.bell_state()
    checks = {
        "Bell det": (criteria.det_ppt_test(bell).det_value, -1 / 16, 1e-9),
        "Bell pi2": (measures.pi2(bell), 1.0, 1e-9),
        "Bell N": (measures.negativity(bell), 1.0, 1e-9),
        "Bell C": (measures.concurrence(bell), 1.0, 1e-9),
        "Bell sigma_z": (circuit.run_exact(bell), -5 / 46, 1e-9),
        "Werner(1/3) det": (criteria.det_ppt_test(states.werner(1 / 3)).det_value, 0.0, 1e-12),
        "Werner(1/3) sigma_z": (circuit.run_exact(states.werner(1 / 3)), -1 / 23, 1e-9),
    }
    worst, details, ok = 0.0, [], True
    for name, (got, want, tol) in checks.items():
        err = abs(got - want)
        ok &= err <= tol
        worst = max(worst, err)
        details.append(f"{name}: {got!r} (expected {want!r}, tol {tol:g})")
    return SuiteResult("fixed points", ok, worst, 1e-9, len(checks), details)


@_timed
def bounds_suite(samples: int = 10_000, seed: int = 0) -> SuiteResult:
    """N <= C <= pi2 <= eq6(N) <= eq6(C) and pi2 <= (N+1)/2."""
    rng = states.make_rng(seed)
    worst_slack = np.inf
    worst_name = ""
    for rho in sample_states(rng, samples):
        for name, slack in measures.bound_report(rho).chain_slacks().items():
            if slack < worst_slack:
                worst_slack, worst_name = slack, name
    viol = max(0.0, -worst_slack)
    return SuiteResult("bound chain", worst_slack >= -1e-10, viol, 1e-10, samples,
                       [f"minimum slack {worst_slack:.3e} ({worst_name})"])


@_timed
def prop2_suite(samples: int = 1000, seed: int = 0) -> SuiteResult:
    """sum_i p_i pi2(rho_i) - pi2(rho) over random trace-preserving two-outcome pure instruments."""
    rng = states.make_rng(seed)
    worst = -np.inf
    entangled, worst_ratio = 0, 0.0
    for rho in sample_states(rng, samples):
        inst = states.random_two_outcome_instrument(2, rng)
        outcomes = states.apply_instrument(rho, inst)
        avg = sum(p * measures.pi2(r) for p, r in outcomes)
        before = measures.pi2(rho)
        worst = max(worst, avg - before)
        if before > 0:
            entangled += 1
            worst_ratio = max(worst_ratio, avg / before)
    return SuiteResult("pi2 monotone under local filtering", worst <= 1e-10, max(worst, 0.0), 1e-10, samples,
                       [f"max sum p_i pi2(rho_i) - pi2(rho) = {worst:.3e}",
                        f"{entangled} entangled inputs, largest ratio after/before {worst_ratio:.6f}"])


@_timed
def reduction_suite(samples: int = 1000, seed: int = 0) -> SuiteResult:
    """Reduction determinant vs minimum eigenvalue on 2 x 3 states with nonsingular rho_A."""
    rng = states.make_rng(seed)
    mismatches = boundary = violating = used = 0
    while used < samples:
        rho = states.random_density(6, int(rng.integers(1, 7)), rng, (2, 3))
        if np.linalg.eigvalsh(rho.reduced("A"))[0] < 1e-12:
            continue
        used += 1
        lam = eigvalsh(criteria.reduction_apply(rho))
        det = float(np.prod(lam))
        if abs(det) <= BAND:
            boundary += 1
            continue
        violating += det < 0
        mismatches += (det < 0) != (lam[0] < 0)
    details = [f"{violating} violate the reduction criterion, {boundary} in boundary band, {mismatches} mismatches"]
    return SuiteResult("reduction criterion on 2x3", mismatches == 0, float(mismatches), 0, samples, details)


def random_unit_trace_hermitian(rng: np.random.Generator, d: int = 4) -> np.ndarray:
    g = states.ginibre(d, d, rng)
    h = (g + g.conj().T) / 2
    return h + (1 - np.trace(h).real) / d * np.eye(d)


@_timed
def newton_girard_suite(samples: int = 1000, seed: int = 0) -> SuiteResult:
    """Newton-Girard determinant of M^Gamma vs an LU determinant, including non-PSD M."""
    rng = states.make_rng(seed)
    worst = 0.0
    non_psd = 0
    for i in range(samples):
        # alternate indefinite matrices with genuine states
        m = random_unit_trace_hermitian(rng) if i % 2 == 0 else states.random_density(4, 1 + i % 4, rng).matrix
        non_psd += np.linalg.eigvalsh(m)[0] < 0
        ng = witness.newton_girard_det(witness.pt_moments(m))
        direct = det_hermitian(partial_transpose(m), method="lu")
        worst = max(worst, abs(ng - direct))
    return SuiteResult("Newton-Girard route", worst <= 1e-12, worst, 1e-12, samples,
                       [f"{non_psd} of {samples} inputs were not positive semidefinite"])


@_timed
def circuit_suite(samples: int = 1000, seed: int = 0, shots: int = 1_000_000) -> SuiteResult:
    rng = states.make_rng(seed)
    worst = 0.0
    mismatches = 0
    for rho in sample_states(rng, samples):
        z = circuit.run_exact(rho)
        det = measures.pt_det(rho)
        worst = max(worst, abs(z - circuit.sigma_z_from_det(det)))
        if abs(det) > BAND:
            v = circuit.verdict_from_sigma_z(z)
            mismatches += v.decision is not criteria.det_ppt_test(rho).decision
    bell = states.bell_state()
    shot = circuit.run_shots(bell, shots=shots, rng=rng)
    dev = abs(shot.estimate + 5 / 46)
    shot_ok = dev <= 4 * shot.stderr and shot.stderr < 2e-3
    details = [
        f"max |sigma_z - (24 det - 1)/23| = {worst:.3e}",
        f"threshold mismatches: {mismatches}",
        f"Bell {shots} shots: {shot.estimate:.6f} +- {shot.stderr:.2e} (exact {-5 / 46:.6f}, "
        f"{dev / shot.stderr:.2f} stderr)",
    ]
    ok = worst <= 1e-9 and mismatches == 0 and shot_ok
    return SuiteResult("circuit layer", ok, worst, 1e-9, samples, details)


@_timed
def converse_suite(seed: int = 0) -> SuiteResult:
    ce = criteria.converse_counterexample()
    ok = ce.map_det >= 0 and abs(ce.map_det) <= 1e-12 and abs(ce.negativity - 1) <= 1e-12
    return SuiteResult("map determinant converse counterexample", ok, abs(ce.map_det), 1e-12, 1,
                       [f"3x3 map determinant {ce.map_det!r}, negativity {ce.negativity!r}, "
                        f"unembedded det {ce.two_qubit_det!r}"])


@_timed
def twirl_suite(seed: int = 0) -> SuiteResult:
    inc = measures.find_twirl_increase(states.make_rng(seed))
    return SuiteResult("twirl increases pi2", inc.pi2_after > inc.pi2_before, 0.0, 0, 1,
                       [f"Bell-diagonal p = {inc.probabilities}: pi2 {inc.pi2_before:.6f} -> "
                        f"{inc.pi2_after:.6f} after twirling"])


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "witness": witness_suite,
    "prop1": prop1_suite,
    "prop2": prop2_suite,
    "circuit": circuit_suite,
    "bounds": bounds_suite,
    "reduction": reduction_suite,
    "newton": newton_girard_suite,
    "fixed": fixed_points_suite,
    "converse": converse_suite,
    "twirl": twirl_suite,
}
SAMPLED = {"witness", "prop1", "prop2", "circuit", "bounds", "reduction", "newton"}


def run_suite(name: str, samples: int | None = None, seed: int = 0) -> list[SuiteResult]:
    names = list(SUITES) if name == "all" else [name]
    results = []
    for n in names:
        fn = SUITES[n]
        if n in SAMPLED and samples is not None:
            results.append(fn(samples=samples, seed=seed))
        else:
            results.append(fn(seed=seed))
    return results
