"""Determinant-based two-qubit entanglement tests and the universal four-copy witness."""

__version__ = "0.1.0"

from .criteria import Decision, Verdict, converse_counterexample, det_ppt_test, reduction_det_test
from .measures import bound_report, concurrence, negativity, pi_d
from .states import DensityMatrix, bell_state, random_density, werner
from .witness import build_w4, newton_girard_det, pt_moments, witness_expectation

__all__ = [
    "Decision",
    "DensityMatrix",
    "Verdict",
    "bell_state",
    "bound_report",
    "build_w4",
    "concurrence",
    "converse_counterexample",
    "det_ppt_test",
    "negativity",
    "newton_girard_det",
    "pi_d",
    "pt_moments",
    "random_density",
    "reduction_det_test",
    "werner",
    "witness_expectation",
]
