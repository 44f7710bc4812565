"""JSON state files: ``{"dims": [dA, dB], "matrix": [[[re, im], ...], ...]}`` (row major)."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .states import DensityMatrix, StateValidationError, validation_failures


def state_to_json(rho: DensityMatrix) -> dict:
    return {
        "dims": list(rho.dims),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rho.matrix],
    }


def write_state(path: str | Path, rho: DensityMatrix) -> None:
    Path(path).write_text(json.dumps(state_to_json(rho)) + "\n")


def parse_state(obj) -> DensityMatrix:
    """Build a validated state from decoded JSON, collecting every problem found."""
    if not isinstance(obj, dict):
        raise StateValidationError(["format: top level must be a JSON object"])
    failures = []
    dims = obj.get("dims")
    rows = obj.get("matrix")
    if not isinstance(dims, list) or not dims or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        failures.append("dims: must be a non-empty list of integers")
    if not isinstance(rows, list) or not rows:
        failures.append("matrix: must be a non-empty list of rows")
    if failures:
        raise StateValidationError(failures)
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise StateValidationError(["matrix: entries must be [re, im] number pairs"]) from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise StateValidationError([f"matrix: expected rows of [re, im] pairs, got array of shape {arr.shape}"])
    m = arr[..., 0] + 1j * arr[..., 1]
    failures = validation_failures(m, dims)
    if failures:
        raise StateValidationError(failures)
    return DensityMatrix(m, tuple(dims))


def read_state(path: str | Path) -> tuple[DensityMatrix, str]:
    """Load a state file; returns the state and the SHA-256 digest of the raw bytes."""
    raw = Path(path).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        obj = json.loads(raw)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise StateValidationError([f"json: {exc}"]) from None
    return parse_state(obj), digest
