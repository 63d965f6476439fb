"""Input validation helpers shared by the public entry points."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils.validation import check_array


def check_square(A, name: str = "matrix") -> np.ndarray:
    A = check_array(A, dtype=np.float64, ensure_2d=True, ensure_min_samples=1,
                    ensure_min_features=1, input_name=name)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    return A


def check_states(X, name: str = "states", min_rows: int = 2) -> np.ndarray:
    """Validate a time-major state array with at least ``min_rows`` rows."""
    X = check_array(X, dtype=np.float64, ensure_2d=True, ensure_min_samples=min_rows,
                    input_name=name)
    return X


def check_positive(value, name: str, strict: bool = True) -> float:
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise ValueError(f"{name} must be a finite real number, got {value!r}")
    if strict and value <= 0:
        raise ValueError(f"{name} must be > 0, got {value}")
    if not strict and value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    return float(value)


def check_int(value, name: str, low: int | None = None, high: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if low is not None and value < low:
        raise ValueError(f"{name} must be >= {low}, got {value}")
    if high is not None and value > high:
        raise ValueError(f"{name} must be <= {high}, got {value}")
    return value


def sym_part(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.T)


def rho_min(theta: np.ndarray) -> float:
    """Smallest eigenvalue of -(theta + theta^T)/2."""
    return float(np.linalg.eigvalsh(-sym_part(theta))[0])


def linf_operator_norm(A: np.ndarray) -> float:
    """Max absolute row sum; 0 for empty matrices."""
    if A.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(A), axis=1)))
