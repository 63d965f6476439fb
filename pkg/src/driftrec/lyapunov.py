"""Stationary covariances of the linear models and assumption diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._validation import check_positive, check_square, linf_operator_norm, rho_min
from .ensembles import DriftMatrix

KRON_MAX_P = 40


class UnstableDriftError(ValueError):
    """The drift matrix has no stationary law for the requested model."""


@dataclass(frozen=True)
class StationaryCovariance:
    Q: np.ndarray
    model: str = "continuous"
    eta: float | None = None
    residual_norm: float = 0.0

    @property
    def relative_residual(self) -> float:
        return self.residual_norm / max(np.linalg.norm(self.Q), np.finfo(float).tiny)


def _entries(theta) -> np.ndarray:
    if isinstance(theta, DriftMatrix):
        theta = theta.entries
    return check_square(theta, "theta")


def continuous_residual(theta: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return theta @ Q + Q @ theta.T + np.eye(theta.shape[0])


def discrete_residual(theta: np.ndarray, Q: np.ndarray, eta: float) -> np.ndarray:
    return continuous_residual(theta, Q) + eta * theta @ Q @ theta.T


def _resolve_method(method: str, p: int) -> str:
    if method == "auto":
        return "kron" if p <= KRON_MAX_P else "bartels-stewart"
    if method not in ("kron", "bartels-stewart"):
        raise ValueError(f"unknown method {method!r}")
    return method


def solve_continuous(theta, method: str = "auto") -> StationaryCovariance:
    """Solve ``theta Q + Q theta^T + I = 0``.

    ``method="kron"`` solves the vectorized system
    ``(I (x) theta + theta (x) I) vec Q = -vec I`` directly; ``"bartels-stewart"``
    uses the Schur-based solver from SciPy.  ``"auto"`` picks the Kronecker
    route for ``p <= 40``.
    """
    A = _entries(theta)
    p = A.shape[0]
    if np.max(np.linalg.eigvals(A).real) >= 0:
        raise UnstableDriftError("theta has an eigenvalue with non-negative real part")
    I = np.eye(p)
    if _resolve_method(method, p) == "kron":
        K = np.kron(I, A) + np.kron(A, I)
        try:
            q = np.linalg.solve(K, -I.reshape(-1, order="F"))
        except np.linalg.LinAlgError as exc:
            raise UnstableDriftError("singular Kronecker system") from exc
        Q = q.reshape(p, p, order="F")
    else:
        Q = scipy.linalg.solve_continuous_lyapunov(A, -I)
    Q = 0.5 * (Q + Q.T)
    res = float(np.linalg.norm(continuous_residual(A, Q)))
    return StationaryCovariance(Q, "continuous", None, res)


def sigma_max_step(theta, eta: float) -> float:
    A = _entries(theta)
    return float(np.linalg.norm(np.eye(A.shape[0]) + eta * A, 2))


def contraction_rate(theta, eta: float) -> float:
    """``(1 - sigma_max(I + eta theta)) / eta``."""
    return (1.0 - sigma_max_step(theta, eta)) / eta


def solve_discrete(theta, eta: float, method: str = "auto") -> StationaryCovariance:
    """Solve ``theta Q + Q theta^T + eta theta Q theta^T + I = 0``.

    Equivalent to the Stein equation ``A Q A^T - Q + eta I = 0`` with
    ``A = I + eta theta``; requires ``sigma_max(A) < 1``.
    """
    T = _entries(theta)
    eta = check_positive(eta, "eta")
    p = T.shape[0]
    A = np.eye(p) + eta * T
    if np.linalg.norm(A, 2) >= 1.0:
        raise UnstableDriftError(f"sigma_max(I + eta*theta) >= 1 for eta={eta}")
    if _resolve_method(method, p) == "kron":
        K = np.eye(p * p) - np.kron(A, A)
        Q = np.linalg.solve(K, eta * np.eye(p).reshape(-1, order="F")).reshape(p, p, order="F")
    else:
        Q = scipy.linalg.solve_discrete_lyapunov(A, eta * np.eye(p))
    Q = 0.5 * (Q + Q.T)
    res = float(np.linalg.norm(discrete_residual(T, Q, eta)))
    return StationaryCovariance(Q, "discrete", eta, res)


def support(row: np.ndarray, threshold: float = 0.0) -> np.ndarray:
    return np.flatnonzero(np.abs(row) > threshold)


def incoherence(Q: np.ndarray, S) -> float:
    """``|||Q[Sc, S] Q[S, S]^{-1}|||_inf`` (max absolute row sum)."""
    S = np.asarray(S, dtype=int)
    Sc = np.setdiff1d(np.arange(Q.shape[0]), S)
    if S.size == 0 or Sc.size == 0:
        return 0.0
    M = np.linalg.solve(Q[np.ix_(S, S)], Q[np.ix_(S, Sc)]).T
    return linf_operator_norm(M)


@dataclass
class AssumptionReport:
    row: int
    support: list
    c_min: float
    alpha: float
    rho_min: float
    d: float | None
    theta_min: float
    k: int
    degenerate: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def clean(v):
            return None if isinstance(v, float) and not math.isfinite(v) else v
        return {"row": self.row, "support": [int(j) for j in self.support],
                "c_min": clean(self.c_min), "alpha": clean(self.alpha),
                "rho_min": clean(self.rho_min), "d": clean(self.d), "k": self.k,
                "theta_min": clean(self.theta_min)}


def assumption_report(theta, cov: StationaryCovariance, row: int,
                      eta: float | None = None) -> AssumptionReport:
    """Restricted-convexity and irrepresentability constants for one row.

    Support detection is exact for generated matrices; for custom matrices
    entries with ``|theta| <= 1e-12`` count as zero.  ``alpha`` is reported
    even when negative.
    """
    kind = theta.kind if isinstance(theta, DriftMatrix) else "custom"
    A = _entries(theta)
    Q = np.asarray(cov.Q, dtype=float)
    if Q.shape != A.shape:
        raise ValueError("covariance and theta shapes differ")
    if not 0 <= row < A.shape[0]:
        raise ValueError(f"row {row} out of range")
    S = support(A[row], 0.0 if kind != "custom" else 1e-12)
    d = contraction_rate(A, eta) if eta is not None else None
    rmin = rho_min(A)
    if S.size == 0:
        return AssumptionReport(row, [], float("nan"), 1.0, rmin, d, 0.0, 0, degenerate=True)
    c_min = float(np.linalg.eigvalsh(Q[np.ix_(S, S)])[0])
    alpha = 1.0 - incoherence(Q, S)
    return AssumptionReport(row, S.tolist(), c_min, alpha, rmin, d,
                            float(np.abs(A[row, S]).min()), int(S.size))


def aggregate_reports(reports) -> dict:
    """Worst case over rows: min C_min, min alpha, max k, min theta_min."""
    live = [r for r in reports if not r.degenerate]
    if not live:
        return {"c_min": float("nan"), "alpha": 1.0, "k": 0, "theta_min": 0.0}
    return {"c_min": min(r.c_min for r in live), "alpha": min(r.alpha for r in live),
            "k": max(r.k for r in live), "theta_min": min(r.theta_min for r in live)}
