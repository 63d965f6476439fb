"""Row-wise l1-regularized least squares for drift coefficients.

For a trajectory ``x(0..n)`` sampled at interval ``eta`` and a feature map
``F``, the negative log-likelihood of row ``r`` is, up to a constant,

    L(theta) = 1/2 theta' Qhat theta - <theta, ghat>

with ``Qhat = (1/n) sum_t F_t F_t'`` and
``ghat = (1/(n eta)) sum_t F_t (x_r(t+1) - x_r(t))``, features taken at the
left endpoint of each interval.  Adding ``lam |theta|_1`` gives the
estimator; it is minimized by cyclic coordinate descent on the precomputed
quadratic form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.linear_model import lars_path_gram
from sklearn.utils.validation import check_is_fitted

from . import _kernels
from ._validation import check_int, check_positive, check_states, linf_operator_norm
from .basis import BasisSet, LinearBasis
from .lyapunov import StationaryCovariance
from .sim import Trajectory


class SingularDesignError(np.linalg.LinAlgError):
    """Qhat is (numerically) singular where an unpenalized solve is needed."""


@dataclass(frozen=True)
class NormalEquations:
    Qhat: np.ndarray
    ghat: np.ndarray
    n: int
    eta: float
    row: int

    def objective(self, theta, lam: float = 0.0) -> float:
        theta = np.asarray(theta, dtype=float)
        return float(0.5 * theta @ self.Qhat @ theta - theta @ self.ghat
                     + lam * np.abs(theta).sum())

    def gradient(self, theta) -> np.ndarray:
        return self.Qhat @ np.asarray(theta, dtype=float) - self.ghat


@dataclass(frozen=True)
class RlsConfig:
    lam: float
    tol: float = 1e-8
    max_iter: int = 100_000
    zero_threshold: float | None = None

    def __post_init__(self):
        check_positive(self.lam, "lambda", strict=False)
        check_positive(self.tol, "tol")
        check_int(self.max_iter, "max_iter", low=1)
        if self.zero_threshold is not None:
            check_positive(self.zero_threshold, "zero_threshold", strict=False)


@dataclass
class RlsSolution:
    theta: np.ndarray
    iters: int
    kkt: float
    converged: bool


@dataclass
class RecoveryResult:
    theta_hat: np.ndarray
    signed_support: np.ndarray
    per_row_iters: np.ndarray
    per_row_kkt_residual: np.ndarray
    lambda_used: float
    rows: np.ndarray
    converged: bool = True
    feature_names: list = field(default_factory=list)

    def to_dict(self) -> dict:
        chars = {-1: "-", 0: "0", 1: "+"}
        rows = self.rows.tolist()
        return {
            "lambda": self.lambda_used,
            "rows": rows,
            "converged": bool(self.converged),
            "signs": ["".join(chars[int(s)] for s in self.signed_support[r]) for r in rows],
            "theta_hat": [[float(v) for v in self.theta_hat[r]] for r in rows],
            "signed_support": self.signed_support[rows].astype(int).tolist(),
            "iters": self.per_row_iters[rows].astype(int).tolist(),
            "kkt_residual": [float(v) for v in self.per_row_kkt_residual[rows]],
            "feature_names": list(self.feature_names),
        }


# --- sufficient statistics --------------------------------------------------

def _design(traj: Trajectory, basis: BasisSet, n: int | None):
    if traj.n < 1:
        raise ValueError("trajectory needs at least one transition")
    n = traj.n if n is None else check_int(n, "n", low=1, high=traj.n)
    X = traj.states[: n + 1]
    return basis.transform(X[:-1]), np.diff(X, axis=0), n


def build_all_normal_equations(traj: Trajectory, basis: BasisSet, n: int | None = None):
    """``(Qhat, G)`` with ``G[:, r]`` the ``ghat`` of row ``r``; uses the first ``n`` steps."""
    F, dX, n = _design(traj, basis, n)
    Qhat = F.T @ F / n
    return 0.5 * (Qhat + Qhat.T), F.T @ dX / (n * traj.eta)


def build_normal_equations(traj: Trajectory, basis: BasisSet, row: int,
                           n: int | None = None) -> NormalEquations:
    check_int(row, "row", low=0, high=traj.p - 1)
    F, dX, n = _design(traj, basis, n)
    Qhat = F.T @ F / n
    return NormalEquations(0.5 * (Qhat + Qhat.T), F.T @ dX[:, row] / (n * traj.eta),
                           n, traj.eta, row)


def prefix_normal_equations(traj: Trajectory, basis: BasisSet, checkpoints):
    """Normal equations of every prefix length in ``checkpoints`` from one pass.

    Yields ``(n, Qhat, G)`` in increasing ``n``.  Sums are accumulated block by
    block so the cost is that of the longest prefix.
    """
    cps = sorted({check_int(int(c), "checkpoint", low=1, high=traj.n) for c in checkpoints})
    m, p = basis.m, traj.p
    S = np.zeros((m, m))
    B = np.zeros((m, p))
    start = 0
    for n in cps:
        X = traj.states[start: n + 1]
        F = basis.transform(X[:-1])
        S += F.T @ F
        B += F.T @ np.diff(X, axis=0)
        start = n
        Qhat = S / n
        yield n, 0.5 * (Qhat + Qhat.T), B / (n * traj.eta)


def raw_log_likelihood(traj: Trajectory, basis: BasisSet, row: int, theta) -> float:
    """The likelihood as a raw sum over transitions (before expanding the square).

    ``1/(2 n eta^2) sum_t (x_r(t+1) - x_r(t) - eta <theta, F_t>)^2``; differs
    from the quadratic form by a theta-free constant.
    """
    F, dX, n = _design(traj, basis, None)
    resid = dX[:, row] - traj.eta * (F @ np.asarray(theta, dtype=float))
    return float(resid @ resid) / (2.0 * n * traj.eta ** 2)


# --- solvers ----------------------------------------------------------------

def solve_rls(ne: NormalEquations | tuple, cfg: RlsConfig, warm_start=None) -> RlsSolution:
    """Minimize ``1/2 t'Qt - g't + lam |t|_1`` by cyclic coordinate descent.

    Stops once the largest KKT violation is at most ``cfg.tol``; if
    ``max_iter`` sweeps pass first the result has ``converged=False``.
    """
    Q, g = (ne.Qhat, ne.ghat) if isinstance(ne, NormalEquations) else ne
    Q = np.ascontiguousarray(Q, dtype=float)
    g = np.ascontiguousarray(g, dtype=float)
    t0 = np.zeros_like(g) if warm_start is None else np.array(warm_start, dtype=float)
    theta, iters, kkt, ok = _kernels.coordinate_descent(Q, g, float(cfg.lam), t0,
                                                         float(cfg.tol), int(cfg.max_iter))
    return RlsSolution(theta, int(iters), float(kkt), bool(ok))


def solve_path(Q, g, lambdas, tol: float = 1e-8, max_iter: int = 100_000,
               method: str = "cd") -> np.ndarray:
    """Solutions for each ``lambda`` (any order).

    ``method="cd"`` warm-starts coordinate descent from large to small
    ``lambda``.  ``method="lars"`` computes the exact piecewise-linear path
    by the LARS-lasso homotopy and reads it off at each ``lambda``; it is the
    better choice when ``Q`` is badly conditioned and coordinate descent
    crawls.  Returns an ``(len(lambdas), m)`` array aligned with the input.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    Q = np.ascontiguousarray(Q, dtype=float)
    g = np.ascontiguousarray(g, dtype=float)
    if method == "lars":
        return _lars_path(Q, g, lambdas)
    if method != "cd":
        raise ValueError("method must be 'cd' or 'lars'")
    out = np.empty((lambdas.size, g.size))
    theta = np.zeros_like(g)
    for i in np.argsort(-lambdas):
        theta, _, _, _ = _kernels.coordinate_descent(Q, g, float(lambdas[i]), theta,
                                                     tol, max_iter)
        out[i] = theta
    return out


def _lars_path(Q, g, lambdas):
    # with n_samples=1 the homotopy parameter is exactly our lambda
    alphas, _, coefs = lars_path_gram(Xy=g, Gram=Q, n_samples=1, method="lasso")
    a, c = alphas[::-1], coefs[:, ::-1]
    return np.array([[np.interp(lam, a, c[j]) for j in range(g.size)] for lam in lambdas])


def default_zero_threshold(theta: np.ndarray) -> float:
    return 1e-6 * max(1.0, float(np.max(np.abs(theta), initial=0.0)))


def signs(theta, zero_threshold: float | None = None) -> np.ndarray:
    """Entrywise sign after zeroing ``|theta| <= zero_threshold``."""
    theta = np.asarray(theta, dtype=float)
    thr = default_zero_threshold(theta) if zero_threshold is None else zero_threshold
    return np.where(np.abs(theta) > thr, np.sign(theta), 0.0).astype(np.int8)


def _rows(rows, p):
    if rows is None:
        return np.arange(p)
    rows = np.atleast_1d(np.asarray(rows, dtype=int))
    if rows.size and (rows.min() < 0 or rows.max() >= p):
        raise ValueError("row index out of range")
    return rows


def recover(traj: Trajectory, basis: BasisSet, cfg: RlsConfig, rows=None) -> RecoveryResult:
    """Estimate each requested row independently.  Skipped rows are NaN."""
    Qhat, G = build_all_normal_equations(traj, basis)
    return recover_from_stats(Qhat, G, cfg, rows, basis.names)


def recover_from_stats(Qhat, G, cfg: RlsConfig, rows=None, names=()) -> RecoveryResult:
    m, p = G.shape
    rows = _rows(rows, p)
    theta = np.full((p, m), np.nan)
    sgn = np.zeros((p, m), dtype=np.int8)
    iters = np.zeros(p, dtype=int)
    kkt = np.zeros(p)
    ok = True
    for r in rows:
        sol = solve_rls((Qhat, G[:, r]), cfg)
        theta[r] = sol.theta
        sgn[r] = signs(sol.theta, cfg.zero_threshold)
        iters[r], kkt[r] = sol.iters, sol.kkt
        ok &= sol.converged
    return RecoveryResult(theta, sgn, iters, kkt, float(cfg.lam), rows, ok, list(names))


def unpenalized_solve(Q, g, cond_max: float = 1e12) -> np.ndarray:
    Q = np.asarray(Q, dtype=float)
    if not np.isfinite(Q).all() or np.linalg.cond(Q) > cond_max:
        raise SingularDesignError("Qhat is singular; the unpenalized solve is undefined")
    return np.linalg.solve(Q, g)


def threshold_signs(theta, theta_min: float) -> np.ndarray:
    """``|t| < theta_min/2`` -> 0, otherwise ``sign(t)``."""
    theta = np.asarray(theta, dtype=float)
    return np.where(np.abs(theta) < theta_min / 2.0, 0, np.sign(theta)).astype(np.int8)


def threshold_estimator(traj: Trajectory, basis: BasisSet, theta_min: float,
                        rows=None) -> RecoveryResult:
    """Least squares (``lambda = 0``) followed by the ``theta_min / 2`` sign rule."""
    theta_min = check_positive(theta_min, "theta_min")
    Qhat, G = build_all_normal_equations(traj, basis)
    return threshold_from_stats(Qhat, G, theta_min, rows, basis.names)


def threshold_from_stats(Qhat, G, theta_min: float, rows=None, names=()) -> RecoveryResult:
    m, p = G.shape
    rows = _rows(rows, p)
    theta = np.full((p, m), np.nan)
    sgn = np.zeros((p, m), dtype=np.int8)
    if rows.size:
        sol = unpenalized_solve(Qhat, G[:, rows])
        theta[rows] = sol.T
        sgn[rows] = threshold_signs(sol.T, theta_min)
    zeros = np.zeros(p)
    return RecoveryResult(theta, sgn, zeros.astype(int), zeros, 0.0, rows, True, list(names))


# --- sufficient-condition diagnostics ---------------------------------------

@dataclass(frozen=True)
class ConditionCheck:
    score_inf: bool
    score_support: bool
    offsupport_block: bool
    support_block: bool
    values: dict

    @property
    def all(self) -> bool:
        return self.score_inf and self.score_support and self.offsupport_block and self.support_block

    def as_tuple(self):
        return (self.score_inf, self.score_support, self.offsupport_block, self.support_block)


def proposition1_check(ne: NormalEquations, theta0_row, Q0, lam: float, alpha: float,
                       C_min: float, theta_min: float, k: int) -> ConditionCheck:
    """Evaluate the four sufficient conditions for exact signed-support recovery.

    With ``S`` the support of ``theta0_row`` and ``Ghat = ghat - Qhat theta0``:
    ``|Ghat|_inf <= lam alpha / 3``;
    ``|Ghat_S|_inf <= theta_min C_min / (4k) - lam``;
    both ``|||Qhat - Q0|||_inf`` on the ``(Sc, S)`` and ``(S, S)`` blocks
    at most ``alpha C_min / (12 sqrt k)``.
    """
    t0 = np.asarray(theta0_row, dtype=float).reshape(-1)
    Q0 = np.asarray(Q0.Q if isinstance(Q0, StationaryCovariance) else Q0, dtype=float)
    m = ne.ghat.shape[0]
    if t0.shape != (m,) or Q0.shape != (m, m):
        raise ValueError("dimension mismatch between normal equations, theta0 and Q0")
    S = np.flatnonzero(t0)
    Sc = np.setdiff1d(np.arange(m), S)
    score = ne.ghat - ne.Qhat @ t0
    dQ = ne.Qhat - Q0
    block_tol = alpha * C_min / (12.0 * math.sqrt(k))
    vals = {
        "score_inf": float(np.max(np.abs(score), initial=0.0)),
        "score_support": float(np.max(np.abs(score[S]), initial=0.0)),
        "offsupport_block": linf_operator_norm(dQ[np.ix_(Sc, S)]),
        "support_block": linf_operator_norm(dQ[np.ix_(S, S)]),
        "score_inf_bound": lam * alpha / 3.0,
        "score_support_bound": theta_min * C_min / (4.0 * k) - lam,
        "block_bound": block_tol,
    }
    return ConditionCheck(vals["score_inf"] <= vals["score_inf_bound"],
                          vals["score_support"] <= vals["score_support_bound"],
                          vals["offsupport_block"] <= block_tol,
                          vals["support_block"] <= block_tol, vals)


def feasible_lambda_interval(ne: NormalEquations, theta0_row, alpha: float, C_min: float,
                             theta_min: float, k: int):
    """The ``lambda`` range on which both score conditions hold, or ``None``.

    The first condition needs ``lam >= 3 |Ghat|_inf / alpha``, the second
    ``lam <= theta_min C_min / (4k) - |Ghat_S|_inf``.
    """
    t0 = np.asarray(theta0_row, dtype=float)
    score = ne.ghat - ne.Qhat @ t0
    S = np.flatnonzero(t0)
    lo = 3.0 * float(np.max(np.abs(score))) / alpha
    hi = theta_min * C_min / (4.0 * k) - float(np.max(np.abs(score[S]), initial=0.0))
    return (lo, hi) if lo <= hi else None


# --- scikit-learn front ends ------------------------------------------------

def _as_trajectory(X, eta) -> Trajectory:
    if isinstance(X, Trajectory):
        return X
    return Trajectory(check_states(X), check_positive(eta, "eta"))


def _resolve_basis(basis, p):
    return LinearBasis(p) if basis is None else basis


class SparseDriftEstimator(RegressorMixin, BaseEstimator):
    """l1-regularized drift estimator.

    ``fit`` takes a time-major array of states (one row per sample, spacing
    ``eta``) or a ``Trajectory``.  ``lam="auto"`` uses
    ``sqrt(36 log(4p/delta) / (T alpha^2 rho_min))`` and then needs
    ``alpha``, ``rho_min`` and ``delta``.

    Attributes after fit: ``coef_`` (rows x features), ``signed_support_``,
    ``n_iter_``, ``kkt_residual_``, ``lambda_``.
    """

    def __init__(self, lam=0.1, eta=1.0, basis=None, tol=1e-8, max_iter=100_000,
                 zero_threshold=None, rows=None, alpha=None, rho_min=None, delta=None):
        self.lam = lam
        self.eta = eta
        self.basis = basis
        self.tol = tol
        self.max_iter = max_iter
        self.zero_threshold = zero_threshold
        self.rows = rows
        self.alpha = alpha
        self.rho_min = rho_min
        self.delta = delta

    def _lambda(self, traj: Trajectory, p_features: int) -> float:
        if self.lam != "auto":
            return float(self.lam)
        if None in (self.alpha, self.rho_min, self.delta):
            raise ValueError("lam='auto' needs alpha, rho_min and delta")
        from .bounds import lambda_continuous
        return lambda_continuous(traj.T, self.alpha, self.rho_min, p_features, self.delta)

    def fit(self, X, y=None):
        traj = _as_trajectory(X, self.eta)
        basis = _resolve_basis(self.basis, traj.p)
        lam = self._lambda(traj, basis.m)
        cfg = RlsConfig(lam, self.tol, self.max_iter, self.zero_threshold)
        res = recover(traj, basis, cfg, self.rows)
        self.basis_ = basis
        self.result_ = res
        self.coef_ = res.theta_hat
        self.signed_support_ = res.signed_support
        self.n_iter_ = res.per_row_iters
        self.kkt_residual_ = res.per_row_kkt_residual
        self.lambda_ = lam
        self.n_features_in_ = traj.p
        return self

    def predict(self, X):
        """Drift ``theta F(x)`` at each state row (NaN on rows not fitted)."""
        check_is_fitted(self, "coef_")
        return self.basis_.transform(X) @ self.coef_.T

    def score(self, X, y=None):
        """Negative mean squared increment residual per unit time on a held-out path."""
        check_is_fitted(self, "coef_")
        traj = _as_trajectory(X, self.eta)
        rows = self.result_.rows
        F = self.basis_.transform(traj.states[:-1])
        pred = traj.eta * F @ self.coef_[rows].T
        resid = np.diff(traj.states, axis=0)[:, rows] - pred
        return -float(np.mean(resid ** 2)) / traj.eta


class ThresholdDriftEstimator(RegressorMixin, BaseEstimator):
    """Least squares plus the ``theta_min / 2`` sign rule."""

    def __init__(self, theta_min=1.0, eta=1.0, basis=None, rows=None):
        self.theta_min = theta_min
        self.eta = eta
        self.basis = basis
        self.rows = rows

    def fit(self, X, y=None):
        traj = _as_trajectory(X, self.eta)
        basis = _resolve_basis(self.basis, traj.p)
        res = threshold_estimator(traj, basis, self.theta_min, self.rows)
        self.basis_ = basis
        self.result_ = res
        self.coef_ = res.theta_hat
        self.signed_support_ = res.signed_support
        self.n_features_in_ = traj.p
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        return self.basis_.transform(X) @ self.coef_.T
