"""Closed-form sample-complexity bounds and the random-matrix denominators
entering the lower bounds.

Upper bounds are in time units (``T`` or ``n eta``).  Lower bounds with an
unspecified absolute constant take it as ``C`` (default 1) and say so in the
report note.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from ._seeding import mix_seed

UNSPECIFIED_CONSTANT = "up to an unspecified absolute constant C"


@dataclass
class BoundReport:
    name: str
    value: float
    inputs: dict
    lambda_suggested: Callable[[float], float] | None = None
    note: str = ""
    vacuous: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self, horizon: float | None = None) -> dict:
        out = {"name": self.name, "value": self.value, "inputs": dict(self.inputs),
               "note": self.note, "vacuous": self.vacuous}
        if self.lambda_suggested is not None and horizon is not None:
            out["lambda_suggested"] = self.lambda_suggested(horizon)
            out["lambda_horizon"] = horizon
        out.update(self.extra)
        return out


def _pos(**kw):
    for name, v in kw.items():
        if not (isinstance(v, (int, float, np.integer, np.floating)) and math.isfinite(v) and v > 0):
            raise ValueError(f"{name} must be a finite positive number, got {v!r}")


def _delta(delta):
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


def _alpha(alpha):
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")


# --- regularization rules ---------------------------------------------------

def lambda_continuous(T: float, alpha: float, rho_min: float, p: int, delta: float) -> float:
    """``sqrt(36 log(4p/delta) / (T alpha^2 rho_min))``."""
    _pos(T=T, alpha=alpha, rho_min=rho_min, p=p)
    _delta(delta)
    return math.sqrt(36.0 * math.log(4 * p / delta) / (T * alpha ** 2 * rho_min))


def lambda_discrete(n_eta: float, alpha: float, D: float, p: int, delta: float) -> float:
    """``sqrt(36 log(4p/delta) / (D alpha^2 n eta))``."""
    _pos(n_eta=n_eta, alpha=alpha, D=D, p=p)
    _delta(delta)
    return math.sqrt(36.0 * math.log(4 * p / delta) / (D * alpha ** 2 * n_eta))


def lambda_laplacian(T: float, k: int, m: float, p: int, delta: float) -> float:
    _pos(T=T, k=k, m=m, p=p)
    _delta(delta)
    return math.sqrt(36.0 * (k + m) ** 2 * math.log(4 * p / delta) / (T * m ** 3))


# --- upper bounds -----------------------------------------------------------

def ub_sparse_continuous(k, rho_min, theta_min, alpha, C_min, p, delta) -> BoundReport:
    """Observation time sufficient for the regularized estimator, linear SDE."""
    _pos(k=k, rho_min=rho_min, theta_min=theta_min, C_min=C_min, p=p)
    _alpha(alpha)
    _delta(delta)
    value = (2e4 * k ** 2 * (k / rho_min ** 2 + 1 / theta_min ** 2)
             / (alpha ** 2 * rho_min * C_min ** 2) * math.log(4 * p * k / delta))
    inputs = dict(k=k, rho_min=rho_min, theta_min=theta_min, alpha=alpha,
                  C_min=C_min, p=p, delta=delta)
    return BoundReport("ub_sparse_continuous", value, inputs,
                       lambda T: lambda_continuous(T, alpha, rho_min, p, delta))


def ub_discrete(k, D, theta_min, alpha, C_min, p, delta) -> BoundReport:
    """Bound on ``n eta`` for the sampled chain with contraction rate ``D``."""
    _pos(k=k, D=D, theta_min=theta_min, C_min=C_min, p=p)
    _alpha(alpha)
    _delta(delta)
    value = (1e4 * k ** 2 * (k / D ** 2 + 1 / theta_min ** 2)
             / (alpha ** 2 * D * C_min ** 2) * math.log(4 * p * k / delta))
    inputs = dict(k=k, D=D, theta_min=theta_min, alpha=alpha, C_min=C_min, p=p, delta=delta)
    return BoundReport("ub_discrete", value, inputs,
                       lambda n_eta: lambda_discrete(n_eta, alpha, D, p, delta))


def ub_laplacian(k, m, p, delta) -> BoundReport:
    _pos(k=k, m=m, p=p)
    _delta(delta)
    value = 4e5 * k ** 2 * ((k + m) / m) ** 5 * (k + m ** 2) * math.log(4 * p * k / delta)
    return BoundReport("ub_laplacian", value, dict(k=k, m=m, p=p, delta=delta),
                       lambda T: lambda_laplacian(T, k, m, p, delta))


# --- lower bounds -----------------------------------------------------------

def lb_sparse(k, rho_min, theta_min, p, C=1.0) -> BoundReport:
    """``C max(rho/theta^2, 1/theta) log p``."""
    _pos(k=k, rho_min=rho_min, theta_min=theta_min, p=p, C=C)
    value = C * max(rho_min / theta_min ** 2, 1 / theta_min) * math.log(p)
    return BoundReport("lb_sparse", value, dict(k=k, rho_min=rho_min, theta_min=theta_min,
                                                p=p, C=C), note=UNSPECIFIED_CONSTANT)


def lb_dense(rho_min, theta_min, p, C=1.0) -> BoundReport:
    """``C max(rho/theta^2, 1/theta) p``."""
    _pos(rho_min=rho_min, theta_min=theta_min, p=p, C=C)
    value = C * max(rho_min / theta_min ** 2, 1 / theta_min) * p
    return BoundReport("lb_dense", value, dict(rho_min=rho_min, theta_min=theta_min, p=p, C=C),
                       note=UNSPECIFIED_CONSTANT)


def lb_nonlinear(k, p, B, L, D, C=1.0) -> BoundReport:
    """``(k log(p/k) - log(B/L)) / (C + 2 k^2 D^2 B)``; non-positive values are flagged."""
    _pos(k=k, p=p, B=B, L=L)
    if not p > k:
        raise ValueError("need p > k")
    if B < L:
        raise ValueError("need B >= L")
    if D < 0 or C < 0:
        raise ValueError("D and C must be >= 0")
    den = C + 2 * k ** 2 * D ** 2 * B
    if den <= 0:
        raise ValueError("denominator C + 2 k^2 D^2 B must be positive")
    value = (k * math.log(p / k) - math.log(B / L)) / den
    return BoundReport("lb_nonlinear", value, dict(k=k, p=p, B=B, L=L, D=D, C=C),
                       vacuous=value <= 0)


def lb_generic(entropy, log_class_size, mutual_info, denominator) -> BoundReport:
    """Combine user-supplied information terms with a per-run denominator.

    ``(H - log|M| - 2 I - 2) / denominator`` where ``denominator`` is
    ``1/2 Tr{E[-theta] - (E[-theta^-1])^-1}`` (see
    ``lb_generic_denominator_mc``; multiply per-dimension values by ``p``).
    """
    _pos(denominator=denominator)
    value = (entropy - log_class_size - 2 * mutual_info - 2) / denominator
    return BoundReport("lb_generic", value,
                       dict(entropy=entropy, log_class_size=log_class_size,
                            mutual_info=mutual_info, denominator=denominator),
                       vacuous=value <= 0)


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    stderr: float
    num_samples: int
    bias_corrected: float | None = None


def lb_generic_denominator_mc(sampler, p: int, num_samples: int, seed: int,
                              groups: int = 20) -> MonteCarloEstimate:
    """Per-dimension ``1/2 Tr{E[-theta] - (E[-theta^-1])^-1} / p`` by Monte Carlo.

    ``sampler(p, seed)`` returns one stable drift (array or object with
    ``entries``); sample ``i`` uses seed ``mix_seed(seed, 0, i)``.  The
    standard error is a grouped jackknife over ``groups`` blocks of samples.

    ``value`` is the plug-in estimate.  Inverting the averaged matrix biases
    it by ``O(1/num_samples)``; ``bias_corrected`` removes that term with the
    same jackknife.
    """
    if num_samples < 2:
        raise ValueError("need at least two samples")
    G = max(2, min(groups, num_samples))
    block = np.arange(num_samples) * G // num_samples
    tr = np.zeros(G)
    inv = np.zeros((G, p, p))
    count = np.bincount(block, minlength=G).astype(float)
    for i in range(num_samples):
        th = sampler(p, mix_seed(seed, 0, i))
        th = np.asarray(getattr(th, "entries", th), dtype=float)
        tr[block[i]] -= np.trace(th)
        inv[block[i]] -= np.linalg.inv(th)

    def stat(t, M, n):
        try:
            return 0.5 * (t / n - np.trace(np.linalg.inv(M / n))) / p
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError("mean of -theta^-1 is singular") from exc

    T_all, M_all = tr.sum(), inv.sum(axis=0)
    value = stat(T_all, M_all, num_samples)
    jack = np.array([stat(T_all - tr[g], M_all - inv[g], num_samples - count[g]) for g in range(G)])
    se = math.sqrt((G - 1) / G * float(np.sum((jack - jack.mean()) ** 2)))
    corrected = G * value - (G - 1) * float(jack.mean())
    return MonteCarloEstimate(float(value), se, num_samples, float(corrected))


def mean_inverse_trace_mc(sampler, p: int, num_samples: int, seed: int) -> MonteCarloEstimate:
    """``E[Tr((-theta)^-1) / p]`` with the ordinary standard error of the mean."""
    vals = np.empty(num_samples)
    for i in range(num_samples):
        th = sampler(p, mix_seed(seed, 0, i))
        th = np.asarray(getattr(th, "entries", th), dtype=float)
        ev = np.linalg.eigvalsh(-0.5 * (th + th.T)) if np.allclose(th, th.T) else None
        vals[i] = (np.sum(1.0 / ev) if ev is not None else np.trace(np.linalg.inv(-th))) / p
    se = float(vals.std(ddof=1) / math.sqrt(num_samples)) if num_samples > 1 else float("nan")
    return MonteCarloEstimate(float(vals.mean()), se, num_samples)


# --- spectral closed forms --------------------------------------------------

def kesten_mckay_edge(k: int) -> float:
    return 2.0 * math.sqrt(k - 1)


def kesten_mckay_density(k: int, nu):
    """Density of the limiting spectrum of a random ``k``-regular adjacency matrix."""
    nu = np.asarray(nu, dtype=float)
    inside = 4 * (k - 1) - nu ** 2
    return np.where(inside > 0, k / (2 * math.pi) * np.sqrt(np.clip(inside, 0, None))
                    / (k ** 2 - nu ** 2), 0.0)


def _check_km(k, z):
    if int(k) != k or k < 3:
        raise ValueError("k must be an integer >= 3")
    if not z > kesten_mckay_edge(k):
        raise ValueError(f"z must exceed the spectral edge 2 sqrt(k-1) = {kesten_mckay_edge(k):.6g}")


def kesten_mckay_G(k: int, z: float) -> float:
    """Stieltjes transform ``int dmu(nu) / (z - nu)`` of the Kesten-McKay law.

    Evaluated as ``2(k-1) / (k sqrt(z^2 - 4k + 4) + (k-2) z)``, algebraically
    equal to ``-((k-2) z - k sqrt(z^2-4k+4)) / (2 (z^2 - k^2))`` but free of
    the removable singularity at ``z = k``.
    """
    _check_km(k, z)
    return 2.0 * (k - 1) / (k * math.sqrt(z * z - 4 * k + 4) + (k - 2) * z)


def kesten_mckay_G_quad(k: int, z: float) -> float:
    """The same transform by adaptive quadrature of the density."""
    _check_km(k, z)
    a = kesten_mckay_edge(k)
    # sqrt(a^2 - nu^2) = (nu + a)^(1/2) (a - nu)^(1/2) is handled by the 'alg' weight
    f = lambda nu: k / (2 * math.pi) / ((k * k - nu * nu) * (z - nu))
    val, _ = integrate.quad(f, -a, a, weight="alg", wvar=(0.5, 0.5), epsabs=1e-13, epsrel=1e-12)
    return float(val)


def denominator_sparse(theta_min: float, k: int, rho: float) -> float:
    """Jensen-relaxed limit of ``Tr{E[-theta] - (E[-theta^-1])^-1} / p`` on the
    signed random-regular ensemble."""
    _pos(theta_min=theta_min)
    if rho < 0:
        raise ValueError("rho must be >= 0")
    a = kesten_mckay_edge(k)
    if rho == 0:
        return theta_min * k / math.sqrt(k - 1)
    return rho + theta_min * a - theta_min / kesten_mckay_G(k, rho / theta_min + a)


def wigner_C(alpha: float, rho: float) -> float:
    """``lim E[Tr((-theta)^-1) / p]`` for a semicircle of radius ``2 sqrt(alpha)``
    shifted to ``-(rho + 2 sqrt(alpha))``.

    Computed as ``2 / (2 sqrt(alpha) + rho + sqrt(rho^2 + 4 sqrt(alpha) rho))``,
    the rationalized form of ``(2 sqrt(alpha) + rho - sqrt(rho (4 sqrt(alpha) + rho))) / (2 alpha)``.
    """
    _pos(alpha=alpha)
    if rho < 0:
        raise ValueError("rho must be >= 0")
    s = math.sqrt(alpha)
    return 2.0 / (2 * s + rho + math.sqrt(rho * rho + 4 * s * rho))


def denominator_dense(theta_min: float, rho: float) -> float:
    """``rho + 2 sqrt(alpha) - 1 / C(alpha, rho)`` with ``alpha = theta_min^2 / 2``."""
    _pos(theta_min=theta_min)
    alpha = theta_min ** 2 / 2.0
    return rho + 2 * math.sqrt(alpha) - 1.0 / wigner_C(alpha, rho)


# --- CLI dispatch -----------------------------------------------------------

THEOREMS = {
    "1": (ub_sparse_continuous, ("k", "rho_min", "theta_min", "alpha", "C_min", "p", "delta")),
    "2": (lb_sparse, ("k", "rho_min", "theta_min", "p", "C")),
    "3": (ub_laplacian, ("k", "m", "p", "delta")),
    "4": (ub_discrete, ("k", "D", "theta_min", "alpha", "C_min", "p", "delta")),
    "5": (lb_dense, ("rho_min", "theta_min", "p", "C")),
    "6": (lb_nonlinear, ("k", "p", "B", "L", "D", "C")),
    "lemma7": (lb_generic, ("entropy", "log_class_size", "mutual_info", "denominator")),
}

OPTIONAL = {"C"}


def evaluate(theorem: str, params: dict) -> BoundReport:
    """Dispatch a theorem label to its bound with the named parameters."""
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}; choose from {sorted(THEOREMS)}")
    fn, names = THEOREMS[theorem]
    missing = [n for n in names if n not in params and n not in OPTIONAL]
    if missing:
        raise ValueError(f"missing parameters for {theorem}: {', '.join(missing)}")
    return fn(**{n: params[n] for n in names if n in params})
