"""Monte-Carlo sweeps over system size and observation length.

A sweep draws ``instances`` drift matrices per ``(p, n)`` cell, simulates a
stationary trajectory for each, runs the estimator over a grid of
regularization values and counts exact signed-support recoveries.  The
best-lambda success (supremum over the grid) drives the empirical sample
complexity: the smallest grid ``n eta`` from which success stays above
``1 - delta``.

Seeds: instance ``i`` of the cell keyed by ``(p, n)`` uses
``mix_seed(base_seed, cell_key(p, n), i)``, so adding grid points leaves
existing cells untouched.  With ``nested=True`` the key ignores ``n`` and
every ``n`` of a given ``p`` is a prefix of one long path per instance.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from ._seeding import mix_seed
from .basis import BasisSet, LinearBasis, MassSpringBasis, MonomialBasis
from .ensembles import (
    GraphSamplingError, GraphSpec, UnstableDrawError, gen_dense, gen_dense_signed, gen_graph,
    gen_laplacian, gen_signed_regular, gen_sparse_shift,
)
from .estimator import (
    SingularDesignError, build_all_normal_equations, prefix_normal_equations, signs, solve_path, threshold_from_stats,
)
from .lyapunov import UnstableDriftError, solve_continuous, solve_discrete
from .sim import (
    MassSpringParams, SimulationError, Trajectory, mass_spring_drift_matrix,
    pathway_drift_matrix, sample_stationary_init, simulate_continuous, simulate_discrete,
    simulate_mass_spring, simulate_parametrized,
)

__all__ = ["mix_seed", "SweepSpec", "SweepResult", "CellResult", "run_sweep",
           "empirical_sample_complexity", "roc_curve", "roc_auc", "nrmse", "binomial_se"]

SUCCESS_MODES = ("single-random-row", "full-matrix")
ENSEMBLES = ("sparse-shift", "dense", "dense-signed", "signed-regular", "laplacian")
ESTIMATORS = ("rls", "threshold")


def binomial_se(successes, total) -> float:
    if total == 0:
        return float("nan")
    f = successes / total
    return math.sqrt(f * (1 - f) / total)


def cell_key(p: int, n: int | None) -> int:
    return (int(p) << 32) | (0 if n is None else int(n))


def default_lambda_grid(p: int, T: float, delta: float, num: int = 20) -> np.ndarray:
    """``num`` log-spaced points in ``[1e-3, 1e1] * sqrt(log(4p/delta) / T)``."""
    return np.logspace(-3, 1, num) * math.sqrt(math.log(4 * p / delta) / T)


@dataclass
class SweepSpec:
    ensemble: str = "sparse-shift"
    p_list: tuple = (16,)
    n_grid: tuple = (100, 200, 400)
    eta: float = 0.1
    k: float = 4
    shift: float = 7.0
    rho: float = 1.0
    theta_min: float = 1.0
    m: float = 1.0
    model: str = "discrete"
    eta_fine_factor: int = 10
    lambda_grid: tuple | None = None
    lambda_count: int = 20
    instances: int = 256
    delta: float = 0.1
    success_mode: str = "single-random-row"
    estimator: str = "rls"
    base_seed: int = 0
    nested: bool = False
    draw_retries: int = 20
    tol: float = 1e-8
    max_iter: int = 100_000
    metrics: tuple = ()

    def __post_init__(self):
        self.p_list = tuple(int(p) for p in np.atleast_1d(self.p_list))
        self.n_grid = tuple(sorted(int(n) for n in np.atleast_1d(self.n_grid)))
        if self.lambda_grid is not None:
            self.lambda_grid = tuple(float(v) for v in np.atleast_1d(self.lambda_grid))
        self.metrics = tuple(self.metrics)
        if not self.p_list or not self.n_grid:
            raise ValueError("p and n grids must be non-empty")
        if min(self.n_grid) < 1:
            raise ValueError("grid n values must be >= 1")
        if self.instances < 1:
            raise ValueError("instances must be >= 1")
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"unknown ensemble {self.ensemble!r}")
        if self.success_mode not in SUCCESS_MODES:
            raise ValueError(f"unknown success_mode {self.success_mode!r}")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if self.model not in ("discrete", "continuous"):
            raise ValueError(f"unknown model {self.model!r}")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.eta <= 0:
            raise ValueError("eta must be > 0")

    def lambdas(self, p: int, n: int) -> np.ndarray:
        if self.estimator == "threshold":
            return np.zeros(1)
        if self.lambda_grid is not None:
            return np.asarray(self.lambda_grid)
        return default_lambda_grid(p, n * self.eta, self.delta, self.lambda_count)


@dataclass
class CellResult:
    p: int
    n: int
    n_eta: float
    lambdas: list
    successes: list
    total: int
    incomplete: int = 0
    auc: float | None = None
    nrmse: list | None = None

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.successes))

    @property
    def best_success(self) -> float:
        return self.successes[self.best_index] / self.total if self.total else float("nan")

    @property
    def best_lambda(self) -> float:
        return self.lambdas[self.best_index]

    @property
    def se(self) -> float:
        return binomial_se(self.successes[self.best_index], self.total)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(best_success=self.best_success, best_lambda=self.best_lambda, se=self.se)
        return d


@dataclass
class SweepResult:
    spec: SweepSpec
    cells: list = field(default_factory=list)

    @property
    def incomplete(self) -> bool:
        return any(c.incomplete for c in self.cells)

    def curve(self, p: int):
        """``[(n_eta, best_success, se), ...]`` for one ``p`` in increasing ``n``."""
        return [(c.n_eta, c.best_success, c.se) for c in self.cells if c.p == p]

    def to_dict(self) -> dict:
        spec = asdict(self.spec)
        return {"spec": spec, "cells": [c.to_dict() for c in self.cells],
                "complexity": {str(p): v for p, v in
                               empirical_sample_complexity(self, self.spec.delta).items()},
                "incomplete": self.incomplete}


# --- instance generation ----------------------------------------------------

def draw_drift(spec: SweepSpec, p: int, seed: int):
    e = spec.ensemble
    if e == "sparse-shift":
        return gen_sparse_shift(p, spec.k, spec.shift, seed)
    if e == "dense":
        return gen_dense(p, spec.rho, seed)
    if e == "dense-signed":
        return gen_dense_signed(p, spec.theta_min, spec.rho, seed, symmetric=False, shift="fixed")
    if e == "signed-regular":
        return gen_signed_regular(p, int(spec.k), spec.theta_min, spec.rho, seed)
    graph = GraphSpec(p, int(spec.k), "bounded-degree-bernoulli", seed)
    return gen_laplacian(graph, spec.m)


def _stationary_path(spec: SweepSpec, theta, n: int, seed: int) -> Trajectory:
    s_init, s_path = mix_seed(seed, 1, 0), mix_seed(seed, 2, 0)
    if spec.model == "discrete":
        cov = solve_discrete(theta, spec.eta)
        x0 = sample_stationary_init(cov, s_init)
        return simulate_discrete(theta, spec.eta, n, x0, s_path)
    cov = solve_continuous(theta)
    x0 = sample_stationary_init(cov, s_init)
    return simulate_continuous(theta, n * spec.eta, spec.eta, x0, s_path,
                               eta_fine=spec.eta / spec.eta_fine_factor)


def draw_instance(spec: SweepSpec, p: int, n: int, seed: int):
    """``(theta, trajectory)`` with redraws on unstable matrices; ``None`` when exhausted."""
    for attempt in range(spec.draw_retries):
        s = mix_seed(seed, 0x5EED, attempt)
        try:
            theta = draw_drift(spec, p, s)
            return theta, _stationary_path(spec, theta, n, s)
        except (UnstableDrawError, UnstableDriftError, GraphSamplingError, SimulationError,
                np.linalg.LinAlgError, ValueError):
            continue
    return None


def _rows_for(spec: SweepSpec, p: int, seed: int) -> np.ndarray:
    if spec.success_mode == "full-matrix":
        return np.arange(p)
    return np.array([np.random.default_rng(mix_seed(seed, 3, 0)).integers(p)])


def _score_cell(spec, Qhat, G, truth_signs, rows, lambdas, theta_min):
    """Per-lambda success flags and estimates for the requested rows."""
    L = lambdas.size
    est = np.zeros((L, rows.size, Qhat.shape[0]))
    if spec.estimator == "threshold":
        res = threshold_from_stats(Qhat, G, theta_min, rows)
        est[0] = res.theta_hat[rows]
        ok = np.array([np.array_equal(res.signed_support[rows], truth_signs[rows])])
        return ok, est
    ok = np.ones(L, dtype=bool)
    for i, r in enumerate(rows):
        path = solve_path(Qhat, G[:, r], lambdas, spec.tol, spec.max_iter)
        est[:, i] = path
        for j in range(L):
            if ok[j]:
                ok[j] = np.array_equal(signs(path[j]), truth_signs[r])
    return ok, est


def run_sweep(spec: SweepSpec, progress=None) -> SweepResult:
    """Evaluate every ``(p, n)`` cell of ``spec``.  Pure function of ``spec``."""
    result = SweepResult(spec)
    want_auc = "auc" in spec.metrics
    want_rmse = "nrmse" in spec.metrics
    for p in spec.p_list:
        basis = LinearBasis(p)
        cells = {n: dict(succ=np.zeros(spec.lambdas(p, n).size, dtype=int), total=0,
                         incomplete=0, auc=[], rmse=[]) for n in spec.n_grid}
        jobs = ([(None, spec.n_grid)] if spec.nested else [(n, (n,)) for n in spec.n_grid])
        for key_n, ns in jobs:
            for i in range(spec.instances):
                seed = mix_seed(spec.base_seed, cell_key(p, key_n), i)
                drawn = draw_instance(spec, p, max(ns), seed)
                if drawn is None:
                    for n in ns:
                        cells[n]["incomplete"] += 1
                    continue
                theta, traj = drawn
                truth = np.sign(theta.entries).astype(np.int8)
                rows = _rows_for(spec, p, seed)
                for n, Qhat, G in prefix_normal_equations(traj, basis, ns):
                    lams = spec.lambdas(p, n)
                    try:
                        ok, est = _score_cell(spec, Qhat, G, truth, rows, lams, theta.theta_min)
                    except SingularDesignError:
                        ok, est = np.zeros(lams.size, dtype=bool), None
                    c = cells[n]
                    c["succ"] += ok
                    c["total"] += 1
                    if est is not None and (want_auc or want_rmse):
                        t0 = theta.entries[rows]
                        if want_auc:
                            c["auc"].append(roc_auc(t0, est)[1])
                        if want_rmse:
                            c["rmse"].append([nrmse(e, t0) for e in est])
                if progress:
                    progress(p, key_n, i)
        for n in spec.n_grid:
            c = cells[n]
            result.cells.append(CellResult(
                p, n, n * spec.eta, spec.lambdas(p, n).tolist(), c["succ"].tolist(), c["total"],
                c["incomplete"],
                float(np.mean(c["auc"])) if c["auc"] else None,
                np.mean(c["rmse"], axis=0).tolist() if c["rmse"] else None))
    return result


@dataclass
class EtaSweepResult:
    """Best-lambda success per sampling interval; all intervals see the same paths."""
    etas: list
    T: float
    lambdas: list
    successes: list  # [eta][lambda]
    total: int

    def best(self):
        succ = np.asarray(self.successes)
        best = succ.max(axis=1)
        return (best / self.total).tolist(), [binomial_se(b, self.total) for b in best]


def run_eta_sweep(spec: SweepSpec, p: int, T: float, etas, eta_fine: float,
                  lambdas=None) -> EtaSweepResult:
    """Recovery at fixed horizon ``T`` for several sampling intervals.

    Each instance simulates one continuous-time path at step ``eta_fine``
    (stationary start) and subsamples it at every ``eta`` in ``etas``, so
    the intervals differ only in how the same path is observed.  Ensemble,
    instance count, success mode and seeds come from ``spec``.
    """
    etas = [float(e) for e in etas]
    steps = [int(round(e / eta_fine)) for e in etas]
    if any(k < 1 or abs(k * eta_fine - e) > 1e-9 * e for k, e in zip(steps, etas)):
        raise ValueError("every eta must be a positive multiple of eta_fine")
    lambdas = np.asarray(default_lambda_grid(p, T, spec.delta, spec.lambda_count)
                         if lambdas is None else lambdas, dtype=float)
    basis = LinearBasis(p)
    succ = np.zeros((len(etas), lambdas.size), dtype=int)
    total = 0
    for i in range(spec.instances):
        seed = mix_seed(spec.base_seed, cell_key(p, None), i)
        for attempt in range(spec.draw_retries):
            s = mix_seed(seed, 0x5EED, attempt)
            try:
                theta = draw_drift(spec, p, s)
                x0 = sample_stationary_init(solve_continuous(theta), mix_seed(s, 1, 0))
                fine = simulate_continuous(theta, T, eta_fine, x0, mix_seed(s, 2, 0),
                                           eta_fine=eta_fine)
                break
            except (UnstableDrawError, UnstableDriftError, SimulationError,
                    np.linalg.LinAlgError):
                continue
        else:
            continue
        total += 1
        truth = np.sign(theta.entries).astype(np.int8)
        rows = _rows_for(spec, p, seed)
        for g, (eta, step) in enumerate(zip(etas, steps)):
            traj = Trajectory(fine.states[::step], eta, s, "continuous")
            Qhat, G = build_all_normal_equations(traj, basis)
            ok, _ = _score_cell(spec, Qhat, G, truth, rows, lambdas, theta.theta_min)
            succ[g] += ok
    return EtaSweepResult(etas, float(T), lambdas.tolist(), succ.tolist(), total)


# --- summaries --------------------------------------------------------------

def complexity_from_curve(grid, success, delta: float):
    """Smallest grid value from which ``success >= 1 - delta`` holds to the end."""
    grid = list(grid)
    success = list(success)
    best = None
    for g, s in zip(reversed(grid), reversed(success)):
        if s >= 1 - delta:
            best = g
        else:
            break
    return best


def empirical_sample_complexity(result: SweepResult, delta: float) -> dict:
    """Per ``p``: the smallest grid ``n eta`` reaching ``1 - delta`` for good, else ``None``."""
    out = {}
    for p in result.spec.p_list:
        curve = result.curve(p)
        out[p] = complexity_from_curve([c[0] for c in curve], [c[1] for c in curve], delta)
    return out


def roc_curve(truth, estimates, zero_threshold: float | None = None):
    """TPR/FPR of nonzero detection along a path of estimates.

    ``estimates`` is ordered by decreasing regularization (one array per
    lambda, same shape as ``truth``).  Returns the ``(fpr, tpr)`` points
    with ``(0, 0)`` prepended and ``(1, 1)`` appended.
    """
    pos = np.asarray(truth) != 0
    npos, nneg = pos.sum(), (~pos).sum()
    if npos == 0 or nneg == 0:
        raise ValueError("truth needs both zero and nonzero entries")
    fpr, tpr = [0.0], [0.0]
    for est in estimates:
        det = signs(est, zero_threshold) != 0
        tpr.append(float((det & pos).sum() / npos))
        fpr.append(float((det & ~pos).sum() / nneg))
    fpr.append(1.0)
    tpr.append(1.0)
    return np.array(fpr), np.array(tpr)


def roc_auc(truth, estimates, zero_threshold: float | None = None):
    """``((fpr, tpr), auc)``; the area is the trapezoid rule over the ordered curve."""
    fpr, tpr = roc_curve(truth, estimates, zero_threshold)
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return (fpr, tpr), auc


def nrmse(theta_hat, theta0) -> float:
    """``|theta_hat - theta0|_F / |theta0|_F``."""
    theta0 = np.asarray(theta0, dtype=float)
    den = np.linalg.norm(theta0)
    if den == 0:
        raise ValueError("theta0 is zero")
    return float(np.linalg.norm(np.asarray(theta_hat, dtype=float) - theta0) / den)


# --- nonlinear experiments --------------------------------------------------

@dataclass
class NonlinearCurve:
    """Per grid point: best-lambda success counts (or AUC values) over instances."""
    grid: list
    lambdas: list
    successes: list
    total: int
    auc: list | None = None
    auc_se: list | None = None

    def best(self):
        succ = np.asarray(self.successes)
        best = succ.max(axis=1)
        return best / self.total, [binomial_se(b, self.total) for b in best]


def mass_spring_network(p: int, k: int, seed: int, d: int = 2, gamma: float = 0.1,
                        sigma: float = 0.5) -> MassSpringParams:
    A = gen_graph(GraphSpec(p, k, "uniform-regular", seed))
    return MassSpringParams.unit(A, gamma, sigma, d)


def mass_spring_initial(params: MassSpringParams, seed: int):
    """Masses spread on a jittered circle of radius ``p / (2 pi)``, at rest."""
    rng = np.random.default_rng(seed)
    p, d = params.p, params.d
    ang = 2 * np.pi * np.arange(p) / p
    q = np.zeros((p, d))
    q[:, 0], q[:, 1 % d] = np.cos(ang), np.sin(ang)
    q *= max(1.0, p / (2 * np.pi))
    q += 0.1 * rng.standard_normal((p, d))
    return q, np.zeros((p, d))


def spring_columns(basis: MassSpringBasis) -> np.ndarray:
    start = basis.p * basis.d
    return np.arange(start, basis.m)


def run_mass_spring(p: int = 8, k: int = 4, d: int = 2, sigma: float = 0.5, gamma: float = 0.1,
                    dt: float = 0.1, T_grid=(100, 200, 400), instances: int = 50,
                    lambdas=None, burn_in: float = 50.0, base_seed: int = 0,
                    zero_force: bool = False) -> NonlinearCurve:
    """Full-network success of the regularized estimator on random spring networks.

    Success at a given lambda: for every velocity row the signs of all
    spring-feature coefficients (``q_i - q_j`` and its unit vector) match the
    true drift.  One path per instance; shorter horizons are prefixes.
    """
    T_grid = sorted(T_grid)
    lambdas = np.asarray(np.logspace(-3, 0, 16) if lambdas is None else lambdas, dtype=float)
    basis = MassSpringBasis(p, d)
    cols = spring_columns(basis)
    rows = np.arange(p * d, 2 * p * d)
    succ = np.zeros((len(T_grid), lambdas.size), dtype=int)
    n_burn = int(round(burn_in / dt))
    for i in range(instances):
        seed = mix_seed(base_seed, cell_key(p, None), i)
        params = mass_spring_network(p, k, mix_seed(seed, 0, 0), d, gamma, sigma)
        q0, v0 = mass_spring_initial(params, mix_seed(seed, 1, 0))
        traj = simulate_mass_spring(params, dt, burn_in + T_grid[-1], q0, v0,
                                    mix_seed(seed, 2, 0), zero_force)
        traj = Trajectory(traj.states[n_burn:], dt, seed, traj.model_tag)
        truth = np.sign(mass_spring_drift_matrix(params, basis))
        checkpoints = [int(round(T / dt)) for T in T_grid]
        for g, (n, Qhat, G) in enumerate(prefix_normal_equations(traj, basis, checkpoints)):
            ok = np.ones(lambdas.size, dtype=bool)
            for j, r in enumerate(rows):
                path = solve_path(Qhat, G[:, r], lambdas)
                row_truth = truth[j, cols]
                for li in range(lambdas.size):
                    if ok[li]:
                        ok[li] = np.array_equal(signs(path[li])[cols], row_truth)
                if not ok.any():
                    break
            succ[g] += ok
    return NonlinearCurve(list(T_grid), lambdas.tolist(), succ.tolist(), instances)


def run_pathway(T_grid=(50, 200, 800), dt: float = 0.01, instances: int = 20, lambdas=None,
                sigma: float = 1.0, rates=None, burn_in: float = 20.0,
                base_seed: int = 0) -> NonlinearCurve:
    """ROC area of support recovery for the 9-species pathway in the degree-2 monomial basis."""
    T_grid = sorted(T_grid)
    basis = MonomialBasis(9)
    theta0 = pathway_drift_matrix(basis, rates)
    lambdas = np.asarray(np.logspace(1, -4, 40) if lambdas is None else lambdas, dtype=float)
    order = np.argsort(-lambdas)
    x_star = pathway_fixed_point(theta0, basis)
    aucs = np.zeros((len(T_grid), instances))
    n_burn = int(round(burn_in / dt))
    for i in range(instances):
        seed = mix_seed(base_seed, cell_key(9, None), i)
        n_total = n_burn + int(round(T_grid[-1] / dt))
        traj = simulate_parametrized(theta0, basis, dt, n_total, x_star, seed, sigma)
        traj = Trajectory(traj.states[n_burn:], dt, seed, "pathway")
        checkpoints = [int(round(T / dt)) for T in T_grid]
        for g, (n, Qhat, G) in enumerate(prefix_normal_equations(traj, basis, checkpoints)):
            est = np.stack([solve_path(Qhat, G[:, r], lambdas[order], method="lars")
                            for r in range(9)], axis=1)
            aucs[g, i] = roc_auc(theta0, est)[1]
    se = (aucs.std(axis=1, ddof=1) / math.sqrt(instances)).tolist() if instances > 1 else None
    return NonlinearCurve(list(T_grid), lambdas[order].tolist(), [], instances,
                          aucs.mean(axis=1).tolist(), se)


def pathway_fixed_point(theta0, basis: BasisSet, x_init=None) -> np.ndarray:
    """A zero of the noiseless drift, found by integrating it to rest."""
    from scipy.integrate import solve_ivp

    x = np.ones(basis.p) if x_init is None else np.asarray(x_init, dtype=float)
    sol = solve_ivp(lambda t, y: theta0 @ basis(y), (0.0, 500.0), x, rtol=1e-10, atol=1e-12)
    return sol.y[:, -1]


# --- config files and output ------------------------------------------------

_LIST_KEYS = {"p": "p_list", "n": "n_grid", "lambdas": "lambda_grid", "metrics": "metrics"}


def parse_sweep_config(text: str) -> SweepSpec:
    """``key = value`` lines; ``#`` starts a comment; lists are comma separated.

    Keys are the ``SweepSpec`` field names, plus ``p`` for ``p_list``, ``n``
    for ``n_grid``, ``lambdas`` for ``lambda_grid`` and ``n_eta`` for a grid
    of horizons converted to ``n = round(n_eta / eta)``.
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        raw[key] = value
    types = {f.name: f.type for f in fields(SweepSpec)}
    kw = {}
    n_eta = None
    for key, value in raw.items():
        if key == "n_eta":
            n_eta = [float(v) for v in value.split(",")]
            continue
        name = _LIST_KEYS.get(key, key)
        if name not in types:
            raise ValueError(f"unknown key {key!r}")
        if name in ("p_list", "n_grid"):
            kw[name] = tuple(int(float(v)) for v in value.split(","))
        elif name == "lambda_grid":
            kw[name] = tuple(float(v) for v in value.split(","))
        elif name == "metrics":
            kw[name] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif name == "nested":
            kw[name] = value.lower() in ("1", "true", "yes")
        elif name in ("ensemble", "model", "success_mode", "estimator"):
            kw[name] = value
        elif name in ("instances", "base_seed", "draw_retries", "max_iter", "lambda_count",
                      "eta_fine_factor"):
            kw[name] = int(value)
        else:
            kw[name] = float(value)
    if n_eta is not None:
        eta = kw.get("eta", SweepSpec.eta)
        kw["n_grid"] = tuple(max(1, int(round(v / eta))) for v in n_eta)
    return SweepSpec(**kw)


def write_sweep_outputs(result: SweepResult, outdir) -> None:
    """``results.json``, ``curve_<p>.csv`` and ``complexity.csv`` in ``outdir``."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.json").write_text(json.dumps(result.to_dict(), indent=2))
    for p in result.spec.p_list:
        with open(out / f"curve_{p}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n_eta", "success", "se"])
            for row in result.curve(p):
                w.writerow([repr(float(v)) for v in row])
    with open(out / "complexity.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "n_eta_at_delta"])
        for p, v in empirical_sample_complexity(result, result.spec.delta).items():
            w.writerow([p, "not-reached" if v is None else repr(float(v))])
