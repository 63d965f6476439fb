"""Trajectory generators: the discrete linear model, Euler-Maruyama for the
continuous linear and linearly parametrized models, and the damped
mass-spring network.

Noise is always drawn as one ``standard_normal((n, dim))`` block from
``default_rng(seed)``, time-major and coordinate-minor, so a path is
reproducible from ``(seed, step, n)`` alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from ._validation import check_int, check_positive, check_square
from .basis import MonomialBasis
from .ensembles import DriftMatrix
from .lyapunov import StationaryCovariance


class SimulationError(RuntimeError):
    """Non-finite state or singular configuration during a simulation."""


@dataclass(frozen=True)
class Trajectory:
    """``states[t]`` is the state at time ``t * eta``; ``n + 1`` rows."""

    states: np.ndarray
    eta: float
    seed: int | None = None
    model_tag: str = "discrete"

    def __post_init__(self):
        if self.states.ndim != 2 or self.states.shape[0] < 1:
            raise ValueError("states must be an (n+1, p) array")
        if not self.eta > 0:
            raise ValueError("eta must be > 0")

    @property
    def n(self) -> int:
        return self.states.shape[0] - 1

    @property
    def p(self) -> int:
        return self.states.shape[1]

    @property
    def T(self) -> float:
        return self.n * self.eta

    def head(self, n: int) -> "Trajectory":
        """The first ``n`` transitions."""
        return Trajectory(self.states[: n + 1], self.eta, self.seed, self.model_tag)


@dataclass(frozen=True)
class MassSpringParams:
    adjacency: np.ndarray
    rest_lengths: np.ndarray
    gamma: float = 0.1
    sigma: float = 0.5
    d: int = 2

    def __post_init__(self):
        C = np.asarray(self.adjacency, dtype=float)
        D = np.asarray(self.rest_lengths, dtype=float)
        if C.shape != D.shape or C.shape[0] != C.shape[1]:
            raise ValueError("adjacency and rest_lengths must be square and equal-shaped")
        if not np.array_equal(C, C.T) or np.any(np.diag(C) != 0) or not np.isin(C, (0, 1)).all():
            raise ValueError("adjacency must be symmetric 0/1 with zero diagonal")
        if not np.allclose(D, D.T) or np.any(D[C == 1] < 0):
            raise ValueError("rest lengths must be symmetric and >= 0 on edges")
        check_positive(self.gamma, "gamma")
        check_positive(self.sigma, "sigma", strict=False)
        check_int(self.d, "d", low=1)

    @property
    def p(self) -> int:
        return self.adjacency.shape[0]

    @classmethod
    def unit(cls, adjacency, gamma=0.1, sigma=0.5, d=2) -> "MassSpringParams":
        """Unit rest lengths on every edge."""
        C = np.asarray(adjacency, dtype=float)
        return cls(C, C.copy(), gamma, sigma, d)


def _theta(theta) -> np.ndarray:
    return check_square(theta.entries if isinstance(theta, DriftMatrix) else theta, "theta")


def _first_bad_row(states: np.ndarray) -> int | None:
    bad = ~np.isfinite(states).all(axis=1)
    return int(np.argmax(bad)) if bad.any() else None


def sample_stationary_init(Q, seed: int) -> np.ndarray:
    """``L z`` with ``L`` the lower Cholesky factor of ``Q`` and ``z ~ N(0, I)``."""
    Q = np.asarray(Q.Q if isinstance(Q, StationaryCovariance) else Q, dtype=float)
    try:
        L = np.linalg.cholesky(Q)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance is not positive definite") from exc
    z = np.random.default_rng(seed).standard_normal(Q.shape[0])
    return L @ z


def simulate_discrete(theta, eta: float, n: int, x0, seed: int) -> Trajectory:
    """``x(t) = x(t-1) + eta theta x(t-1) + w(t)``, ``w(t) ~ N(0, eta I)``."""
    A = _theta(theta)
    eta = check_positive(eta, "eta")
    n = check_int(n, "n", low=1)
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    p = A.shape[0]
    if x0.shape != (p,):
        raise ValueError(f"x0 must have length {p}")
    W = np.random.default_rng(seed).standard_normal((n, p)) * math.sqrt(eta)
    states = _kernels.linear_recursion(np.eye(p) + eta * A, x0, W)
    bad = _first_bad_row(states)
    if bad is not None:
        raise SimulationError(f"non-finite state at step {bad}")
    return Trajectory(states, eta, seed, "discrete")


def discrete_linear_statistics(theta, eta: float, n: int, x0, seed: int,
                               chunk: int = 1 << 16):
    """Normal equations of a linear-basis fit to ``simulate_discrete(theta, eta, n, x0, seed)``
    without storing the path.

    Returns ``(Qhat, G)`` exactly as ``build_all_normal_equations`` would on
    the stored trajectory (same noise stream), in ``O(chunk * p)`` memory.
    """
    A = _theta(theta)
    eta = check_positive(eta, "eta")
    n = check_int(n, "n", low=1)
    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    p = A.shape[0]
    if x.shape != (p,):
        raise ValueError(f"x0 must have length {p}")
    rng = np.random.default_rng(seed)
    step = np.eye(p) + eta * A
    S = np.zeros((p, p))
    B = np.zeros((p, p))
    done = 0
    while done < n:
        c = min(chunk, n - done)
        W = rng.standard_normal((c, p)) * math.sqrt(eta)
        states = _kernels.linear_recursion(step, x, W)
        bad = _first_bad_row(states)
        if bad is not None:
            raise SimulationError(f"non-finite state at step {done + bad}")
        F = states[:-1]
        S += F.T @ F
        B += F.T @ np.diff(states, axis=0)
        x = states[-1]
        done += c
    Q = S / n
    return 0.5 * (Q + Q.T), B / (n * eta)


def _ratio(big: float, small: float, what: str) -> int:
    r = round(big / small)
    if r < 1 or abs(r * small - big) > 1e-9 * max(big, 1.0):
        raise ValueError(f"{what}: {big} is not an integer multiple of {small}")
    return r


def simulate_continuous(theta, T: float, eta_sample: float, x0, seed: int,
                        eta_fine: float | None = None) -> Trajectory:
    """Euler-Maruyama at step ``eta_fine`` (default ``eta_sample / 10``), keeping
    every ``eta_sample / eta_fine``-th state.

    The fine path depends only on ``(seed, eta_fine, T)``, so trajectories
    sampled at different divisors of the same fine grid are subsamples of
    one path.
    """
    eta_sample = check_positive(eta_sample, "eta_sample")
    T = check_positive(T, "T")
    if eta_fine is None:
        eta_fine = eta_sample / 10.0
    eta_fine = check_positive(eta_fine, "eta_fine")
    if eta_fine > eta_sample:
        raise ValueError("eta_fine must not exceed eta_sample")
    factor = _ratio(eta_sample, eta_fine, "eta_sample/eta_fine")
    n = _ratio(T, eta_sample, "T/eta_sample")
    fine = simulate_discrete(theta, eta_fine, n * factor, x0, seed)
    return Trajectory(fine.states[::factor], eta_sample, seed, f"continuous({eta_fine!r})")


def simulate_parametrized(theta, basis, dt: float, n: int, x0, seed: int,
                          sigma: float = 1.0) -> Trajectory:
    """Euler-Maruyama for ``dx = theta F(x) dt + sigma db`` with ``F = basis``."""
    Th = np.asarray(theta, dtype=float)
    dt = check_positive(dt, "dt")
    n = check_int(n, "n", low=1)
    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    p = x.shape[0]
    if Th.shape != (p, basis.m):
        raise ValueError(f"theta must have shape {(p, basis.m)}")
    W = np.random.default_rng(seed).standard_normal((n, p)) * (sigma * math.sqrt(dt))
    if type(basis) is MonomialBasis:
        out, bad = _kernels.monomial2_euler(np.ascontiguousarray(Th), x, W, dt)
        if bad >= 0:
            raise SimulationError(f"non-finite state at step {bad}")
        return Trajectory(out, dt, seed, "parametrized")
    out = np.empty((n + 1, p))
    out[0] = x
    for t in range(n):
        x = x + dt * (Th @ basis(x)) + W[t]
        if not np.isfinite(x).all():
            raise SimulationError(f"non-finite state at step {t + 1}")
        out[t + 1] = x
    return Trajectory(out, dt, seed, "parametrized")


def spring_forces(q: np.ndarray, params: MassSpringParams, zero_force: bool = False) -> np.ndarray:
    """``-grad U(q)`` for ``U = 1/2 sum_{i<j} C_ij (|q_i - q_j| - D_ij)^2``; ``q`` is (p, d)."""
    C, D = params.adjacency, params.rest_lengths
    iu, ju = np.nonzero(np.triu(C, 1))
    delta = q[iu] - q[ju]
    dist = np.linalg.norm(delta, axis=1)
    if np.any(dist == 0):
        if not zero_force:
            e = int(np.argmax(dist == 0))
            raise SimulationError(f"masses {iu[e]} and {ju[e]} coincide on an edge")
    scale = np.divide(dist - D[iu, ju], dist, out=np.zeros_like(dist), where=dist > 0)
    pull = scale[:, None] * delta
    F = np.zeros_like(q)
    np.add.at(F, iu, -pull)
    np.add.at(F, ju, pull)
    return F


def spring_energy(q: np.ndarray, params: MassSpringParams) -> float:
    C, D = params.adjacency, params.rest_lengths
    iu, ju = np.nonzero(np.triu(C, 1))
    dist = np.linalg.norm(q[iu] - q[ju], axis=1)
    return 0.5 * float(np.sum((dist - D[iu, ju]) ** 2))


def mechanical_energy(state: np.ndarray, params: MassSpringParams) -> float:
    p, d = params.p, params.d
    q = state[: p * d].reshape(p, d)
    v = state[p * d:]
    return 0.5 * float(v @ v) + spring_energy(q, params)


def simulate_mass_spring(params: MassSpringParams, dt: float, T: float, q0, v0, seed: int,
                         zero_force: bool = False) -> Trajectory:
    """Semi-implicit Euler for the damped noisy spring network.

    ``v <- v + dt (-gamma v - grad U(q)) + sigma sqrt(dt) xi`` then
    ``q <- q + dt v`` with the updated ``v``.  Rows are ``[q, v]`` flattened
    mass-major.  Coincident masses on an edge raise unless ``zero_force``.
    """
    dt = check_positive(dt, "dt")
    T = check_positive(T, "T")
    n = _ratio(T, dt, "T/dt")
    p, d = params.p, params.d
    q = np.asarray(q0, dtype=float).reshape(p, d).copy()
    v = np.asarray(v0, dtype=float).reshape(p, d).copy()
    xi = np.random.default_rng(seed).standard_normal((n, p * d)).reshape(n, p, d)
    xi *= params.sigma * math.sqrt(dt)
    out = np.empty((n + 1, 2 * p * d))
    out[0, : p * d], out[0, p * d:] = q.ravel(), v.ravel()
    g = params.gamma
    for t in range(n):
        v = v + dt * (-g * v + spring_forces(q, params, zero_force)) + xi[t]
        q = q + dt * v
        out[t + 1, : p * d], out[t + 1, p * d:] = q.ravel(), v.ravel()
        if not (np.isfinite(q).all() and np.isfinite(v).all()):
            raise SimulationError(f"non-finite state at step {t + 1}")
    tag = f"mass-spring(masses={p},d={d},gamma={g!r},sigma={params.sigma!r})"
    return Trajectory(out, dt, seed, tag)


def mass_spring_drift_matrix(params: MassSpringParams, basis) -> np.ndarray:
    """Coefficients of the velocity drift in a ``MassSpringBasis``.

    Row ``i*d + a`` is the drift of velocity coordinate ``(i, a)``:
    ``-gamma`` on its own velocity, ``-1`` on ``q_i - q_j`` and ``D_ij`` on
    the unit vector along ``q_i - q_j`` for every neighbour ``j`` (with the
    sign flipped when the stored pair is ``(j, i)``).
    """
    p, d = params.p, params.d
    if basis.p != p or basis.d != d:
        raise ValueError("basis does not match the network")
    theta = np.zeros((p * d, basis.m))
    C, D = params.adjacency, params.rest_lengths
    for i in range(p):
        for a in range(d):
            r = i * d + a
            theta[r, basis.column("v", i, a=a)] = -params.gamma
            for j in np.flatnonzero(C[i]):
                s = 1.0 if i < j else -1.0
                theta[r, basis.column("dq", i, j, a)] = -s
                if D[i, j] != 0:
                    theta[r, basis.column("uq", i, j, a)] = s * D[i, j]
    return theta


def mass_spring_edge_columns(basis) -> dict:
    """Map each pair ``(i, j)``, ``i < j`` to the column indices of its features."""
    out = {}
    for i, j in basis.pairs:
        out[(i, j)] = [basis.column(g, i, j, a) for g in ("dq", "uq") for a in range(basis.d)]
    return out


# --- pathway-style polynomial network ---------------------------------------

PATHWAY_SPECIES = ("R", "L", "LR*", "LR*K", "K", "K*", "S", "K*S", "S*")

DEFAULT_PATHWAY_RATES = {
    "kf1": 0.2, "kr1": 0.5, "kf2": 0.2, "kr2": 0.5, "kf3": 0.5,
    "kf4": 0.2, "kr4": 0.5, "kf5": 0.5,
    # turnover keeping the open system stationary
    "production": 1.0, "decay": 0.2,
}


def pathway_drift_matrix(basis, rates: dict | None = None) -> np.ndarray:
    """Mass-action drift of the 9-species receptor/kinase/substrate pathway.

    Species order follows ``PATHWAY_SPECIES``.  Reactions: R + L <-> LR*,
    LR* + K <-> LR*K, LR*K -> LR* + K*, K* + S <-> K*S, K*S -> K* + S*.
    Every species also has constant production and first-order decay so that
    the noisy system has a stationary regime.  Returned in the coordinates of
    a 9-variable ``MonomialBasis``.
    """
    r = dict(DEFAULT_PATHWAY_RATES)
    r.update(rates or {})
    if basis.p != 9:
        raise ValueError("pathway basis must have p = 9")
    names = list(basis.names)

    def col(*idx):
        if not idx:
            return names.index("1")
        if len(idx) == 1:
            return names.index(f"x{idx[0]}")
        a, b = sorted(idx)
        return names.index(f"x{a}*x{b}")

    th = np.zeros((9, basis.m))
    # (rate, reactant monomial, stoichiometry {species: change})
    reactions = [
        (r["kf1"], (1, 2), {1: -1, 2: -1, 3: +1}),
        (r["kr1"], (3,), {1: +1, 2: +1, 3: -1}),
        (r["kf2"], (3, 5), {3: -1, 5: -1, 4: +1}),
        (r["kr2"], (4,), {3: +1, 5: +1, 4: -1}),
        (r["kf3"], (4,), {4: -1, 3: +1, 6: +1}),
        (r["kf4"], (6, 7), {6: -1, 7: -1, 8: +1}),
        (r["kr4"], (8,), {6: +1, 7: +1, 8: -1}),
        (r["kf5"], (8,), {8: -1, 6: +1, 9: +1}),
    ]
    for rate, mono, change in reactions:
        c = col(*mono)
        for s, nu in change.items():
            th[s - 1, c] += nu * rate
    for s in range(1, 10):
        th[s - 1, col()] += r["production"]
        th[s - 1, col(s)] -= r["decay"]
    return th


# --- trajectory file format -------------------------------------------------

TRAJ_HEADER = "# driftrec-traj"


def format_trajectory(traj: Trajectory) -> str:
    """Header ``# driftrec-traj p=<cols> n=<int> eta=<float> model=<tag>`` then CSV rows."""
    lines = [f"{TRAJ_HEADER} p={traj.p} n={traj.n} eta={traj.eta!r} model={traj.model_tag}"]
    lines += [",".join(repr(float(v)) for v in row) for row in traj.states]
    return "\n".join(lines) + "\n"


def save_trajectory(path, traj: Trajectory) -> None:
    Path(path).write_text(format_trajectory(traj))


def load_trajectory(path) -> Trajectory:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith(TRAJ_HEADER):
        raise ValueError(f"{path}: missing '{TRAJ_HEADER}' header")
    fields = dict(tok.split("=", 1) for tok in text[0][len(TRAJ_HEADER):].split())
    p, n, eta = int(fields["p"]), int(fields["n"]), float(fields["eta"])
    rows = [line for line in text[1:] if line.strip()]
    states = np.array([[float(v) for v in row.split(",")] for row in rows])
    if states.shape != (n + 1, p):
        raise ValueError(f"{path}: expected {(n + 1, p)} values, found {states.shape}")
    return Trajectory(states, eta, None, fields.get("model", "discrete"))
