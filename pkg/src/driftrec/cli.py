"""Command-line entry point: ``driftrec {gen,check,simulate,estimate,bounds,sweep}``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bounds as _bounds
from .basis import BASIS_NAMES, get_basis
from .ensembles import (
    DriftMatrix, GraphSpec, gen_dense, gen_dense_signed, gen_laplacian, gen_signed_regular,
    format_matrix, gen_sparse_shift, load_matrix,
)
from .estimator import RlsConfig, recover, threshold_estimator
from .harness import parse_sweep_config, run_sweep, write_sweep_outputs
from .lyapunov import assumption_report, solve_continuous, solve_discrete
from .sim import (
    MassSpringParams, format_trajectory, load_trajectory, sample_stationary_init,
    simulate_continuous, simulate_discrete, simulate_mass_spring,
)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_gen(a) -> int:
    e = a.ensemble
    if e == "sparse-shift":
        th = gen_sparse_shift(a.p, a.k, a.shift, a.seed)
    elif e == "dense":
        th = gen_dense(a.p, a.rho, a.seed)
    elif e == "dense-signed":
        th = gen_dense_signed(a.p, a.theta_min, a.rho, a.seed)
    elif e == "signed-regular":
        th = gen_signed_regular(a.p, int(a.k), a.theta_min, a.rho, a.seed)
    else:
        th = gen_laplacian(GraphSpec(a.p, int(a.k), a.graph_mode, a.seed), a.m)
    _emit(format_matrix(th.entries), a.out)
    return 0


def cmd_check(a) -> int:
    A = load_matrix(a.theta)
    th = DriftMatrix.from_array(A)
    cov = solve_discrete(th, a.eta) if a.eta else solve_continuous(th)
    rows = range(A.shape[0]) if a.row is None else [a.row]
    reports = [assumption_report(th, cov, r, a.eta).to_dict() for r in rows]
    _emit(json.dumps(reports[0] if a.row is not None else reports, indent=2), a.out)
    return 0


def cmd_simulate(a) -> int:
    if a.model == "mass-spring":
        C = load_matrix(a.adjacency)
        params = MassSpringParams.unit(C, a.gamma, a.sigma, a.d)
        rng = np.random.default_rng(a.seed)
        q0 = rng.standard_normal((params.p, a.d)) * max(1.0, params.p ** 0.5)
        traj = simulate_mass_spring(params, a.dt, a.T, q0, np.zeros_like(q0), a.seed,
                                    zero_force=a.zero_force)
    else:
        th = DriftMatrix.from_array(load_matrix(a.theta))
        p = th.p
        if a.model == "discrete":
            cov = solve_discrete(th, a.eta)
            x0 = sample_stationary_init(cov, a.seed + 1) if a.stationary else np.zeros(p)
            n = a.n if a.n is not None else int(round(a.T / a.eta))
            traj = simulate_discrete(th, a.eta, n, x0, a.seed)
        else:
            cov = solve_continuous(th)
            x0 = sample_stationary_init(cov, a.seed + 1) if a.stationary else np.zeros(p)
            T = a.T if a.T is not None else a.n * a.eta
            traj = simulate_continuous(th, T, a.eta, x0, a.seed, eta_fine=a.eta_fine)
    _emit(format_trajectory(traj), a.out)
    return 0


def cmd_estimate(a) -> int:
    traj = load_trajectory(a.traj)
    p_basis = traj.p // (2 * a.d) if a.basis == "mass-spring" else traj.p
    basis = get_basis(a.basis, p_basis, a.d)
    rows = None if a.rows is None else [int(r) for r in a.rows.split(",")]
    if a.basis == "mass-spring" and rows is None:
        rows = list(range(traj.p // 2, traj.p))
    if a.threshold is not None:
        res = threshold_estimator(traj, basis, a.threshold, rows)
    else:
        if a.lam is None:
            raise SystemExit("estimate: --lambda is required unless --threshold is given")
        res = recover(traj, basis, RlsConfig(a.lam, a.tol, a.max_iter), rows)
    _emit(json.dumps(res.to_dict(), indent=2), a.out)
    return 0 if res.converged else 1


_BOUND_PARAMS = ("k", "rho_min", "theta_min", "alpha", "C_min", "p", "delta", "D", "m", "B",
                 "L", "C", "entropy", "log_class_size", "mutual_info", "denominator")


def cmd_bounds(a) -> int:
    params = {n: getattr(a, n) for n in _BOUND_PARAMS if getattr(a, n) is not None}
    rep = _bounds.evaluate(a.theorem, params)
    _emit(json.dumps(rep.to_dict(a.horizon), indent=2), a.out)
    return 0


def cmd_sweep(a) -> int:
    with open(a.config) as fh:
        spec = parse_sweep_config(fh.read())
    res = run_sweep(spec)
    write_sweep_outputs(res, a.out)
    return 2 if res.incomplete else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="driftrec", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="draw a random drift matrix")
    g.add_argument("--ensemble", required=True,
                   choices=["sparse-shift", "dense", "dense-signed", "signed-regular", "laplacian"])
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--k", type=float, default=4)
    g.add_argument("--theta-min", type=float, default=1.0)
    g.add_argument("--rho", type=float, default=1.0)
    g.add_argument("--m", type=float, default=1.0)
    g.add_argument("--shift", type=float, default=7.0)
    g.add_argument("--graph-mode", default="uniform-regular",
                   choices=["uniform-regular", "bounded-degree-bernoulli"])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="assumption constants of a drift matrix")
    c.add_argument("--theta", required=True)
    c.add_argument("--row", type=int)
    c.add_argument("--eta", type=float, help="use the sampled-chain covariance")
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("simulate", help="simulate a trajectory")
    s.add_argument("--model", default="discrete", choices=["discrete", "continuous", "mass-spring"])
    s.add_argument("--theta")
    s.add_argument("--adjacency")
    s.add_argument("--eta", type=float, default=0.1)
    s.add_argument("--eta-fine", type=float)
    s.add_argument("--n", type=int)
    s.add_argument("--T", type=float)
    s.add_argument("--dt", type=float, default=0.1)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--gamma", type=float, default=0.1)
    s.add_argument("--sigma", type=float, default=0.5)
    s.add_argument("--zero-force", action="store_true")
    s.add_argument("--no-stationary", dest="stationary", action="store_false",
                   help="start at the origin instead of the stationary law")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", help="recover the signed support from a trajectory")
    e.add_argument("--traj", required=True)
    e.add_argument("--lambda", dest="lam", type=float)
    e.add_argument("--threshold", type=float, metavar="THETA_MIN",
                   help="least squares with the theta_min/2 sign rule instead")
    e.add_argument("--tol", type=float, default=1e-8)
    e.add_argument("--max-iter", type=int, default=100_000)
    e.add_argument("--basis", default="linear", choices=BASIS_NAMES)
    e.add_argument("--d", type=int, default=2, help="spatial dimension (mass-spring)")
    e.add_argument("--rows", help="comma-separated row indices")
    e.add_argument("--out")
    e.set_defaults(func=cmd_estimate)

    b = sub.add_parser("bounds", help="evaluate a sample-complexity bound")
    b.add_argument("--theorem", required=True, choices=sorted(_bounds.THEOREMS))
    for name in _BOUND_PARAMS:
        flags = {"--" + name.replace("_", "-").lower(), "--" + name.replace("_", "-")}
        b.add_argument(*sorted(flags), dest=name, type=float)
    b.add_argument("--horizon", type=float, help="T or n*eta at which to evaluate lambda")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    w = sub.add_parser("sweep", help="run a Monte-Carlo sweep from a key = value config")
    w.add_argument("config")
    w.add_argument("--out", default=".")
    w.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"driftrec {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
