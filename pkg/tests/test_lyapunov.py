import math

import numpy as np
import pytest

from driftrec.ensembles import DriftMatrix, adjacency_from_edges, gen_laplacian, gen_signed_regular
from driftrec.lyapunov import (
    UnstableDriftError, aggregate_reports, assumption_report, contraction_rate, incoherence,
    solve_continuous, solve_discrete,
)

FOOTNOTE_THETA = np.array([[-2.0, -1, -1], [1, -2, -1], [1, 1, -2]])
FOOTNOTE_THETA_2 = np.array([[-2.0, 1, 0], [-1, -2, 1], [0, -1, -2]])


def _random_stable(rng, p):
    M = rng.standard_normal((p, p)) / math.sqrt(p)
    return M - (np.linalg.eigvals(M).real.max() + 0.5 + rng.random()) * np.eye(p)


def test_half_identity():
    np.testing.assert_allclose(solve_continuous(-0.5 * np.eye(2)).Q, np.eye(2), atol=1e-14)


@pytest.mark.parametrize("theta", [FOOTNOTE_THETA, FOOTNOTE_THETA_2])
def test_footnote_matrices_share_quarter_identity(theta):
    cov = solve_continuous(theta)
    assert np.linalg.norm(cov.Q - 0.25 * np.eye(3)) < 1e-10
    assert cov.relative_residual < 1e-10


def test_laplacian_path_against_inverse():
    th = gen_laplacian(adjacency_from_edges(3, [(0, 1), (1, 2)]), 1.0)
    np.testing.assert_allclose(solve_continuous(th).Q, -0.5 * np.linalg.inv(th.entries),
                               rtol=1e-12)


@pytest.mark.parametrize("method", ["kron", "bartels-stewart"])
def test_methods_agree(method):
    rng = np.random.default_rng(0)
    th = _random_stable(rng, 12)
    Q = solve_continuous(th, method=method).Q
    assert np.linalg.norm(th @ Q + Q @ th.T + np.eye(12)) < 1e-10


def test_continuous_rejects_unstable():
    with pytest.raises(UnstableDriftError):
        solve_continuous(np.array([[0.1, 0.0], [0.0, -1.0]]))


def test_scalar_stein_hand_solution():
    # q = (1 - eta/2)^2 q + eta  ->  q = 1 / (1 - eta/4)
    cov = solve_discrete(-0.5 * np.eye(1), 0.1)
    assert cov.Q[0, 0] == pytest.approx(1.0256410256410255, rel=1e-14)


def test_discrete_residual_of_modified_equation():
    rng = np.random.default_rng(1)
    th = _random_stable(rng, 8)
    eta = 0.05
    while np.linalg.norm(np.eye(8) + eta * th, 2) >= 1:
        eta /= 2
    cov = solve_discrete(th, eta)
    Q = cov.Q
    res = th @ Q + Q @ th.T + eta * th @ Q @ th.T + np.eye(8)
    assert np.linalg.norm(res) / np.linalg.norm(Q) < 1e-10
    np.testing.assert_allclose(Q, Q.T, rtol=1e-12)
    assert np.linalg.eigvalsh(Q)[0] > 0


def test_discrete_kron_matches_scipy():
    rng = np.random.default_rng(2)
    th = _random_stable(rng, 6) - 2 * np.eye(6)
    a = solve_discrete(th, 0.05, method="kron").Q
    b = solve_discrete(th, 0.05, method="bartels-stewart").Q
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-12)


def test_discrete_rejects_zero_drift():
    with pytest.raises(UnstableDriftError):
        solve_discrete(np.zeros((2, 2)), 0.1)


def test_discrete_approaches_continuous():
    th = FOOTNOTE_THETA
    errs = [np.linalg.norm(solve_discrete(th, e).Q - solve_continuous(th).Q)
            for e in (1e-1, 1e-2, 1e-3)]
    slope = np.polyfit(np.log10([1e-1, 1e-2, 1e-3]), np.log10(errs), 1)[0]
    assert abs(slope - 1.0) < 0.15


def test_report_diagonal_case():
    th = DriftMatrix.from_array(-2.0 * np.eye(4), kind="custom")
    rep = assumption_report(th, solve_continuous(th), row=1)
    assert rep.support == [1]
    assert rep.c_min == pytest.approx(0.25)
    assert rep.alpha == pytest.approx(1.0)
    assert rep.rho_min == pytest.approx(2.0)


def test_report_empty_support_is_degenerate():
    cov = solve_continuous(-np.eye(2))
    rep = assumption_report(np.array([[-1.0, 0.0], [0.0, 0.0]]), cov, 1)
    assert rep.degenerate and rep.alpha == 1.0 and math.isnan(rep.c_min)
    assert rep.to_dict()["c_min"] is None


def test_report_keys():
    th = gen_signed_regular(10, 3, 1.0, 0.5, seed=4)
    rep = assumption_report(th, solve_continuous(th), 0, eta=0.01).to_dict()
    assert set(rep) == {"row", "support", "c_min", "alpha", "rho_min", "d", "k", "theta_min"}
    assert rep["k"] == 4 and rep["theta_min"] == 1.0


def test_signed_regular_report_reproducible():
    a = gen_signed_regular(10, 3, 1.0, 0.5, seed=8)
    b = gen_signed_regular(10, 3, 1.0, 0.5, seed=8)
    ra = assumption_report(a, solve_continuous(a), 2)
    rb = assumption_report(b, solve_continuous(b), 2)
    assert ra.c_min == rb.c_min and ra.alpha == rb.alpha
    assert math.isfinite(ra.c_min) and ra.alpha <= 1


def test_laplacian_alpha_lower_bound():
    A = adjacency_from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
    m, k = 1.5, 3
    th = gen_laplacian(A, m)
    cov = solve_continuous(th)
    for r in range(6):
        assert assumption_report(th, cov, r).alpha >= 1 - k / (k + m) - 1e-12


def test_contraction_rate_bracket():
    rng = np.random.default_rng(5)
    for _ in range(5):
        th = _random_stable(rng, 5)
        ev = np.linalg.eigvalsh(0.5 * (th + th.T))
        for eta in (1e-2, 1e-3):
            D = contraction_rate(th, eta)
            c = 10 * np.linalg.norm(th, 2) ** 2
            assert -ev[-1] - c * eta <= D <= -ev[0] + c * eta


def test_d_times_cmin_at_most_one():
    th = gen_signed_regular(12, 3, 0.5, 0.5, seed=6)
    eta = 0.05
    cov = solve_discrete(th, eta)
    for r in range(12):
        rep = assumption_report(th, cov, r, eta=eta)
        assert rep.d * rep.c_min <= 1 + 1e-12


def test_incoherence_empty_blocks():
    assert incoherence(np.eye(3), []) == 0.0
    assert incoherence(np.eye(3), [0, 1, 2]) == 0.0


def test_aggregate_takes_worst_case():
    th = gen_signed_regular(10, 3, 1.0, 0.5, seed=9)
    cov = solve_continuous(th)
    reps = [assumption_report(th, cov, r) for r in range(10)]
    agg = aggregate_reports(reps)
    assert agg["alpha"] == min(r.alpha for r in reps)
    assert agg["c_min"] == min(r.c_min for r in reps)
