import math

import numpy as np
import pytest

from driftrec import bounds as B
from driftrec.ensembles import gen_dense_signed, gen_signed_regular

# Frozen values.  Each is reproduced here by an independent computation
# (plain arithmetic, scipy quadrature, mpmath at 30 digits) before freezing.
UB_CONT_EXAMPLE = 331761.9856040811      # 4e4 * log(4000)
UB_DISC_EXAMPLE = 165880.99280204056     # 2e4 * log(4000)
LB_NONLIN_EXAMPLE = 0.8664339756999316   # log(32) / 4
KM_G_3_4 = 0.3203772410170410            # Stieltjes transform, k=3, z=4
DEN_SPARSE_1_3_1 = 0.9362543200505056
DEN_DENSE_SQRT2_1 = 0.3819660112501051   # 3 - 1/C(1, 1) = (3 - sqrt 5) / 2


def test_frozen_values_match_plain_arithmetic():
    assert UB_CONT_EXAMPLE == pytest.approx(4e4 * math.log(4000), rel=1e-15)
    assert UB_DISC_EXAMPLE == pytest.approx(2e4 * math.log(4000), rel=1e-15)
    assert LB_NONLIN_EXAMPLE == pytest.approx(math.log(32) / 4, rel=1e-15)
    assert DEN_DENSE_SQRT2_1 == pytest.approx((3 - math.sqrt(5)) / 2, rel=1e-14)


def test_ub_continuous_example():
    r = B.ub_sparse_continuous(1, 1, 1, 1, 1, 100, 0.1)
    assert r.value == pytest.approx(UB_CONT_EXAMPLE, rel=1e-12)
    lam = r.lambda_suggested(50.0)
    assert lam == pytest.approx(math.sqrt(36 * math.log(4000) / 50))


def test_ub_discrete_example_and_half_of_continuous():
    r = B.ub_discrete(1, 1, 1, 1, 1, 100, 0.1)
    assert r.value == pytest.approx(UB_DISC_EXAMPLE, rel=1e-12)
    c = B.ub_sparse_continuous(3, 0.7, 0.4, 0.6, 0.2, 50, 0.05).value
    d = B.ub_discrete(3, 0.7, 0.4, 0.6, 0.2, 50, 0.05).value
    assert d == pytest.approx(c / 2, rel=1e-14)


def test_ub_continuous_log_additivity():
    a = B.ub_sparse_continuous(2, 1.5, 0.5, 0.8, 0.3, 100, 0.1).value
    b = B.ub_sparse_continuous(2, 1.5, 0.5, 0.8, 0.3, 200, 0.1).value
    pref = 2e4 * 4 * (2 / 1.5 ** 2 + 4) / (0.64 * 1.5 * 0.09)
    assert b - a == pytest.approx(pref * math.log(2), rel=1e-12)


def test_ub_domain_errors():
    with pytest.raises(ValueError):
        B.ub_sparse_continuous(1, 1, 1, 1.5, 1, 10, 0.1)
    with pytest.raises(ValueError):
        B.ub_sparse_continuous(1, 1, 1, 1, 1, 10, 1.0)
    with pytest.raises(ValueError):
        B.ub_discrete(1, 0, 1, 1, 1, 10, 0.1)


def test_ub_laplacian_diverges_at_both_ends():
    mid = B.ub_laplacian(4, 1.0, 36, 0.1).value
    assert 0 < mid < math.inf
    assert B.ub_laplacian(4, 1e-3, 36, 0.1).value > 1e6 * mid
    big = B.ub_laplacian(4, 1e3, 36, 0.1).value
    assert big > 10 * mid
    assert B.ub_laplacian(4, 1e4, 36, 0.1).value > 50 * big
    ratio = B.ub_laplacian(4, 1.0, 72, 0.1).value / mid
    assert ratio == pytest.approx(math.log(8 * 36 * 4 / 0.1) / math.log(4 * 36 * 4 / 0.1))


def test_lb_sparse_and_dense():
    assert B.lb_sparse(3, 2.0, 1.0, math.exp(10)).value == pytest.approx(20.0)
    assert B.lb_sparse(3, 1.0, 1.0, 50).value == pytest.approx(math.log(50))
    assert B.lb_dense(2.0, 1.0, 50).value == pytest.approx(100.0)
    # branch switch at rho = theta
    assert B.lb_sparse(3, 0.5, 0.5, 10).value == pytest.approx(2 * math.log(10))
    r = B.lb_dense(1.0, 1.0, 10, C=3.0)
    assert r.value == 30.0 and r.note == B.UNSPECIFIED_CONSTANT


def test_lb_nonlinear():
    r = B.lb_nonlinear(2, 64, 1, 1, 1, C=0)
    assert r.value == pytest.approx(LB_NONLIN_EXAMPLE, rel=1e-14)
    assert not r.vacuous
    assert B.lb_nonlinear(2, 64, 1, 1, 2, C=0).value < r.value
    vac = B.lb_nonlinear(2, 3, 100.0, 1.0, 0.0)
    assert vac.vacuous and vac.value <= 0
    with pytest.raises(ValueError):
        B.lb_nonlinear(2, 2, 1, 1, 1)
    with pytest.raises(ValueError):
        B.lb_nonlinear(2, 10, 1, 2, 1)


def test_lb_generic_combiner():
    r = B.lb_generic(10.0, 1.0, 2.0, 0.5)
    assert r.value == pytest.approx((10 - 1 - 4 - 2) / 0.5)
    assert B.lb_generic(1.0, 1.0, 1.0, 1.0).vacuous


def test_kesten_mckay_frozen_value():
    assert B.kesten_mckay_G(3, 4.0) == pytest.approx(KM_G_3_4, abs=1e-15)
    assert B.kesten_mckay_G_quad(3, 4.0) == pytest.approx(KM_G_3_4, abs=1e-10)


@pytest.mark.parametrize("k", [3, 4, 5])
def test_kesten_mckay_density_is_probability(k):
    from scipy import integrate
    a = B.kesten_mckay_edge(k)
    mass, _ = integrate.quad(lambda v: float(B.kesten_mckay_density(k, v)), -a, a)
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_kesten_mckay_asymptotics():
    for k in (3, 4, 6):
        assert 1e8 * B.kesten_mckay_G(k, 1e8) == pytest.approx(1.0, abs=1e-6)
        edge = B.kesten_mckay_edge(k)
        assert B.kesten_mckay_G(k, edge + 1e-12) == pytest.approx(
            math.sqrt(k - 1) / (k - 2), abs=1e-5)


def test_kesten_mckay_removable_point_z_equals_k():
    # the unrationalized form is 0/0 at z = k; the rationalized one is smooth there
    assert B.kesten_mckay_G(4, 4.0) == pytest.approx(
        0.5 * (B.kesten_mckay_G(4, 4.0 - 1e-7) + B.kesten_mckay_G(4, 4.0 + 1e-7)), abs=1e-12)


def test_kesten_mckay_domain():
    with pytest.raises(ValueError):
        B.kesten_mckay_G(3, 2.0)
    with pytest.raises(ValueError):
        B.kesten_mckay_G(2, 5.0)


def _limit_at_zero(f, h=1e-8):
    # both denominators behave like L - a sqrt(rho) + O(rho) near zero; one
    # Richardson step in sqrt(rho) cancels the square-root term
    return 2 * f(h / 4) - f(h)


def test_square_root_edge_behaviour():
    # at rho = 1e-8 the plain value is still ~1e-4 away from the limit
    gap = B.denominator_dense(math.sqrt(2), 0.0) - B.denominator_dense(math.sqrt(2), 1e-8)
    assert gap == pytest.approx(1e-4, rel=1e-3)


def test_denominator_sparse_values():
    assert B.denominator_sparse(1.0, 3, 1.0) == pytest.approx(DEN_SPARSE_1_3_1, rel=1e-14)
    g = B.kesten_mckay_G(3, 1 + 2 * math.sqrt(2))
    assert DEN_SPARSE_1_3_1 == pytest.approx(1 + 2 * math.sqrt(2) - 1 / g, rel=1e-14)
    for k in (3, 4, 5):
        lim = 0.7 * k / math.sqrt(k - 1)
        assert _limit_at_zero(lambda r: B.denominator_sparse(0.7, k, r)) == pytest.approx(
            lim, abs=1e-8)
        assert B.denominator_sparse(0.7, k, 0.0) == lim
    vals = [B.denominator_sparse(1.0, 3, r) for r in np.linspace(0.01, 5, 30)]
    assert np.all(np.diff(vals) < 0)


def test_wigner_c_values():
    assert B.wigner_C(1.0, 0.0) == 1.0
    for a in (0.3, 1.0, 2.5):
        for r in (0.0, 0.4, 2.0):
            assert B.wigner_C(a, r) == pytest.approx(B.wigner_C(1.0, r / math.sqrt(a))
                                                     / math.sqrt(a), rel=1e-14)
    # the unrationalized expression agrees away from cancellation
    a, r = 1.7, 0.9
    raw = (-math.sqrt(r * (4 * math.sqrt(a) + r)) + 2 * math.sqrt(a) + r) / (2 * a)
    assert B.wigner_C(a, r) == pytest.approx(raw, rel=1e-13)


def test_denominator_dense_values():
    assert B.denominator_dense(math.sqrt(2), 1.0) == pytest.approx(DEN_DENSE_SQRT2_1, rel=1e-14)
    lim = 1.3 / math.sqrt(2)
    assert _limit_at_zero(lambda r: B.denominator_dense(1.3, r)) == pytest.approx(lim, abs=1e-8)
    assert B.denominator_dense(1.3, 0.0) == pytest.approx(lim, rel=1e-15)
    vals = [B.denominator_dense(1.0, r) for r in np.linspace(0.01, 5, 30)]
    assert np.all(np.diff(vals) < 0)


def test_mc_denominator_constant_sampler_is_zero():
    fixed = -np.diag([1.0, 2.0, 3.0]) + 0.1 * (np.ones((3, 3)) - np.eye(3))
    mc = B.lb_generic_denominator_mc(lambda p, s: fixed, 3, 10, seed=0)
    assert abs(mc.value) < 1e-12 and abs(mc.bias_corrected) < 1e-12


def test_mc_denominator_signed_regular_matches_closed_form():
    # the Monte Carlo value carries the 1/2 of the trace formula; the closed
    # form does not, hence the factor 2
    sampler = lambda p, s: gen_signed_regular(p, 3, 1.0, 1.0, s, shift="fixed")
    mc = B.lb_generic_denominator_mc(sampler, 200, 200, seed=2)
    assert abs(2 * mc.bias_corrected - DEN_SPARSE_1_3_1) <= 3 * 2 * mc.stderr


def test_mc_denominator_needs_two_samples():
    with pytest.raises(ValueError):
        B.lb_generic_denominator_mc(lambda p, s: -np.eye(p), 2, 1, seed=0)


def test_mean_inverse_trace_smoke():
    sampler = lambda p, s: gen_dense_signed(p, math.sqrt(2), 1.0, s, shift="fixed")
    mc = B.mean_inverse_trace_mc(sampler, 50, 20, seed=0)
    assert mc.value == pytest.approx(B.wigner_C(1.0, 1.0), rel=0.05) and mc.stderr > 0


def test_evaluate_dispatch():
    r = B.evaluate("1", dict(k=1, rho_min=1, theta_min=1, alpha=1, C_min=1, p=100, delta=0.1))
    assert r.value == pytest.approx(UB_CONT_EXAMPLE)
    d = r.to_dict(horizon=10.0)
    assert d["lambda_horizon"] == 10.0 and "lambda_suggested" in d
    assert B.evaluate("5", dict(rho_min=1, theta_min=1, p=7)).value == 7.0
    with pytest.raises(ValueError, match="missing"):
        B.evaluate("3", dict(k=3))
    with pytest.raises(ValueError):
        B.evaluate("9", {})
