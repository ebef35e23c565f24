import math

import numpy as np
import pytest

from funcineq import measures as ms


def test_log_density_named_points():
    assert ms.evaluate_log_density(ms.gaussian(1.0), 0.0) == 0.0
    assert ms.evaluate_log_density(ms.exponential(2.0), 1.5) == -3.0
    assert ms.evaluate_log_density(ms.uniform(0.0, 1.0), 2.0) == -math.inf


def test_dimension_mismatch():
    prod = ms.product([ms.gaussian(1.0), ms.gaussian(1.0)])
    with pytest.raises(ms.DimensionMismatch):
        ms.evaluate_log_density(prod, np.zeros(3))


def test_second_moment_gaussian_and_laplace():
    g = ms.compute_moments(ms.gaussian(1.0), requests=("second",))
    assert g.second == pytest.approx(1.0, rel=1e-3)
    lap = ms.compute_moments(ms.exponential(1.0), requests=("second",))
    assert lap.second == pytest.approx(2.0, rel=1e-3)


def test_perturbed_gaussian_variance_closed_form():
    # exp(-x^2/2 - x^2/2) is Gaussian(2): variance 1/2
    mom = ms.compute_moments(
        ms.gaussian(1.0), ms.half_quadratic_perturbation(1.0), requests=("second",))
    assert mom.second == pytest.approx(0.5, rel=1e-3)


@pytest.mark.parametrize("sigma", [0.5, 2.0, 3.0])
def test_dilation_scales_variance(sigma):
    base = ms.subbotin(1.5)
    v0 = ms.compute_moments(base, requests=("second",)).second
    v1 = ms.compute_moments(ms.dilate(base, sigma), requests=("second",)).second
    assert v1 == pytest.approx(sigma**2 * v0, rel=2e-3)


def test_product_trace_additivity():
    comps = [ms.gaussian(1.0), ms.exponential(1.0), ms.uniform(-1, 1)]
    singles = [ms.compute_moments(c, requests=("second",)).second for c in comps]
    prod = ms.compute_moments(ms.product(comps), requests=("second", "sigma2"))
    assert prod.second == pytest.approx(sum(singles), rel=2e-3)
    assert prod.sigma2 == pytest.approx(max(singles), rel=2e-3)


def test_separable_perturbation_product_moments():
    comps = [ms.gaussian(1.0), ms.gaussian(2.0)]
    pert = ms.separable_perturbation(
        [ms.abs_perturbation(0.2), ms.zero_perturbation()])
    mom = ms.compute_moments(ms.product(comps), pert,
                             requests=["second", ("sF", 1.0)])
    solo = ms.compute_moments(ms.gaussian(1.0), ms.abs_perturbation(0.2),
                              requests=["second", ("sF", 1.0)])
    other = ms.compute_moments(ms.gaussian(2.0), requests=("second",))
    assert mom.second == pytest.approx(solo.second + other.second, rel=2e-3)
    assert mom.exp_log("sF", 1.0) == pytest.approx(solo.exp_log("sF", 1.0), abs=1e-9)


def test_exp_moment_log_convex_monotone_in_s():
    # F >= 0 makes s -> ln mu(e^{sF}) nondecreasing and convex
    g = ms.gaussian(1.0)
    f = ms.abs_perturbation(0.3)
    ss = [0.25, 0.5, 1.0, 1.5, 2.0]
    mom = ms.compute_moments(g, f, requests=[("sF", s) for s in ss])
    vals = [mom.exp_log("sF", s) for s in ss]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    for i in range(1, len(ss) - 1):
        lam = (ss[i] - ss[i - 1]) / (ss[i + 1] - ss[i - 1])
        chord = (1 - lam) * vals[i - 1] + lam * vals[i + 1]
        assert vals[i] <= chord + 1e-10


def test_divergent_exponential_moment_is_flagged_not_silent():
    mom = ms.compute_moments(
        ms.gaussian(1.0), ms.half_quadratic_perturbation(1.0),
        requests=[("grad2", 2.0)])
    assert "grad2:2" in mom.diverged
    assert mom.exp_log("grad2", 2.0) is None


def test_m_ratio_at_least_one():
    mom = ms.compute_moments(
        ms.gaussian(1.0), ms.abs_perturbation(0.2),
        requests=[("negF", 1.0), ("negF", 2.0)])
    assert mom.m_ratio() >= 1.0


def test_unknown_metadata_stays_unknown():
    f = ms.Perturbation(fn=lambda x: np.zeros_like(np.asarray(x, dtype=float)))
    assert f.lipschitz is None and f.oscillation is None


def test_sup_above_cannot_exceed_oscillation():
    with pytest.raises(ValueError):
        ms.Perturbation(fn=lambda x: x, oscillation=1.0, sup_above=2.0)


def test_momentset_validation():
    with pytest.raises(ValueError):
        ms.MomentSet(second=-1.0)
    with pytest.raises(ValueError):
        ms.MomentSet(second=1.0, sigma2=2.0)


def test_self_check_reported():
    mom = ms.compute_moments(ms.gaussian(1.0), requests=("second",))
    assert "second" in mom.self_check
    assert mom.self_check["second"] <= 1e-3


def test_quadrature_radius_override():
    spec = ms.QuadratureSpec(radius=12.0)
    mom = ms.compute_moments(ms.gaussian(1.0), requests=("second",), spec=spec)
    assert mom.second == pytest.approx(1.0, rel=1e-3)


def test_fd_gradient_checked():
    g, err = ms.fd_gradient_checked(lambda x: np.sin(x), 0.3)
    assert float(g) == pytest.approx(math.cos(0.3), rel=1e-8)
    assert err < 1e-6


def test_generator_refused_for_kinked_perturbation():
    with pytest.raises(ValueError):
        ms.compute_moments(ms.gaussian(1.0), ms.abs_perturbation(0.5),
                           requests=("generator_plus",))


def test_tensor_moments_2d():
    g2 = ms.gaussian(1.0, dimension=2)
    mom = ms.compute_moments(g2, requests=("second", "sigma2", "first_abs"))
    assert mom.second == pytest.approx(2.0, rel=1e-3)
    assert mom.sigma2 == pytest.approx(1.0, rel=1e-3)
    assert mom.first_abs == pytest.approx(math.sqrt(math.pi / 2), rel=1e-3)


def test_tensor_moments_with_linear_perturbation():
    g2 = ms.gaussian(1.0, dimension=2)
    pert = ms.Perturbation(
        fn=lambda p: 0.1 * np.sum(np.asarray(p, dtype=float), axis=-1),
        grad=lambda p: np.full_like(np.asarray(p, dtype=float), 0.1),
        lipschitz=0.1 * math.sqrt(2), convex=True, label="lin2d")
    mom = ms.compute_moments(g2, pert,
                             requests=("grad_F_l2sq", ("sF", 1.0), ("negF", 1.0)))
    assert mom.grad_F_l2sq == pytest.approx(0.02, rel=1e-6)
    # mu_F is N(-0.1, 1)^2, so ln mu_F(e^{F}) = 2(0.1*(-0.1) + 0.01/2) = -0.01
    assert mom.exp_log("sF", 1.0) == pytest.approx(-0.01, abs=1e-6)
    assert mom.exp_log("negF", 1.0) == pytest.approx(0.01, abs=1e-6)


def test_tensor_moments_3d_and_dim_cap():
    g3 = ms.gaussian(2.0, dimension=3)
    assert ms.compute_moments(g3, requests=("second",)).second == pytest.approx(1.5, rel=1e-3)
    with pytest.raises(ms.DimensionMismatch):
        ms.compute_moments(ms.gaussian(1.0, dimension=4), requests=("second",))
    with pytest.raises(ms.DimensionMismatch):
        ms.compute_moments(ms.gaussian(1.0, dimension=2), requests=("generator_plus",))


def test_named_family_known_constants():
    assert ms.gaussian(2.0).known["poincare"] == 0.5
    assert ms.exponential(2.0).known["poincare"] == 1.0
    assert ms.uniform(0, 1).known["poincare"] == pytest.approx(1 / math.pi**2)
    prod = ms.product([ms.gaussian(1.0), ms.exponential(1.0)])
    assert prod.known["poincare"] == 4.0
    assert prod.unconditional
