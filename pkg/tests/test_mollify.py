import math

import numpy as np
import pytest

from funcineq import measures as ms
from funcineq import bounds as B
from funcineq.mollify import (
    AtomicMeasure,
    general_window_log_density,
    mollified_grad_F,
    mollified_log_density,
    mollified_perturbation_value,
    verify_mollified_bound,
)
from funcineq.oracle import GridMeasure1D, poincare_1d


def test_single_atom_is_exactly_gaussian():
    nu = AtomicMeasure.point_mass()
    x = np.linspace(-4, 4, 17)
    got = mollified_log_density(nu, 1.3, x)
    want = -0.5 * (x / 1.3) ** 2 - 0.5 * math.log(2 * math.pi * 1.3**2)
    assert np.allclose(got, want, atol=1e-14)
    assert np.all(mollified_grad_F(nu, 1.3, x) == 0.0)


def test_two_atom_symmetry_and_value():
    nu = AtomicMeasure.symmetric_pair(1.0)
    v0 = mollified_log_density(nu, 1.0, np.array([0.0]))
    # cosh-shaped mixture at the midpoint
    want = math.log(math.exp(-0.5) ) - 0.5 * math.log(2 * math.pi)
    assert v0[0] == pytest.approx(want, rel=1e-12)
    v1 = mollified_log_density(nu, 1.0, np.array([1.0]))
    assert v1[0] == pytest.approx(
        math.log((1 + math.exp(-2)) / 2) - 0.5 * math.log(2 * math.pi), rel=1e-12)


def test_gradient_examples():
    nu = AtomicMeasure.symmetric_pair(1.0)
    assert mollified_grad_F(nu, 1.0, np.array([0.0]))[0] == pytest.approx(0.0, abs=1e-15)
    g1 = mollified_grad_F(nu, 1.0, np.array([1.0]))[0]
    assert g1 == pytest.approx(-math.tanh(1.0), rel=1e-12)


@pytest.mark.parametrize("sigma", [0.6, 1.0, 2.0])
def test_gradient_bound_exact_at_many_points(sigma):
    nu = AtomicMeasure.symmetric_pair(1.0)
    rng = np.random.default_rng(17)
    x = rng.uniform(-12, 12, size=10_000)
    g = mollified_grad_F(nu, sigma, x)
    assert np.all(np.abs(g) <= nu.radius / sigma**2 * (1 + 1e-12))


def test_finite_difference_consistency():
    nu = AtomicMeasure(np.array([-0.7, 0.2, 1.0]), np.array([0.3, 0.3, 0.4]))
    sigma = 0.8
    xs = np.linspace(-3, 3, 61)
    h = 1e-6
    def negF(x):
        return mollified_log_density(nu, sigma, x) + 0.5 * (x / sigma) ** 2
    fd = -(negF(xs + h) - negF(xs - h)) / (2 * h)
    g = mollified_grad_F(nu, sigma, xs)
    rel = np.abs(fd - g) / np.maximum(1e-6, np.abs(g))
    assert np.max(rel) < 1e-6
    # F evaluator matches the same decomposition up to a constant
    val = mollified_perturbation_value(nu, sigma, xs)
    assert np.allclose(np.diff(val), np.diff(-negF(xs)), atol=1e-10)


def test_convolution_variance_additivity():
    nu = AtomicMeasure.symmetric_pair(1.0)  # variance 1
    for sigma in (0.6, 1.5):
        logd = lambda x: mollified_log_density(nu, sigma, x)
        model = ms.custom(lambda x: -logd(np.asarray(x, dtype=float)), dimension=1)
        got = ms.compute_moments(model, requests=("second",)).second
        assert got == pytest.approx(1.0 + sigma**2, rel=2e-3)


def test_verify_bound_point_mass():
    rec = verify_mollified_bound(AtomicMeasure.point_mass(), 1.0)
    assert rec.bound == 1.0
    assert rec.oracle_constant == pytest.approx(1.0, rel=1e-3)
    assert rec.ratio == pytest.approx(1.0, rel=1e-3)


@pytest.mark.parametrize("sigma", [0.6, 1.0, 2.0])
def test_verify_bound_two_atoms_sound(sigma):
    rec = verify_mollified_bound(AtomicMeasure.symmetric_pair(1.0), sigma)
    assert rec.applicable
    assert rec.bound >= rec.oracle_constant * (1 - 1e-3)


def test_small_sigma_not_applicable_but_oracle_runs():
    rec = verify_mollified_bound(AtomicMeasure.symmetric_pair(1.0), 0.4)
    assert not rec.applicable and rec.bound is None
    assert rec.oracle_constant > 0


def _ripple_window():
    # H'' = 1 - 0.25 cos(x)stays in [0.75, 1.25]: K = 1.25 analytically
    pot = lambda x: 0.5 * np.asarray(x, dtype=float) ** 2 + 0.25 * np.cos(x)
    return pot, 1.25


def test_general_window_bound_sound_against_oracle():
    pot, K = _ripple_window()
    window = GridMeasure1D.from_log_density(lambda x: -pot(x))
    cp_window = poincare_1d(window)
    cp_cert = cp_window.constant * (1 + 5 * cp_window.richardson_error + 1e-3)
    nu = AtomicMeasure.symmetric_pair(0.5)
    res = B.bound_mollified(nu.radius, variant="general_hessian", K=K,
                            C_P_mu=cp_cert)
    assert res.applicable
    smoothed = GridMeasure1D.from_log_density(
        lambda x: general_window_log_density(nu, pot, x))
    truth = poincare_1d(smoothed).constant
    assert res.value >= truth * (1 - 1e-3)


def test_scaled_window_bound_sound_against_oracle():
    pot, K = _ripple_window()
    window = GridMeasure1D.from_log_density(lambda x: -pot(x))
    cp_window = poincare_1d(window)
    cp_cert = cp_window.constant * (1 + 5 * cp_window.richardson_error + 1e-3)
    nu = AtomicMeasure.symmetric_pair(0.5)
    sigma = 2.0
    res = B.bound_mollified(nu.radius, sigma, "scaled", K=K, C_P_mu=cp_cert)
    assert res.applicable
    smoothed = GridMeasure1D.from_log_density(
        lambda x: general_window_log_density(nu, pot, x, sigma=sigma))
    truth = poincare_1d(smoothed).constant
    assert res.value >= truth * (1 - 1e-3)
    # the dilated window alone has constant sigma^2 C_P(window)
    dilated = GridMeasure1D.from_log_density(lambda x: -pot(x / sigma))
    assert poincare_1d(dilated).constant == pytest.approx(
        sigma**2 * cp_window.constant, rel=1e-2)


def test_atomic_measure_validation():
    with pytest.raises(ValueError):
        AtomicMeasure(np.array([0.0, 1.0]), np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        AtomicMeasure(np.array([0.0]), np.array([-1.0]))
