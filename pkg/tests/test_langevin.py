import math

import numpy as np
import pytest

from funcineq import measures as ms
from funcineq import oracle as orc
from funcineq.langevin import (
    ChainConfig,
    GradientBlowup,
    effective_sample_size,
    ewa_average,
    fit_decay_rate,
    integrated_autocorr_time,
    ou_stationary_variance,
    ula_ensemble,
    ula_run,
)


def test_same_seed_identical_traces():
    cfg = ChainConfig(step=0.01, n_steps=500, seed=42, initial=(3.0,))
    a = ula_run(lambda x: -x, cfg)
    b = ula_run(lambda x: -x, cfg)
    assert np.array_equal(a.samples, b.samples)


def test_ensemble_matches_standalone_bitwise():
    cfg = ChainConfig(step=0.01, n_steps=500, seed=10, initial=(2.0,))
    ens = ula_ensemble(lambda x: -x, cfg, 3)
    solo = ula_run(lambda x: -x, ChainConfig(step=0.01, n_steps=500, seed=12,
                                             initial=(2.0,)))
    assert np.array_equal(ens.observations[2], solo.samples[:, 0])


def test_flat_target_is_random_walk_with_zero_mean_displacement():
    cfg = ChainConfig(step=0.05, n_steps=2000, seed=3, initial=(0.0,))
    ens = ula_ensemble(lambda x: np.zeros_like(x), cfg, 64)
    final = ens.observations[:, -1]
    sd = math.sqrt(2 * 0.05 * 2000)
    assert abs(final.mean()) < 4 * sd / math.sqrt(64)


@pytest.mark.parametrize("h", [0.1, 0.01])
def test_ou_stationary_variance_matches_ar1_fixed_point(h):
    n = 200_000
    cfg = ChainConfig(step=h, n_steps=n, burn_in=n // 10, seed=7, initial=(0.0,))
    tr = ula_run(lambda x: -x, cfg)
    xs = tr.post_burn_in[:, 0]
    v = xs.var(ddof=1)
    vt = ou_stationary_variance(1.0, h)
    neff = xs.size / integrated_autocorr_time((xs - xs.mean()) ** 2)
    stderr = math.sqrt(2.0 / neff) * v
    assert abs(v - vt) <= 3.0 * stderr


@pytest.mark.parametrize("rho", [1.0, 4.0])
def test_fitted_rate_close_to_curvature(rho):
    h = 0.01
    sd = 1.0 / math.sqrt(rho)
    cfg = ChainConfig(step=h, n_steps=int(6.0 / rho / h), seed=123,
                      initial=(6.0 * sd,))
    ens = ula_ensemble(lambda x: -rho * x, cfg, 64)
    fit = fit_decay_rate(ens, 0.0)
    assert not fit.flagged
    assert fit.rate == pytest.approx(rho, rel=0.10)


def test_rate_consistent_with_oracle_poincare():
    # smooth exponential-like potential sqrt(1 + x^2)
    model = ms.custom(lambda x: np.sqrt(1.0 + np.asarray(x, dtype=float) ** 2),
                      grad_potential=lambda x: x / np.sqrt(1.0 + x**2),
                      dimension=1, log_concave=True, even=True)
    c = orc.poincare_1d(orc.GridMeasure1D.from_model(model)).constant
    var = ms.compute_moments(model, requests=("second",)).second
    cfg = ChainConfig(step=0.02, n_steps=int(6.0 * c / 0.02), seed=21,
                      initial=(6.0 * math.sqrt(var),))
    ens = ula_ensemble(lambda x: -x / np.sqrt(1.0 + x**2), cfg, 128)
    fit = fit_decay_rate(ens, 0.0)
    assert 0.8 <= fit.rate * c <= 1.5


def test_ewa_average_centered_and_shifted():
    cfg = ChainConfig(step=0.05, n_steps=40_000, burn_in=4_000, seed=5)
    mean, se, iat = ewa_average(ula_run(lambda x: -x, cfg))
    assert abs(mean[0]) <= 3.0 * se[0]
    shifted = ula_run(lambda x: -(x - 2.0), cfg)
    mean2, se2, _ = ewa_average(shifted)
    assert mean2[0] == pytest.approx(2.0, abs=4.0 * se2[0])


def test_two_seeds_agree_within_stderr():
    cfg1 = ChainConfig(step=0.05, n_steps=40_000, burn_in=4_000, seed=5)
    cfg2 = ChainConfig(step=0.05, n_steps=40_000, burn_in=4_000, seed=6)
    m1, s1, _ = ewa_average(ula_run(lambda x: -x, cfg1))
    m2, s2, _ = ewa_average(ula_run(lambda x: -x, cfg2))
    assert abs(m1[0] - m2[0]) <= 3.0 * math.hypot(s1[0], s2[0])


def test_iat_iid_and_ar1():
    rng = np.random.default_rng(0)
    iid = rng.standard_normal(20_000)
    assert 0.7 <= integrated_autocorr_time(iid) <= 1.5
    n = 200_000
    x = np.empty(n)
    x[0] = 0.0
    xi = rng.standard_normal(n)
    for i in range(1, n):
        x[i] = 0.9 * x[i - 1] + xi[i]
    assert integrated_autocorr_time(x) == pytest.approx(19.0, rel=0.4)
    assert effective_sample_size(x) == pytest.approx(n / 19.0, rel=0.4)


def test_gradient_blowup_reports_step_and_state():
    with np.errstate(over="ignore"):
        with pytest.raises(GradientBlowup) as exc:
            ula_run(lambda x: -1e10 * x**3,
                    ChainConfig(step=1.0, n_steps=100, seed=1, initial=(2.0,)))
    assert exc.value.step < 10
    assert np.all(np.isfinite(exc.value.last_state))


def test_fit_flagged_when_started_at_equilibrium():
    cfg = ChainConfig(step=0.05, n_steps=2_000, seed=9, initial=(0.0,))
    ens = ula_ensemble(lambda x: -x, cfg, 8)
    fit = fit_decay_rate(ens, 0.0)
    assert fit.flagged


def test_config_validation():
    with pytest.raises(ValueError):
        ChainConfig(step=-0.1, n_steps=10)
    with pytest.raises(ValueError):
        ChainConfig(step=0.1, n_steps=10, burn_in=10)
    with pytest.raises(ValueError):
        ula_run(lambda x: -x, ChainConfig(step=0.5, n_steps=10), grad_lipschitz=4.0)
