"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest -s tests/test_acceptance.py -v`` to see the per-criterion
lines and timings.  Tolerances are pinned here, not configurable.
"""

import math
import time

import numpy as np
import pytest

from funcineq import bounds as B
from funcineq import cli
from funcineq import instances
from funcineq import measures as ms
from funcineq import mollify
from funcineq import oracle as orc
from funcineq import regress as rg
from funcineq.langevin import (
    ChainConfig, fit_decay_rate, integrated_autocorr_time,
    ou_stationary_variance, ula_ensemble, ula_run,
)
from conftest import random_logconcave_model

LN2 = math.log(2.0)


def _announce(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:02d} {name}: {status} {detail}")
    assert ok, f"criterion {num} ({name}) failed: {detail}"


def test_criterion_01_oracle_exactness():
    cases = [
        ("gaussian", ms.gaussian(1.0), 1.0, 5e-3),
        ("laplace", ms.exponential(1.0), 4.0, 2e-2),
        ("uniform01", ms.uniform(0.0, 1.0), 1.0 / math.pi**2, 1e-2),
    ]
    details = []
    ok = True
    for name, model, want, tol in cases:
        t0 = time.time()
        got = orc.poincare_1d(orc.GridMeasure1D.from_model(model)).constant
        dt = time.time() - t0
        good = abs(got - want) <= tol * want and dt < 5.0
        ok = ok and good
        details.append(f"{name}={got:.6g} ({dt:.2f}s)")
    _announce(1, "oracle exactness", ok, "; ".join(details))


def test_criterion_02_muckenhoupt_sandwich():
    t0 = time.time()
    rng = np.random.default_rng(2024)
    violations = 0
    for _ in range(100):
        g = orc.GridMeasure1D.from_model(random_logconcave_model(rng))
        cp = orc.poincare_1d(g).constant
        b = orc.muckenhoupt_1d(g).constant
        if not (b * (1 - 0.02) <= cp <= 4.0 * b * (1 + 0.02)):
            violations += 1
    dt = time.time() - t0
    _announce(2, "Muckenhoupt sandwich",
              violations == 0 and dt < 120.0,
              f"100 instances, {violations} violations, {dt:.1f}s")


def test_criterion_03_soundness_sweep():
    t0 = time.time()
    report = []
    total_viol = 0
    for th in instances.SWEEP_THEOREMS:
        rows = instances.run_sweep(th, 200, seed=0)
        gated = [r for r in rows if r["applicable"]]
        viol = sum(not r["sound"] for r in gated)
        total_viol += viol
        report.append(f"{th}: {len(gated)} gated, {viol} violations")
        assert len(gated) >= 200, f"{th}: only {len(gated)} gated instances"
    dt = time.time() - t0
    _announce(3, "soundness sweep", total_viol == 0 and dt < 900.0,
              f"{dt:.1f}s; " + "; ".join(report))


def test_criterion_04_closed_form_optimizer():
    r = B.bound_lipschitz_poincare(4.0, 0.5)
    exact = r.value == pytest.approx(16.0, abs=1e-12) \
        and r.chosen_params["eps"] == pytest.approx(1.0, abs=1e-12)
    c = 4.0 * 0.25 / 4.0
    eps = np.linspace(1e-7, 1.0 / c - 1.0 - 1e-7, 4_000_001)
    grid = float(np.min((1.0 + 1.0 / eps) * 4.0 / (1.0 - c * (1.0 + eps))))
    agree = abs(r.value - grid) / grid <= 1e-6
    _announce(4, "closed-form optimizer", exact and agree,
              f"value={r.value}, grid={grid:.9f}")


def test_criterion_05_cheeger_relations():
    rng = np.random.default_rng(55)
    worst_upper, worst_lower = math.inf, math.inf
    ok = True
    for _ in range(60):
        model = random_logconcave_model(rng)
        g = orc.GridMeasure1D.from_model(model)
        cp = orc.poincare_1d(g).constant
        cc = orc.cheeger_1d(g).constant
        lower = 4.0 * cc**2 / cp          # must be >= 1 (within 2%)
        upper = (16.0 / math.pi) * math.sqrt(cp) / cc  # must be >= 1 (within 2%)
        worst_lower = min(worst_lower, lower)
        worst_upper = min(worst_upper, upper)
        ok = ok and lower >= 1.0 - 0.02 and upper >= 1.0 - 0.02
    _announce(5, "Cheeger relations", ok,
              f"min 4Cc^2/Cp={worst_lower:.3f}, min (16/pi)sqrt(Cp)/Cc={worst_upper:.3f}")


def test_criterion_06_mollification():
    nu = mollify.AtomicMeasure.symmetric_pair(1.0)
    rng = np.random.default_rng(6)
    ok = True
    details = []
    for sigma in (0.6, 1.0, 2.0):
        x = rng.uniform(-15, 15, size=10_000)
        g = mollify.mollified_grad_F(nu, sigma, x)
        grad_ok = bool(np.all(np.abs(g) <= 1.0 / sigma**2))
        rec = mollify.verify_mollified_bound(nu, sigma)
        sound = rec.bound >= rec.oracle_constant
        ok = ok and grad_ok and sound
        details.append(f"sigma={sigma}: bound={rec.bound:.4f} oracle={rec.oracle_constant:.4f}")
    at2 = B.bound_mollified(1.0, 2.0).value
    exact = abs(at2 - 64.0 / 9.0) / (64.0 / 9.0) <= 1e-6
    _announce(6, "mollification", ok and exact,
              "; ".join(details) + f"; value@2={at2:.9f}")


def test_criterion_07_langevin_rate_and_variance():
    t0 = time.time()
    ok = True
    details = []
    for rho in (1.0, 4.0):
        h = 0.01
        sd = 1.0 / math.sqrt(rho)
        cfg = ChainConfig(step=h, n_steps=int(6.0 / rho / h), seed=123,
                          initial=(6.0 * sd,))
        ens = ula_ensemble(lambda x: -rho * x, cfg, 64)
        fit = fit_decay_rate(ens, 0.0)
        good = abs(fit.rate - rho) <= 0.10 * rho and not fit.flagged
        ok = ok and good
        details.append(f"rho={rho}: rate={fit.rate:.3f}")
    for h in (0.1, 0.01):
        n = 200_000
        cfg = ChainConfig(step=h, n_steps=n, burn_in=n // 10, seed=7)
        xs = ula_run(lambda x: -x, cfg).post_burn_in[:, 0]
        v = xs.var(ddof=1)
        vt = ou_stationary_variance(1.0, h)
        neff = xs.size / integrated_autocorr_time((xs - xs.mean()) ** 2)
        stderr = math.sqrt(2.0 / neff) * v
        good = abs(v - vt) <= 3.0 * stderr
        ok = ok and good
        details.append(f"h={h}: var={v:.4f} vs {vt:.4f} (3se={3*stderr:.4f})")
    dt = time.time() - t0
    _announce(7, "Langevin rate and variance", ok and dt < 180.0,
              "; ".join(details) + f"; {dt:.1f}s")


def test_criterion_08_regression_end_to_end():
    t0 = time.time()
    p = rg.generate_problem(32, 16, 3, noise_sd=0.1, design="orthogonal", seed=11)
    spec = rg.PosteriorSpec(beta=50.0, alpha=1.0, tau=2.0)

    # gradient check off the kink set
    rng = np.random.default_rng(8)
    grad_ok = True
    for _ in range(25):
        lam = rng.standard_normal(16)
        lam[np.abs(lam) < 1e-3] += 0.05
        g = rg.posterior_grad(p, spec, lam)
        h = 1e-6
        fd = np.array([
            (rg.posterior_log_density(p, spec, lam + h * e)
             - rg.posterior_log_density(p, spec, lam - h * e)) / (2 * h)
            for e in np.eye(16)])
        grad_ok &= bool(np.max(np.abs(fd - g) / np.maximum(1, np.abs(g))) < 1e-6)

    # exact reproducibility of the gate quantities
    g1a = rg.check_gate_product_prior(p, spec)
    g1b = rg.check_gate_product_prior(p, spec)
    g2a = rg.check_gate_orthogonal(p, spec)
    g2b = rg.check_gate_orthogonal(p, spec)
    repro = (g1a.extras["q"] == g1b.extras["q"]
             and g2a.extras["q"] == g2b.extras["q"])

    cfg = ChainConfig(step=0.02, n_steps=60_000, burn_in=6_000, seed=99,
                      initial=tuple(np.zeros(16)))
    rep = rg.run_estimation(p, spec, cfg, ensemble_chains=64)
    constructive_ok = (rep.constructive_bound is not None
                       and math.isfinite(rep.constructive_bound))
    rate_ok = rep.rate_times_bound is not None and rep.rate_times_bound >= 0.5
    dt = time.time() - t0
    _announce(8, "regression end-to-end",
              grad_ok and repro and constructive_ok and rate_ok and dt < 300.0,
              f"q={rep.q:.3f}, bound={rep.constructive_bound:.1f}, "
              f"rate*bound={rep.rate_times_bound:.1f}, "
              f"oracle={rep.oracle_poincare:.3f}, {dt:.1f}s")


def test_criterion_09_explicit_constants():
    checks = []

    # oscillation factor e^{Osc F}
    checks.append(abs(B.bound_holley_stroock(4.0, 1.0).value
                      - 4.0 * 2.718281828459045) < 1e-12)

    # 64 ln2 and the (1-6s)^-2 window
    mom = ms.MomentSet(grad_F_l2sq=0.0)
    checks.append(abs(B.bound_logconcave_perturbation(
        1.0, mom, "l2", log_concave_muF=True).value
        - 64.0 * 0.6931471805599453) < 1e-12)
    r = B.bound_logconcave_perturbation(
        2.0, ms.MomentSet(grad_F_l2sq=0.08), "l2", log_concave_muF=True)
    eps_star, s_star = r.chosen_params["eps"], r.hypothesis_margins["s"]
    literal = 64.0 * 0.6931471805599453 * (1.0 + 1.0 / eps_star) * 2.0 \
        / (1.0 - 6.0 * s_star) ** 2
    checks.append(abs(r.value - literal) < 1e-10)
    gen = ms.MomentSet(generator_plus=1.0 / 24.0)
    checks.append(abs(B.bound_logconcave_perturbation(
        4.0, gen, "generator", log_concave_muF=True).value
        - 1024.0 * 0.6931471805599453) < 1e-10)

    # 16/pi and (1-2s)^-2
    chg = ms.MomentSet(grad_F_l1=0.125)
    val = B.bound_logconcave_perturbation(1.0, chg, "cheeger",
                                          log_concave_muF=True, C_C_mu=2.0).value
    checks.append(abs(val - 16.0 * 2.0 / (3.141592653589793 * 0.25)) < 1e-12)

    # 32 x 81 ln 2
    checks.append(abs(B.bound_from_moments(ms.MomentSet(second=1.0), "variance").value
                      - 2592.0 * 0.6931471805599453) < 1e-10)

    # 512 e^2 ln2 ln^2(3n)
    v = B.bound_subbotin(2, 1.0, unconditional=True).value
    checks.append(abs(v - 512.0 * 7.38905609893065 * 0.6931471805599453
                      * math.log(6.0) ** 2) < 1e-9)

    # (64 sqrt2 / pi)^2 cap
    checks.append(abs(B.CONCENTRATION_CAP - 8192.0 / 3.141592653589793**2) < 1e-9)
    checks.append(abs(B.CONCENTRATION_CAP
                      - (64.0 * 1.4142135623730951 / 3.141592653589793) ** 2) < 1e-9)

    _announce(9, "explicit constants", all(checks),
              f"{sum(checks)}/{len(checks)} literal comparisons")


def test_criterion_10_byte_identical_reruns(tmp_path):
    cfg = tmp_path / "sweep.toml"
    cfg.write_text(
        'kind = "sweep"\nseed = 9\ninstances = 6\n'
        'theorems = ["lipschitz_poincare", "mollified_gaussian_poincare"]\n')
    outs = []
    for sub in ("r1", "r2"):
        out = tmp_path / sub
        code = cli.main(["sweep", "--config", str(cfg), "--out-dir", str(out)])
        assert code == 0
        outs.append((out / "sweep.csv").read_bytes())
    lcfg = tmp_path / "langevin.toml"
    lcfg.write_text(
        'kind = "langevin"\nseed = 4\n[target]\nfamily = "gaussian"\nrho = 1.0\n'
        '[chain]\nstep = 0.05\nsteps = 2000\nburn_in = 200\nchains = 8\n')
    louts = []
    for sub in ("l1", "l2"):
        out = tmp_path / sub
        code = cli.main(["langevin", "--config", str(lcfg), "--out-dir", str(out)])
        assert code == 0
        louts.append((out / "langevin.csv").read_bytes())
    _announce(10, "byte-identical reruns",
              outs[0] == outs[1] and louts[0] == louts[1],
              f"sweep {len(outs[0])} bytes, langevin {len(louts[0])} bytes")
