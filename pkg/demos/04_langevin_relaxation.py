"""Relaxation of the unadjusted Langevin chain versus 1/C_P.

An ensemble of chains started far from equilibrium relaxes at the rate the
Poincare constant predicts (up to O(h) discretization bias).  For the
Gaussian target the discrete chain is an AR(1) recursion, so both the decay
rate and the stationary variance have closed forms to check against.

Run:  python3 demos/04_langevin_relaxation.py
"""

import math

import numpy as np

from funcineq import measures, oracle
from funcineq.langevin import (
    ChainConfig, fit_decay_rate, ou_stationary_variance, ula_ensemble, ula_run,
)

print("Gaussian targets: fitted rate vs curvature rho")
for rho in (1.0, 4.0):
    h = 0.01
    cfg = ChainConfig(step=h, n_steps=int(6.0 / rho / h), seed=123,
                      initial=(6.0 / math.sqrt(rho),))
    ens = ula_ensemble(lambda x: -rho * x, cfg, 64)
    fit = fit_decay_rate(ens, 0.0)
    ar1 = -math.log(1.0 - h * rho) / h
    print(f"  rho = {rho}: fitted {fit.rate:.4f}, AR(1) prediction {ar1:.4f}, "
          f"R^2 = {fit.r_squared:.4f}")

print("\nStationary variance vs the AR(1) fixed point 2h/(1-(1-h)^2):")
for h in (0.1, 0.01):
    n = 200_000
    cfg = ChainConfig(step=h, n_steps=n, burn_in=n // 10, seed=7)
    xs = ula_run(lambda x: -x, cfg).post_burn_in[:, 0]
    print(f"  h = {h}: sample {xs.var(ddof=1):.4f}, "
          f"exact {ou_stationary_variance(1.0, h):.4f}")

print("\nA non-Gaussian target: V(x) = sqrt(1 + x^2)")
model = measures.custom(
    lambda x: np.sqrt(1.0 + np.asarray(x, dtype=float) ** 2),
    grad_potential=lambda x: x / np.sqrt(1.0 + x**2),
    dimension=1, log_concave=True, even=True)
c = oracle.poincare_1d(oracle.GridMeasure1D.from_model(model)).constant
sd = math.sqrt(measures.compute_moments(model, requests=("second",)).second)
cfg = ChainConfig(step=0.02, n_steps=int(6.0 * c / 0.02), seed=21,
                  initial=(6.0 * sd,))
ens = ula_ensemble(lambda x: -x / np.sqrt(1.0 + x**2), cfg, 128)
fit = fit_decay_rate(ens, 0.0)
print(f"  oracle C_P = {c:.4f}, fitted rate = {fit.rate:.4f}, "
      f"rate * C_P = {fit.rate * c:.3f}  (theory floor: 1)")
