"""Randomized, certified instance families for soundness sweeps.

Each sweep draws (base measure, perturbation) pairs whose gate hypotheses
hold by construction: perturbation sizes are calibrated against certified
base constants (exact for the Gaussian family, oracle-with-inflation for
exponential-power and double-well bases) so a theorem's strict inequality
passes with a real margin.  Every instance is fully determined by
(theorem, sweep seed, index); reruns are identical.

A sweep row compares the calculator's bound against the spectral oracle on
the perturbed measure; soundness means ``bound >= oracle * (1 - 1e-3)``
(the slack absorbs oracle discretization on near-tight instances).
"""

import math
import zlib
from dataclasses import dataclass

import numpy as np

from . import bounds, measures, mollify, oracle

__all__ = ["SWEEP_THEOREMS", "sweep_instance", "run_sweep", "SOUNDNESS_SLACK"]

SOUNDNESS_SLACK = 1e-3

SWEEP_THEOREMS = (
    "lipschitz_poincare",
    "lipschitz_cheeger",
    "generator_poincare",
    "logconcave_grad2",
    "logconcave_grad1_cheeger",
    "logconcave_generator",
    "mollified_gaussian_poincare",
    "poincare_from_variance",
)


def _inflate(result: oracle.OracleResult) -> float:
    """Oracle value inflated to a certified upper bound of the true constant."""
    return result.constant * (1.0 + 5.0 * result.richardson_error + 1e-3)


@dataclass(frozen=True)
class _Base:
    model: measures.MeasureModel
    name: str
    param: float
    cp_cert: float        # certified upper bound on C_P(mu)
    cc_median_cert: float  # certified upper bound on C'_C(mu)

    @property
    def cc_mean_cert(self) -> float:
        # C_C <= 2 C'_C always
        return 2.0 * self.cc_median_cert


def _draw_base(rng: np.random.Generator, families, n_nodes: int) -> _Base:
    kind = families[int(rng.integers(len(families)))]
    if kind == "gaussian":
        rho = float(rng.uniform(0.5, 2.0))
        model, param = measures.gaussian(rho), rho
    elif kind == "subbotin":
        p = float(rng.uniform(1.0, 3.0))
        model, param = measures.subbotin(p), p
    else:
        a = float(rng.uniform(0.05, 0.5))
        model, param = measures.double_well(a), a
    grid = oracle.GridMeasure1D.from_model(model, n_nodes=n_nodes)
    if "poincare" in model.known:
        cp = model.known["poincare"]
    else:
        cp = _inflate(oracle.poincare_1d(grid))
    cc = _inflate(oracle.cheeger_1d(grid))
    return _Base(model, kind, param, cp, cc)


def _perturbed_oracles(base: _Base, pert, n_nodes: int, want_cheeger=False):
    grid = oracle.GridMeasure1D.from_model(base.model, pert, n_nodes=n_nodes)
    cp = oracle.poincare_1d(grid)
    cc = oracle.cheeger_1d(grid) if want_cheeger else None
    return cp, cc


def _lipschitz_pert(rng: np.random.Generator, L: float, allow_bump=True):
    kinds = ["linear", "abs"] + (["bump"] if allow_bump else [])
    kind = kinds[int(rng.integers(len(kinds)))]
    sign = -1.0 if rng.random() < 0.5 else 1.0
    if kind == "linear":
        return measures.linear_perturbation(sign * L)
    if kind == "abs":
        return measures.abs_perturbation(sign * L)
    w = float(rng.uniform(0.5, 2.0))
    c0 = float(rng.uniform(-1.0, 1.0))
    b = sign * L * w * math.sqrt(math.e)
    return measures.bump_perturbation(b, c0, w)


def _convex_pert(rng: np.random.Generator, base: _Base, grad_l2: float):
    """A perturbation keeping V + F convex, with |grad F| ~ grad_l2 scale."""
    kind = ("linear", "abs")[int(rng.integers(2))]
    if kind == "linear":
        sign = -1.0 if rng.random() < 0.5 else 1.0
        return measures.linear_perturbation(sign * grad_l2)
    return measures.abs_perturbation(grad_l2)


def _quadratic_generator_sup(base: _Base, c: float) -> float:
    """sup of (AF - |F'|^2/2) for F = c x^2 / 2, c > 0, by closed form."""
    if base.name in ("gaussian", "subbotin"):
        return c  # attained at 0; the x-dependent part is nonpositive
    a = base.param  # double well x^4 - a x^2
    quad_coef = 2.0 * a * c - 0.5 * c**2
    if quad_coef <= 0:
        return c
    return c + quad_coef**2 / (16.0 * c)


def sweep_instance(theorem: str, seed: int, index: int, n_nodes: int = 2048) -> dict:
    """One calibrated instance of ``theorem``; returns a flat result row."""
    rng = np.random.default_rng(
        np.random.SeedSequence([zlib.crc32(theorem.encode()), seed, index]))
    row = {"instance": index, "theorem_id": theorem}

    if theorem == "lipschitz_poincare":
        base = _draw_base(rng, ("gaussian", "subbotin", "double_well"), n_nodes)
        u = float(rng.uniform(0.3, 0.95))
        L = 2.0 * math.sqrt(u / base.cp_cert)
        pert = _lipschitz_pert(rng, L)
        res = bounds.bound_lipschitz_poincare(base.cp_cert, pert.lipschitz)
        orc, _ = _perturbed_oracles(base, pert, n_nodes)
        oracle_value = orc.constant

    elif theorem == "lipschitz_cheeger":
        base = _draw_base(rng, ("gaussian", "subbotin", "double_well"), n_nodes)
        u = float(rng.uniform(0.2, 0.9))
        L = u / base.cc_mean_cert
        pert = _lipschitz_pert(rng, L)
        res = bounds.bound_lipschitz_cheeger(base.cc_mean_cert, pert.lipschitz)
        _, cc = _perturbed_oracles(base, pert, n_nodes, want_cheeger=True)
        orc = cc
        oracle_value = cc.constant

    elif theorem == "generator_poincare":
        base = _draw_base(rng, ("gaussian", "subbotin", "double_well"), n_nodes)
        u = float(rng.uniform(0.2, 0.9))
        c = 2.0 * u / base.cp_cert
        gsup = _quadratic_generator_sup(base, c)
        while base.cp_cert * gsup > 2.0 * 0.95 and c > 1e-8:
            c *= 0.5
            gsup = _quadratic_generator_sup(base, c)
        pert = measures.half_quadratic_perturbation(c)
        res = bounds.bound_generator_poincare(base.cp_cert, gsup)
        orc, _ = _perturbed_oracles(base, pert, n_nodes)
        oracle_value = orc.constant

    elif theorem in ("logconcave_grad2", "logconcave_grad1_cheeger",
                     "logconcave_generator", "poincare_from_variance"):
        return _logconcave_instance(theorem, rng, index, n_nodes, row)

    elif theorem == "mollified_gaussian_poincare":
        k = int(rng.integers(1, 5))
        R = float(rng.uniform(0.3, 1.5))
        locs = rng.uniform(-R, R, size=k)
        locs[int(rng.integers(k))] = R * (1.0 if rng.random() < 0.5 else -1.0)
        w = rng.uniform(0.2, 1.0, size=k)
        w = w / w.sum()
        # renormalize the cached sum exactly
        w[-1] = 1.0 - float(np.sum(w[:-1]))
        sigma = 0.5 * R * (1.05 + 3.0 * float(rng.random()))
        nu = mollify.AtomicMeasure(locs, w)
        rec = mollify.verify_mollified_bound(nu, sigma, n_nodes=n_nodes)
        row.update({
            "base_family": "atomic", "base_param": R,
            "pert_label": f"mollify(sigma={sigma:.4g},atoms={k})",
            "applicable": rec.applicable,
            "bound": rec.bound,
            "oracle": rec.oracle_constant,
            "oracle_error": rec.oracle_error,
            "ratio": rec.ratio,
            "sound": (rec.bound is not None
                      and rec.bound >= rec.oracle_constant * (1.0 - SOUNDNESS_SLACK)),
        })
        return row
    else:
        raise ValueError(f"unknown sweep theorem {theorem!r}")

    row.update({
        "base_family": base.name, "base_param": base.param,
        "pert_label": pert.label,
        "applicable": res.applicable,
        "bound": res.value,
        "oracle": oracle_value,
        "oracle_error": orc.richardson_error,
        "ratio": None if res.value is None else res.value / oracle_value,
        "sound": (res.value is not None
                  and res.value >= oracle_value * (1.0 - SOUNDNESS_SLACK)),
    })
    return row


def _logconcave_instance(theorem, rng, index, n_nodes, row):
    base = _draw_base(rng, ("gaussian", "subbotin"), n_nodes)

    if theorem == "logconcave_generator":
        u = float(rng.uniform(0.2, 0.9))
        c = u / (3.0 * base.cp_cert)
        for _ in range(40):
            pert = measures.half_quadratic_perturbation(c)
            mom = measures.compute_moments(base.model, pert, requests=("generator_plus",))
            if base.cp_cert * mom.generator_plus < (1.0 / 3.0) * 0.98:
                break
            c *= 0.5
        res = bounds.bound_logconcave_perturbation(
            base.cp_cert, mom, "generator", log_concave_muF=True)
        orc, _ = _perturbed_oracles(base, pert, n_nodes)
        oracle_value = orc.constant

    elif theorem == "logconcave_grad2":
        u = float(rng.uniform(0.2, 0.9))
        scale = math.sqrt(2.0 * u / (3.0 * base.cp_cert))
        pert = _convex_pert(rng, base, scale)
        mom = measures.compute_moments(base.model, pert, requests=("grad_F_l2sq",))
        res = bounds.bound_logconcave_perturbation(
            base.cp_cert, mom, "l2", log_concave_muF=True)
        orc, _ = _perturbed_oracles(base, pert, n_nodes)
        oracle_value = orc.constant

    elif theorem == "logconcave_grad1_cheeger":
        u = float(rng.uniform(0.2, 0.9))
        scale = 0.5 * u / base.cc_mean_cert
        pert = _convex_pert(rng, base, scale)
        mom = measures.compute_moments(base.model, pert, requests=("grad_F_l1",))
        res = bounds.bound_logconcave_perturbation(
            base.cp_cert, mom, "cheeger", log_concave_muF=True,
            C_C_mu=base.cc_mean_cert)
        _, cc = _perturbed_oracles(base, pert, n_nodes, want_cheeger=True)
        orc = cc
        oracle_value = cc.constant

    else:  # poincare_from_variance on the log-concave perturbed measure
        scale = float(rng.uniform(0.1, 1.0))
        pert = _convex_pert(rng, base, scale)
        mom = measures.compute_moments(base.model, pert, requests=("second",))
        res = bounds.bound_from_moments(mom, "variance", log_concave=True)
        orc, _ = _perturbed_oracles(base, pert, n_nodes)
        oracle_value = orc.constant

    row.update({
        "base_family": base.name, "base_param": base.param,
        "pert_label": pert.label,
        "applicable": res.applicable,
        "bound": res.value,
        "oracle": oracle_value,
        "oracle_error": orc.richardson_error,
        "ratio": None if res.value is None else res.value / oracle_value,
        "sound": (res.value is not None
                  and res.value >= oracle_value * (1.0 - SOUNDNESS_SLACK)),
    })
    return row


def run_sweep(theorem: str, n_instances: int, seed: int = 0,
              n_nodes: int = 2048, threads: int = 1):
    """All rows of one theorem's sweep, ordered by instance index."""
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(
                lambda i: sweep_instance(theorem, seed, i, n_nodes),
                range(n_instances)))
    else:
        rows = [sweep_instance(theorem, seed, i, n_nodes) for i in range(n_instances)]
    return rows
