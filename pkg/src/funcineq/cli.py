"""Scenario runner: the command-line face of the toolkit.

Subcommands: ``bounds``, ``oracle``, ``sweep``, ``mollify``, ``langevin``,
``regress``, ``compare``.  Scenarios are driven by TOML config files (see
the schemas in the README and demos/configs); ``regress`` can run from
flags alone.  Outputs are a CSV of per-instance rows plus a versioned JSON
summary; reruns with an identical config and seed produce byte-identical
files.  Exit codes: 0 on success (a sweep additionally requires zero
soundness violations, otherwise 1), 2 on config/schema errors.
"""

import argparse
import csv
import json
import math
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bounds, instances, langevin, measures, mollify, oracle, regress

SUMMARY_SCHEMA_VERSION = 1


class ConfigError(Exception):
    """Schema violation; message names the offending key."""


@dataclass(frozen=True)
class Scenario:
    kind: str
    config: dict
    seed: int
    out_dir: Path
    threads: int
    dump_samples: bool


# --------------------------------------------------------------------------
# deterministic serialization
# --------------------------------------------------------------------------


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".12g")
    return str(v)


def write_csv(path: Path, rows, columns=None):
    if columns is None:
        columns = []
        for r in rows:
            for k in r:
                if k not in columns:
                    columns.append(k)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in columns])


def write_summary(path: Path, payload: dict):
    payload = {"schema_version": SUMMARY_SCHEMA_VERSION, **payload}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def dump_samples_binary(path: Path, samples: np.ndarray, seed: int):
    """Flat little-endian float64 dump, row-major, one-line text header."""
    samples = np.ascontiguousarray(samples, dtype="<f8")
    n_steps, dim = samples.shape
    with open(path, "wb") as fh:
        fh.write(f"n={dim} N={n_steps} seed={seed}\n".encode("ascii"))
        fh.write(samples.tobytes(order="C"))


def load_samples_binary(path: Path):
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").strip()
        fields = dict(kv.split("=") for kv in header.split())
        dim, n = int(fields["n"]), int(fields["N"])
        data = np.frombuffer(fh.read(), dtype="<f8").reshape(n, dim)
    return data, int(fields["seed"])


# --------------------------------------------------------------------------
# config helpers
# --------------------------------------------------------------------------


def _need(cfg: dict, key: str, where: str = "config"):
    if key not in cfg:
        raise ConfigError(f"{where}: missing required key '{key}'")
    return cfg[key]


_MEASURE_BUILDERS = {
    "gaussian": lambda c: measures.gaussian(float(_need(c, "rho", "measure"))),
    "exponential": lambda c: measures.exponential(float(_need(c, "alpha", "measure"))),
    "subbotin": lambda c: measures.subbotin(float(_need(c, "p", "measure"))),
    "uniform": lambda c: measures.uniform(float(_need(c, "lo", "measure")),
                                          float(_need(c, "hi", "measure"))),
    "double_well": lambda c: measures.double_well(float(_need(c, "a", "measure"))),
}


def build_measure(cfg: dict) -> measures.MeasureModel:
    fam = _need(cfg, "family", "measure")
    if fam not in _MEASURE_BUILDERS:
        raise ConfigError(f"measure: unknown family '{fam}' "
                          f"(choose from {sorted(_MEASURE_BUILDERS)})")
    return _MEASURE_BUILDERS[fam](cfg)


def build_perturbation(cfg: dict) -> measures.Perturbation:
    kind = _need(cfg, "kind", "perturbation")
    if kind == "zero":
        return measures.zero_perturbation()
    if kind == "linear":
        return measures.linear_perturbation(float(_need(cfg, "c", "perturbation")))
    if kind == "abs":
        return measures.abs_perturbation(float(_need(cfg, "c", "perturbation")))
    if kind == "half_quadratic":
        return measures.half_quadratic_perturbation(float(_need(cfg, "c", "perturbation")))
    if kind == "bump":
        return measures.bump_perturbation(
            float(_need(cfg, "height", "perturbation")),
            float(cfg.get("center", 0.0)), float(cfg.get("width", 1.0)))
    raise ConfigError(f"perturbation: unknown kind '{kind}'")


# --------------------------------------------------------------------------
# scenario runners
# --------------------------------------------------------------------------


def run_oracle(sc: Scenario):
    specs = _need(sc.config, "measures")
    rows, warnings = [], []
    for i, mcfg in enumerate(specs):
        model = build_measure(mcfg)
        grid = oracle.GridMeasure1D.from_model(model)
        p = oracle.poincare_1d(grid)
        c = oracle.cheeger_1d(grid)
        b = oracle.muckenhoupt_1d(grid)
        sandwich_ok = (b.constant * (1 - 0.02) <= p.constant
                       <= 4.0 * b.constant * (1 + 0.02))
        if p.low_confidence:
            warnings.append(f"measure {i}: low-confidence Poincare oracle")
        rows.append({
            "instance": i, "family": model.family,
            **{f"param_{k}": v for k, v in sorted(model.params.items())},
            "poincare": p.constant, "poincare_error": p.richardson_error,
            "cheeger_median": c.constant, "cheeger_error": c.richardson_error,
            "muckenhoupt": b.constant, "sandwich_ok": sandwich_ok,
            "known_poincare": model.known.get("poincare"),
        })
    return rows, {"warnings": warnings,
                  "sandwich_violations": sum(not r["sandwich_ok"] for r in rows)}, 0


def run_sweep_scenario(sc: Scenario):
    theorems = sc.config.get("theorems", list(instances.SWEEP_THEOREMS))
    for th in theorems:
        if th not in instances.SWEEP_THEOREMS:
            raise ConfigError(f"sweep: unknown theorem '{th}' "
                              f"(choose from {list(instances.SWEEP_THEOREMS)})")
    n = int(sc.config.get("instances", 200))
    rows = []
    for th in theorems:
        rows.extend(instances.run_sweep(th, n, seed=sc.seed, threads=sc.threads))
    violations = [r for r in rows if r["applicable"] and not r["sound"]]
    ratios = [r["ratio"] for r in rows if r.get("ratio") is not None]
    summary = {
        "theorems": list(theorems),
        "instances_per_theorem": n,
        "violations": len(violations),
        "min_ratio": min(ratios) if ratios else None,
        "warnings": [],
    }
    return rows, summary, (0 if not violations else 1)


def run_bounds(sc: Scenario):
    model = build_measure(_need(sc.config, "measure"))
    pert = build_perturbation(_need(sc.config, "perturbation"))
    calcs = _need(sc.config, "calculators")
    grid = oracle.GridMeasure1D.from_model(model)
    cp_orc = oracle.poincare_1d(grid)
    cc_orc = oracle.cheeger_1d(grid)
    cp_cert = model.known.get("poincare",
                              cp_orc.constant * (1 + 5 * cp_orc.richardson_error + 1e-3))
    cc_median = cc_orc.constant * (1 + 5 * cc_orc.richardson_error + 1e-3)
    cls_cert = model.known.get("log_sobolev")
    pgrid = oracle.GridMeasure1D.from_model(model, pert)
    cp_pert = oracle.poincare_1d(pgrid)
    cc_pert = oracle.cheeger_1d(pgrid)
    logconc = model.log_concave and pert.convex

    rows, warnings = [], []
    for i, name in enumerate(calcs):
        try:
            res, orc = _dispatch_calculator(
                name, model, pert, cp_cert, cc_median, cls_cert, logconc,
                cp_pert, cc_pert)
        except (ValueError, measures.MomentDiverges) as exc:
            raise ConfigError(f"calculators[{i}] '{name}': {exc}") from exc
        row = {"instance": i, **res.to_record()}
        row["oracle"] = orc.constant
        row["ratio"] = None if res.value is None else res.value / orc.constant
        rows.append(row)
        if res.value is not None and res.value < orc.constant * (1 - 1e-3):
            warnings.append(f"{name}: bound below the oracle (check inputs)")
    cols = ["instance", "theorem_id", "applicable", "value", "oracle", "ratio",
            "reason", "untraced", "provenance"]
    extra_cols = sorted({k for r in rows for k in r} - set(cols))
    return rows, {"warnings": warnings}, 0, cols + extra_cols


def _dispatch_calculator(name, model, pert, cp, cc_median, cls, logconc,
                         cp_pert_orc, cc_pert_orc):
    cc_mean = 2.0 * cc_median
    if name == "holley_stroock":
        return bounds.bound_holley_stroock(cp, pert.oscillation), cp_pert_orc
    if name == "lipschitz_poincare":
        if pert.lipschitz is None:
            raise ValueError("perturbation has no certified Lipschitz constant")
        return bounds.bound_lipschitz_poincare(cp, pert.lipschitz), cp_pert_orc
    if name == "lipschitz_cheeger":
        if pert.lipschitz is None:
            raise ValueError("perturbation has no certified Lipschitz constant")
        return bounds.bound_lipschitz_cheeger(cc_mean, pert.lipschitz), cc_pert_orc
    if name == "generator_poincare":
        # suprema are not reliably computable numerically: only the
        # closed-form quadratic family on named bases is accepted here
        if not pert.label.startswith("half_quadratic") or model.family not in (
                "gaussian", "subbotin", "double_well"):
            raise ValueError(
                "generator_poincare needs an analytically certified supremum; "
                "use a half_quadratic perturbation on a named family")
        from .instances import _Base, _quadratic_generator_sup

        c = 2.0 * float(np.asarray(pert.fn(np.array([1.0])))[0])  # F(1) = c/2
        shim = _Base(model, model.family, next(iter(model.params.values())), cp, cc_median)
        gsup = _quadratic_generator_sup(shim, c)
        return bounds.bound_generator_poincare(cp, gsup), cp_pert_orc
    if name == "logconcave_grad2":
        mom = measures.compute_moments(model, pert, requests=("grad_F_l2sq",))
        return bounds.bound_logconcave_perturbation(
            cp, mom, "l2", log_concave_muF=logconc), cp_pert_orc
    if name == "logconcave_grad1_cheeger":
        mom = measures.compute_moments(model, pert, requests=("grad_F_l1",))
        return bounds.bound_logconcave_perturbation(
            cp, mom, "cheeger", log_concave_muF=logconc, C_C_mu=cc_mean), cc_pert_orc
    if name == "logconcave_generator":
        mom = measures.compute_moments(model, pert, requests=("generator_plus",))
        return bounds.bound_logconcave_perturbation(
            cp, mom, "generator", log_concave_muF=logconc), cp_pert_orc
    if name == "logconcave_moment_ratio":
        mom = measures.compute_moments(
            model, pert, requests=[("negF", 1.0), ("negF", 2.0)])
        res = bounds.bound_logconcave_perturbation(
            cp, mom, "perths", log_concave_muF=logconc)
        return res, cc_pert_orc
    if name == "concentration_transfer":
        if not logconc:
            refused = bounds.BoundResult(
                "concentration_transfer", False, None,
                reason="perturbed measure not certified log-concave")
            return refused, cp_pert_orc
        mom = measures.compute_moments(
            model, pert, requests=[("negF", 1.0), ("negF", 2.0)])
        return bounds.bound_concentration_transfer(cp, mom.m_ratio()), cp_pert_orc
    if name == "poincare_from_variance":
        mom = measures.compute_moments(model, pert, requests=("second",))
        return bounds.bound_from_moments(mom, "variance", logconc), cp_pert_orc
    if name == "cheeger_from_first_moment":
        mom = measures.compute_moments(model, pert, requests=("first_abs",))
        return bounds.bound_from_moments(mom, "cheeger_first_moment", logconc), cc_pert_orc
    raise ValueError(f"unknown calculator '{name}'")


def run_mollify(sc: Scenario):
    cases = _need(sc.config, "cases")
    rows, warnings = [], []
    i = 0
    for case in cases:
        locs = np.asarray(_need(case, "locations", "case"), dtype=float)
        w = np.asarray(_need(case, "weights", "case"), dtype=float)
        nu = mollify.AtomicMeasure(locs, w)
        for sigma in _need(case, "sigmas", "case"):
            rec = mollify.verify_mollified_bound(nu, float(sigma))
            row = {"instance": i, **rec.to_record()}
            row["sound"] = (rec.bound is None
                            or rec.bound >= rec.oracle_constant * (1 - 1e-3))
            rows.append(row)
            if not row["sound"]:
                warnings.append(f"case {i}: bound below oracle")
            i += 1
    violations = sum(not r["sound"] for r in rows)
    return rows, {"warnings": warnings, "violations": violations}, (0 if not violations else 1)


def run_langevin(sc: Scenario):
    tcfg = _need(sc.config, "target")
    model = build_measure(tcfg)
    if model.grad_potential is None:
        raise ConfigError("target: measure must provide a gradient")
    ccfg = _need(sc.config, "chain")
    step = float(_need(ccfg, "step", "chain"))
    n_steps = int(_need(ccfg, "steps", "chain"))
    burn_in = int(ccfg.get("burn_in", n_steps // 10))
    n_chains = int(ccfg.get("chains", 64))
    offset_sds = float(ccfg.get("offset_sds", 5.0))

    grad = lambda x: -model.grad_potential(x)
    grid = oracle.GridMeasure1D.from_model(model)
    cp = oracle.poincare_1d(grid)
    sd = math.sqrt(measures.compute_moments(model, requests=("second",)).second)

    cfg = langevin.ChainConfig(step=step, n_steps=n_steps, burn_in=burn_in,
                               seed=sc.seed, initial=(0.0,))
    trace = langevin.ula_run(grad, cfg)
    mean, stderr, iat = langevin.ewa_average(trace)
    var = float(trace.post_burn_in[:, 0].var(ddof=1))

    ens_cfg = langevin.ChainConfig(step=step, n_steps=max(n_steps // 8, 512),
                                   seed=sc.seed + 1, initial=(offset_sds * sd,))
    ens = langevin.ula_ensemble(grad, ens_cfg, n_chains)
    fit = langevin.fit_decay_rate(ens, 0.0)

    warnings = [] if not fit.flagged else ["decay fit flagged: no clean linear regime"]
    rows = [{
        "instance": 0, "family": model.family,
        **{f"param_{k}": v for k, v in sorted(model.params.items())},
        "step": step, "steps": n_steps, "chains": n_chains, "seed": sc.seed,
        "ewa_mean": float(mean[0]), "ewa_stderr": float(stderr[0]),
        "iat": float(iat[0]), "ess": n_steps / float(iat[0]),
        "stationary_var": var,
        "fitted_rate": fit.rate, "rate_stderr": fit.stderr,
        "fit_r2": fit.r_squared, "fit_flagged": fit.flagged,
        "oracle_poincare": cp.constant,
        "rate_times_poincare": fit.rate * cp.constant,
    }]
    artifacts = {}
    if sc.dump_samples:
        path = sc.out_dir / "samples.bin"
        dump_samples_binary(path, trace.samples, sc.seed)
        artifacts["samples"] = str(path)
    return rows, {"warnings": warnings, **artifacts}, 0


def run_regress(sc: Scenario):
    cfg = sc.config
    p = regress.generate_problem(
        n=int(cfg.get("n", 32)), M=int(cfg.get("M", 16)),
        sparsity=int(cfg.get("sparsity", 3)),
        noise_sd=float(cfg.get("noise_sd", 0.1)),
        design=cfg.get("design", "orthogonal"), seed=sc.seed)
    spec = regress.PosteriorSpec(
        beta=float(cfg.get("beta", 50.0)), alpha=float(cfg.get("alpha", 1.0)),
        tau=float(cfg.get("tau", 2.0)))
    steps = int(cfg.get("steps", 60000))
    chain_cfg = langevin.ChainConfig(
        step=float(cfg.get("h", 0.02)), n_steps=steps,
        burn_in=int(cfg.get("burn_in", steps // 10)),
        seed=sc.seed, initial=tuple(np.zeros(p.M)))
    report = regress.run_estimation(p, spec, chain_cfg,
                                    ensemble_chains=int(cfg.get("chains", 64)))
    gate1 = regress.check_gate_product_prior(p, spec)
    gate2 = regress.check_gate_orthogonal(p, spec)
    payload = {
        "problem": {"n": p.n, "M": p.M, "sparsity": p.sparsity,
                    "noise_sd": p.noise_sd, "design": p.design_kind,
                    "seed": sc.seed},
        "spec": {"beta": spec.beta, "alpha": spec.alpha, "tau": spec.tau},
        "gates": {
            "logM": gate1.to_record(),
            "cuberoot": gate2.to_record(),
        },
        "report": report.to_json_dict(),
        "warnings": [],
    }
    if sc.dump_samples:
        trace = langevin.ula_run(lambda lam: regress.posterior_grad(p, spec, lam),
                                 chain_cfg)
        path = sc.out_dir / "regress_samples.bin"
        dump_samples_binary(path, trace.samples, sc.seed)
        payload["samples"] = str(path)
    rows = [{"instance": 0, "q": report.q, "q_prime": report.q_prime,
             "constructive_bound": report.constructive_bound,
             "fitted_rate": report.fitted_rate,
             "rate_times_bound": report.rate_times_bound,
             "oracle_poincare": report.oracle_poincare,
             "sign_matches": report.sign_matches_on_support,
             "support_size": report.support_size}]
    return rows, payload, 0


def run_compare(sc: Scenario):
    model = build_measure(_need(sc.config, "measure"))
    grid_cfg = _need(sc.config, "grid")
    heights = [float(h) for h in _need(grid_cfg, "heights", "grid")]
    width = float(grid_cfg.get("width", 1.0))
    cp = model.known.get("poincare")
    if cp is None:
        g = oracle.GridMeasure1D.from_model(model)
        r = oracle.poincare_1d(g)
        cp = r.constant * (1 + 5 * r.richardson_error + 1e-3)
    rows = []
    for i, h in enumerate(heights):
        pert = measures.bump_perturbation(h, 0.0, width)
        hs = bounds.bound_holley_stroock(cp, pert.oscillation)
        lp = bounds.bound_lipschitz_poincare(cp, pert.lipschitz)
        if hs.applicable and lp.applicable:
            winner = "holley_stroock" if hs.value <= lp.value else "lipschitz_poincare"
        elif hs.applicable:
            winner = "holley_stroock"
        elif lp.applicable:
            winner = "lipschitz_poincare"
        else:
            winner = "none"
        rows.append({
            "instance": i, "height": h, "width": width,
            "oscillation": pert.oscillation, "lipschitz": pert.lipschitz,
            "holley_stroock": hs.value, "lipschitz_poincare": lp.value,
            "winner": winner,
        })
    return rows, {"warnings": []}, 0


_RUNNERS = {
    "oracle": run_oracle,
    "sweep": run_sweep_scenario,
    "bounds": run_bounds,
    "mollify": run_mollify,
    "langevin": run_langevin,
    "regress": run_regress,
    "compare": run_compare,
}


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def _load_scenario(kind: str, args) -> Scenario:
    cfg = {}
    if args.config is not None:
        try:
            with open(args.config, "rb") as fh:
                cfg = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}")
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{args.config}: {exc}")
    elif kind != "regress":
        raise ConfigError(f"subcommand '{kind}' requires --config")
    cfg_kind = cfg.get("kind", kind)
    if cfg_kind != kind:
        raise ConfigError(f"config kind '{cfg_kind}' does not match subcommand '{kind}'")
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return Scenario(kind=kind, config=cfg, seed=seed, out_dir=out_dir,
                    threads=args.threads, dump_samples=args.dump_samples)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="funcineq",
        description="Perturbation bounds for functional-inequality constants, "
                    "with numerical verification oracles")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in _RUNNERS:
        sp = sub.add_parser(kind)
        sp.add_argument("--config", default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out-dir", default=".")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--dump-samples", action="store_true")
        if kind == "regress":
            for flag, typ in (("--n", int), ("--M", int), ("--sparsity", int),
                              ("--alpha", float), ("--beta", float),
                              ("--tau", float), ("--steps", int), ("--h", float)):
                sp.add_argument(flag, type=typ, default=None)
    args = parser.parse_args(argv)

    try:
        sc = _load_scenario(args.command, args)
        if args.command == "regress":
            overrides = {k: getattr(args, k) for k in
                         ("n", "M", "sparsity", "alpha", "beta", "tau", "steps", "h")
                         if getattr(args, k) is not None}
            sc = Scenario(sc.kind, {**sc.config, **overrides}, sc.seed,
                          sc.out_dir, sc.threads, sc.dump_samples)
        out = _RUNNERS[args.command](sc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    rows, summary, code = out[0], out[1], out[2]
    columns = out[3] if len(out) > 3 else None
    csv_path = sc.out_dir / sc.config.get("output", {}).get("csv", f"{sc.kind}.csv")
    summary_path = sc.out_dir / sc.config.get("output", {}).get(
        "summary", f"{sc.kind}_summary.json")
    write_csv(csv_path, rows, columns)
    write_summary(summary_path, {"kind": sc.kind, "seed": sc.seed, **summary})
    print(f"{sc.kind}: {len(rows)} rows -> {csv_path} (exit {code})")
    return code


if __name__ == "__main__":
    sys.exit(main())
