import json

import numpy as np
import pytest

from funcineq import cli


def _run(args):
    return cli.main([str(a) for a in args])


def _write(path, text):
    path.write_text(text)
    return path


def test_malformed_config_exits_2(tmp_path, capsys):
    bad = _write(tmp_path / "bad.toml", 'kind = [broken\n')
    assert _run(["oracle", "--config", bad, "--out-dir", tmp_path]) == 2
    assert "config error" in capsys.readouterr().err


def test_missing_key_exits_2(tmp_path, capsys):
    cfg = _write(tmp_path / "cfg.toml", 'kind = "oracle"\n')
    assert _run(["oracle", "--config", cfg, "--out-dir", tmp_path]) == 2
    err = capsys.readouterr().err
    assert "measures" in err


def test_kind_mismatch_exits_2(tmp_path):
    cfg = _write(tmp_path / "cfg.toml", 'kind = "sweep"\n')
    assert _run(["oracle", "--config", cfg, "--out-dir", tmp_path]) == 2


def test_oracle_scenario(tmp_path):
    cfg = _write(tmp_path / "o.toml", """
kind = "oracle"
[[measures]]
family = "gaussian"
rho = 1.0
[[measures]]
family = "exponential"
alpha = 1.0
""")
    assert _run(["oracle", "--config", cfg, "--out-dir", tmp_path]) == 0
    rows = (tmp_path / "oracle.csv").read_text().splitlines()
    header = rows[0].split(",")
    assert {"poincare", "cheeger_median", "muckenhoupt", "sandwich_ok"} <= set(header)
    assert len(rows) == 3
    summary = json.loads((tmp_path / "oracle_summary.json").read_text())
    assert summary["schema_version"] == 1
    assert summary["sandwich_violations"] == 0


def test_sweep_scenario_and_determinism(tmp_path):
    cfg = _write(tmp_path / "s.toml", """
kind = "sweep"
seed = 5
instances = 4
theorems = ["lipschitz_poincare", "poincare_from_variance"]
""")
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert _run(["sweep", "--config", cfg, "--out-dir", out1]) == 0
    assert _run(["sweep", "--config", cfg, "--out-dir", out2]) == 0
    assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()
    summary = json.loads((out1 / "sweep_summary.json").read_text())
    assert summary["violations"] == 0


def test_sweep_unknown_theorem_exits_2(tmp_path):
    cfg = _write(tmp_path / "s.toml", """
kind = "sweep"
theorems = ["not_a_theorem"]
""")
    assert _run(["sweep", "--config", cfg, "--out-dir", tmp_path]) == 2


def test_bounds_scenario(tmp_path):
    cfg = _write(tmp_path / "b.toml", """
kind = "bounds"
calculators = ["holley_stroock", "lipschitz_poincare", "poincare_from_variance"]
[measure]
family = "gaussian"
rho = 1.0
[perturbation]
kind = "bump"
height = 0.4
width = 1.0
""")
    assert _run(["bounds", "--config", cfg, "--out-dir", tmp_path]) == 0
    lines = (tmp_path / "bounds.csv").read_text().splitlines()
    header = lines[0].split(",")
    for col in ("theorem_id", "applicable", "value", "oracle", "ratio"):
        assert col in header
    assert len(lines) == 4


def test_bounds_generator_calculator(tmp_path):
    cfg = _write(tmp_path / "g.toml", """
kind = "bounds"
calculators = ["generator_poincare", "logconcave_generator"]
[measure]
family = "gaussian"
rho = 1.0
[perturbation]
kind = "half_quadratic"
c = 0.4
""")
    assert _run(["bounds", "--config", cfg, "--out-dir", tmp_path]) == 0
    lines = (tmp_path / "bounds.csv").read_text().splitlines()
    rows = [dict(zip(lines[0].split(","), ln.split(","))) for ln in lines[1:]]
    for row in rows:
        assert row["applicable"] == "true"
        assert float(row["ratio"]) >= 0.999


def test_bounds_logconcave_routes_refused_for_nonconvex_pert(tmp_path):
    cfg = _write(tmp_path / "b.toml", """
kind = "bounds"
calculators = ["concentration_transfer", "logconcave_grad2"]
[measure]
family = "gaussian"
rho = 1.0
[perturbation]
kind = "bump"
height = 0.2
width = 1.0
""")
    assert _run(["bounds", "--config", cfg, "--out-dir", tmp_path]) == 0
    lines = (tmp_path / "bounds.csv").read_text().splitlines()
    rows = [dict(zip(lines[0].split(","), ln.split(","))) for ln in lines[1:]]
    assert all(r["applicable"] == "false" for r in rows)
    assert all(r["value"] == "" for r in rows)


def test_bounds_generator_refuses_uncertifiable_supremum(tmp_path):
    cfg = _write(tmp_path / "g.toml", """
kind = "bounds"
calculators = ["generator_poincare"]
[measure]
family = "gaussian"
rho = 1.0
[perturbation]
kind = "bump"
height = 0.1
""")
    assert _run(["bounds", "--config", cfg, "--out-dir", tmp_path]) == 2


def test_mollify_scenario(tmp_path):
    cfg = _write(tmp_path / "m.toml", """
kind = "mollify"
[[cases]]
locations = [-1.0, 1.0]
weights = [0.5, 0.5]
sigmas = [2.0]
""")
    assert _run(["mollify", "--config", cfg, "--out-dir", tmp_path]) == 0
    body = (tmp_path / "mollify.csv").read_text()
    assert "7.11111111111" in body


def test_langevin_scenario_with_dump(tmp_path):
    cfg = _write(tmp_path / "l.toml", """
kind = "langevin"
seed = 3
[target]
family = "gaussian"
rho = 1.0
[chain]
step = 0.05
steps = 4000
burn_in = 400
chains = 16
""")
    assert _run(["langevin", "--config", cfg, "--out-dir", tmp_path,
                 "--dump-samples"]) == 0
    data, seed = cli.load_samples_binary(tmp_path / "samples.bin")
    assert seed == 3
    assert data.shape == (4001, 1)
    with open(tmp_path / "samples.bin", "rb") as fh:
        assert fh.readline() == b"n=1 N=4001 seed=3\n"


def test_regress_scenario_flags_only(tmp_path):
    assert _run(["regress", "--out-dir", tmp_path, "--seed", "11",
                 "--n", "16", "--M", "8", "--sparsity", "2",
                 "--beta", "20", "--alpha", "1.0", "--tau", "2.0",
                 "--steps", "4000", "--h", "0.02"]) == 0
    rep = json.loads((tmp_path / "regress_summary.json").read_text())
    r = rep["report"]
    for key in ("q", "q_prime", "constructive_bound", "fitted_rate",
                "lambda_hat", "sign_matches_on_support"):
        assert key in r
    assert rep["gates"]["logM"]["theorem_id"] == "regression_gate_logM"


def test_compare_scenario(tmp_path):
    cfg = _write(tmp_path / "c.toml", """
kind = "compare"
[measure]
family = "gaussian"
rho = 1.0
[grid]
heights = [0.1, 4.0]
width = 1.0
""")
    assert _run(["compare", "--config", cfg, "--out-dir", tmp_path]) == 0
    lines = (tmp_path / "compare.csv").read_text().splitlines()
    assert lines[0].split(",")[-1] == "winner"
    winners = {ln.split(",")[-1] for ln in lines[1:]}
    assert "holley_stroock" in winners  # the Lipschitz gate fails at height 4


def test_binary_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    samples = rng.standard_normal((37, 3))
    cli.dump_samples_binary(tmp_path / "x.bin", samples, 99)
    back, seed = cli.load_samples_binary(tmp_path / "x.bin")
    assert seed == 99
    assert np.array_equal(back, samples)


def test_csv_float_format_stable(tmp_path):
    cli.write_csv(tmp_path / "t.csv", [{"a": 1 / 3, "b": None, "c": True}])
    assert (tmp_path / "t.csv").read_text() == "a,b,c\n0.333333333333,,true\n"
