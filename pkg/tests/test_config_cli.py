"""Config parsing and validation, sweep determinism, CSV schema, plot data,
and the command-line interface."""

import math

import numpy as np
import pytest

import spherenorms as sn
from spherenorms.cli import main
from spherenorms.config import config_hash, load_config, parse_config, serialize_config
from spherenorms.errors import ConfigError
from spherenorms.runner import plotdata, read_results, run_experiment

SMALL_CONFIG = """
schema: 1
d: 1
L_list: [4, 8]
seed: 7
label: two-arcs
family:
  kind: fixed
  set: {kind: arcs, intervals: [[-1.2, 1.2], [2.2, 3.0]]}
measure: {kind: lebesgue}
functionals:
  - {name: eigen}
  - {name: density, r: 2.0}
  - {name: harmonic}
"""


def test_parse_and_defaults():
    cfg = parse_config(SMALL_CONFIG)
    assert cfg.d == 1
    assert cfg.L_list == (4, 8)
    assert cfg.label == "two-arcs"
    assert cfg.oversample == 4.0
    assert [f.name for f in cfg.functionals] == ["eigen", "density", "harmonic"]
    assert cfg.functionals[1].params["r"] == 2.0


@pytest.mark.parametrize(
    "mutation, field",
    [
        ("d: 3", "d"),
        ("L_list: []", "L_list"),
        ("functionals: [{name: bogus}]", "functionals[0].name"),
        ("functionals: [{name: density, nope: 1}]", "functionals[0].nope"),
        ("functionals: [{name: density, r: -1.0}]", "functionals[0].r"),
        ("schema: 99", "schema"),
    ],
)
def test_validation_errors_name_the_field(mutation, field):
    key = mutation.split(":")[0]
    lines = [ln for ln in SMALL_CONFIG.splitlines() if not ln.startswith(key)]
    if key == "functionals":
        # also drop the original functional list items
        lines = [ln for ln in lines if not ln.lstrip().startswith("- {name")]
    text = "\n".join(lines) + "\n" + mutation
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert field in str(err.value)


def test_yaml_error_reported():
    with pytest.raises(ConfigError):
        parse_config("d: [unclosed")


def test_round_trip_idempotent():
    cfg = parse_config(SMALL_CONFIG)
    text1 = serialize_config(cfg)
    text2 = serialize_config(parse_config(text1))
    assert text1 == text2
    assert config_hash(parse_config(text1)) == config_hash(cfg)


def test_hash_tracks_content():
    cfg = parse_config(SMALL_CONFIG)
    other = parse_config(SMALL_CONFIG.replace("seed: 7", "seed: 8"))
    assert config_hash(cfg) != config_hash(other)


def test_run_experiment_deterministic(tmp_path):
    cfg = parse_config(SMALL_CONFIG)
    res1, tim1, rows = run_experiment(cfg, tmp_path / "a")
    res2, _, _ = run_experiment(cfg, tmp_path / "b")
    assert res1.read_bytes() == res2.read_bytes()
    assert len(rows) == 6
    parsed = read_results(res1)
    assert {r["functional"] for r in parsed} == {"eigen", "density", "harmonic"}
    assert all(r["config_hash"] == config_hash(cfg) for r in parsed)
    # timings live in the sidecar, not the results file
    assert "wall_time_s" in tim1.read_text().splitlines()[0]
    assert "wall_time_s" not in res1.read_text().splitlines()[0]


def test_run_experiment_worker_pool_identical(tmp_path):
    cfg = parse_config(SMALL_CONFIG)
    res1, _, _ = run_experiment(cfg, tmp_path / "serial", workers=1)
    res2, _, _ = run_experiment(cfg, tmp_path / "pool", workers=2)
    assert res1.read_bytes() == res2.read_bytes()


def test_plotdata_two_series(tmp_path):
    cfg1 = parse_config(SMALL_CONFIG)
    cfg2 = parse_config(SMALL_CONFIG.replace("[[-1.2, 1.2], [2.2, 3.0]]", "[[-0.4, 0.4]]"))
    res1, _, _ = run_experiment(cfg1, tmp_path / "one")
    res2, _, _ = run_experiment(cfg2, tmp_path / "two")
    out = plotdata([res1, res2], "eigen", tmp_path / "plot.csv", labels=["wide", "narrow"])
    lines = out.read_text().splitlines()
    assert lines[0] == "L,wide,narrow"
    assert len(lines) == 3
    with pytest.raises(ValueError):
        plotdata([res1], "nonexistent", tmp_path / "x.csv")


def test_plotdata_schema_mismatch(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("foo,bar\n1,2\n")
    with pytest.raises(ValueError):
        read_results(bad)


def test_cli_run_and_plotdata(tmp_path, capsys):
    cfg_path = tmp_path / "exp.yaml"
    cfg_path.write_text(SMALL_CONFIG)
    code = main(["run", str(cfg_path), "-o", str(tmp_path / "out")])
    assert code == 0
    assert (tmp_path / "out" / "results.csv").exists()
    code = main([
        "plotdata", str(tmp_path / "out" / "results.csv"),
        "--kind", "eigen", "-o", str(tmp_path / "eigen.csv"), "--labels", "arcs",
    ])
    assert code == 0
    assert (tmp_path / "eigen.csv").read_text().startswith("L,arcs")


def test_cli_seed_override(tmp_path):
    cfg_path = tmp_path / "exp.yaml"
    cfg_path.write_text(SMALL_CONFIG)
    assert main(["run", str(cfg_path), "-o", str(tmp_path / "o1"), "--seed", "99"]) == 0
    h1 = read_results(tmp_path / "o1" / "results.csv")[0]["config_hash"]
    assert main(["run", str(cfg_path), "-o", str(tmp_path / "o2")]) == 0
    h2 = read_results(tmp_path / "o2" / "results.csv")[0]["config_hash"]
    assert h1 != h2


def test_cli_bad_config_exit_code(tmp_path):
    cfg_path = tmp_path / "bad.yaml"
    cfg_path.write_text("d: 7\n")
    assert main(["run", str(cfg_path)]) == 1


def test_cli_resource_guard_exit_code(tmp_path):
    cfg_path = tmp_path / "huge.yaml"
    cfg_path.write_text(
        """
d: 2
L_list: [40]
family: {kind: fixed, set: {kind: full}}
functionals: [{name: eigen}]
"""
    )
    assert main(["run", str(cfg_path), "-o", str(tmp_path / "out")]) == 2


def test_cli_describe(capsys):
    assert main(["describe"]) == 0
    out = capsys.readouterr().out
    assert "lambda_min" in out
    assert "density" in out


def test_cli_verify_single_cheap_criterion(tmp_path):
    assert main(["verify", "--criteria", "2", "-o", str(tmp_path / "ver")]) == 0


def test_corrupted_kernel_normalization_detected():
    # doubling kappa must break the basis-sum identity by a detectable margin
    ks = sn.kernel_spec(2, 8)
    bad = sn.KernelSpec(2, 8, ks.kappa * 2.0)
    rng = np.random.default_rng(1)
    u = sn.random_points(2, 50, rng)
    v = sn.random_points(2, 50, rng)
    spec = sn.BasisSpec(2, 8)
    lhs = (sn.basis_matrix(spec, u) * sn.basis_matrix(spec, v)).sum(axis=1)
    rhs = sn.reproducing_kernel(bad, np.clip((u * v).sum(axis=1), -1, 1))
    scale = sn.dim_pi(2, 8) / (4 * math.pi)
    assert np.abs(lhs - rhs).max() / scale > 1e-9


def test_random_caps_family_config_round_trip():
    text = """
d: 2
L_list: [4]
family: {kind: random_caps, count: 8, seed: 3, radius_over_L: 1.0}
functionals: [{name: eigen}]
"""
    cfg = parse_config(text)
    assert serialize_config(parse_config(serialize_config(cfg))) == serialize_config(cfg)
