import json

import numpy as np
import pytest

import conetip as ct
from conetip.cli import main, run_command
from conetip.errors import ConfigError
from conetip.io import parse_config, serialize_config, write_results

MINIMAL = json.dumps({
    "subcommand": "spectrum",
    "geometry": {"kind": "internal", "alpha": 0.7853981633974483},
    "material": {"kappa": -0.5},
})


def test_parse_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.mesh == {"elements": 64, "order": 2}
    assert cfg.modes == (0, 1, 2, 3, 4)
    assert cfg.sweep["line_tol"] == 1e-6
    assert cfg.material["sigma_minus"] == -2.0


def test_parse_rejects_kappa_minus_one():
    bad = json.loads(MINIMAL)
    bad["material"] = {"kappa": -1.0}
    with pytest.raises(ConfigError, match="kappa=-1 excluded"):
        parse_config(json.dumps(bad))


def test_parse_rejects_double_contrast():
    bad = json.loads(MINIMAL)
    bad["material"] = {"kappa": -0.5, "sigma_minus": -2.0}
    with pytest.raises(ConfigError, match="exactly one"):
        parse_config(json.dumps(bad))


def test_parse_rejects_unknown_keys():
    bad = json.loads(MINIMAL)
    bad["sweep"] = {"line_tolerance": 1e-8}
    with pytest.raises(ConfigError, match="line_tolerance"):
        parse_config(json.dumps(bad))
    bad2 = json.loads(MINIMAL)
    bad2["grids"] = {}
    with pytest.raises(ConfigError, match="grids"):
        parse_config(json.dumps(bad2))


def test_config_round_trip():
    cfg = parse_config(MINIMAL)
    assert parse_config(serialize_config(cfg)) == cfg
    assert cfg.config_hash == parse_config(serialize_config(cfg)).config_hash


def test_aleph_bundle():
    cfg = parse_config(json.dumps({
        "subcommand": "aleph",
        "geometry": {"kind": "internal", "alpha": np.pi / 4}}))
    bundle = run_command(cfg)
    assert round(bundle.documents["aleph"]["aleph"], 3) == 0.218


def test_spectrum_csv_contract(tmp_path):
    cfg = parse_config(json.dumps({
        "subcommand": "spectrum",
        "geometry": {"kind": "internal", "alpha": np.pi / 4},
        "material": {"kappa": 1.0},
        "modes": [0],
        "mesh": {"elements": 48, "order": 2}}))
    bundle = run_command(cfg)
    paths = write_results(bundle, tmp_path, ["csv"])
    csv = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert csv[0] == "mode,re_Lambda,im_Lambda,re_lambda,im_lambda,classification,residual"
    first = [float(line.split(",")[1]) for line in csv[1:5]]
    np.testing.assert_allclose(first, [0.0, 2.0, 6.0, 12.0], atol=1e-3)
    assert (tmp_path / "meta.json").exists()
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert set(meta) == {"config_hash", "version"}


def test_determinism_across_runs_and_threads(tmp_path):
    raw = json.dumps({
        "subcommand": "spectrum",
        "geometry": {"kind": "internal", "alpha": np.pi / 4},
        "material": {"kappa": -0.5},
        "modes": [0, 1, 2],
        "mesh": {"elements": 32, "order": 2}})
    cfg = parse_config(raw)
    outs = []
    for name, threads in (("a", 1), ("b", 1), ("c", 3)):
        d = tmp_path / name
        write_results(run_command(cfg, threads=threads), d)
        outs.append((d / "spectrum.csv").read_bytes()
                    + (d / "meta.json").read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_interval_json_contract(tmp_path):
    cfg = parse_config(json.dumps({
        "subcommand": "interval",
        "geometry": {"kind": "internal", "alpha": np.pi / 4},
        "material": {"kappa": -0.5},
        "modes": [0],
        "mesh": {"elements": 32, "order": 2},
        "sweep": {"kappa_range": [-0.6, -0.08], "grid": 7, "bisect_tol": 0.02}}))
    bundle = run_command(cfg)
    write_results(bundle, tmp_path, ["json"])
    doc = json.loads((tmp_path / "interval.json").read_text())
    for key in ("alpha", "endpoint_detected", "endpoint_closed_form", "per_mode"):
        assert key in doc
    assert abs(doc["endpoint_detected"] - doc["endpoint_closed_form"]) < 0.05


def test_trajectory_csv_contract(tmp_path):
    cfg = parse_config(json.dumps({
        "subcommand": "trajectory",
        "geometry": {"kind": "internal", "alpha": np.pi / 4},
        "material": {"kappa": -0.5},
        "modes": [0],
        "mesh": {"elements": 32, "order": 2},
        "sweep": {"delta_grid": [1e-3, 1e-4, 1e-5]}}))
    bundle = run_command(cfg)
    write_results(bundle, tmp_path)
    lines = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "delta,re_lambda,im_lambda,overlap"
    assert len(lines) == 1 + 4  # undamped point + grid


def test_basis_weights_blowup_bundles(tmp_path):
    base = {
        "geometry": {"kind": "internal", "alpha": np.pi / 4},
        "material": {"kappa": -0.5},
        "modes": [0, 1],
        "mesh": {"elements": 48, "order": 2}}
    bundle = run_command(parse_config(json.dumps({**base, "subcommand": "basis"})))
    doc = bundle.documents["basis"]
    assert doc["dim"] == 2 * doc["n_outgoing"]
    assert doc["residual"] < 1e-10

    bundle = run_command(parse_config(json.dumps(
        {**base, "subcommand": "weights", "material": {"kappa": 1.0}})))
    w = bundle.documents["weights"]
    assert abs(w["beta_dirichlet"] - 0.5) < 1e-2
    assert w["beta_star"] == min(w["beta_dirichlet"], w["beta_neumann"], 0.5)

    bundle = run_command(parse_config(json.dumps({**base, "subcommand": "blowup"})))
    write_results(bundle, tmp_path)
    assert bundle.documents["blowup"]["slope"] > 0
    assert bundle.documents["blowup"]["r_squared"] > 0.999
    lines = (tmp_path / "blowup.csv").read_text().splitlines()
    assert lines[0] == "n,grad_norm_sq"


def test_cli_main_errors(tmp_path, capsys):
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(MINIMAL)
    assert main(["aleph", "--config", str(cfg_path)]) == 2
    err = capsys.readouterr().err
    assert "does not match" in err


def test_cli_main_runs(tmp_path):
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps({
        "subcommand": "aleph",
        "geometry": {"kind": "internal", "alpha": np.pi / 3},
        "output": {"directory": str(tmp_path / "out")}}))
    assert main(["aleph", "--config", str(cfg_path)]) == 0
    assert (tmp_path / "out" / "aleph.json").exists()
