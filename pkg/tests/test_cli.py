import csv
import json
import math
import os
from unittest import mock

import pytest

from heiskit import cli


def test_parse_list_and_ranges():
    assert cli._parse_list("0.5,1,2") == (0.5, 1.0, 2.0)
    assert cli._parse_list("2^-2..2^2") == (0.25, 0.5, 1.0, 2.0, 4.0)
    assert cli._parse_list("2^-1..2^-3") == (0.5, 0.25, 0.125)
    assert cli._parse_list("") == ()
    with pytest.raises(cli.ConfigError):
        cli._parse_list("-1..2")


def test_parse_center_and_scales():
    assert cli._parse_center("1, 2,3") == (1.0, 2.0, 3.0)
    with pytest.raises(cli.ConfigError):
        cli._parse_center("1,2")
    assert cli._parse_scales("2^-4:4:2") == (0.0625, 4.0, 2)
    with pytest.raises(cli.ConfigError):
        cli._parse_scales("1:0.5:2")


def test_config_round_trip():
    cfg = cli.ExperimentConfig(
        experiment="osc-scan",
        domain="slab:t>0",
        center=(0.1, -0.2, 0.3),
        radius=1.5,
        radii=(0.5, 1.0),
        samples=5000,
        seed=9,
        scales=(0.125, 2.0, 3),
        p_exp=2.0,
        eps_grid=(0.5, 0.25),
        out="x.csv",
        fmt="csv",
    )
    back = cli.configs_from_text(cfg.to_text())
    assert back == [cfg]
    assert cfg.config_hash == back[0].config_hash


def test_config_unknown_keys_rejected():
    text = "[osc-scan]\ndomain = slab:t>0\nmystery = 1\n"
    with pytest.raises(cli.ConfigError):
        cli.configs_from_text(text)
    with pytest.raises(cli.ConfigError):
        cli.ExperimentConfig(experiment="nope")
    with pytest.raises(cli.ConfigError):
        cli.ExperimentConfig(experiment="dini", fmt="yaml")


def test_fit_decay_exact_power_laws():
    radii = [2.0**k for k in range(-5, 6)]
    prof = [(math.log(r), math.log(r**0.5)) for r in radii]
    fit = cli.fit_decay(prof)
    assert fit.slope_below == pytest.approx(0.5, abs=1e-6)
    assert fit.slope_above == pytest.approx(0.5, abs=1e-6)
    assert fit.r2 == pytest.approx(1.0)

    prof2 = [(math.log(r), math.log(min(r, 1 / r))) for r in radii]
    fit2 = cli.fit_decay(prof2)
    assert fit2.slope_below == pytest.approx(1.0, abs=1e-9)
    assert fit2.slope_above == pytest.approx(-1.0, abs=1e-9)


def test_fit_decay_degenerate():
    fit = cli.fit_decay([])
    assert math.isnan(fit.slope_below) and math.isnan(fit.slope_above)
    # all-zero profiles arrive as -inf logs and are dropped, not fit as 0
    fit2 = cli.fit_decay([(0.5, -math.inf), (1.0, -math.inf), (-0.5, -math.inf)])
    assert math.isnan(fit2.slope_below) and math.isnan(fit2.slope_above)


def run_main(argv):
    return cli.main(argv)


def test_osc_scan_flat_zero_column(tmp_path, capsys):
    out = tmp_path / "flat.csv"
    code = run_main([
        "osc-scan", "--domain", "flat:theta=0,offset=0", "--radii", "2^-1..2^1",
        "--samples", "20000", "--seed", "3", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# heiskit=")
    rows = list(csv.reader(lines[1:]))
    est_col = rows[0].index("estimate")
    for row in rows[1:]:
        assert float(row[est_col]) == 0.0


def test_cli_determinism_and_parallel(tmp_path):
    args = [
        "osc-scan", "--domain", "holder:H=1,tau=0.5", "--radius", "1",
        "--samples", "30000", "--seed", "5",
    ]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_main(args + ["--out", str(a)]) == 0
    with mock.patch.dict(os.environ, {"HEISKIT_WORKERS": "4"}):
        assert run_main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_invariants_experiment(tmp_path):
    out = tmp_path / "inv.json"
    code = run_main(["invariants", "--seed", "1", "--format", "json", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["summary"]["passed"] is True
    assert payload["summary"]["failures"] == []
    assert all(row[-1] for row in payload["rows"])


def test_beta_scan_runs(tmp_path):
    out = tmp_path / "beta.csv"
    code = run_main([
        "beta-scan", "--domain", "lift:phi0=abs,scale=0.5", "--radius", "1",
        "--samples", "20000", "--seed", "2", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    rows = list(csv.reader(lines[1:]))
    assert rows[0][:4] == ["domain_label", "cx", "cy", "ct"]
    assert len(rows) == 3  # header + (p_exp, inf) rows


def test_dini_summary_slopes(tmp_path):
    out = tmp_path / "dini.json"
    code = run_main([
        "dini", "--domain", "holder:H=1,tau=1", "--scales", "2^-4:2^4:1",
        "--samples", "40000", "--seed", "6", "--format", "json", "--out", str(out),
    ])
    assert code == 0
    payload = json.loads(out.read_text())
    s = payload["summary"]
    assert 0.6 <= s["slope_below_1"] <= 1.4
    assert -1.4 <= s["slope_above_1"] <= -0.6


def test_config_file_execution(tmp_path):
    out = tmp_path / "via_config.csv"
    cfg_file = tmp_path / "exp.cfg"
    cfg = cli.ExperimentConfig(
        experiment="osc-scan", domain="slab:t>0", radius=1.0,
        samples=10_000, seed=4, out=str(out),
    )
    cfg_file.write_text(cfg.to_text())
    assert run_main(["--config", str(cfg_file)]) == 0
    assert out.exists()


def test_exit_code_2_on_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[osc-scan]\nmystery = 1\n")
    assert run_main(["--config", str(bad)]) == 2
    assert run_main(["--config", str(tmp_path / "missing.cfg")]) == 2
    assert run_main(["osc-scan", "--domain", "bogus:a=1", "--samples", "100"]) == 2
    assert run_main([]) == 2


def test_riesz_test_experiment_small(tmp_path):
    out = tmp_path / "riesz.csv"
    code = run_main([
        "riesz-test", "--domain", "flat:theta=0,offset=0", "--radius", "0.5",
        "--samples", "20000", "--seed", "7", "--eps-grid", "2^-1..2^-2",
        "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    rows = list(csv.reader(lines[1:]))
    assert rows[0][0] == "graph"
    assert len(rows) == 1 + 10 * 2  # ten points, two eps values, one ball
