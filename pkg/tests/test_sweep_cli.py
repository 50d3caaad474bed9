"""Tests for family sweeps and the command line."""

import json
import math
import subprocess
import sys

import pytest

from causalmaps import (SWEEP_HEADER, SweepConfig, classify, family_map,
                        read_sweep_csv, rows_to_json_dicts, run_sweep,
                        write_sweep_csv)
from causalmaps.tomography import COUNTS_HEADER


def run_cli(*argv):
    return subprocess.run([sys.executable, "-m", "causalmaps.cli", *argv],
                          capture_output=True, text=True)


def test_sweep_config_validation():
    bad = (dict(family="spiral"),
           dict(family="delay", steps=1),
           dict(family="theta_p", p_steps=1),
           dict(family="delay", shots=0),
           dict(family="delay", tau_coh=0.0),
           dict(family="theta_p", p_max=1.5),
           dict(family="delay", epsilon=0.0))
    for kwargs in bad:
        with pytest.raises(ValueError):
            SweepConfig(**kwargs)


def test_delay_sweep_rows_match_direct_classification():
    rows = run_sweep(SweepConfig(family="delay", steps=3))
    assert [row.q for row in rows] == [0.0, 0.5, 1.0]
    for row in rows:
        assert row.param_name == "q"
        assert row.theta == math.pi / 2
        assert row.p == 0.0 and row.eta == 0.0
        report = classify(family_map(math.pi / 2, q=row.q))
        assert row.class_label == report.class_label
        assert abs(row.c_cd - report.c_cd) < 1e-12
        assert abs(row.neg_cd_plus - report.neg_cd_plus) < 1e-12


def test_theta_p_sweep_is_theta_major():
    rows = run_sweep(SweepConfig(family="theta_p", steps=3, p_steps=2,
                                 p_max=0.3))
    assert len(rows) == 6
    assert [round(r.theta, 12) for r in rows] == \
        [round(t, 12) for t in (0.0, 0.0, math.pi / 2, math.pi / 2,
                                math.pi, math.pi)]
    assert [r.p for r in rows] == [0.0, 0.3] * 3
    assert all(r.param_name == "theta_p" and r.q == 1.0 for r in rows)


def test_eta_sweep_values():
    rows = run_sweep(SweepConfig(family="eta", steps=3))
    assert [r.eta for r in rows] == [0.0, math.pi / 8, math.pi / 4]
    assert all(r.p == 1.0 and r.q == 1.0 and r.param_name == "eta"
               for r in rows)
    assert abs(rows[0].c_cd - 0.5) < 1e-9
    assert abs(rows[1].c_cd - 0.125) < 1e-9
    assert abs(rows[2].c_cd) < 1e-9
    assert [r.class_label for r in rows] == ["PhysC", "PhysC", "ProbC"]


def test_delay_sweep_over_physical_time():
    rows = run_sweep(SweepConfig(family="delay", steps=3, tau_coh=1.0))
    assert all(r.param_name == "tau" for r in rows)
    expected_q = [1.0, math.exp(-2.5 ** 2 / 2), math.exp(-5.0 ** 2 / 2)]
    assert all(abs(r.q - e) < 1e-12 for r, e in zip(rows, expected_q))


def test_sweep_csv_round_trip(tmp_path):
    rows = run_sweep(SweepConfig(family="delay", steps=3))
    path = tmp_path / "sweep.csv"
    with open(path, "w", newline="") as fh:
        write_sweep_csv(rows, fh)
    text = path.read_text()
    assert text.splitlines()[0] == ",".join(SWEEP_HEADER)
    assert "0.103553391" in text
    back = read_sweep_csv(str(path))
    assert len(back) == len(rows)
    for a, b in zip(back, rows):
        assert a.param_name == b.param_name
        assert a.class_label == b.class_label
        assert math.isclose(a.c_cd, b.c_cd, rel_tol=1e-8, abs_tol=1e-8)
        assert math.isclose(a.neg_cd_plus, b.neg_cd_plus,
                            rel_tol=1e-8, abs_tol=1e-8)


def test_sweep_csv_rejects_malformed_input(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("param,theta\nq,0\n")
    with pytest.raises(ValueError):
        read_sweep_csv(str(path))
    path.write_text(",".join(SWEEP_HEADER) + "\nq,0,0\n")
    with pytest.raises(ValueError):
        read_sweep_csv(str(path))


def test_rows_to_json_dicts_keys():
    rows = run_sweep(SweepConfig(family="delay", steps=2))
    payload = rows_to_json_dicts(rows)
    assert len(payload) == 2
    assert set(payload[0]) == set(SWEEP_HEADER)
    assert payload[1]["class"] == rows[1].class_label


def test_cli_sweep_to_stdout():
    proc = run_cli("sweep", "--family", "delay", "--steps", "3")
    assert proc.returncode == 0, proc.stderr
    lines = proc.stdout.splitlines()
    assert lines[0] == ",".join(SWEEP_HEADER)
    assert len(lines) == 4


def test_cli_sweep_json_format():
    proc = run_cli("sweep", "--family", "eta", "--steps", "2",
                   "--format", "json")
    assert proc.returncode == 0, proc.stderr
    payload = json.loads(proc.stdout)
    assert [row["eta"] for row in payload] == [0.0, math.pi / 4]


def test_cli_dump_map_then_classify(tmp_path):
    map_path = tmp_path / "map.json"
    proc = run_cli("dump-map", "--theta", repr(math.pi / 2),
                   "--out", str(map_path))
    assert proc.returncode == 0, proc.stderr
    assert json.loads(map_path.read_text())["layout"] == ["C", "B", "D"]
    proc = run_cli("classify", "--map", str(map_path))
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    assert report["class"] == "Coh"
    assert abs(report["c_cd"] - 0.5) < 1e-9


def test_cli_input_errors_exit_2(tmp_path):
    assert run_cli("sweep").returncode == 2

    garbage = tmp_path / "broken.json"
    garbage.write_text("not a map")
    assert run_cli("classify", "--map", str(garbage)).returncode == 2

    assert run_cli("classify", "--tau", "1.0").returncode == 2
    assert run_cli("classify", "--q", "0.5", "--tau", "1.0",
                   "--tau-coh", "1.0").returncode == 2

    config = tmp_path / "bad.cfg"
    config.write_text("family=delay\nwibble=3\n")
    assert run_cli("sweep", "--config", str(config)).returncode == 2


def test_cli_unphysical_map_exits_3(tmp_path):
    scale = [[0.25 if i == j else 0.0 for j in range(8)] for i in range(8)]
    path = tmp_path / "unphysical.json"
    path.write_text(json.dumps({"layout": ["C", "B", "D"], "re": scale,
                                "im": [[0.0] * 8 for _ in range(8)]}))
    proc = run_cli("classify", "--map", str(path))
    assert proc.returncode == 3
    assert "error:" in proc.stderr


def test_cli_tomo_writes_counts_map_and_report(tmp_path):
    config = tmp_path / "tomo.cfg"
    config.write_text("n_boot=10\n")
    prefix = tmp_path / "run"
    proc = run_cli("tomo", "--theta", "1.2", "--shots", "500", "--seed", "3",
                   "--config", str(config), "--out", str(prefix))
    assert proc.returncode == 0, proc.stderr
    counts = (tmp_path / "run_counts.csv").read_text()
    assert counts.splitlines()[0] == ",".join(COUNTS_HEADER)
    cmap = json.loads((tmp_path / "run_map.json").read_text())
    assert cmap["layout"] == ["C", "B", "D"]
    report = json.loads((tmp_path / "run_report.json").read_text())
    assert set(report) == {"witnesses", "bootstrap_se", "epsilon_effective"}
    assert report["epsilon_effective"] >= report["witnesses"]["epsilon"] - 1e-15


def test_cli_flags_override_config_file(tmp_path):
    config = tmp_path / "sweep.cfg"
    config.write_text("family=delay\nsteps=4\n")
    with_flag = run_cli("sweep", "--config", str(config), "--steps", "3")
    without = run_cli("sweep", "--config", str(config))
    assert with_flag.returncode == 0 and without.returncode == 0
    assert len(with_flag.stdout.splitlines()) == 4
    assert len(without.stdout.splitlines()) == 5
