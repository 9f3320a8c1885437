import json
import math

import pytest

from pullin_dyn.cli import RunRecord, fmt_float, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_pullin_linear(capsys):
    out = run_json(capsys, "pullin", "--xi", "0", "--kappa", "0")
    assert out == {"v_dpi": 0.5, "x_dpi": 0.5, "xi": 0.0, "kappa": 0.0, "convexity_ok": True}


def test_pullin_cubic(capsys):
    out = run_json(capsys, "pullin", "--xi", "0", "--kappa", "1")
    assert out["v_dpi"] == pytest.approx(0.5339, abs=1e-4)
    assert out["x_dpi"] == pytest.approx(0.5596, abs=1e-4)


def test_pullin_convexity_violation_exits_3(capsys):
    code, _, err = run_cli(capsys, "pullin", "--xi", "0", "--kappa", "6")
    assert code == 3
    assert "kappa" in err


def test_pullin_invalid_parameter_exits_2(capsys):
    code, _, _ = run_cli(capsys, "pullin", "--xi", "-1", "--kappa", "0")
    assert code == 2


def test_pullin_physical_flags_route_through_normalization(capsys):
    out = run_json(
        capsys,
        "pullin",
        "--mass", "1e-9", "--spring-k", "1", "--area", "1e-8", "--gap", "1e-6",
        "--voltage", "2.0", "--spring-k3", "1e11", "--d0", "1e-7", "--eps-r", "2",
    )
    assert out["xi"] == pytest.approx(0.05)
    assert out["kappa"] == pytest.approx(0.1)


def test_mixing_flag_families_exits_2(capsys):
    code, _, err = run_cli(capsys, "pullin", "--xi", "0", "--mass", "1e-9")
    assert code == 2
    assert "mutually exclusive" in err


def test_classify_regimes(capsys):
    per = run_json(capsys, "classify", "--xi", "0", "--v", "0.4")
    assert per["regime"] == "periodic" and per["x_s"] == pytest.approx(0.2)
    crit = run_json(capsys, "classify", "--xi", "0", "--v", "0.5")
    assert crit["regime"] == "critical" and crit["x_limit"] == 0.5
    td = run_json(capsys, "classify", "--xi", "0", "--v", "0.6")
    assert td["regime"] == "touchdown"
    assert td["tc_bound"] == pytest.approx(6.0303, abs=1e-4)


def test_simulate_zero_voltage_two_rows(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    record = run_json(capsys, "simulate", "--xi", "0", "--v", "0", "--t-max", "5", "--output", str(path))
    assert record["outputs"]["samples"] == 2
    lines = path.read_text().splitlines()
    data = [l for l in lines if l and not l.startswith("#")]
    assert data[0] == "t,x,v,H"
    assert len(data) == 3  # header + two samples
    assert data[1].startswith("0,0,0")


def test_simulate_periodic_events_in_footer(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    run_json(
        capsys, "simulate", "--xi", "0", "--v", "0.4", "--dt", "1e-3",
        "--t-max", "8", "--output", str(path),
    )
    text = path.read_text()
    stag_pos = text.find("# event,stagnation,")
    ret_pos = text.find("# event,return,")
    assert 0 < stag_pos < ret_pos


def test_simulate_touchdown_footer_and_bound(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    run_json(
        capsys, "simulate", "--xi", "0", "--v", "0.6", "--dt", "1e-3",
        "--t-max", "10", "--output", str(path),
    )
    lines = path.read_text().splitlines()
    events = [l for l in lines if l.startswith("# event,")]
    assert len(events) == 1 and events[0].startswith("# event,touchdown,")
    t_c = float(events[0].split(",")[2])
    assert t_c <= 6.0303


def test_simulate_damped_omits_energy_column(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    run_json(
        capsys, "simulate", "--xi", "0", "--v", "0.4", "--mu", "0.5",
        "--dt", "1e-3", "--t-max", "2", "--output", str(path),
    )
    data = [l for l in path.read_text().splitlines() if l and not l.startswith("#")]
    assert data[0] == "t,x,v"


def test_simulate_rows_increasing_and_roundtrip(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    run_json(
        capsys, "simulate", "--xi", "0", "--v", "0.4", "--dt", "1e-2",
        "--t-max", "2", "--output", str(path),
    )
    data = [l for l in path.read_text().splitlines() if l and not l.startswith("#")][1:]
    ts = [float(row.split(",")[0]) for row in data]
    assert all(b > a for a, b in zip(ts, ts[1:]))
    for row in data[:50]:
        for cell in row.split(","):
            assert fmt_float(float(cell), 12) == cell


def test_period_both_methods_agree(capsys):
    out = run_json(capsys, "period", "--xi", "0", "--v", "0.4", "--method", "both")
    assert out["discrepancy"] <= 1e-7
    assert out["quad"]["t_p"] == pytest.approx(7.132198208919252, rel=1e-10)


def test_period_harmonic_limit(capsys):
    out = run_json(capsys, "period", "--xi", "0", "--v", "0.01", "--method", "both")
    assert out["quad"]["t_p"] == pytest.approx(2.0 * math.pi, rel=1e-3)
    assert out["discrepancy"] <= 1e-6


def test_period_supercritical_exits_5(capsys):
    code, _, err = run_cli(capsys, "period", "--xi", "0", "--v", "0.6")
    assert code == 5
    assert "classify" in err


def test_sweep_stagnation_column_increasing(capsys, tmp_path):
    path = tmp_path / "sweep.csv"
    run_json(
        capsys, "sweep", "--xi", "0", "--kappa", "0", "--v-min", "0.05",
        "--v-max", "0.45", "--v-steps", "9", "--output", str(path),
    )
    rows = [l for l in path.read_text().splitlines() if l and not l.startswith("#")][1:]
    assert len(rows) == 9
    x_s = [float(r.split(",")[3]) for r in rows]
    assert all(b > a for a, b in zip(x_s, x_s[1:]))


def test_sweep_regime_flip_across_threshold(capsys, tmp_path):
    path = tmp_path / "sweep.csv"
    run_json(
        capsys, "sweep", "--xi", "0", "--kappa", "0", "--v-min", "0.3",
        "--v-max", "0.7", "--v-steps", "9", "--output", str(path),
    )
    rows = [l for l in path.read_text().splitlines() if l and not l.startswith("#")][1:]
    regimes = [r.split(",")[6] for r in rows]
    # ordered flip: periodic below, touchdown above, the exact grid point at
    # v = 0.5 classifying critical
    order = {"periodic": 0, "critical": 1, "touchdown": 2}
    ranks = [order[r] for r in regimes]
    assert ranks == sorted(ranks)
    assert regimes[0] == "periodic" and regimes[-1] == "touchdown"
    assert regimes.count("critical") == 1
    # supercritical rows carry t_c and empty x_s/t_p
    super_cells = rows[-1].split(",")
    assert super_cells[3] == "" and super_cells[4] == "" and float(super_cells[5]) > 0


def test_sweep_kappa_axis_decreasing_stagnation(capsys, tmp_path):
    path = tmp_path / "sweep.csv"
    run_json(
        capsys, "sweep", "--xi", "0", "--kappa-range", "0", "1", "3",
        "--v-min", "0.4", "--v-max", "0.41", "--v-steps", "2",
        "--outputs", "x_s,regime", "--output", str(path),
    )
    rows = [l for l in path.read_text().splitlines() if l and not l.startswith("#")][1:]
    x_s_at_04 = [float(r.split(",")[3]) for r in rows if r.split(",")[2] == "0.4"]
    assert len(x_s_at_04) == 3
    assert all(b < a for a, b in zip(x_s_at_04, x_s_at_04[1:]))


def test_sweep_flags_convexity_violations_per_row(capsys, tmp_path):
    path = tmp_path / "sweep.csv"
    run_json(
        capsys, "sweep", "--xi", "0", "--kappa-range", "0", "8", "3",
        "--v-min", "0.1", "--v-max", "0.2", "--v-steps", "2", "--output", str(path),
    )
    rows = [l for l in path.read_text().splitlines() if l and not l.startswith("#")][1:]
    assert len(rows) == 6
    bad = [r for r in rows if "ConvexityError" in r]
    assert len(bad) == 2  # kappa = 8 rows are flagged, sweep continues


def test_sweep_deterministic_across_jobs(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    common = [
        "sweep", "--xi", "0.2", "--kappa", "0.3", "--v-min", "0.05",
        "--v-max", "0.6", "--v-steps", "12",
    ]
    run_json(capsys, *common, "--output", str(a), "--jobs", "1")
    run_json(capsys, *common, "--output", str(b), "--jobs", "2")
    assert a.read_bytes() == b.read_bytes()


def test_sweep_json_single_object(capsys, tmp_path):
    path = tmp_path / "sweep.json"
    run_json(
        capsys, "sweep", "--xi", "0", "--kappa", "0", "--v-min", "0.1",
        "--v-max", "0.3", "--v-steps", "3", "--format", "json", "--output", str(path),
    )
    payload = json.loads(path.read_text())
    assert isinstance(payload, dict)
    assert len(payload["rows"]) == 3
    assert payload["spec"]["v_steps"] == 3


def test_generic_subcommand(capsys):
    out = run_json(capsys, "generic", "--mu", "1", "--lam", "4", "--dt", "1e-3", "--t-max", "5")
    assert out["guaranteed"] is True
    assert out["t_c"] <= 1.842
    assert out["tc_bound"] == pytest.approx(1.8414, abs=1e-4)
    out2 = run_json(capsys, "generic", "--mu", "1", "--lam", "1", "--dt", "1e-3", "--t-max", "5")
    assert out2["guaranteed"] is False and out2["t_c"] is None


def test_config_file_with_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("xi=0.5\nkappa=0\n# comment\nv=0.2\n")
    out = run_json(capsys, "classify", "--config", str(cfg))
    assert out["xi"] == 0.5 and out["v"] == 0.2
    out2 = run_json(capsys, "classify", "--config", str(cfg), "--v", "0.3")
    assert out2["v"] == 0.3  # explicit flag wins
    assert out2["xi"] == 0.5


def test_missing_config_file_exits_2(capsys, tmp_path):
    code, _, _ = run_cli(capsys, "classify", "--config", str(tmp_path / "nope.cfg"), "--v", "0.1")
    assert code == 2


def test_precision_env_override(capsys, monkeypatch):
    monkeypatch.setenv("PULLIN_DYN_PRECISION", "4")
    out_text = None
    code = main(["pullin", "--xi", "0", "--kappa", "1"])
    captured = capsys.readouterr()
    assert code == 0
    assert '"v_dpi": 0.5339' in captured.out
    monkeypatch.setenv("PULLIN_DYN_PRECISION", "12")
    code = main(["pullin", "--xi", "0", "--kappa", "1"])
    captured = capsys.readouterr()
    assert '"v_dpi": 0.533887326355' in captured.out


def test_precision_flag_beats_env(capsys, monkeypatch):
    monkeypatch.setenv("PULLIN_DYN_PRECISION", "4")
    out = run_cli(capsys, "pullin", "--xi", "0", "--kappa", "1", "--precision", "8")
    assert '"v_dpi": 0.53388733' in out[1]


def test_fmt_float_roundtrip_idempotent():
    values = [0.1, 1.0 / 3.0, 7.132198208919252, 1e-15, 123456.789, 5.0e9, 2.0]
    for p in (4, 8, 12, 17):
        for x in values:
            s = fmt_float(x, p)
            assert fmt_float(float(s), p) == s


def test_run_record_roundtrip():
    rec = RunRecord(
        command="simulate",
        params={"xi": 0.0, "v": 0.4},
        version="0.1.0",
        config_hash="abc123def456",
        wall_time_s=0.125,
        outputs={"samples": 10},
    )
    back = RunRecord.from_json(rec.to_json())
    assert back == rec
