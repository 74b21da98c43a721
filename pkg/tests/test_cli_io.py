import json
import math

import numpy as np
import pytest

from lamtorus import cli, geometry, io
from lamtorus.ode import ModelParams, integrate_profile


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_shoot_writes_csv_and_outcome(tmp_path, capsys):
    path = tmp_path / "shot.csv"
    code, out, _ = run(["shoot", "--n", "2", "--lambda", "1", "--delta", "0.1", "--out", str(path)], capsys)
    assert code == 0
    outcome = json.loads(out.strip())
    assert outcome["kind"] == "HitAxis"
    assert out.count("\n") == 1
    text = path.read_text()
    assert text.splitlines()[0] == "s,x,r,theta,kappa,H,support,residual"
    cols = io.read_csv(path)
    assert np.max(np.abs(cols["residual"])) <= 1e-8


def test_csv_round_trip_recomputes_residual(tmp_path):
    curve, _ = integrate_profile(0.2, ModelParams(3, 0.5))
    path = tmp_path / "c.csv"
    io.write_shot_csv(path, curve)
    cols = io.read_csv(path)
    for name, arr in zip(io.SHOT_COLUMNS, io.shot_table(curve)):
        assert np.array_equal(cols[name], np.asarray(arr))
    H = cols["kappa"] - 2 * np.cos(cols["theta"]) / cols["r"]
    support = -cols["x"] * np.sin(cols["theta"]) + cols["r"] * np.cos(cols["theta"])
    assert np.max(np.abs(H + support - 0.5 - cols["residual"])) <= 1e-12


@pytest.mark.parametrize("argv", [
    ["shoot", "--n", "1", "--delta", "0.1"],
    ["shoot", "--delta", "0"],
    ["shoot", "--n", "2.5", "--delta", "0.1"],
    ["shoot", "--delta", "0.1", "--lambda", "-1"],
    ["solve", "--n", "2", "--lambda", "0"],
    ["mesh", "--n", "3", "--sphere"],
    ["verify", "--step", "-1"],
    ["solve", "--delta-lo", "0.1"],
])
def test_usage_errors(argv, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    try:
        code = cli.main(argv)
    except SystemExit as exc:  # argparse rejects malformed flags itself
        code = exc.code
    assert code == 2
    assert capsys.readouterr().err


def test_n1_message_names_requirement(capsys, tmp_path):
    code, _, err = run(["shoot", "--n", "1", "--delta", "0.1", "--out", str(tmp_path / "a.csv")], capsys)
    assert code == 2 and "n >= 2" in err


def test_io_failure(capsys, tmp_path):
    code, _, _ = run(["shoot", "--delta", "0.1", "--out", str(tmp_path / "missing" / "a.csv")], capsys)
    assert code == 3


def test_convergence_failure_exit_4(capsys):
    code, out, _ = run(["solve", "--delta-lo", "0.1", "--delta-hi", "0.2"], capsys)
    assert code == 4
    assert json.loads(out)["error"] == "BracketError"


def test_no_convergence_exit_4(capsys):
    code, out, _ = run(["solve", "--bisect-tol", "1e-2", "--angle-tol", "1e-12"], capsys)
    assert code == 4
    payload = json.loads(out)
    assert payload["error"] == "NoConvergence" and payload["achieved"] > 1e-12


def test_solve_report(tmp_path, capsys):
    rep_path = tmp_path / "r.json"
    prof = tmp_path / "p.csv"
    mesh = tmp_path / "m.obj"
    code, _, _ = run(["solve", "--n", "2", "--lambda", "1", "--out", str(rep_path),
                      "--profile-out", str(prof), "--mesh-out", str(mesh), "--segments", "16",
                      "--profile-samples", "64"], capsys)
    assert code == 0
    rep = io.read_report(rep_path)
    assert rep["schema_version"] == io.SCHEMA_VERSION
    assert 0 < rep["delta_star"] < (math.sqrt(5) + 1) / 2
    assert rep["bound_report"]["B2"]["measured"] <= math.pi / 2 + 1e-6
    assert rep["bound_report"]["B1"]["limit"] == pytest.approx(1 + math.pi / 2)
    assert rep["residual_max_half_step"] <= 1e-8
    assert rep["weighted_area"] > 0
    assert "wall_clock_seconds" not in rep
    assert all(h["class"] in ("Hit", "Miss") for h in rep["bracket_history"])
    lines = prof.read_text().splitlines()
    assert lines[0] == "x,r" and lines[1] == lines[-1]
    m = io.read_obj(mesh)
    assert m.euler_characteristic() == 0 and m.is_watertight()
    assert len(m.vertices) == 64 * 16


def test_solve_timing_flag(capsys):
    code, out, _ = run(["solve", "--timing"], capsys)
    assert code == 0
    assert json.loads(out)["wall_clock_seconds"] > 0


def test_solve_history_length(capsys):
    code, out, _ = run(["solve", "--n", "3", "--lambda", "0.5", "--bisect-tol", "1e-12"], capsys)
    assert code == 0
    rep = json.loads(out)
    lo, hi = rep["bracket_scan"]["transitions"][0]
    expected = math.ceil(math.log2((hi - lo) / 1e-12))
    assert abs(len(rep["bracket_history"]) - expected) <= 1


def test_report_rejects_nan():
    with pytest.raises(ValueError):
        io.dumps_report({"a": [1.0, float("nan")]})


def test_report_ignores_unknown_fields(tmp_path):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"schema_version": 1, "future_field": {"x": 1}}))
    assert io.read_report(p)["future_field"] == {"x": 1}


def test_mesh_sphere(tmp_path, capsys):
    path = tmp_path / "s.obj"
    code, out, _ = run(["mesh", "--sphere", "--mesh-out", str(path), "--segments", "12",
                        "--profile-samples", "20"], capsys)
    assert code == 0
    info = json.loads(out)
    assert info["euler_characteristic"] == 2 and info["watertight"]


def test_mesh_orientation_follows_normal():
    # N = (-r', x' a) points into the sphere, so the signed volume is negative
    p = ModelParams(2, 0.0)
    prof = geometry.sphere_profile(p, m=200)
    m = io.revolve(prof.points, 64)
    a = geometry.sphere_radius(p)
    assert m.signed_volume() == pytest.approx(-4 / 3 * math.pi * a**3, rel=1e-2)


def test_revolve_torus_counts():
    t = np.linspace(0, 2 * np.pi, 11)
    pts = np.column_stack([0.5 * np.cos(t), 2 + 0.5 * np.sin(t)])
    pts[-1] = pts[0]
    m = io.revolve(pts, 8)
    assert len(m.vertices) == 80 and len(m.faces) == 160
    assert m.euler_characteristic() == 0 and m.is_watertight()


def test_obj_round_trip(tmp_path):
    t = np.linspace(0, 2 * np.pi, 7)
    pts = np.column_stack([np.cos(t), 3 + np.sin(t)])
    pts[-1] = pts[0]
    m = io.revolve(pts, 5)
    path = tmp_path / "m.obj"
    io.write_obj(path, m)
    back = io.read_obj(path)
    assert np.array_equal(back.vertices, m.vertices + 0.0)
    assert np.array_equal(back.faces, m.faces)


@pytest.mark.parametrize("n,lam", [(2, 1.0), (5, 2.0)])
def test_verify(n, lam, capsys):
    code, out, _ = run(["verify", "--n", str(n), "--lambda", str(lam)], capsys)
    assert code == 0
    assert "FAIL" not in out and out.count("PASS") >= 7


def test_help_lists_exit_codes(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--help"])
    assert "exit codes" in capsys.readouterr().out
