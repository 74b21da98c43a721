"""Acceptance criteria, each run at its stated tolerance.

Every test records a single PASS/FAIL line, repeated in the pytest
terminal summary. Run ``python tests/test_acceptance.py`` for the lines alone.
"""
import contextlib
import io as _io
import json
import math
import os
import time

import numpy as np
import pytest

from lamtorus import cli, geometry, io, limit
from lamtorus.ode import ModelParams, SolverConfig, integrate_profile
from lamtorus.shooting import ShotClass, classify_shot

SOLVE_CASES = [(2, 0.25), (2, 0.5), (2, 1.0), (2, 2.0), (3, 1.0)]


def run_cli(argv):
    out = _io.StringIO()
    err = _io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli.main(argv)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    """cmd_solve for every criterion-3 case: {(n, lam): (exit code, report, seconds, dir)}."""
    results = {}
    for n, lam in SOLVE_CASES:
        d = tmp_path_factory.mktemp(f"solve_n{n}_l{lam}")
        t0 = time.perf_counter()
        code, _, _ = run_cli(["solve", "--n", str(n), "--lambda", str(lam),
                              "--out", str(d / "report.json"),
                              "--profile-out", str(d / "profile.csv")])
        dt = time.perf_counter() - t0
        report = json.loads((d / "report.json").read_text()) if code == 0 else None
        results[(n, lam)] = (code, report, dt, d)
    return results


def test_criterion_1_exact_solution_residuals(record_criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for n in (2, 3, 5):
        for lam in (0.0, 0.5, 1.0, 2.0):
            res = geometry.exact_solution_residuals(ModelParams(n, lam), m=1000)
            worst = max(worst, *res.values())
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 1.0
    record_criterion(1, ok, f"max exact-solution residual {worst:.2e} <= 1e-12, {dt:.2f}s < 1s")
    assert ok


def test_criterion_2_ode_faithfulness(record_criterion):
    t0 = time.perf_counter()
    worst = 0.0
    worst_ratio = math.inf
    for n in (2, 3):
        for lam in (0.5, 1.0):
            p = ModelParams(n, lam)
            for delta in (0.05, 0.1, 0.3):
                c1, _ = integrate_profile(delta, p, SolverConfig(step=1e-4))
                c2, _ = integrate_profile(delta, p, SolverConfig(step=5e-5))
                r1 = geometry.residual_max(c1)
                r2 = geometry.residual_max(c2)
                worst = max(worst, r1)
                worst_ratio = min(worst_ratio, r1 / r2)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and worst_ratio >= 8.0 and dt < 10.0
    record_criterion(2, ok, f"max residual {worst:.2e} <= 1e-8, min improvement {worst_ratio:.1f}x >= 8x, "
                            f"{dt:.2f}s < 10s")
    assert ok


def test_criterion_3_torus_construction(solved, record_criterion):
    fails = []
    details = []
    for key, (code, rep, dt, _) in solved.items():
        ok = (code == 0 and rep is not None
              and rep["bracket_width"] <= 1e-9
              and rep["terminal_tangent_defect"] <= 1e-4
              and rep["checks"]["simple"]
              and max(rep["joint_angles"]) <= 2e-4
              and dt < 60.0)
        details.append(f"n={key[0]} lam={key[1]}: {'ok' if ok else 'fail'} {dt:.1f}s")
        if not ok:
            fails.append(key)
    record_criterion(3, not fails, "; ".join(details))
    assert not fails


def test_criterion_4_lemma_bounds(solved, record_criterion):
    fails = []
    for (n, lam), (code, rep, _, _) in solved.items():
        if rep is None:
            fails.append((n, lam))
            continue
        b = rep["bound_report"]
        ok = (b["B1"]["measured"] <= math.sqrt(n - 1) + math.pi / (2 * lam) + 1e-6
              and b["B2"]["measured"] <= math.pi / (2 * lam) + 1e-6
              and b["B3"]["passed"] and b["B3"]["measured"] > 0
              and b["B4"]["measured"] == 1.0)
        if not ok:
            fails.append((n, lam))
    record_criterion(4, not fails, f"B1-B4 on {len(solved)} solutions (x' sign changes exactly once); "
                                   f"failures: {fails or 'none'}")
    assert not fails


def test_criterion_5_small_delta(record_criterion):
    p = ModelParams(2, 1.0)
    rows = []
    ok = True
    for delta in (1e-3, 1e-2, 5e-2):
        c, o = integrate_profile(delta, p)
        ch, oh = integrate_profile(delta / 2, p)
        hit = classify_shot(o) is ShotClass.HIT and classify_shot(oh) is ShotClass.HIT
        mx = float(np.max(c.x))
        ratio = mx / float(np.max(ch.x))
        good = hit and mx <= 10 * delta and 2 / 1.5 <= ratio <= 2 * 1.5
        ok &= good
        rows.append(f"d={delta:g} maxx/d={mx / delta:.2f} halving ratio={ratio:.2f}")
    record_criterion(5, ok, "; ".join(rows))
    assert ok


def test_criterion_6_limit_conservation(record_criterion):
    ok = True
    rows = []
    for n in (2, 3, 5):
        tr = limit.integrate_limit(n, 50.0, 1e-4)
        dev = float(np.max(np.abs(tr.first_integral - 1.0)))
        sp = float(tr.sin_phi[-1])
        ok &= dev <= 1e-9 and sp >= 0.999
        rows.append(f"n={n} dev={dev:.1e} sin(phi(50))={sp:.5f}")
    record_criterion(6, ok, "; ".join(rows))
    assert ok


def test_criterion_7_rescaling(record_criterion):
    p = ModelParams(2, 1.0)
    devs = [limit.compare_with_full_system(d, p, 5.0) for d in (1e-3, 5e-4, 2.5e-4)]
    ratios = [devs[0] / devs[1], devs[1] / devs[2]]
    ok = all(1.33 <= q <= 3.0 for q in ratios)
    record_criterion(7, ok, f"deviations {', '.join(f'{d:.2e}' for d in devs)}; "
                            f"ratios {ratios[0]:.3f}, {ratios[1]:.3f} in [1.33, 3.0]")
    assert ok


def test_criterion_8_mesh_topology(solved, tmp_path, record_criterion):
    _, _, _, d = solved[(2, 1.0)]
    torus = tmp_path / "torus.obj"
    sphere = tmp_path / "sphere.obj"
    c1, _, _ = run_cli(["mesh", "--n", "2", "--lambda", "1", "--profile-in", str(d / "profile.csv"),
                        "--mesh-out", str(torus)])
    c2, _, _ = run_cli(["mesh", "--n", "2", "--lambda", "1", "--sphere", "--mesh-out", str(sphere)])
    mt = io.read_obj(torus)
    ms = io.read_obj(sphere)
    ok = (c1 == 0 and c2 == 0 and mt.is_watertight() and mt.euler_characteristic() == 0
          and ms.is_watertight() and ms.euler_characteristic() == 2)
    record_criterion(8, ok, f"torus chi={mt.euler_characteristic()} watertight={mt.is_watertight()}; "
                            f"sphere chi={ms.euler_characteristic()} watertight={ms.is_watertight()}")
    assert ok


def test_criterion_9_determinism(tmp_path, record_criterion):
    argv = ["solve", "--n", "2", "--lambda", "1", "--out", "report.json", "--profile-out", "profile.csv"]
    outputs = []
    cwd = os.getcwd()
    try:
        for k in range(2):
            run_dir = tmp_path / f"run{k}"
            run_dir.mkdir()
            os.chdir(run_dir)
            code, stdout, _ = run_cli(argv)
            outputs.append((code, (run_dir / "report.json").read_bytes(), (run_dir / "profile.csv").read_bytes()))
    finally:
        os.chdir(cwd)
    ok = outputs[0][0] == 0 and outputs[0] == outputs[1]
    record_criterion(9, ok, f"JSON identical={outputs[0][1] == outputs[1][1]}, "
                            f"CSV identical={outputs[0][2] == outputs[1][2]}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
