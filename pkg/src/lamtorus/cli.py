"""Command-line interface: shoot, solve, mesh, verify.

Exit codes:
  0  success
  1  a property check failed (bounds, joints, simplicity, verify suites)
  2  usage or configuration error
  3  I/O failure
  4  no convergence (bracketing or bisection failed)
"""
import argparse
import dataclasses
import json
import logging
import math
import sys
import time

import numpy as np

from . import geometry, io, kernels, limit
from .errors import (BracketError, ConfigError, DomainError, IndeterminateError,
                     NoConvergence, SimplicityError, JointError)
from .ode import ModelParams, SolverConfig, integrate_profile, integration_order_check
from .shooting import find_delta_star

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CONVERGENCE = 4

log = logging.getLogger("lamtorus")


def _params(args):
    return ModelParams(args.n, args.lam)


def _config(args):
    bracket = None
    if args.delta_lo is not None or args.delta_hi is not None:
        if args.delta_lo is None or args.delta_hi is None:
            raise ConfigError("--delta-lo and --delta-hi must be given together")
        bracket = (args.delta_lo, args.delta_hi)
    kw = dict(
        step=args.step,
        event_tol=args.event_tol,
        bisect_tol=args.bisect_tol,
        angle_tol=args.angle_tol,
        max_arclength=args.max_arclength,
        delta_bracket=bracket,
        jobs=args.jobs,
    )
    if getattr(args, "segments", None) is not None:
        kw["mesh_segments"] = (args.profile_samples, args.segments)
    return SolverConfig(**kw)


def _config_echo(config, params):
    d = dataclasses.asdict(config)
    for k, v in d.items():
        if isinstance(v, tuple):
            d[k] = list(v)
    d["arclength_budget"] = config.arclength_budget(params)
    return d


def _emit_json(obj):
    sys.stdout.write(json.dumps(obj, allow_nan=False) + "\n")


# ---------------------------------------------------------------- shoot

def cmd_shoot(args):
    params = _params(args)
    config = _config(args)
    if args.delta is None or not (math.isfinite(args.delta) and args.delta > 0):
        raise ConfigError(f"--delta must be positive, got {args.delta!r}")
    curve, outcome = integrate_profile(args.delta, params, config)
    io.write_shot_csv(args.out, curve)
    _emit_json(outcome.to_dict())
    return EXIT_OK


# ---------------------------------------------------------------- solve

def build_report(sol, params, config, half_step_residual, artifacts):
    closed = sol.closed_profile
    return {
        "schema_version": io.SCHEMA_VERSION,
        "backend": kernels.BACKEND,
        "params": {"n": params.n, "lambda": params.lam},
        "config": _config_echo(config, params),
        "delta_star": sol.delta_star,
        "delta_miss": sol.delta_miss,
        "bracket_width": sol.bracket_width,
        "r_star": sol.r_star,
        "s1": sol.s1,
        "terminal_tangent_defect": sol.terminal_defect,
        "joint_angles": [float(a) for a in closed.joint_angles],
        "closed_profile_points": int(len(closed.points)),
        "residual_max": sol.residual_max,
        "residual_max_half_step": half_step_residual,
        "bound_report": sol.bound_report.to_dict(),
        "weighted_area": geometry.weighted_area(closed, params),
        "weighted_volume": geometry.weighted_volume(closed, params),
        "bracket_history": [{"delta": d, "class": c.value} for d, c in sol.history],
        "bracket_scan": None if sol.scan is None else {
            "points": len(sol.scan.grid),
            "transitions": [list(t) for t in sol.scan.transitions],
        },
        "checks": {
            "bounds": sol.bound_report.passed,
            "joints": sol.joints_ok(config.angle_tol),
            "simple": True,
            "residual": sol.residual_max <= config.residual_tol,
        },
        "artifacts": artifacts,
    }


def _mesh_from_closed(points, config):
    samples, segments = config.mesh_segments
    poly = geometry.resample(geometry.ProfilePolyline(np.asarray(points)), samples)
    return io.revolve(poly.points, segments)


def cmd_solve(args):
    params = _params(args)
    config = _config(args)
    if not params.lam > 0:
        raise ConfigError("torus search requires lambda > 0")
    if args.mesh_out and params.n != 2:
        raise ConfigError("meshes are only available for n = 2")
    t0 = time.perf_counter()
    try:
        sol = find_delta_star(params, config)
    except SimplicityError as exc:
        _emit_json({"error": "SimplicityError", "message": str(exc)})
        return EXIT_PROPERTY
    half_curve, _ = integrate_profile(sol.delta_star, params, config.with_(step=config.step / 2))
    half_res = geometry.residual_max(half_curve)

    if args.profile_out:
        io.write_profile_csv(args.profile_out, sol.closed_profile.points)
    if args.mesh_out:
        io.write_obj(args.mesh_out, _mesh_from_closed(sol.closed_profile.points, config))

    artifacts = {"report": args.out, "profile_csv": args.profile_out, "mesh_obj": args.mesh_out}
    report = build_report(sol, params, config, half_res, artifacts)
    if args.timing:
        report["wall_clock_seconds"] = time.perf_counter() - t0
    text = io.dumps_report(report)
    if args.out:
        with open(args.out, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    ok = report["checks"]["bounds"] and report["checks"]["joints"]
    if not ok:
        failed = [k for k in ("bounds", "joints") if not report["checks"][k]]
        print(f"property check failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


# ---------------------------------------------------------------- mesh

def cmd_mesh(args):
    params = _params(args)
    if params.n != 2:
        raise ConfigError(f"meshes are only available for n = 2, got n={params.n}")
    config = _config(args)
    if args.sphere:
        prof = geometry.sphere_profile(params, m=config.mesh_segments[0])
        mesh = io.revolve(prof.points, config.mesh_segments[1])
    else:
        if args.profile_in:
            pts = io.read_profile_csv(args.profile_in)
        else:
            if not params.lam > 0:
                raise ConfigError("torus search requires lambda > 0")
            pts = find_delta_star(params, config).closed_profile.points
        mesh = _mesh_from_closed(pts, config)
    io.write_obj(args.mesh_out, mesh)
    chi = mesh.euler_characteristic()
    tight = mesh.is_watertight()
    _emit_json({
        "vertices": int(len(mesh.vertices)),
        "faces": int(len(mesh.faces)),
        "euler_characteristic": int(chi),
        "watertight": tight,
        "path": args.mesh_out,
    })
    expected = 2 if args.sphere else 0
    return EXIT_OK if tight and chi == expected else EXIT_PROPERTY


# ---------------------------------------------------------------- verify

def verify_suites(params, config, limit_step=1e-4):
    """Rows of (suite, passed, measured, limit)."""
    rows = []
    res = geometry.exact_solution_residuals(params)
    for name, v in res.items():
        rows.append((f"exact/{name}", v <= 1e-12, v, 1e-12))

    traj = limit.integrate_limit(params.n, 50.0, limit_step)
    dev = float(np.max(np.abs(traj.first_integral - 1.0)))
    rows.append(("limit/first-integral", dev <= 1e-9, dev, 1e-9))
    sp = float(traj.sin_phi[-1])
    rows.append(("limit/sin-phi-50", sp >= 0.999, sp, 0.999))
    rows.append(("limit/tanh-bound", traj.tanh_bound_holds(), float("nan"), float("nan")))

    delta = 0.5 * geometry.cylinder_radius(params)
    slope = integration_order_check(params, delta)
    rows.append(("ode/order", 3.5 <= slope <= 4.5, slope, 4.0))
    curve, _ = integrate_profile(delta, params, config)
    r = geometry.residual_max(curve)
    rows.append(("ode/residual", r <= config.residual_tol, r, config.residual_tol))
    return rows


def cmd_verify(args):
    params = _params(args)
    config = _config(args)
    rows = verify_suites(params, config, limit_step=min(config.step, 1e-4))
    print(f"{'suite':24s} {'status':6s} {'measured':>12s} {'limit':>12s}")
    for name, ok, measured, lim in rows:
        m = "-" if math.isnan(measured) else f"{measured:.3e}"
        l = "-" if math.isnan(lim) else f"{lim:.3e}"
        print(f"{name:24s} {'PASS' if ok else 'FAIL':6s} {m:>12s} {l:>12s}")
    failed = [r[0] for r in rows if not r[1]]
    if failed:
        print(f"failing suites: {', '.join(failed)}", file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model and solver")
    g.add_argument("--n", type=int, default=2, help="hypersurface dimension (>= 2)")
    g.add_argument("--lambda", dest="lam", type=float, default=1.0, help="lambda (>= 0; > 0 for solve)")
    g.add_argument("--step", type=float, default=1e-4, help="RK4 arc-length step")
    g.add_argument("--event-tol", type=float, default=1e-10)
    g.add_argument("--bisect-tol", type=float, default=1e-9)
    g.add_argument("--angle-tol", type=float, default=1e-4, help="allowed |x'(s1) + 1|")
    g.add_argument("--max-arclength", type=float, default=None)
    g.add_argument("--delta-lo", type=float, default=None)
    g.add_argument("--delta-hi", type=float, default=None)
    g.add_argument("--jobs", type=int, default=1, help="threads for the delta grid scan")
    g.add_argument("--seed", type=int, default=None, help="reserved; the solver is deterministic")
    g.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(
        prog="lamtorus",
        description="Shooting solver for rotational lambda-hypersurfaces and lambda-tori.",
        epilog="exit codes: 0 success, 1 property failure, 2 usage, 3 I/O, 4 convergence",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("shoot", parents=[common], help="integrate one shot and write its CSV")
    sp.add_argument("--delta", type=float, required=True, help="initial height r(0)")
    sp.add_argument("--out", default="shoot.csv", help="CSV path (default: shoot.csv)")
    sp.set_defaults(func=cmd_shoot)

    sp = sub.add_parser("solve", parents=[common], help="find delta* and close the torus")
    sp.add_argument("--out", default=None, help="JSON report path (default: stdout)")
    sp.add_argument("--profile-out", default=None, help="closed profile CSV (x,r)")
    sp.add_argument("--mesh-out", default=None, help="OBJ mesh (n = 2 only)")
    sp.add_argument("--segments", type=int, default=128, help="angular mesh segments")
    sp.add_argument("--profile-samples", type=int, default=512, help="profile points in the mesh")
    sp.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("mesh", parents=[common], help="revolve a closed profile into an OBJ mesh")
    sp.add_argument("--profile-in", default=None, help="closed profile CSV; solved if omitted")
    sp.add_argument("--sphere", action="store_true", help="mesh the round sphere instead")
    sp.add_argument("--mesh-out", default="mesh.obj")
    sp.add_argument("--segments", type=int, default=128, help="angular mesh segments")
    sp.add_argument("--profile-samples", type=int, default=512, help="profile points in the mesh")
    sp.set_defaults(func=cmd_mesh)

    sp = sub.add_parser("verify", parents=[common], help="run the built-in property suites")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"lamtorus: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BracketError, NoConvergence, IndeterminateError) as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        for key in ("delta", "kind", "achieved", "angle_tol"):
            if hasattr(exc, key):
                payload[key] = getattr(exc, key)
        _emit_json(payload)
        print(f"lamtorus: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except JointError as exc:
        print(f"lamtorus: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except OSError as exc:
        print(f"lamtorus: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
