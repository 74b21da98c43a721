"""Search for the critical initial height delta* and the lambda-torus it closes.

delta* is the supremum of heights whose shot returns to the r-axis. Shots
are classified Hit / Miss / Indeterminate and the Hit-to-Miss transition is
bisected on the classification itself.
"""
from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import BracketError, ConfigError, IndeterminateError, NoConvergence
from .ode import OutcomeKind, SolverConfig, integrate_profile

log = logging.getLogger(__name__)


class ShotClass(enum.Enum):
    HIT = "Hit"
    MISS = "Miss"
    INDETERMINATE = "Indeterminate"


def classify_shot(outcome):
    if outcome.kind is OutcomeKind.HIT_AXIS:
        return ShotClass.HIT
    if outcome.kind is OutcomeKind.HORIZONTAL_TANGENT:
        return ShotClass.MISS
    return ShotClass.INDETERMINATE


@dataclass(frozen=True)
class BoundCheck:
    name: str
    passed: bool
    measured: float
    limit: float
    description: str

    def to_dict(self):
        return {
            "passed": self.passed,
            "measured": self.measured,
            "limit": self.limit,
            "description": self.description,
        }


@dataclass
class BoundReport:
    checks: dict

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def __getitem__(self, name):
        return self.checks[name]

    def to_dict(self):
        return {k: c.to_dict() for k, c in self.checks.items()}


def count_sign_changes(values):
    sgn = np.sign(values)
    sgn = sgn[sgn != 0]
    return int(np.count_nonzero(sgn[1:] != sgn[:-1]))


def verify_bounds(curve, params, slack=1e-6):
    """Check the a-priori bounds on a half profile ending at s1.

    B1: max r <= sqrt(n-1) + pi/(2 lambda);  B2: max x <= pi/(2 lambda);
    B3: r strictly increasing on (0, s1);     B4: x' changes sign at most once.
    Never raises; failed checks are reported.
    """
    lam_term = math.pi / (2 * params.lam) if params.lam > 0 else math.inf
    r_lim = math.sqrt(params.n - 1) + lam_term
    x_lim = lam_term
    max_r = float(np.max(curve.r))
    max_x = float(np.max(curve.x))

    r = np.asarray(curve.r)
    dr = np.diff(r)
    if len(dr) >= 2:
        inc = bool(np.all(dr[:-1] > 0) and dr[-1] >= 0)
    else:
        inc = bool(np.all(dr > 0))
    min_dr = float(np.min(dr[:-1])) if len(dr) >= 2 else float(np.min(dr))
    changes = count_sign_changes(np.cos(curve.theta))

    checks = {
        "B1": BoundCheck("B1", max_r <= r_lim + slack, max_r, r_lim, "max r <= sqrt(n-1) + pi/(2 lambda)"),
        "B2": BoundCheck("B2", max_x <= x_lim + slack, max_x, x_lim, "max x <= pi/(2 lambda)"),
        "B3": BoundCheck("B3", inc, min_dr, 0.0, "r strictly increasing on (0, s1); measured = min step increment"),
        "B4": BoundCheck("B4", changes <= 1, float(changes), 1.0, "x' changes sign at most once"),
    }
    return BoundReport(checks)


@dataclass
class BracketScan:
    grid: list
    classes: list
    transitions: list

    @property
    def anomalous(self):
        return len(self.transitions) > 1


def _shoot_many(deltas, params, config):
    def one(d):
        return integrate_profile(d, params, config)[1]

    if config.jobs > 1 and len(deltas) > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as ex:
            return list(ex.map(one, deltas))
    return [one(d) for d in deltas]


def delta_grid(params, points):
    """Geometric grid from 1e-3 a to a (exclusive), a the bending threshold.

    The threshold height itself starts the exact cylinder solution, which
    never produces an event, so it is left out.
    """
    a = params.upper_cylinder_radius
    return list(np.geomspace(1e-3 * a, a, points + 1)[:-1])


def scan_brackets(params, config=None, grid_points=None):
    config = config or SolverConfig()
    if not params.lam > 0:
        raise ConfigError("bracket search requires lambda > 0")
    grid = delta_grid(params, grid_points or config.grid_points)
    outcomes = _shoot_many(grid, params, config)
    classes = [classify_shot(o) for o in outcomes]
    transitions = [
        (grid[i], grid[i + 1])
        for i in range(len(grid) - 1)
        if classes[i] is ShotClass.HIT and classes[i + 1] is ShotClass.MISS
    ]
    scan = BracketScan([float(d) for d in grid], classes, transitions)
    if scan.anomalous:
        log.warning("interleaved Hit/Miss regions: %d transitions %s; solving the lowest",
                    len(transitions), transitions)
    return scan


def establish_bracket(params, config=None, grid_points=None):
    """Lowest (last Hit, first Miss) pair on the geometric delta grid."""
    scan = scan_brackets(params, config, grid_points)
    if not scan.transitions:
        raise BracketError(
            f"no Hit->Miss transition on a {len(scan.grid)}-point grid "
            f"(classes: {sorted({c.value for c in scan.classes})})"
        )
    lo, hi = scan.transitions[0]
    return float(lo), float(hi)


@dataclass
class TorusSolution:
    params: object
    delta_star: float
    delta_miss: float
    r_star: float
    s1: float
    half_profile: object
    closed_profile: object
    residual_max: float
    bound_report: BoundReport
    bracket_width: float
    terminal_defect: float
    history: list = field(default_factory=list)
    scan: BracketScan | None = None

    def joints_ok(self, angle_tol):
        return all(a <= 2 * angle_tol for a in self.closed_profile.joint_angles)

    def ok(self, config):
        return (self.bound_report.passed
                and self.residual_max <= config.residual_tol
                and self.joints_ok(config.angle_tol))


def _classify_end(delta, params, config):
    curve, out = integrate_profile(delta, params, config)
    cls = classify_shot(out)
    if cls is ShotClass.INDETERMINATE:
        raise IndeterminateError(delta, out.kind.value)
    return curve, cls


def bisection_iterations(width, tol):
    return max(0, math.ceil(math.log2(width / tol)))


def find_delta_star(params, config=None, bracket=None):
    """Bisect the Hit/Miss transition down to ``bisect_tol`` and close the torus.

    Returns the solution at the final Hit end of the bracket.
    """
    config = config or SolverConfig()
    if not params.lam > 0:
        raise ConfigError("torus search requires lambda > 0")
    scan = None
    if bracket is None:
        bracket = config.delta_bracket
    if bracket is None:
        scan = scan_brackets(params, config)
        if not scan.transitions:
            raise BracketError(f"no Hit->Miss transition on a {len(scan.grid)}-point grid")
        bracket = scan.transitions[0]
    lo, hi = (float(v) for v in bracket)
    if not (0 < lo < hi):
        raise BracketError(f"degenerate bracket ({lo!r}, {hi!r})")

    lo_curve, lo_cls = _classify_end(lo, params, config)
    _, hi_cls = _classify_end(hi, params, config)
    if lo_cls is hi_cls:
        raise BracketError(f"both bracket ends classify {lo_cls.value}")
    if lo_cls is not ShotClass.HIT:
        raise BracketError("bracket must have Hit at the lower end and Miss at the upper end")

    history = []
    while hi - lo > config.bisect_tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        curve, cls = _classify_end(mid, params, config)
        history.append((mid, cls))
        if cls is ShotClass.HIT:
            lo, lo_curve = mid, curve
        else:
            hi = mid

    out = lo_curve.outcome
    defect = out.terminal_tangent_defect
    if defect > config.angle_tol:
        raise NoConvergence(defect, config.angle_tol, lo)
    report = verify_bounds(lo_curve, params, config.bound_slack)
    closed = geometry.build_closed_profile(lo_curve, config.angle_tol)
    return TorusSolution(
        params=params,
        delta_star=lo,
        delta_miss=hi,
        r_star=out.extra,
        s1=out.s1,
        half_profile=lo_curve,
        closed_profile=closed,
        residual_max=geometry.residual_max(lo_curve),
        bound_report=report,
        bracket_width=hi - lo,
        terminal_defect=defect,
        history=history,
        scan=scan,
    )
