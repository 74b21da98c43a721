"""Profile-curve ODE for rotational lambda-hypersurfaces.

The profile gamma(s) = (x(s), r(s)) is parametrized by arc length and evolved
in the tangent-angle form

    x' = cos(theta),  r' = sin(theta),  theta' = kappa,
    kappa = x sin(theta) + ((n - 1)/r - r) cos(theta) + lambda,

so the unit-speed constraint holds by construction.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class ProfileState:
    s: float
    x: float
    r: float
    theta: float

    @property
    def tangent(self):
        return math.cos(self.theta), math.sin(self.theta)


@dataclass(frozen=True)
class ModelParams:
    n: int
    lam: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ConfigError(f"n must be an integer, got {self.n!r}")
        if self.n < 2:
            raise ConfigError(f"n >= 2 is required, got n={self.n}")
        if not math.isfinite(self.lam) or self.lam < 0:
            raise ConfigError(f"lambda must be finite and >= 0, got {self.lam!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def upper_cylinder_radius(self):
        """Radius below which a shot with horizontal start bends upwards."""
        return (math.sqrt(self.lam**2 + 4 * (self.n - 1)) + self.lam) / 2


@dataclass(frozen=True)
class SolverConfig:
    step: float = 1e-4
    event_tol: float = 1e-10
    max_arclength: float | None = None
    r_floor: float = 1e-8
    delta_bracket: tuple[float, float] | None = None
    bisect_tol: float = 1e-9
    angle_tol: float = 1e-4
    bound_slack: float = 1e-6
    residual_tol: float = 1e-8
    grid_points: int = 48
    mesh_segments: tuple[int, int] = (512, 128)
    jobs: int = 1

    def __post_init__(self):
        for name in ("step", "event_tol", "r_floor", "bisect_tol", "angle_tol",
                     "bound_slack", "residual_tol"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {v!r}")
        if self.max_arclength is not None and not (self.max_arclength > 0):
            raise ConfigError(f"max_arclength must be positive, got {self.max_arclength!r}")
        if self.delta_bracket is not None:
            lo, hi = self.delta_bracket
            if not (lo > 0 and hi > 0):
                raise ConfigError(f"delta_bracket ends must be positive, got {self.delta_bracket!r}")
        if self.grid_points < 1:
            raise ConfigError("grid_points must be >= 1")
        p, a = self.mesh_segments
        if p < 3 or a < 3:
            raise ConfigError("mesh_segments must be at least (3, 3)")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def arclength_budget(self, params):
        if self.max_arclength is not None:
            return self.max_arclength
        lam_term = math.pi / (2 * params.lam) if params.lam > 0 else 0.0
        return 50.0 * (math.sqrt(params.n - 1) + lam_term + 1.0)

    def with_(self, **kw):
        return replace(self, **kw)


class OutcomeKind(enum.Enum):
    HIT_AXIS = "HitAxis"
    HORIZONTAL_TANGENT = "HorizontalTangent"
    RADIAL_SINGULARITY = "RadialSingularity"
    BUDGET_EXHAUSTED = "BudgetExhausted"


_KIND_FROM_CODE = {
    kernels.HIT_AXIS: OutcomeKind.HIT_AXIS,
    kernels.HORIZONTAL_TANGENT: OutcomeKind.HORIZONTAL_TANGENT,
    kernels.RADIAL_SINGULARITY: OutcomeKind.RADIAL_SINGULARITY,
    kernels.BUDGET_EXHAUSTED: OutcomeKind.BUDGET_EXHAUSTED,
}


@dataclass(frozen=True)
class ShotOutcome:
    kind: OutcomeKind
    s1: float
    terminal: ProfileState
    x_prime_terminal: float
    extra: float | None = None
    delta: float | None = None

    @property
    def terminal_tangent_defect(self):
        """|x'(s1) + 1|, computed without cancellation near theta = pi."""
        return 2.0 * math.cos(0.5 * self.terminal.theta) ** 2

    def to_dict(self):
        t = self.terminal
        d = {
            "kind": self.kind.value,
            "delta": self.delta,
            "s1": self.s1,
            "terminal": {"s": t.s, "x": t.x, "r": t.r, "theta": t.theta},
            "x_prime_terminal": self.x_prime_terminal,
        }
        if self.kind is OutcomeKind.HIT_AXIS:
            d["r_s1"] = self.extra
        elif self.kind is OutcomeKind.HORIZONTAL_TANGENT:
            d["x_s1"] = self.extra
            d["tangent_sign"] = 1 if self.x_prime_terminal > 0 else -1
        return d


@dataclass
class ProfileCurve:
    """Sampled trajectory of one shot.

    ``ds[k]`` and ``dtheta[k]`` are the length and the unrounded angle
    increment of the step from sample k to k + 1.
    """

    params: ModelParams
    delta: float
    s: np.ndarray
    x: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    ds: np.ndarray
    dtheta: np.ndarray
    step: float
    outcome: ShotOutcome | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.s)

    def state(self, i):
        return ProfileState(float(self.s[i]), float(self.x[i]), float(self.r[i]), float(self.theta[i]))

    @property
    def x_prime(self):
        return np.cos(self.theta)

    @property
    def r_prime(self):
        return np.sin(self.theta)


def curvature(state, params):
    """Signed curvature kappa = theta' prescribed by the profile equation."""
    if not state.r > 0:
        raise DomainError(f"curvature needs r > 0, got r={state.r!r}")
    st = math.sin(state.theta)
    ct = math.cos(state.theta)
    return state.x * st + ((params.n - 1) / state.r - state.r) * ct + params.lam


def integrate_profile(delta, params, config=None):
    """Shoot from (x, r, theta) = (0, delta, 0) until the first event.

    Events, earliest wins: the curve returns to the r-axis (HitAxis), the
    tangent turns horizontal (HorizontalTangent), r drops below
    ``config.r_floor`` (RadialSingularity), or the arc-length budget runs out
    (BudgetExhausted). The start point itself is masked.
    """
    config = config or SolverConfig()
    if not (isinstance(delta, (int, float, np.floating)) and math.isfinite(delta) and delta > 0):
        raise DomainError(f"delta must be positive, got {delta!r}")
    delta = float(delta)
    s_max = config.arclength_budget(params)
    s, x, r, th, ds, dth, code = kernels.shoot(
        0.0, delta, 0.0, float(params.n - 1), params.lam,
        config.step, s_max, config.r_floor, config.event_tol,
    )
    kind = _KIND_FROM_CODE[code]
    term = ProfileState(float(s[-1]), float(x[-1]), float(r[-1]), float(th[-1]))
    if kind is OutcomeKind.HIT_AXIS:
        extra = term.r
    elif kind is OutcomeKind.HORIZONTAL_TANGENT:
        extra = term.x
    else:
        extra = None
    outcome = ShotOutcome(kind, term.s, term, math.cos(term.theta), extra, delta)
    curve = ProfileCurve(params, delta, s, x, r, th, ds, dth, config.step, outcome)
    return curve, outcome


def integration_order_check(params, delta, step=1e-2, ratio=2.0, s_end=None):
    """Observed convergence order of the integrator on a smooth sub-arc.

    Integrates to ``s_end`` with steps h, h/q, h/q^2 and compares each with
    the h/q^3 solution; returns the least-squares slope of log(error)
    against log(h).
    """
    if not ratio > 1:
        raise ValueError(f"step ratio must exceed 1, got {ratio!r}")
    if not step > 0:
        raise ConfigError(f"step must be positive, got {step!r}")
    if s_end is None:
        _, probe = integrate_profile(delta, params, SolverConfig(step=step))
        s_end = 0.5 * probe.s1
    n_coarse = max(int(s_end / step), 1)
    s_end = n_coarse * step
    steps = [step / ratio**k for k in range(4)]
    ends = []
    for h in steps:
        cfg = SolverConfig(step=h, max_arclength=s_end)
        curve, out = integrate_profile(delta, params, cfg)
        if out.kind is not OutcomeKind.BUDGET_EXHAUSTED:
            raise ValueError(f"event at s={out.s1} before s_end={s_end}; pick a shorter sub-arc")
        ends.append(np.array([curve.x[-1], curve.r[-1], curve.theta[-1]]))
    ref = ends[-1]
    errs = np.array([np.max(np.abs(e - ref)) for e in ends[:-1]])
    if np.any(errs <= 0):
        raise ValueError("errors vanished; order undefined")
    slope, _ = np.polyfit(np.log(steps[:-1]), np.log(errs), 1)
    return float(slope)
