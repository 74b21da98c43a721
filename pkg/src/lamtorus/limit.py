"""Rescaled small-height system near the r-axis.

With xi = x/delta, rho = (r - delta)/delta and t = s/delta the profile
equation tends, as delta -> 0, to

    phi' = (n - 1) cos(phi) / (1 + rho),  xi' = cos(phi),  rho' = sin(phi),

whose first integral is cos(phi)^2 (1 + rho)^(2(n-1)) = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .ode import OutcomeKind, SolverConfig, integrate_profile


@dataclass(frozen=True)
class LimitState:
    t: float
    xi: float
    rho: float
    phi: float


@dataclass
class LimitTrajectory:
    """Samples of the limit system.

    Stored in the co-angle psi = pi/2 - phi: cos(phi) decays like
    (1 + rho)^-(n-1) and keeps full relative precision as sin(psi).
    """

    n: int
    t: np.ndarray
    xi: np.ndarray
    rho: np.ndarray
    psi: np.ndarray

    @property
    def phi(self):
        return 0.5 * math.pi - self.psi

    @property
    def cos_phi(self):
        return np.sin(self.psi)

    @property
    def sin_phi(self):
        return np.cos(self.psi)

    @property
    def first_integral(self):
        return self.cos_phi**2 * (1.0 + self.rho) ** (2 * (self.n - 1))

    def state(self, i):
        return LimitState(float(self.t[i]), float(self.xi[i]), float(self.rho[i]), float(self.phi[i]))

    def tanh_bound_holds(self):
        """sin(phi(t)) >= tanh(c t) on the window, c = (n-1)/(1 + rho(t_end))."""
        c = (self.n - 1) / (1.0 + self.rho[-1])
        return bool(np.all(self.sin_phi >= np.tanh(c * self.t) - 1e-12))

    def time_of_sin_phi(self, level):
        """First t with sin(phi) >= level, linearly interpolated."""
        sp = self.sin_phi
        idx = np.nonzero(sp >= level)[0]
        if len(idx) == 0:
            raise ValueError(f"sin(phi) never reaches {level} before t={self.t[-1]}")
        i = idx[0]
        if i == 0:
            return float(self.t[0])
        f = (level - sp[i - 1]) / (sp[i] - sp[i - 1])
        return float(self.t[i - 1] + f * (self.t[i] - self.t[i - 1]))


def integrate_limit(n, t_end, step=1e-4):
    if n < 2:
        raise ValueError(f"n >= 2 required, got {n}")
    if not (t_end > 0 and step > 0):
        raise ValueError("t_end and step must be positive")
    t, xi, rho, psi = kernels.limit_shoot(float(n - 1), float(t_end), float(step))
    return LimitTrajectory(n, t, xi, rho, psi)


def _rescaled_full(delta, params, t_end, step):
    cfg = SolverConfig(step=delta * step, max_arclength=delta * t_end, event_tol=1e-12 * delta)
    curve, out = integrate_profile(delta, params, cfg)
    if out.kind is not OutcomeKind.BUDGET_EXHAUSTED:
        raise ValueError(f"full system stopped early ({out.kind.value}) at s={out.s1}")
    return curve


def compare_with_full_system(delta, params, t_end, step=1e-3):
    """Max deviation between the rescaled full shot and the limit trajectory.

    Both systems take the same number of RK4 steps (full-system step
    ``delta * step``), so their discretization errors nearly cancel and the
    deviation isolates the O(lambda delta) terms of the full equation.
    """
    if not 0 < delta <= 1e-2:
        raise ValueError(f"delta must lie in (0, 1e-2], got {delta!r}")
    lim = integrate_limit(params.n, t_end, step)
    curve = _rescaled_full(delta, params, t_end, step)
    tt = curve.s / delta
    xi = curve.x / delta
    rho = (curve.r - delta) / delta
    phi = curve.theta
    if len(tt) != len(lim.t):
        xi = np.interp(lim.t, tt, xi)
        rho = np.interp(lim.t, tt, rho)
        phi = np.interp(lim.t, tt, phi)
    dev = np.maximum.reduce([np.abs(xi - lim.xi), np.abs(rho - lim.rho), np.abs(phi - lim.phi)])
    return float(np.max(dev))


def steepening_check(delta, params, level=0.9, step=1e-3):
    """r'(T delta) of the full shot, T the time the limit reaches sin(phi) = level."""
    probe = integrate_limit(params.n, 50.0, step)
    T = probe.time_of_sin_phi(level)
    curve = _rescaled_full(delta, params, T, step)
    return float(np.sin(curve.theta[-1])), T
