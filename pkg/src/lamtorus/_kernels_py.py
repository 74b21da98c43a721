"""Pure-Python integration kernels.

Reference implementation of the hot loops. ``_kernels.pyx`` mirrors this file
operation for operation so both backends round identically.
"""
import math

import numpy as np

HIT_AXIS = 0
HORIZONTAL_TANGENT = 1
RADIAL_SINGULARITY = 2
BUDGET_EXHAUSTED = 3

_EV_X = 0
_EV_SIN = 1
_EV_R = 2

MAX_LOCATE_ITER = 200


def profile_rhs(x, r, th, nm1, lam):
    st = math.sin(th)
    ct = math.cos(th)
    return ct, st, x * st + (nm1 / r - r) * ct + lam


def rk4_step(x, r, th, h, nm1, lam):
    """Increments (dx, dr, dtheta) of one classical RK4 step of length h."""
    a1, b1, c1 = profile_rhs(x, r, th, nm1, lam)
    a2, b2, c2 = profile_rhs(x + 0.5 * h * a1, r + 0.5 * h * b1, th + 0.5 * h * c1, nm1, lam)
    a3, b3, c3 = profile_rhs(x + 0.5 * h * a2, r + 0.5 * h * b2, th + 0.5 * h * c2, nm1, lam)
    a4, b4, c4 = profile_rhs(x + h * a3, r + h * b3, th + h * c3, nm1, lam)
    dx = h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    dr = h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
    dth = h / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
    return dx, dr, dth


def _crossed(g_old, g_new):
    return (g_old > 0.0 and g_new <= 0.0) or (g_old < 0.0 and g_new >= 0.0)


def _singular(xn, rn, thn, r_floor):
    return not (rn >= r_floor and math.isfinite(xn) and math.isfinite(thn))


def _triggered(event, x, r, th, dx, dr, dth, r_floor):
    xn = x + dx
    rn = r + dr
    thn = th + dth
    if event == _EV_X:
        return _crossed(x, xn)
    if event == _EV_SIN:
        return _crossed(math.sin(th), math.sin(thn))
    return _singular(xn, rn, thn, r_floor)


def _event_value(event, x, th, dx, dth):
    if event == _EV_X:
        return x + dx
    return math.sin(th + dth)


def _locate(event, x, r, th, step, nm1, lam, r_floor, event_tol):
    """Bisect the sub-step length at which ``event`` first fires."""
    lo = 0.0
    hi = step
    it = 0
    while True:
        if hi - lo <= event_tol:
            if event == _EV_R or it >= MAX_LOCATE_ITER:
                break
            dx, dr, dth = rk4_step(x, r, th, hi, nm1, lam)
            if abs(_event_value(event, x, th, dx, dth)) <= event_tol:
                break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        dx, dr, dth = rk4_step(x, r, th, mid, nm1, lam)
        if _triggered(event, x, r, th, dx, dr, dth, r_floor):
            hi = mid
        else:
            lo = mid
        it += 1
    return hi


def shoot(x0, r0, th0, nm1, lam, h, s_max, r_floor, event_tol):
    """Fixed-step RK4 on (x, r, theta) until the first event.

    Returns ``(s, x, r, theta, ds, dtheta, kind)``; ``ds`` and ``dtheta`` hold
    the step lengths and the unrounded angle increments of every step.
    """
    s_l = [0.0]
    x_l = [x0]
    r_l = [r0]
    th_l = [th0]
    ds_l = []
    dth_l = []
    x, r, th = x0, r0, th0
    s = 0.0
    k = 0
    while True:
        remaining = s_max - s
        last = remaining <= h * (1.0 + 1e-9)
        step = remaining if last else h
        dx, dr, dth = rk4_step(x, r, th, step, nm1, lam)
        xn = x + dx
        rn = r + dr
        thn = th + dth
        sn = s_max if last else (k + 1) * h

        fired = []
        if sn > event_tol:
            if _crossed(x, xn):
                fired.append(_EV_X)
            if _crossed(math.sin(th), math.sin(thn)):
                fired.append(_EV_SIN)
        if _singular(xn, rn, thn, r_floor):
            fired.append(_EV_R)

        if fired:
            best_tau = step
            best_ev = fired[0]
            first = True
            for ev in fired:
                tau = _locate(ev, x, r, th, step, nm1, lam, r_floor, event_tol)
                if first or tau < best_tau:
                    best_tau = tau
                    best_ev = ev
                    first = False
            dx, dr, dth = rk4_step(x, r, th, best_tau, nm1, lam)
            s_l.append(s + best_tau)
            x_l.append(x + dx)
            r_l.append(r + dr)
            th_l.append(th + dth)
            ds_l.append(best_tau)
            dth_l.append(dth)
            kind = (HIT_AXIS, HORIZONTAL_TANGENT, RADIAL_SINGULARITY)[best_ev]
            break

        s_l.append(sn)
        x_l.append(xn)
        r_l.append(rn)
        th_l.append(thn)
        ds_l.append(step)
        dth_l.append(dth)
        if last:
            kind = BUDGET_EXHAUSTED
            break
        x, r, th = xn, rn, thn
        s = sn
        k += 1

    return (
        np.array(s_l),
        np.array(x_l),
        np.array(r_l),
        np.array(th_l),
        np.array(ds_l),
        np.array(dth_l),
        kind,
    )


def _limit_rhs(rho, psi, nm1):
    sp = math.sin(psi)
    return sp, math.cos(psi), -nm1 * sp / (1.0 + rho)


def limit_shoot(nm1, t_end, h):
    """RK4 on the rescaled small-height system in the co-angle psi = pi/2 - phi.

    State is (xi, rho, psi) with xi' = sin psi, rho' = cos psi,
    psi' = -(n-1) sin psi / (1 + rho). Returns ``(t, xi, rho, psi)``.
    """
    t_l = [0.0]
    xi_l = [0.0]
    rho_l = [0.0]
    psi_l = [0.5 * math.pi]
    xi, rho, psi = 0.0, 0.0, 0.5 * math.pi
    t = 0.0
    k = 0
    while True:
        remaining = t_end - t
        last = remaining <= h * (1.0 + 1e-9)
        step = remaining if last else h
        a1, b1, c1 = _limit_rhs(rho, psi, nm1)
        a2, b2, c2 = _limit_rhs(rho + 0.5 * step * b1, psi + 0.5 * step * c1, nm1)
        a3, b3, c3 = _limit_rhs(rho + 0.5 * step * b2, psi + 0.5 * step * c2, nm1)
        a4, b4, c4 = _limit_rhs(rho + step * b3, psi + step * c3, nm1)
        xi = xi + step / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        rho = rho + step / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        psi = psi + step / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
        if not rho > -1.0:
            raise ValueError(f"limit trajectory left rho > -1 at t={t + step}")
        t = t_end if last else (k + 1) * h
        t_l.append(t)
        xi_l.append(xi)
        rho_l.append(rho)
        psi_l.append(psi)
        if last:
            break
        k += 1
    return np.array(t_l), np.array(xi_l), np.array(rho_l), np.array(psi_l)
