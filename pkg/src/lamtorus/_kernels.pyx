# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernels.

Operation-for-operation mirror of ``_kernels_py``; keep the two in sync.
"""
from libc.math cimport sin, cos, fabs, isfinite, M_PI
from libc.stdlib cimport malloc, realloc, free

import numpy as np

HIT_AXIS = 0
HORIZONTAL_TANGENT = 1
RADIAL_SINGULARITY = 2
BUDGET_EXHAUSTED = 3

cdef enum:
    EV_X = 0
    EV_SIN = 1
    EV_R = 2
    EV_BUDGET = 3
    MAX_LOCATE_ITER = 200


cdef struct Buf:
    double *s
    double *x
    double *r
    double *th
    double *ds
    double *dth
    Py_ssize_t n
    Py_ssize_t cap


cdef int buf_init(Buf *b, Py_ssize_t cap) noexcept nogil:
    b.n = 0
    b.cap = cap
    b.s = <double *> malloc(cap * sizeof(double))
    b.x = <double *> malloc(cap * sizeof(double))
    b.r = <double *> malloc(cap * sizeof(double))
    b.th = <double *> malloc(cap * sizeof(double))
    b.ds = <double *> malloc(cap * sizeof(double))
    b.dth = <double *> malloc(cap * sizeof(double))
    if not (b.s and b.x and b.r and b.th and b.ds and b.dth):
        return -1
    return 0


cdef void buf_free(Buf *b) noexcept nogil:
    free(b.s)
    free(b.x)
    free(b.r)
    free(b.th)
    free(b.ds)
    free(b.dth)


cdef int buf_grow(Buf *b) noexcept nogil:
    cdef Py_ssize_t cap = 2 * b.cap
    cdef double *p
    p = <double *> realloc(b.s, cap * sizeof(double))
    if not p:
        return -1
    b.s = p
    p = <double *> realloc(b.x, cap * sizeof(double))
    if not p:
        return -1
    b.x = p
    p = <double *> realloc(b.r, cap * sizeof(double))
    if not p:
        return -1
    b.r = p
    p = <double *> realloc(b.th, cap * sizeof(double))
    if not p:
        return -1
    b.th = p
    p = <double *> realloc(b.ds, cap * sizeof(double))
    if not p:
        return -1
    b.ds = p
    p = <double *> realloc(b.dth, cap * sizeof(double))
    if not p:
        return -1
    b.dth = p
    b.cap = cap
    return 0


cdef int buf_push(Buf *b, double s, double x, double r, double th,
                  double ds, double dth) noexcept nogil:
    if b.n == b.cap:
        if buf_grow(b) != 0:
            return -1
    b.s[b.n] = s
    b.x[b.n] = x
    b.r[b.n] = r
    b.th[b.n] = th
    b.ds[b.n] = ds
    b.dth[b.n] = dth
    b.n += 1
    return 0


cdef inline void rhs(double x, double r, double th, double nm1, double lam,
                     double *a, double *b, double *c) noexcept nogil:
    cdef double st = sin(th)
    cdef double ct = cos(th)
    a[0] = ct
    b[0] = st
    c[0] = x * st + (nm1 / r - r) * ct + lam


cdef void step_rk4(double x, double r, double th, double h, double nm1, double lam,
                   double *dx, double *dr, double *dth) noexcept nogil:
    cdef double a1, b1, c1, a2, b2, c2, a3, b3, c3, a4, b4, c4
    rhs(x, r, th, nm1, lam, &a1, &b1, &c1)
    rhs(x + 0.5 * h * a1, r + 0.5 * h * b1, th + 0.5 * h * c1, nm1, lam, &a2, &b2, &c2)
    rhs(x + 0.5 * h * a2, r + 0.5 * h * b2, th + 0.5 * h * c2, nm1, lam, &a3, &b3, &c3)
    rhs(x + h * a3, r + h * b3, th + h * c3, nm1, lam, &a4, &b4, &c4)
    dx[0] = h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    dr[0] = h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
    dth[0] = h / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)


cdef inline bint crossed(double g_old, double g_new) noexcept nogil:
    return (g_old > 0.0 and g_new <= 0.0) or (g_old < 0.0 and g_new >= 0.0)


cdef inline bint singular(double xn, double rn, double thn, double r_floor) noexcept nogil:
    return not (rn >= r_floor and isfinite(xn) and isfinite(thn))


cdef bint triggered(int event, double x, double r, double th,
                    double dx, double dr, double dth, double r_floor) noexcept nogil:
    if event == EV_X:
        return crossed(x, x + dx)
    if event == EV_SIN:
        return crossed(sin(th), sin(th + dth))
    return singular(x + dx, r + dr, th + dth, r_floor)


cdef double locate(int event, double x, double r, double th, double step,
                   double nm1, double lam, double r_floor, double event_tol) noexcept nogil:
    cdef double lo = 0.0
    cdef double hi = step
    cdef double mid, g, dx, dr, dth
    cdef int it = 0
    while True:
        if hi - lo <= event_tol:
            if event == EV_R or it >= MAX_LOCATE_ITER:
                break
            step_rk4(x, r, th, hi, nm1, lam, &dx, &dr, &dth)
            if event == EV_X:
                g = x + dx
            else:
                g = sin(th + dth)
            if fabs(g) <= event_tol:
                break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        step_rk4(x, r, th, mid, nm1, lam, &dx, &dr, &dth)
        if triggered(event, x, r, th, dx, dr, dth, r_floor):
            hi = mid
        else:
            lo = mid
        it += 1
    return hi


cdef object _export(Buf *b):
    cdef Py_ssize_t m = b.n
    cdef Py_ssize_t i
    s = np.empty(m)
    x = np.empty(m)
    r = np.empty(m)
    th = np.empty(m)
    ds = np.empty(m - 1)
    dth = np.empty(m - 1)
    cdef double[::1] vs = s, vx = x, vr = r, vth = th, vds = ds, vdth = dth
    for i in range(m):
        vs[i] = b.s[i]
        vx[i] = b.x[i]
        vr[i] = b.r[i]
        vth[i] = b.th[i]
    # slot 0 of ds/dth is unused (initial state has no incoming step)
    for i in range(1, m):
        vds[i - 1] = b.ds[i]
        vdth[i - 1] = b.dth[i]
    return s, x, r, th, ds, dth


def shoot(double x0, double r0, double th0, double nm1, double lam, double h,
          double s_max, double r_floor, double event_tol):
    """Fixed-step RK4 on (x, r, theta) until the first event.

    Returns ``(s, x, r, theta, ds, dtheta, kind)``.
    """
    cdef Buf b
    cdef double x = x0, r = r0, th = th0, s = 0.0
    cdef double remaining, step, dx, dr, dth, xn, rn, thn, sn, tau, best_tau
    cdef bint last
    cdef int nfired, i, best_ev, kind = -1, err = 0
    cdef int fired[3]
    cdef Py_ssize_t k = 0
    cdef double est = s_max / h + 2.0
    cdef Py_ssize_t cap = 1024
    if est < 1e6:
        cap = <Py_ssize_t> est + 2
    else:
        cap = 1000000
    if buf_init(&b, cap) != 0:
        buf_free(&b)
        raise MemoryError()
    with nogil:
        err = buf_push(&b, 0.0, x0, r0, th0, 0.0, 0.0)
        while err == 0:
            remaining = s_max - s
            last = remaining <= h * (1.0 + 1e-9)
            step = remaining if last else h
            step_rk4(x, r, th, step, nm1, lam, &dx, &dr, &dth)
            xn = x + dx
            rn = r + dr
            thn = th + dth
            sn = s_max if last else (k + 1) * h

            nfired = 0
            if sn > event_tol:
                if crossed(x, xn):
                    fired[nfired] = EV_X
                    nfired += 1
                if crossed(sin(th), sin(thn)):
                    fired[nfired] = EV_SIN
                    nfired += 1
            if singular(xn, rn, thn, r_floor):
                fired[nfired] = EV_R
                nfired += 1

            if nfired > 0:
                best_tau = step
                best_ev = fired[0]
                for i in range(nfired):
                    tau = locate(fired[i], x, r, th, step, nm1, lam, r_floor, event_tol)
                    if i == 0 or tau < best_tau:
                        best_tau = tau
                        best_ev = fired[i]
                step_rk4(x, r, th, best_tau, nm1, lam, &dx, &dr, &dth)
                err = buf_push(&b, s + best_tau, x + dx, r + dr, th + dth, best_tau, dth)
                kind = best_ev
                break

            err = buf_push(&b, sn, xn, rn, thn, step, dth)
            if last:
                kind = EV_BUDGET
                break
            x = xn
            r = rn
            th = thn
            s = sn
            k += 1
    if err != 0:
        buf_free(&b)
        raise MemoryError()
    try:
        out = _export(&b)
    finally:
        buf_free(&b)
    return out + (kind,)


cdef inline void limit_rhs(double rho, double psi, double nm1,
                           double *a, double *b, double *c) noexcept nogil:
    cdef double sp = sin(psi)
    a[0] = sp
    b[0] = cos(psi)
    c[0] = -nm1 * sp / (1.0 + rho)


def limit_shoot(double nm1, double t_end, double h):
    """RK4 on the rescaled small-height system in the co-angle psi = pi/2 - phi.

    Returns ``(t, xi, rho, psi)``.
    """
    cdef Buf b
    cdef double xi = 0.0, rho = 0.0, psi = 0.5 * M_PI, t = 0.0
    cdef double remaining, step
    cdef double a1, b1, c1, a2, b2, c2, a3, b3, c3, a4, b4, c4
    cdef bint last, bad = False
    cdef int err = 0
    cdef Py_ssize_t k = 0
    cdef double est = t_end / h + 2.0
    cdef Py_ssize_t cap = 1024
    if est < 1e7:
        cap = <Py_ssize_t> est + 2
    else:
        cap = 10000000
    if buf_init(&b, cap) != 0:
        buf_free(&b)
        raise MemoryError()
    with nogil:
        err = buf_push(&b, 0.0, xi, rho, psi, 0.0, 0.0)
        while err == 0:
            remaining = t_end - t
            last = remaining <= h * (1.0 + 1e-9)
            step = remaining if last else h
            limit_rhs(rho, psi, nm1, &a1, &b1, &c1)
            limit_rhs(rho + 0.5 * step * b1, psi + 0.5 * step * c1, nm1, &a2, &b2, &c2)
            limit_rhs(rho + 0.5 * step * b2, psi + 0.5 * step * c2, nm1, &a3, &b3, &c3)
            limit_rhs(rho + step * b3, psi + step * c3, nm1, &a4, &b4, &c4)
            xi = xi + step / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            rho = rho + step / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            psi = psi + step / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
            if not rho > -1.0:
                bad = True
                break
            t = t_end if last else (k + 1) * h
            err = buf_push(&b, t, xi, rho, psi, step, 0.0)
            if last:
                break
            k += 1
    if err != 0:
        buf_free(&b)
        raise MemoryError()
    if bad:
        buf_free(&b)
        raise ValueError(f"limit trajectory left rho > -1 at t={t + step}")
    try:
        s, x, r, th, _, _ = _export(&b)
    finally:
        buf_free(&b)
    return s, x, r, th
