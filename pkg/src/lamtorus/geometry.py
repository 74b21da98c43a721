"""Extrinsic geometry of the revolved hypersurface X(s, a) = (x(s), r(s) a).

Sign conventions: unit normal N = (-r', x' a), kappa = theta',
H = kappa - (n - 1) cos(theta) / r, <X, N> = -x sin(theta) + r cos(theta).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, JointError, SimplicityError
from .ode import OutcomeKind, curvature

_ORIENT_EPS = 1e-12

# central 5-point first-derivative weights on offsets -2h..2h, times 12h
_CENTRAL5 = np.array([1.0, -8.0, 0.0, 8.0, -1.0])


@dataclass
class ProfilePolyline:
    """Ordered (x, r) samples with tangent angles and arc-length parameter."""

    points: np.ndarray
    theta: np.ndarray | None = None
    s: np.ndarray | None = None

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def r(self):
        return self.points[:, 1]

    @property
    def is_closed(self):
        return len(self.points) > 2 and np.array_equal(self.points[0], self.points[-1])


@dataclass
class ClosedProfile(ProfilePolyline):
    joint_angles: tuple[float, float] = (0.0, 0.0)


@dataclass
class GeometricSample:
    state: object
    kappa: float
    H: float
    support: float
    residual: float


def mean_curvature(state, params, kappa=None):
    """H = kappa - (n-1) cos(theta)/r.

    ``kappa`` defaults to the curvature prescribed by the profile ODE; pass
    the measured curvature of a curve to get a genuine geometric value.
    """
    if not state.r > 0:
        raise DomainError(f"mean curvature needs r > 0, got r={state.r!r}")
    if kappa is None:
        kappa = curvature(state, params)
    return kappa - (params.n - 1) * math.cos(state.theta) / state.r


def support_function(state):
    return -state.x * math.sin(state.theta) + state.r * math.cos(state.theta)


def lambda_residual(state, params, kappa=None):
    """H + <X, N> - lambda at one state."""
    return mean_curvature(state, params, kappa) + support_function(state) - params.lam


def sphere_radius(params):
    return (math.sqrt(params.lam**2 + 4 * params.n) - params.lam) / 2


def cylinder_radius(params):
    return (math.sqrt(params.lam**2 + 4 * (params.n - 1)) - params.lam) / 2


def plane_offset(params):
    """Axial position x of the hyperplane x = const solving <X,N> + H = lambda."""
    return -params.lam


def fd_weights(offsets):
    """First-derivative weights at 0 for nodes at ``offsets`` (Fornberg)."""
    z = np.asarray(offsets, dtype=float)
    m = len(z)
    c = np.zeros((m, 2))
    c1 = 1.0
    c4 = z[0]
    c[0, 0] = 1.0
    for i in range(1, m):
        mn = min(i, 1)
        c2 = 1.0
        c5 = c4
        c4 = z[i]
        for j in range(i):
            c3 = z[i] - z[j]
            c2 = c2 * c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, 1]


def measured_curvature(curve):
    """Turning rate of the computed tangent at every sample.

    Fourth-order differences of theta built from the per-step increments, so
    the estimate carries discretization error but almost no cancellation.
    Shots from the r-axis with horizontal tangent are extended past s = 0
    by their mirror symmetry (x, theta) -> (-x, -theta).
    """
    d = np.asarray(curve.dtheta, dtype=float)
    ds = np.asarray(curve.ds, dtype=float)
    m = len(curve.s)
    if m < 5:
        raise ValueError("need at least 5 samples to measure curvature")
    h = curve.step
    symmetric = curve.x[0] == 0.0 and curve.theta[0] == 0.0

    if symmetric:
        d_ext = np.concatenate([d[1::-1], d])
        ds_ext = np.concatenate([ds[1::-1], ds])
        shift = 2
    else:
        d_ext, ds_ext, shift = d, ds, 0
    node_lo = -shift
    node_hi = m - 1

    kappa = np.empty(m)
    uniform = ds_ext == h
    done = np.zeros(m, dtype=bool)
    # fast path: all four steps around node k uniform
    ks = np.arange(m)
    ok = (ks - 2 >= node_lo) & (ks + 2 <= node_hi)
    idx = ks[ok]
    if len(idx):
        j = idx + shift
        good = uniform[j - 2] & uniform[j - 1] & uniform[j] & uniform[j + 1]
        idx = idx[good]
        j = idx + shift
        kappa[idx] = (7.0 * (d_ext[j - 1] + d_ext[j]) - (d_ext[j - 2] + d_ext[j + 1])) / (12.0 * h)
        done[idx] = True

    for k in np.nonzero(~done)[0]:
        start = min(max(k - 2, node_lo), node_hi - 4)
        nodes = range(start, start + 5)
        offs = []
        dth = []
        for q in nodes:
            if q == k:
                offs.append(0.0)
                dth.append(0.0)
            elif q > k:
                offs.append(float(np.sum(ds_ext[k + shift:q + shift])))
                dth.append(float(np.sum(d_ext[k + shift:q + shift])))
            else:
                offs.append(-float(np.sum(ds_ext[q + shift:k + shift])))
                dth.append(-float(np.sum(d_ext[q + shift:k + shift])))
        w = fd_weights(offs)
        kappa[k] = float(np.dot(w, dth))
    return kappa


def curve_geometry(curve):
    """Measured kappa, H, <X,N> and lambda-residual along a computed curve."""
    p = curve.params
    kappa = measured_curvature(curve)
    st = np.sin(curve.theta)
    ct = np.cos(curve.theta)
    H = kappa - (p.n - 1) * ct / curve.r
    support = -curve.x * st + curve.r * ct
    residual = H + support - p.lam
    return kappa, H, support, residual


def samples(curve):
    kappa, H, support, residual = curve_geometry(curve)
    return [
        GeometricSample(curve.state(i), float(kappa[i]), float(H[i]), float(support[i]), float(residual[i]))
        for i in range(len(curve))
    ]


def residual_max(curve):
    return float(np.max(np.abs(curve_geometry(curve)[3])))


def sphere_profile(params, m=10_000):
    """Analytic half circle x^2 + r^2 = a^2 from (a, 0) to (-a, 0)."""
    a = sphere_radius(params)
    u = np.linspace(0.0, math.pi, m)
    pts = np.column_stack([a * np.cos(u), a * np.sin(u)])
    pts[0, 1] = 0.0
    pts[-1, 1] = 0.0
    return ProfilePolyline(pts, u + 0.5 * math.pi, a * u)


def cylinder_profile(params, length=4.0, m=1000):
    a = cylinder_radius(params)
    s = np.linspace(0.0, length, m)
    pts = np.column_stack([length / 2 - s, np.full(m, a)])
    return ProfilePolyline(pts, np.full(m, math.pi), s)


def plane_profile(params, height=4.0, m=1000):
    s = np.linspace(0.0, height, m)
    pts = np.column_stack([np.full(m, plane_offset(params)), s])
    return ProfilePolyline(pts, np.full(m, 0.5 * math.pi), s)


def exact_solution_states(params, m=1000):
    """Interior samples of the three closed-form solutions with their exact curvature.

    Returns {name: [(ProfileState, kappa), ...]} for the sphere of radius
    sphere_radius, the cylinder of radius cylinder_radius and the hyperplane
    x = plane_offset.
    """
    from .ode import ProfileState

    a = sphere_radius(params)
    u = math.pi * (np.arange(m) + 0.5) / m
    sphere = [
        (ProfileState(a * float(t), a * math.cos(t), a * math.sin(t), float(t) + 0.5 * math.pi), 1.0 / a)
        for t in u
    ]
    c = cylinder_radius(params)
    xs = np.linspace(-3.0, 3.0, m)
    cyl = [(ProfileState(float(3.0 - x), float(x), c, math.pi), 0.0) for x in xs]
    q = plane_offset(params)
    rs = np.linspace(0.01, 4.0, m)
    plane = [(ProfileState(float(r), q, float(r), 0.5 * math.pi), 0.0) for r in rs]
    return {"plane": plane, "sphere": sphere, "cylinder": cyl}


def exact_solution_residuals(params, m=1000):
    """Max |H + <X,N> - lambda| over each closed-form solution."""
    return {
        name: max(abs(lambda_residual(st, params, k)) for st, k in pts)
        for name, pts in exact_solution_states(params, m).items()
    }


def _wrap(a):
    return (a + math.pi) % (2 * math.pi) - math.pi


def build_closed_profile(half, angle_tol):
    """Close a Hit half-profile by reflecting it in the r-axis.

    The mirror image (-x, r) is appended in reverse so the loop runs
    counter-clockwise; both axis points are snapped to x = 0.
    """
    out = half.outcome
    if out is None or out.kind is not OutcomeKind.HIT_AXIS:
        raise JointError("half profile must end on the r-axis")
    defect = out.terminal_tangent_defect
    if defect > angle_tol:
        raise JointError(f"terminal tangent defect |x'+1| = {defect:.3e} exceeds {angle_tol:.3e}")
    x = np.array(half.x, dtype=float)
    r = np.asarray(half.r, dtype=float)
    th = np.asarray(half.theta, dtype=float)
    s = np.asarray(half.s, dtype=float)
    x[0] = 0.0
    x[-1] = 0.0
    if np.any(x < 0):
        raise JointError("half profile crosses the r-axis before its end")

    mirror = slice(len(x) - 2, None, -1)
    px = np.concatenate([x, -x[mirror]])
    pr = np.concatenate([r, r[mirror]])
    pth = np.concatenate([th, 2 * math.pi - th[mirror]])
    total = s[-1]
    ps = np.concatenate([s, 2 * total - s[mirror]])
    pts = np.column_stack([px, pr])

    top = abs(_wrap((2 * math.pi - th[-1]) - th[-1]))
    bottom = abs(_wrap(th[0] - (2 * math.pi - th[0])))
    closed = ClosedProfile(pts, pth, ps, (bottom, top))
    if not simplicity_check(pts):
        raise SimplicityError("reflected profile intersects itself")
    return closed


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _sign(v):
    return np.where(v > _ORIENT_EPS, 1, np.where(v < -_ORIENT_EPS, -1, 0))


def segments_intersect(p1, p2, q1, q2):
    """Vectorized closed-segment intersection test with orientation predicates."""
    p1x, p1y = p1[..., 0], p1[..., 1]
    p2x, p2y = p2[..., 0], p2[..., 1]
    q1x, q1y = q1[..., 0], q1[..., 1]
    q2x, q2y = q2[..., 0], q2[..., 1]
    d1 = _sign(_orient(q1x, q1y, q2x, q2y, p1x, p1y))
    d2 = _sign(_orient(q1x, q1y, q2x, q2y, p2x, p2y))
    d3 = _sign(_orient(p1x, p1y, p2x, p2y, q1x, q1y))
    d4 = _sign(_orient(p1x, p1y, p2x, p2y, q2x, q2y))
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)

    def on_seg(ax, ay, bx, by, cx, cy):
        return (np.minimum(ax, bx) - _ORIENT_EPS <= cx) & (cx <= np.maximum(ax, bx) + _ORIENT_EPS) & \
               (np.minimum(ay, by) - _ORIENT_EPS <= cy) & (cy <= np.maximum(ay, by) + _ORIENT_EPS)

    touch = ((d1 == 0) & on_seg(q1x, q1y, q2x, q2y, p1x, p1y)) | \
            ((d2 == 0) & on_seg(q1x, q1y, q2x, q2y, p2x, p2y)) | \
            ((d3 == 0) & on_seg(p1x, p1y, p2x, p2y, q1x, q1y)) | \
            ((d4 == 0) & on_seg(p1x, p1y, p2x, p2y, q2x, q2y))
    return proper | touch


def _segments(points):
    pts = np.asarray(points, dtype=float)
    if len(pts) < 3:
        raise ValueError("simplicity check needs at least 3 points")
    closed = np.array_equal(pts[0], pts[-1])
    a = pts[:-1]
    b = pts[1:]
    return a, b, closed


def _adjacent(i, j, nseg, closed):
    lo = np.minimum(i, j)
    hi = np.maximum(i, j)
    adj = hi - lo == 1
    if closed:
        adj |= (lo == 0) & (hi == nseg - 1)
    return adj


def _adjacent_fold(a, b, closed):
    """Consecutive segments that double back over each other."""
    u = b - a
    v = np.roll(u, -1, axis=0)
    if not closed:
        u, v = u[:-1], v[:-1]
    cross = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    dot = np.einsum("ij,ij->i", u, v)
    return bool(np.any((np.abs(cross) <= _ORIENT_EPS) & (dot < 0)))


def simplicity_check_bruteforce(points):
    """O(m^2) reference: no two non-adjacent segments meet."""
    a, b, closed = _segments(points)
    nseg = len(a)
    if _adjacent_fold(a, b, closed):
        return False
    i, j = np.triu_indices(nseg, k=2)
    keep = ~_adjacent(i, j, nseg, closed)
    i, j = i[keep], j[keep]
    return not bool(np.any(segments_intersect(a[i], b[i], a[j], b[j])))


def simplicity_check(points):
    """True iff no two non-adjacent segments of the polyline intersect.

    Candidate pairs come from a uniform grid over segment bounding boxes;
    each candidate gets the exact orientation test. Closed polylines repeat
    the first point at the end.
    """
    a, b, closed = _segments(points)
    nseg = len(a)
    if nseg < 2:
        return True
    if _adjacent_fold(a, b, closed):
        return False
    if nseg <= 256:
        return simplicity_check_bruteforce(points)

    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    span = np.max(hi, axis=0) - np.min(lo, axis=0)
    seglen = np.hypot(*(b - a).T)
    cell = max(4.0 * float(np.median(seglen)), float(np.max(span)) / 4096.0, 1e-300)
    while True:
        origin = np.min(lo, axis=0) - cell
        c0 = np.floor((lo - origin) / cell - _ORIENT_EPS).astype(np.int64)
        c1 = np.floor((hi - origin) / cell + _ORIENT_EPS).astype(np.int64)
        nx = c1[:, 0] - c0[:, 0] + 1
        ny = c1[:, 1] - c0[:, 1] + 1
        per_seg = nx * ny
        if per_seg.sum() <= 64 * nseg:
            break
        cell *= 2.0
    ncol = int(np.max(c1[:, 0])) + 2

    seg_ids = np.repeat(np.arange(nseg), per_seg)
    first = np.repeat(np.cumsum(per_seg) - per_seg, per_seg)
    local = np.arange(len(seg_ids)) - first
    nx_rep = nx[seg_ids]
    cx = c0[seg_ids, 0] + local % nx_rep
    cy = c0[seg_ids, 1] + local // nx_rep
    cell_ids = cy * ncol + cx
    order = np.lexsort((seg_ids, cell_ids))
    seg_ids = seg_ids[order]
    cell_ids = cell_ids[order]
    bounds = np.flatnonzero(np.diff(cell_ids)) + 1
    starts = np.concatenate([[0], bounds])
    ends = np.concatenate([bounds, [len(cell_ids)]])

    pi_list = []
    pj_list = []
    counts = ends - starts
    for k in np.unique(counts):
        if k < 2:
            continue
        sel = np.nonzero(counts == k)[0]
        ti, tj = np.triu_indices(k, k=1)
        base = starts[sel][:, None]
        pi_list.append(seg_ids[(base + ti).ravel()])
        pj_list.append(seg_ids[(base + tj).ravel()])
    if not pi_list:
        return True
    i = np.concatenate(pi_list)
    j = np.concatenate(pj_list)
    keep = ~_adjacent(i, j, nseg, closed) & (i != j)
    i, j = i[keep], j[keep]
    pairs = np.unique(np.column_stack([np.minimum(i, j), np.maximum(i, j)]), axis=0)
    if len(pairs) == 0:
        return True
    i, j = pairs[:, 0], pairs[:, 1]
    return not bool(np.any(segments_intersect(a[i], b[i], a[j], b[j])))


def sphere_area(k):
    """Area of the unit k-sphere S^k by the recurrence |S^k| = 2 pi |S^(k-2)| / (k - 1)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    area = 2.0 if k % 2 == 0 else 2.0 * math.pi
    for j in range(k % 2 + 2, k + 1, 2):
        area *= 2.0 * math.pi / (j - 1)
    return area


def _profile_arrays(profile):
    if isinstance(profile, ProfilePolyline):
        pts = np.asarray(profile.points, dtype=float)
        theta = profile.theta
        s = profile.s
    else:
        pts = np.asarray(profile, dtype=float)
        theta = s = None
    if s is None:
        s = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    if theta is None:
        t = np.gradient(pts, s, axis=0)
        theta = np.arctan2(t[:, 1], t[:, 0])
    return pts, np.asarray(theta, dtype=float), np.asarray(s, dtype=float)


def _trapezoid(f, s):
    return float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(s)))


def weighted_area(profile, params):
    """Gaussian-weighted area of the hypersurface generated by ``profile``."""
    pts, _, s = _profile_arrays(profile)
    x, r = pts[:, 0], pts[:, 1]
    f = np.abs(r) ** (params.n - 1) * np.exp(-(x**2 + r**2) / 2)
    return sphere_area(params.n - 1) * _trapezoid(f, s)


def weighted_volume(profile, params):
    """Integral of <X, N> e^{-|X|^2/2} over the generated hypersurface."""
    pts, theta, s = _profile_arrays(profile)
    x, r = pts[:, 0], pts[:, 1]
    support = -x * np.sin(theta) + r * np.cos(theta)
    f = support * np.abs(r) ** (params.n - 1) * np.exp(-(x**2 + r**2) / 2)
    return sphere_area(params.n - 1) * _trapezoid(f, s)


def resample(profile, m):
    """``m`` points spread uniformly in arc length, keeping closure."""
    pts, theta, s = _profile_arrays(profile)
    closed = np.array_equal(pts[0], pts[-1])
    u = np.linspace(s[0], s[-1], m + 1 if closed else m)
    out = np.column_stack([np.interp(u, s, pts[:, 0]), np.interp(u, s, pts[:, 1])])
    th = np.interp(u, s, np.unwrap(theta))
    if closed:
        out[-1] = out[0]
    else:
        out[0], out[-1] = pts[0], pts[-1]
    return ProfilePolyline(out, th, u)
