"""Contours, branch tracking of the weight, and quadrature along them.

The weight w(z; a, b) = (1-z)^a (z+1)^b is multivalued.  Along a path we
carry the continuous arguments theta1 = arg(1-z) and theta2 = arg(z+1),
so that

    w = exp(a (log|1-z| + i theta1) + b (log|z+1| + i theta2)).

Paths are built from three kinds of pieces: straight lines, circular
arcs and rays to infinity.  Quadrature is adaptive Gauss-Legendre on
pieces that stay away from the branch points, tanh-sinh on pieces that
end at +1 or -1, and exp-sinh on rays.  Node data are kept in log form
(log of distances to the branch points, log of the jacobian) so that
strong endpoint singularities and slowly decaying tails neither
overflow nor lose relative accuracy.
"""

from __future__ import annotations

import csv
import enum
import io
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import BranchPointError, DivergentIntegral, GeometryError, RefinementLimit
from .jacobi import JacobiEvaluator, JacobiParams
from .numerics import Poly, log1p_complex

TOL_DEFAULT = 1e-10
TOL_FLOOR = 1e-14
DEPTH_CAP = 24
_BRANCH_POINTS = (1.0, -1.0)
_EP_TOL = 1e-14
_NUDGE = 1e-12
_RAY_SCALE = np.pi / 2

_GL_X, _GL_W = np.polynomial.legendre.leggauss(15)


def _wrap(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


# ---------------------------------------------------------------- segments


@dataclass(frozen=True)
class Line:
    a: complex
    b: complex

    def __post_init__(self):
        if abs(self.b - self.a) == 0:
            raise GeometryError("line segment of zero length")

    @property
    def start(self):
        return complex(self.a)

    @property
    def end(self):
        return complex(self.b)

    def point(self, s):
        s = np.asarray(s, dtype=float)
        return np.where(s <= 0.5, self.a + (self.b - self.a) * s,
                        self.b - (self.b - self.a) * (1.0 - s))


@dataclass(frozen=True)
class Arc:
    """Circular arc ``center + radius*exp(i(theta0 + sweep*s))``, s in [0, 1].

    The sign of ``sweep`` is the orientation (positive = counterclockwise).
    """

    center: complex
    radius: float
    theta0: float
    sweep: float

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError("arc radius must be positive")
        if self.sweep == 0:
            raise GeometryError("arc sweep must be nonzero")
        if abs(self.sweep) > 2 * np.pi + 1e-12:
            raise GeometryError("arc sweep must not exceed one full turn")
        # +-1 may only sit at an endpoint
        for p in _BRANCH_POINTS:
            if abs(abs(p - self.center) - self.radius) > 1e-12:
                continue
            phi = np.angle(p - self.center) - self.theta0
            rel = phi / self.sweep
            rel_mod = rel % (2 * np.pi / abs(self.sweep))
            hits = [rel_mod + k * 2 * np.pi / abs(self.sweep) for k in (-1, 0, 1)]
            for h in hits:
                if 1e-12 < h < 1 - 1e-12:
                    raise GeometryError(f"arc passes through the branch point {p}")

    @property
    def start(self):
        return complex(self.center + self.radius * np.exp(1j * self.theta0))

    @property
    def end(self):
        return complex(self.center + self.radius * np.exp(1j * (self.theta0 + self.sweep)))

    def point(self, s):
        return self.center + self.radius * np.exp(1j * (self.theta0 + self.sweep * np.asarray(s)))


@dataclass(frozen=True)
class Ray:
    """Half-line ``origin + direction*x``, x >= 0.

    With ``inward`` the ray is traversed from infinity towards the origin.
    """

    origin: complex
    direction: complex
    inward: bool = False

    def __post_init__(self):
        if abs(self.direction) == 0:
            raise GeometryError("ray direction must be nonzero")
        object.__setattr__(self, "direction", complex(self.direction) / abs(self.direction))

    @property
    def start(self):
        return complex("inf") if self.inward else complex(self.origin)

    @property
    def end(self):
        return complex(self.origin) if self.inward else complex("inf")

    def point(self, x):
        return self.origin + self.direction * np.asarray(x)


class ContourLabel(str, enum.Enum):
    GAMMA = "gamma"
    GAMMA_PLUS1 = "gamma1"
    GAMMA_MINUS1 = "gammam1"
    GAMMA_INF = "gammainf"
    INTERVAL = "interval"
    CUSTOM = "custom"


@dataclass(frozen=True)
class PathSpec:
    """Piecewise path with the point where the branch is seeded.

    The branch of both logarithms is the principal one at
    ``segments[seed[0]].point(seed[1])``, unless ``seed_args`` gives
    (theta1, theta2) there explicitly.
    """

    segments: tuple
    label: ContourLabel = ContourLabel.CUSTOM
    closed: bool = False
    seed: tuple = (0, 0.0)
    seed_args: tuple | None = None
    name: str = ""

    def __post_init__(self):
        if not self.segments:
            raise GeometryError("empty path")
        for s0, s1 in zip(self.segments[:-1], self.segments[1:]):
            e, b = s0.end, s1.start
            if not (np.isfinite(e) and np.isfinite(b)) or abs(e - b) > 1e-12:
                raise GeometryError(f"segments do not join: {e} vs {b}")
        if self.closed:
            e, b = self.segments[-1].end, self.segments[0].start
            if not np.isfinite(e) or abs(e - b) > 1e-12:
                raise GeometryError("closed path does not return to its start")

    @property
    def start_point(self):
        return self.segments[0].start

    @property
    def end_point(self):
        return self.segments[-1].end


@dataclass(frozen=True)
class BranchState:
    theta1: float = 0.0
    theta2: float = 0.0


@dataclass(frozen=True)
class QuadResult:
    """Quadrature value with an absolute error estimate.

    ``scale`` is the integral of the absolute value of the integrand,
    the natural size against which cancellation is judged.
    """

    value: complex
    abs_error: float
    evaluations: int
    scale: float = 0.0


@dataclass
class QuadBatch:
    value: np.ndarray
    abs_error: np.ndarray
    scale: np.ndarray
    evaluations: int

    def __getitem__(self, i):
        return QuadResult(complex(self.value[i]), float(self.abs_error[i]),
                          self.evaluations, float(self.scale[i]))

    def __len__(self):
        return len(self.value)


# ---------------------------------------------------------------- builders


def build_gamma_double_loop(xi=0.0, radius=0.5, radius_neg=None):
    """Closed double loop through ``xi``.

    Loops positively around +1, positively around -1, then negatively
    around +1 and negatively around -1.  Each loop is a connector along
    the real axis, a full circle and the connector back.  The negative
    loops may use a different radius ``radius_neg``.
    """
    xi = float(xi)
    r_pos = float(radius)
    r_neg = r_pos if radius_neg is None else float(radius_neg)
    if not -1.0 < xi < 1.0:
        raise GeometryError("xi must lie in (-1, 1)")
    lim = min(1.0 - xi, 1.0 + xi)
    for r in (r_pos, r_neg):
        if not 0.0 < r < lim:
            raise GeometryError(f"radius must lie in (0, {lim}) for xi={xi}")

    def loop(p, r, orient):
        foot = p - r if p > 0 else p + r
        theta0 = np.pi if p > 0 else 0.0
        segs = []
        if abs(foot - xi) > 0:
            segs.append(Line(complex(xi), complex(foot)))
        segs.append(Arc(complex(p), r, theta0, orient * 2 * np.pi))
        if abs(foot - xi) > 0:
            segs.append(Line(complex(foot), complex(xi)))
        return segs

    segs = (loop(1.0, r_pos, 1) + loop(-1.0, r_pos, 1)
            + loop(1.0, r_neg, -1) + loop(-1.0, r_neg, -1))
    return PathSpec(tuple(segs), ContourLabel.GAMMA, closed=True, seed=(0, 0.0),
                    name=f"double loop xi={xi} r={r_pos},{r_neg}")


def build_gamma_plus1(center=-1.0):
    """Clockwise circle through +1 around -1, from 1-i0 back to 1+i0.

    The circle is centered at the real point ``center`` < 0 with radius
    1 - center; every such circle gives the same integrals.
    """
    center = float(center)
    if not center < 0:
        raise GeometryError("the circle through +1 must be centered left of 0 to enclose -1")
    return PathSpec((Arc(center + 0j, 1.0 - center, 0.0, -2 * np.pi),), ContourLabel.GAMMA_PLUS1,
                    seed=(0, 0.25), name="gamma_1")


def build_gamma_minus1(center=1.0):
    """Clockwise circle through -1 around +1, from -1+i0 back to -1-i0."""
    center = float(center)
    if not center > 0:
        raise GeometryError("the circle through -1 must be centered right of 0 to enclose +1")
    return PathSpec((Arc(center + 0j, 1.0 + center, np.pi, -2 * np.pi),),
                    ContourLabel.GAMMA_MINUS1, seed=(0, 0.25), name="gamma_-1")


def build_gamma_inf(x0=0.0):
    """Vertical line Re t = x0 traversed downward, from +i infinity to -i infinity."""
    x0 = float(x0)
    if not -1 < x0 < 1:
        raise GeometryError("the vertical line must cross the real axis inside (-1, 1)")
    return PathSpec((Ray(x0 + 0j, 1j, inward=True), Ray(x0 + 0j, -1j)), ContourLabel.GAMMA_INF,
                    seed=(1, 0.0), name="gamma_inf")


def build_interval(which="[-1,1]"):
    """Real pieces: ``[-1,1]``, ``[1,inf)`` or ``(-inf,-1]``.

    On the half-lines the principal arguments are used, so arg(1-t) = pi
    on [1, inf) and arg(t+1) = pi on (-inf, -1].
    """
    if which == "[-1,1]":
        return PathSpec((Line(-1 + 0j, 1 + 0j),), ContourLabel.INTERVAL, seed=(0, 0.5),
                        name=which)
    if which == "[1,inf)":
        return PathSpec((Ray(1 + 0j, 1 + 0j),), ContourLabel.INTERVAL, seed=(0, 0.0),
                        seed_args=(np.pi, 0.0), name=which)
    if which == "(-inf,-1]":
        return PathSpec((Ray(-1 + 0j, -1 + 0j, inward=True),), ContourLabel.INTERVAL,
                        seed=(0, 0.0), seed_args=(0.0, np.pi), name=which)
    raise ValueError(f"unknown interval {which!r}")


def build_circle(center, radius, orientation=1):
    """Closed circle starting at its rightmost point."""
    return PathSpec((Arc(complex(center), float(radius), 0.0, orientation * 2 * np.pi),),
                    ContourLabel.CUSTOM, closed=True, name="circle")


def build_contour(label, xi=0.0, radius=0.5):
    """Named contour by label string (as used by the command line)."""
    label = ContourLabel(label)
    if label is ContourLabel.GAMMA:
        return build_gamma_double_loop(xi, radius)
    if label is ContourLabel.GAMMA_PLUS1:
        return build_gamma_plus1()
    if label is ContourLabel.GAMMA_MINUS1:
        return build_gamma_minus1()
    if label is ContourLabel.GAMMA_INF:
        return build_gamma_inf()
    if label is ContourLabel.INTERVAL:
        return build_interval()
    raise ValueError(f"no template for {label}")


# ------------------------------------------------------------ node geometry


def _is_point(z, p):
    return np.isfinite(z) and abs(z - p) <= _EP_TOL


@dataclass
class _Nodes:
    """Quadrature or reference nodes on one segment.

    Bounded segments use s with 1-s kept separately; rays use log x.
    ``logw`` is the log of the rule weight times the parameter jacobian
    (ds/du or dx/du times the step).
    """

    s: np.ndarray | None = None
    oms: np.ndarray | None = None
    logx: np.ndarray | None = None
    logw: np.ndarray | None = None
    logs: np.ndarray | None = None
    log1ms: np.ndarray | None = None

    def log_s(self):
        return np.log(self.s) if self.logs is None else self.logs

    def log_oms(self):
        return np.log(self.oms) if self.log1ms is None else self.log1ms


def _t(seg, nd):
    if isinstance(seg, Ray):
        # far nodes are handled in log form; clipping only keeps t finite
        return seg.origin + seg.direction * np.exp(np.minimum(nd.logx, 700.0))
    if isinstance(seg, Line):
        return np.where(nd.s <= 0.5, seg.a + (seg.b - seg.a) * nd.s,
                        seg.b - (seg.b - seg.a) * nd.oms)
    return seg.point(nd.s)


def _log_dist(seg, nd, p):
    """log(t - p) at the nodes, accurate in modulus (argument mod 2 pi)."""
    p = complex(p)
    if isinstance(seg, Ray):
        d = seg.direction
        lx = nd.logx
        if _is_point(seg.origin, p):
            return np.log(d) + lx + 0j
        out = np.empty(lx.shape, dtype=complex)
        big = lx > 0
        with np.errstate(over="ignore", under="ignore"):
            out[big] = lx[big] + np.log(d) + log1p_complex((seg.origin - p) / d * np.exp(-lx[big]))
            out[~big] = np.log(seg.origin - p + d * np.exp(lx[~big]))
        return out
    if isinstance(seg, Line):
        with np.errstate(divide="ignore"):
            if _is_point(seg.a, p):
                return np.log(seg.b - seg.a) + nd.log_s() + 0j
            if _is_point(seg.b, p):
                return np.log(seg.a - seg.b) + nd.log_oms() + 0j
        return np.log(_t(seg, nd) - p)
    # arc
    at_start = _is_point(seg.start, p)
    at_end = _is_point(seg.end, p)
    if not (at_start or at_end):
        return np.log(_t(seg, nd) - p)
    use_start = at_start & ((nd.s <= 0.5) | (not at_end))
    delta = np.where(use_start, seg.sweep * nd.s, -seg.sweep * nd.oms)
    phi_p = np.where(use_start, seg.theta0, seg.theta0 + seg.sweep)
    # log|2 sin(delta/2)|, switching to the small-angle form where the
    # parameter distance underflows
    logpar = np.where(use_start, nd.log_s(), nd.log_oms())
    with np.errstate(divide="ignore"):
        mod = np.where(np.abs(delta) > 1e-8,
                       np.log(2.0 * np.abs(np.sin(delta / 2))),
                       np.log(abs(seg.sweep)) + logpar)
    mod = np.log(seg.radius) + mod
    # sign from the sweep: delta itself underflows to 0 next to the endpoint
    side = np.where(use_start, np.sign(seg.sweep), -np.sign(seg.sweep))
    arg = phi_p + delta / 2 + side * np.pi / 2
    return mod + 1j * arg


def _log_dz(seg, nd):
    """log of dt/d(parameter) at the nodes."""
    if isinstance(seg, Line):
        return np.full(nd.s.shape, np.log(seg.b - seg.a) + 0j)
    if isinstance(seg, Arc):
        return (np.log(1j * seg.sweep * seg.radius)
                + 1j * (seg.theta0 + seg.sweep * nd.s))
    # ray: dt/dlogx = direction * x
    out = np.log(seg.direction) + nd.logx + 0j
    if seg.inward:
        out = out + 1j * np.pi
    return out


def _branch_endpoints(seg):
    out = []
    for p in _BRANCH_POINTS:
        if isinstance(seg, Ray):
            if _is_point(seg.origin, p):
                out.append(p)
        elif _is_point(seg.start, p) or _is_point(seg.end, p):
            out.append(p)
    return out


# ------------------------------------------------------------ branch tracking


@dataclass
class _SegRef:
    param: np.ndarray  # s (bounded) or log x (ray), ascending
    theta1: np.ndarray
    theta2: np.ndarray


def _ref_nodes(seg, count):
    if isinstance(seg, Ray):
        lx = np.linspace(-40.0, 800.0, count)
        return _Nodes(logx=lx)
    s = np.linspace(0.0, 1.0, count)
    s[0], s[-1] = _NUDGE, 1.0 - _NUDGE
    oms = 1.0 - s
    oms[-1] = _NUDGE
    return _Nodes(s=s, oms=oms)


def _raw_args(seg, nd):
    a1 = np.imag(_log_dist(seg, nd, 1.0)) + np.pi  # arg(1-t) = arg(t-1) + pi
    a2 = np.imag(_log_dist(seg, nd, -1.0))
    return a1, a2


@dataclass(frozen=True)
class _Tracking:
    refs: tuple


def _track(path, samples_per_segment=64):
    """Continuous arguments at dense reference samples of every segment."""
    refs = []
    prev = None
    for seg in path.segments:
        if isinstance(seg, Ray):
            count = 3361
        elif isinstance(seg, Arc):
            count = max(samples_per_segment, int(np.ceil(abs(seg.sweep) / (np.pi / 16))) + 1)
        else:
            count = samples_per_segment
        for _depth in range(DEPTH_CAP):
            nd = _ref_nodes(seg, count)
            a1, a2 = _raw_args(seg, nd)
            order = slice(None, None, -1) if getattr(seg, "inward", False) else slice(None)
            d1 = _wrap(np.diff(a1[order]))
            d2 = _wrap(np.diff(a2[order]))
            if np.all(np.abs(d1) < np.pi / 4) and np.all(np.abs(d2) < np.pi / 4):
                break
            count = 2 * count - 1
        else:
            raise RefinementLimit("branch tracking could not reach the pi/4 step bound")
        t1 = np.concatenate([[0.0], np.cumsum(d1)]) + a1[order][0]
        t2 = np.concatenate([[0.0], np.cumsum(d2)]) + a2[order][0]
        if prev is not None:
            # join continuously with the previous segment's end
            t1 += prev[0] - t1[0] + _wrap(t1[0] - prev[0])
            t2 += prev[1] - t2[0] + _wrap(t2[0] - prev[1])
        prev = (t1[-1], t2[-1])
        param = nd.logx if isinstance(seg, Ray) else nd.s
        if getattr(seg, "inward", False):
            t1, t2 = t1[::-1], t2[::-1]
        if isinstance(seg, Arc) and abs(abs(seg.sweep) - 2 * np.pi) < 1e-12:
            # analytic cross-check: a full circle about +-1 winds once
            for p, th in ((1.0, t1), (-1.0, t2)):
                if _is_point(seg.center, p):
                    if abs((th[-1] - th[0]) - seg.sweep) > 1e-9:
                        raise RefinementLimit("branch bookkeeping disagrees with winding count")
        refs.append(_SegRef(param, t1, t2))

    # seed
    k, sp = path.seed
    seg = path.segments[k]
    ref = refs[k]
    if isinstance(seg, Ray):
        lx = np.log(sp) if sp > 0 else -40.0
        nd = _Nodes(logx=np.array([lx]))
    else:
        sp = min(max(sp, _NUDGE), 1 - _NUDGE)
        nd = _Nodes(s=np.array([sp]), oms=np.array([1.0 - sp]))
    if path.seed_args is not None:
        target1, target2 = path.seed_args
    else:
        z = complex(_t(seg, nd)[0])
        if any(_is_point(z, p) for p in _BRANCH_POINTS):
            raise GeometryError("seed point must not be a branch point")
        target1, target2 = np.angle(1.0 - z), np.angle(z + 1.0)
    j = int(np.argmin(np.abs(ref.param - (nd.logx if nd.logx is not None else nd.s)[0])))
    a1, a2 = _raw_args(seg, nd)
    at1 = ref.theta1[j] + _wrap(a1[0] - ref.theta1[j])
    at2 = ref.theta2[j] + _wrap(a2[0] - ref.theta2[j])
    sh1 = target1 - at1
    sh2 = target2 - at2
    if path.seed_args is None:
        sh1 = 2 * np.pi * round(sh1 / (2 * np.pi))
        sh2 = 2 * np.pi * round(sh2 / (2 * np.pi))
    refs = [_SegRef(r.param, r.theta1 + sh1, r.theta2 + sh2) for r in refs]
    return _Tracking(tuple(refs))


def _node_logs(seg, ref, nd):
    """Branch-tracked log(1-t) and log(t+1) at the nodes."""
    l1 = _log_dist(seg, nd, 1.0)
    l2 = _log_dist(seg, nd, -1.0)
    param = nd.logx if isinstance(seg, Ray) else nd.s
    j = np.clip(np.searchsorted(ref.param, param), 1, len(ref.param) - 1)
    j = np.where(np.abs(ref.param[j - 1] - param) <= np.abs(ref.param[j] - param), j - 1, j)
    th1 = ref.theta1[j] + _wrap(np.imag(l1) + np.pi - ref.theta1[j])
    th2 = ref.theta2[j] + _wrap(np.imag(l2) - ref.theta2[j])
    return np.real(l1) + 1j * th1, np.real(l2) + 1j * th2


@dataclass(frozen=True)
class BranchTrace:
    z: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray
    segment: np.ndarray

    def states(self):
        return [BranchState(float(a), float(b)) for a, b in zip(self.theta1, self.theta2)]


def continue_branch(path, samples_per_segment=64):
    """Sample the path with continuously tracked arguments.

    Returns a ``BranchTrace`` in traversal order.  Ray samples stop at
    |t| about 1e6; the arguments there are already within 1e-6 of their
    limits.
    """
    tr = _track(path, samples_per_segment)
    zs, t1s, t2s, idx = [], [], [], []
    for k, (seg, ref) in enumerate(zip(path.segments, tr.refs)):
        if isinstance(seg, Ray):
            keep = ref.param <= np.log(1e6)
            nd = _Nodes(logx=ref.param[keep])
            th1, th2 = ref.theta1[keep], ref.theta2[keep]
            z = _t(seg, nd)
            if seg.inward:
                z, th1, th2 = z[::-1], th1[::-1], th2[::-1]
        else:
            nd = _Nodes(s=ref.param, oms=1.0 - ref.param)
            z, th1, th2 = _t(seg, nd), ref.theta1, ref.theta2
        zs.append(z)
        t1s.append(th1)
        t2s.append(th2)
        idx.append(np.full(len(z), k))
    return BranchTrace(np.concatenate(zs), np.concatenate(t1s), np.concatenate(t2s),
                       np.concatenate(idx))


def weight_on_path(path, segment, s, alpha, beta):
    """Branch-tracked weight at parameter ``s`` of ``path.segments[segment]``.

    Returns ``(t, w, tangent)`` where ``tangent`` is the unit direction of
    traversal at t.  Rays take ``s`` as the distance from their origin.
    """
    tr = _track(path)
    seg = path.segments[segment]
    if isinstance(seg, Ray):
        nd = _Nodes(logx=np.array([np.log(s)]))
    else:
        nd = _Nodes(s=np.array([float(s)]), oms=np.array([1.0 - float(s)]))
    t = complex(_t(seg, nd)[0])
    if any(_is_point(t, p) for p in _BRANCH_POINTS):
        raise BranchPointError(f"weight evaluated at the branch point {t}")
    l1, l2 = _node_logs(seg, tr.refs[segment], nd)
    w = complex(np.exp(alpha * l1[0] + beta * l2[0]))
    d = np.exp(_log_dz(seg, nd)[0])
    if isinstance(seg, Ray):
        d = seg.direction * (-1 if seg.inward else 1)
    return t, w, complex(d / abs(d))


def weight_at(state, z, alpha, beta):
    """w(z; alpha, beta) on the branch fixed by ``state``."""
    z = complex(z)
    if z == 1.0 or z == -1.0:
        raise BranchPointError(f"weight evaluated at the branch point {z}")
    l1 = np.log(abs(1.0 - z)) + 1j * state.theta1
    l2 = np.log(abs(z + 1.0)) + 1j * state.theta2
    return complex(np.exp(alpha * l1 + beta * l2))


# ------------------------------------------------------------------ integrand


class _Integrand:
    """Rows q_r(t) * F(t) * w(t; a, b) [/(t - z0)] in log-scaled form."""

    def __init__(self, polys, wa, wb, jacobi=None, cauchy_at=None):
        self.polys = [p if isinstance(p, Poly) else Poly(np.atleast_1d(p)) for p in polys]
        deg = max((p.degree or 0) for p in self.polys)
        self.D = deg
        C = np.zeros((len(self.polys), deg + 1), dtype=complex)
        for r, p in enumerate(self.polys):
            C[r, : len(p.coeffs)] = p.coeffs
        self.C = C
        self.wa, self.wb = complex(wa), complex(wb)
        self.jacobi = jacobi
        if jacobi is not None:
            self.jeval = JacobiEvaluator(jacobi.n, jacobi.alpha, jacobi.beta)
        self.cauchy_at = None if cauchy_at is None else complex(cauchy_at)

    @property
    def total_degree(self):
        return self.D + (self.jacobi.n if self.jacobi is not None else 0)

    def _horner(self, x):
        out = np.zeros((self.C.shape[0],) + x.shape, dtype=complex)
        for j in range(self.D, -1, -1):
            out = out * x + self.C[:, j, None]
        return out

    def _horner_rev(self, u):
        # t^-D q(t) with u = 1/t
        out = np.zeros((self.C.shape[0],) + u.shape, dtype=complex)
        for j in range(self.D + 1):
            out = out * u + self.C[:, j, None]
        return out

    def _jac(self, t, u=None):
        return self.jeval(t, u)[0]

    def values(self, seg, ref, nd):
        """Integrand rows (without rule weights beyond ``nd.logw``)."""
        l1, l2 = _node_logs(seg, ref, nd)
        E = self.wa * l1 + self.wb * l2 + _log_dz(seg, nd) + nd.logw
        if self.cauchy_at is not None:
            E = E - _log_dist(seg, nd, self.cauchy_at)
        if isinstance(seg, Ray):
            logt = _log_dist(seg, nd, 0.0)
            big = np.real(logt) > 0
        else:
            big = np.zeros(nd.s.shape, dtype=bool)
        t = _t(seg, nd)
        M = np.empty((self.C.shape[0],) + t.shape, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore", under="ignore", divide="ignore"):
            small = ~big
            M[:, small] = self._horner(t[small])
            if big.any():
                u = np.exp(-logt[big])
                M[:, big] = self._horner_rev(u)
                E = E.copy()
                E[big] += self.total_degree * logt[big]
            if self.jacobi is not None:
                F = np.empty(t.shape, dtype=complex)
                F[small] = self._jac(t[small])
                if big.any():
                    F[big] = self._jac(None, np.exp(-logt[big]))
                M = M * F
            expo = np.exp(E)
            out = M * expo
        bad = ~np.isfinite(out)
        if bad.any():
            if np.any(bad & (M != 0) & np.isfinite(M)):
                raise OverflowError("integrand overflows double precision")
            out[bad] = 0.0
        return out


# --------------------------------------------------------------- quadrature


def _gl_segment(seg, ref, fn, tol, rows):
    """Adaptive 15-point Gauss-Legendre on a regular bounded segment."""
    n0 = 8 if isinstance(seg, Line) else max(8, int(np.ceil(abs(seg.sweep) / (np.pi / 4))))
    edges = np.linspace(0.0, 1.0, n0 + 1)
    lo, hi = edges[:-1], edges[1:]
    total = np.zeros(rows, dtype=complex)
    err = np.zeros(rows)
    l1 = np.zeros(rows)
    evals = 0
    glob_scale = None

    def panel(a, b):
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        s = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
        w = (half[:, None] * _GL_W[None, :]).ravel()
        nd = _Nodes(s=s, oms=1.0 - s, logw=np.log(w) + 0j)
        f = fn(seg, ref, nd).reshape(rows, len(a), 15)
        return f.sum(axis=2), np.abs(f).sum(axis=2)

    for _depth in range(DEPTH_CAP):
        mid = 0.5 * (lo + hi)
        whole, whole_abs = panel(lo, hi)
        left, left_abs = panel(lo, mid)
        right, right_abs = panel(mid, hi)
        evals += 45 * len(lo)
        fine = left + right
        fine_abs = left_abs + right_abs
        diff = np.abs(whole - fine)
        if glob_scale is None:
            glob_scale = fine_abs.sum(axis=1)
        width = (hi - lo)[None, :]
        thresh = tol * np.maximum(fine_abs, glob_scale[:, None] * width * 1e-3) + 1e-300
        ok = np.all(diff <= thresh, axis=0)
        total += fine[:, ok].sum(axis=1)
        err += diff[:, ok].sum(axis=1)
        l1 += fine_abs[:, ok].sum(axis=1)
        if ok.all():
            return total, err, l1, evals
        lo = np.concatenate([lo[~ok], mid[~ok]])
        hi = np.concatenate([mid[~ok], hi[~ok]])
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]
    raise RefinementLimit("adaptive Gauss-Legendre hit its depth cap")


def _de_nodes(kind, u, h, powers=(1.0, 1.0)):
    """Nodes of the double exponential rules at u with step h.

    For the finite rule with ``powers`` (p, q) other than (1, 1) the
    segment is split at s = 1/2 and each half is mapped by s = x^p / 2 and
    1 - s = x^q / 2 before tanh-sinh in x.  An endpoint factor s^e turns
    into x^(p(e+1)-1), which keeps exponents near -1 away from the rule.
    The two halves come back concatenated, start side first.
    """
    if kind == "tanh":
        v = np.pi * np.sinh(u)
        logs = -np.logaddexp(0.0, -v)
        log1ms = -np.logaddexp(0.0, v)
        logw = np.log(h) + logs + log1ms + np.log(np.pi * np.cosh(u))
        if powers == (1.0, 1.0):
            return _Nodes(s=np.exp(logs), oms=np.exp(log1ms), logw=logw + 0j,
                          logs=logs, log1ms=log1ms)
        p0, p1 = powers
        near0 = p0 * logs - np.log(2.0)
        near1 = p1 * logs - np.log(2.0)
        far0 = np.log1p(-np.exp(near1))
        far1 = np.log1p(-np.exp(near0))
        ls = np.concatenate([near0, far0])
        l1 = np.concatenate([far1, near1])
        lw = np.concatenate([logw + np.log(p0) + near0 - logs,
                             logw + np.log(p1) + near1 - logs])
        return _Nodes(s=np.exp(ls), oms=np.exp(l1), logw=lw + 0j, logs=ls, log1ms=l1)
    lx = _RAY_SCALE * np.sinh(u)
    # dx/du divided by x; the factor x sits in the ray jacobian
    logw = np.log(h) + np.log(_RAY_SCALE * np.cosh(u))
    return _Nodes(logx=lx, logw=logw + 0j)


def _de_segment(seg, ref, fn, tol, rows, kind, u_cap=12.0, powers=(1.0, 1.0)):
    """Double exponential trapezoid with step halving."""
    # find the u range where the integrand matters
    grid = np.arange(-u_cap, u_cap + 1e-12, 0.125)
    f = fn(seg, ref, _de_nodes(kind, grid, 1.0, powers))
    mag = np.abs(f).max(axis=0).reshape(-1, len(grid)).max(axis=0)
    peak = mag.max()
    evals = len(grid)
    if peak == 0.0:
        return np.zeros(rows, complex), np.zeros(rows), np.zeros(rows), evals
    keep = np.nonzero(mag > peak * 1e-20)[0]
    ulo = grid[max(keep[0] - 1, 0)]
    uhi = grid[min(keep[-1] + 1, len(grid) - 1)]
    if (keep[0] == 0 and ulo <= -u_cap) or (keep[-1] == len(grid) - 1 and uhi >= u_cap):
        if mag[0] > peak * 1e-12 or mag[-1] > peak * 1e-12:
            raise RefinementLimit("integrand does not decay within the double exponential range")

    h = 0.25
    u = np.arange(ulo, uhi + 1e-12, h)
    f = fn(seg, ref, _de_nodes(kind, u, h, powers))
    evals += len(u)
    T = f.sum(axis=1)
    A = np.abs(f).sum(axis=1)
    history = []
    for _level in range(DEPTH_CAP):
        h /= 2
        u = np.arange(ulo + h, uhi, 2 * h)
        f = fn(seg, ref, _de_nodes(kind, u, h, powers))
        evals += len(u)
        Tn = 0.5 * T + f.sum(axis=1)
        An = 0.5 * A + np.abs(f).sum(axis=1)
        diff = np.abs(Tn - T)
        T, A = Tn, An
        if np.all(diff <= tol * A + 1e-300) and h <= 0.0625:
            return T, diff, A, evals
        rel = float(np.max(diff / (A + 1e-300)))
        history.append(rel)
        # rounding floor: once the rule is resolved, further halving only adds noise
        if h <= 2.0**-8 and len(history) >= 4 and min(history[-3:]) > 0.1 * min(history[:-3]):
            return T, np.maximum(diff, max(history[-3:]) * A), A, evals
        if h < 2.0**-12:
            break
    raise RefinementLimit("double exponential rule did not converge")


def _check_integrable(path, integrand):
    wa, wb = integrand.wa, integrand.wb
    for seg in path.segments:
        for p in _branch_endpoints(seg):
            expo = wa if p == 1.0 else wb
            if expo.real <= -1.0:
                raise DivergentIntegral(
                    f"exponent {expo} at {p:+g} is not integrable on this path")
        if isinstance(seg, Ray):
            decay = (wa + wb).real + integrand.total_degree + 1.0
            if integrand.cauchy_at is not None:
                decay -= 1.0
            if decay >= 0.0:
                raise DivergentIntegral(
                    f"integrand grows like |t|^{decay - 1:g} at infinity")


def _endpoint_powers(seg, integrand):
    out = []
    for p in (seg.start, seg.end):
        if _is_point(p, 1.0):
            e = integrand.wa.real
        elif _is_point(p, -1.0):
            e = integrand.wb.real
        else:
            e = 0.0
        out.append(min(max(1.0, 0.5 / (e + 1.0)), 1e4))
    return tuple(out)


def integrate_polys(path, polys, weight_alpha, weight_beta, jacobi=None, cauchy_at=None,
                    tol=TOL_DEFAULT, samples_per_segment=64):
    """Integrate q_r(t) [P_n(t)] w(t; a, b) [/(t - z0)] dt along ``path`` for each row.

    Parameters
    ----------
    path : PathSpec
    polys : sequence of Poly
        One integral per polynomial.  All rows share the adaptive nodes.
    weight_alpha, weight_beta : complex
        Exponents of the weight.
    jacobi : JacobiParams, optional
        Include the factor P_n^(alpha, beta)(t), evaluated from the
        explicit sum rather than from monomial coefficients.
    cauchy_at : complex, optional
        Divide the integrand by (t - cauchy_at).
    tol : float
        Target error relative to the integral of the absolute integrand.

    Returns
    -------
    QuadBatch
    """
    tol = max(float(tol), TOL_FLOOR)
    integrand = _Integrand(polys, weight_alpha, weight_beta, jacobi, cauchy_at)
    _check_integrable(path, integrand)
    if cauchy_at is not None and distance_to_path(path, cauchy_at) == 0.0:
        raise GeometryError("Cauchy kernel pole lies on the path")
    tr = _track(path, samples_per_segment)
    rows = len(integrand.polys)
    val = np.zeros(rows, dtype=complex)
    err = np.zeros(rows)
    scale = np.zeros(rows)
    evals = 0
    fn = integrand.values
    for seg, ref in zip(path.segments, tr.refs):
        if isinstance(seg, Ray):
            v, e, a, n = _de_segment(seg, ref, fn, tol, rows, "exp")
        elif _branch_endpoints(seg):
            v, e, a, n = _de_segment(seg, ref, fn, tol, rows, "tanh",
                                     powers=_endpoint_powers(seg, integrand))
        else:
            v, e, a, n = _gl_segment(seg, ref, fn, tol, rows)
        val += v
        err += e
        scale += a
        evals += n
    return QuadBatch(val, err, scale, max(evals, 1))


def integrate(path, q, params=None, weight_alpha=None, weight_beta=None,
              extra_monomial_power=0, tol=TOL_DEFAULT):
    """Integral of q(t) t^m P_n(t) w(t; weight_alpha, weight_beta) dt along ``path``.

    ``params`` supplies n, alpha, beta for the Jacobi factor; the weight
    exponents default to the Jacobi parameters.  Pass ``params=None`` to
    integrate q w alone (then both exponents are required).
    """
    if params is not None and not isinstance(params, JacobiParams):
        params = JacobiParams(*params)
    if weight_alpha is None:
        weight_alpha = params.alpha
    if weight_beta is None:
        weight_beta = params.beta
    q = q if isinstance(q, Poly) else Poly(np.atleast_1d(q))
    if extra_monomial_power:
        if extra_monomial_power < 0:
            raise ValueError("extra_monomial_power must be non-negative")
        q = Poly(np.concatenate([np.zeros(extra_monomial_power, dtype=complex), q.coeffs]))
    res = integrate_polys(path, [q], weight_alpha, weight_beta, jacobi=params, tol=tol)
    return res[0]


# ----------------------------------------------------------------- geometry


def segment_distance(seg, z):
    """Euclidean distance from ``z`` to one segment."""
    z = complex(z)
    if isinstance(seg, Line):
        d = seg.b - seg.a
        s = np.clip(((z - seg.a) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
        return float(abs(z - (seg.a + s * d)))
    if isinstance(seg, Ray):
        x = max(((z - seg.origin) * np.conj(seg.direction)).real, 0.0)
        return float(abs(z - seg.point(x)))
    best = min(abs(z - seg.start), abs(z - seg.end))
    phi = np.angle(z - seg.center)
    rel = ((phi - seg.theta0) * np.sign(seg.sweep)) % (2 * np.pi)
    if rel <= abs(seg.sweep) and z != seg.center:
        best = min(best, abs(abs(z - seg.center) - seg.radius))
    return float(best)


def distance_to_path(path, z):
    """Euclidean distance from ``z`` to the path."""
    return min(segment_distance(seg, z) for seg in path.segments)


def winding_number(path, p, samples_per_segment=256):
    """Winding number of a closed path about ``p``."""
    if not path.closed:
        raise GeometryError("winding number needs a closed path")
    if distance_to_path(path, p) < 1e-12:
        raise GeometryError("point lies on the path")
    total = 0.0
    for seg in path.segments:
        s = np.linspace(0.0, 1.0, samples_per_segment)
        for _ in range(DEPTH_CAP):
            a = np.angle(seg.point(s) - p)
            d = _wrap(np.diff(a))
            if np.all(np.abs(d) < np.pi / 4):
                break
            s = np.linspace(0.0, 1.0, 2 * len(s) - 1)
        else:
            raise RefinementLimit("winding number sampling")
        total += d.sum()
    return int(round(total / (2 * np.pi)))


def polyline(path, points_per_segment=128, truncation=10.0):
    """Points along the path; rays are cut at distance ``truncation``."""
    out = []
    for seg in path.segments:
        if isinstance(seg, Ray):
            x = np.concatenate([[0.0], np.geomspace(1e-3, truncation, points_per_segment - 1)])
            z = seg.point(x)
            if seg.inward:
                z = z[::-1]
        else:
            z = seg.point(np.linspace(0.0, 1.0, points_per_segment))
        if out and abs(out[-1][-1] - z[0]) < 1e-12:
            z = z[1:]
        out.append(np.asarray(z, dtype=complex))
    return np.concatenate(out)


def polyline_csv(path, points_per_segment=128, truncation=10.0):
    """CSV text with columns ``re,im``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im"])
    for z in polyline(path, points_per_segment, truncation):
        w.writerow([repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
