"""The 2x2 Riemann-Hilbert problem solved by the Jacobi polynomials.

Y(z) = [[c_n P_n(z),         c_n/(2 pi i) int P_n(t) w(t)/(t-z) dt],
        [d_{n-1} P_{n-1}(z), d_{n-1}/(2 pi i) int P_{n-1}(t) w(t)/(t-z) dt]]

with the integrals over the double loop, c_n the reciprocal leading
coefficient and d_{n-1} fixed by the closed form of the top moment.  Y is
analytic off the contour, jumps by Y_+ = Y_- [[1, w], [0, 1]], and
behaves like diag(z^n, z^-n) at infinity.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .contour import (Arc, build_gamma_double_loop, distance_to_path, integrate_polys,
                      segment_distance, weight_on_path)
from .errors import ConditionViolated, SelfIntersectionTooClose, TooCloseToContour
from .jacobi import JacobiEvaluator, JacobiParams, normalized_jacobi
from .numerics import Poly, nearest_int
from .verify import orth_main_rhs

CLEARANCE = 1e-3
FAR_FIELD = 4.0
_TWO_PI_I = 2j * np.pi


def rh_contour(xi=0.0, radius=0.5, radius_neg=0.25):
    """Double loop used for the RH problem; the negative loops are smaller so
    that the two circles around each branch point do not coincide."""
    return build_gamma_double_loop(xi, radius, radius_neg=radius_neg)


def check_rh_condition(n, alpha, beta):
    """Raise ConditionViolated unless n >= 1 and none of -n-a-b, n+a, n+b is a positive integer."""
    if n < 1:
        raise ConditionViolated("the RH characterization needs n >= 1")
    for name, v in (("-n-alpha-beta", -n - complex(alpha) - complex(beta)),
                    ("n+alpha", n + complex(alpha)), ("n+beta", n + complex(beta))):
        k = nearest_int(v)
        if k is not None and k >= 1:
            raise ConditionViolated(f"{name} = {k} is a positive integer")


@dataclass
class YMatrix:
    z: complex
    entries: np.ndarray
    c_n: complex
    d_nm1: complex

    @property
    def det(self):
        Y = self.entries
        return Y[0, 0] * Y[1, 1] - Y[0, 1] * Y[1, 0]


class RHSolution:
    """Evaluator of Y for one parameter triple on a fixed contour."""

    def __init__(self, n, alpha, beta, path=None, tol=1e-12):
        check_rh_condition(n, alpha, beta)
        self.n, self.alpha, self.beta = n, alpha, beta
        self.path = rh_contour() if path is None else path
        self.tol = tol
        self.c_n = normalized_jacobi(n, alpha, beta).monic_factor
        self.d_nm1 = -_TWO_PI_I / orth_main_rhs(n - 1, n - 1, alpha, beta)
        self._pn = JacobiEvaluator(n, alpha, beta)
        self._pm = JacobiEvaluator(n - 1, alpha, beta)
        self._params = (JacobiParams(n, alpha, beta), JacobiParams(n - 1, alpha, beta))

    def cauchy(self, m, z, subtracted=None):
        """int P_m(t) w(t) / (t - z) dt for m in {n, n-1}.

        Far from the contour the orthogonality of P_m to lower powers
        gives the same value as z^-m int t^m P_m w / (t - z), which avoids
        the cancellation of the plain form.
        """
        params = self._params[0] if m == self.n else self._params[1]
        if subtracted is None:
            subtracted = abs(z) > FAR_FIELD
        k = m if subtracted else 0
        q = np.zeros(k + 1, dtype=complex)
        q[k] = 1.0
        res = integrate_polys(self.path, [Poly(q)], self.alpha, self.beta, jacobi=params,
                              cauchy_at=z, tol=self.tol)
        return res.value[0] / z**k if k else res.value[0]

    def __call__(self, z, clearance=CLEARANCE):
        z = complex(z)
        if distance_to_path(self.path, z) < clearance:
            raise TooCloseToContour(f"z = {z} is within {clearance} of the contour")
        Y = np.empty((2, 2), dtype=complex)
        Y[0, 0] = self.c_n * self._pn(z)[0]
        Y[1, 0] = self.d_nm1 * self._pm(z)[0]
        Y[0, 1] = self.c_n / _TWO_PI_I * self.cauchy(self.n, z)
        Y[1, 1] = self.d_nm1 / _TWO_PI_I * self.cauchy(self.n - 1, z)
        return YMatrix(z, Y, self.c_n, self.d_nm1)


def rh_build_Y(n, alpha, beta, z, clearance=CLEARANCE, path=None):
    """Y(z) as a YMatrix (see ``RHSolution``)."""
    return RHSolution(n, alpha, beta, path)(z, clearance)


def _neville_at_zero(h, f):
    # polynomial extrapolation of f(h) to h = 0
    p = [np.asarray(v, dtype=complex) for v in f]
    m = len(h)
    for k in range(1, m):
        for i in range(m - k):
            p[i] = (h[i + k] * p[i] - h[i] * p[i + 1]) / (h[i + k] - h[i])
    return p[0]


@dataclass
class JumpCheck:
    t: complex
    residual: float
    y_plus: np.ndarray
    y_minus: np.ndarray
    weight: complex


def default_jump_points(path):
    """(segment, s) pairs: two points on every circle, away from the real axis."""
    pts = []
    for i, seg in enumerate(path.segments):
        if isinstance(seg, Arc):
            pts += [(i, 0.3), (i, 0.7)]
    return pts


def rh_check_jump(sol, segment, s, offset=0.02, levels=5):
    """Residual of Y_+ = Y_- J at the contour point (segment, s).

    Y is evaluated at t +- delta nu with nu the left normal and delta =
    offset / 2^j, j < levels; each side is extrapolated to delta = 0.
    The residual is max |Y_+ - Y_- J| / max(1, max |Y|).
    """
    path = sol.path
    t, w, tangent = weight_on_path(path, segment, s, sol.alpha, sol.beta)
    for j, seg in enumerate(path.segments):
        d = segment_distance(seg, t) if j != segment else np.inf
        if d < 10 * offset:
            raise SelfIntersectionTooClose(
                f"contour point {t} is {d:.3g} from another piece of the contour")
    nu = 1j * tangent
    h = [offset / 2**j for j in range(levels)]
    plus = [sol(t + d * nu, clearance=0.0).entries for d in h]
    minus = [sol(t - d * nu, clearance=0.0).entries for d in h]
    Yp = _neville_at_zero(h, plus)
    Ym = _neville_at_zero(h, minus)
    J = np.array([[1.0, w], [0.0, 1.0]])
    res = np.max(np.abs(Yp - Ym @ J)) / max(1.0, np.max(np.abs(Yp)), np.max(np.abs(Ym)))
    return JumpCheck(t, float(res), Yp, Ym, complex(w))


def default_det_points():
    ang = 0.3 + 2 * np.pi * np.arange(7) / 7
    return list(3.0 * np.exp(1j * ang)) + [0.5j, -0.4 - 0.6j, 0.7 + 0.8j]


@dataclass
class RHReport:
    n: int
    alpha: complex
    beta: complex
    jump_residuals: list
    det_residuals: list
    decay_ratio: float
    decay_values: list
    d_crosscheck: float
    boundedness: list = field(default_factory=list)
    tol_jump: float = 1e-6
    tol_det: float = 1e-8

    @property
    def max_jump(self):
        return max(self.jump_residuals, default=0.0)

    @property
    def max_det(self):
        return max(self.det_residuals, default=0.0)

    @property
    def decay_ok(self):
        return abs(self.decay_ratio / 2.0 - 1.0) <= 0.1

    @property
    def passed(self):
        return self.max_jump <= self.tol_jump and self.max_det <= self.tol_det and self.decay_ok

    def as_dict(self):
        return {
            "jump_residuals": list(self.jump_residuals),
            "max_jump_residual": self.max_jump,
            "det_residuals": list(self.det_residuals),
            "max_det_residual": self.max_det,
            "decay_values": list(self.decay_values),
            "decay_ratio": self.decay_ratio,
            "d_crosscheck": self.d_crosscheck,
            "boundedness": [{"point": p, "distance": d, "max_abs": m}
                            for p, d, m in self.boundedness],
            "verdict": "PASS" if self.passed else "FAIL",
        }


def rh_boundedness_probe(sol, distances=(1e-2, 1e-3)):
    """max |Y| next to the points where the contour crosses itself.

    Reported only: no bound is asserted.
    """
    out = []
    lines = [seg for seg in sol.path.segments if not isinstance(seg, Arc)]
    points = {complex(sol.path.segments[0].a)}
    for seg in lines:
        points.add(complex(seg.b))
    for p in sorted(points, key=lambda c: (c.real, c.imag)):
        for d in distances:
            # step off in the direction that stays farthest from the contour
            cand = p + d * np.exp(1j * (np.pi / 8 + np.pi / 4 * np.arange(8)))
            z = max(cand, key=lambda c: distance_to_path(sol.path, c))
            try:
                m = float(np.max(np.abs(sol(z, clearance=0.0).entries)))
            except Exception:  # noqa: BLE001 - probe only; record failure as nan
                m = float("nan")
            out.append((p, d, m))
    return out


def rh_verify(n, alpha, beta, probe=False):
    """Run the jump, determinant and normalization checks.

    The determinant is checked at 10 points off the contour, the jump at
    two points on each circle, and the normalization through the 1/z decay
    of Y_22 z^n - 1 between |z| = 50 and 100.
    """
    sol = RHSolution(n, alpha, beta)
    jumps = [rh_check_jump(sol, seg, s).residual for seg, s in default_jump_points(sol.path)]
    dets = [abs(sol(z).det - 1.0) for z in default_det_points()]
    z50, z100 = 50 * cmath.exp(0.7j), 100 * cmath.exp(0.7j)
    dev = [abs(sol(z).entries[1, 1] * z**n - 1.0) for z in (z50, z100)]
    ratio = dev[0] / dev[1] if dev[1] > 0 else float("inf")
    # the closed form behind d_{n-1} against quadrature
    q = np.zeros(n, dtype=complex)
    q[n - 1] = 1.0
    quad = integrate_polys(sol.path, [Poly(q)], alpha, beta,
                           jacobi=JacobiParams(n - 1, alpha, beta), tol=1e-12)
    closed = orth_main_rhs(n - 1, n - 1, alpha, beta)
    cross = abs(quad.value[0] - closed) / abs(closed)
    bounded = rh_boundedness_probe(sol) if probe else []
    return RHReport(n, alpha, beta, jumps, dets, ratio, dev, cross, bounded)


__all__ = [
    "CLEARANCE", "JumpCheck", "RHReport", "RHSolution", "YMatrix", "check_rh_condition",
    "default_det_points", "default_jump_points", "rh_boundedness_probe", "rh_build_Y",
    "rh_check_jump", "rh_contour", "rh_verify",
]
