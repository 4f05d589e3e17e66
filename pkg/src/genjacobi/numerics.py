"""Scalar special functions, a small polynomial type and a root finder.

Everything here works in double precision.  Gamma-function ratios are
formed in log space and exponentiated once, which keeps the large
constants that show up for n around 20 and |alpha|, |beta| around 40
inside the floating point range.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import special as _sp

from .errors import NoConvergence, PoleError

#: Distance below which a number is treated as an integer.
INT_TOL = 1e-9
_PRODUCT_CAP = 256

def nearest_int(x, tol=INT_TOL):
    """Return the integer within ``tol`` of ``x`` or None.

    Complex input only counts as integral when its imaginary part is
    below ``tol`` as well.
    """
    x = complex(x)
    if abs(x.imag) > tol:
        return None
    k = round(x.real)
    if abs(x.real - k) <= tol:
        return int(k)
    return None


def is_pole(z, tol=INT_TOL):
    """True if ``z`` is within ``tol`` of a non-positive integer."""
    k = nearest_int(z, tol)
    return k is not None and k <= 0


def log_gamma(z):
    """Principal branch of log Gamma(z), cut along the negative real axis.

    Real arguments are treated as approached from above, so on the cut
    the imaginary part is the one ``scipy.special.loggamma`` gives for
    ``complex(x, +0.0)``.

    Raises
    ------
    PoleError
        If ``z`` is within ``INT_TOL`` of 0, -1, -2, ...
    """
    z = complex(z)
    if is_pole(z):
        raise PoleError(f"Gamma has a pole at {z}")
    return complex(_sp.loggamma(z))


def gamma(z):
    """Gamma(z) for complex ``z``; real input with a real result gives a float."""
    lg = log_gamma(z)
    if complex(z).imag == 0.0:
        # imaginary part of lg is a multiple of pi on the real axis
        sign = 1.0 if round(lg.imag / math.pi) % 2 == 0 else -1.0
        return sign * math.exp(lg.real)
    return cmath.exp(lg)


def rgamma(z):
    """1/Gamma(z), entire: exactly 0 at the poles of Gamma."""
    if is_pole(z):
        return 0.0
    g = gamma(z)
    return 1.0 / g


def reflection_check(x):
    """Residual ``|sin(pi x) Gamma(x) Gamma(1-x) - pi|``.

    A diagnostic for the gamma implementation; both ``x`` and ``1-x`` must
    be off the poles.
    """
    x = complex(x)
    val = cmath.sin(math.pi * x) * cmath.exp(log_gamma(x) + log_gamma(1.0 - x))
    return abs(val - math.pi)


def falling_factorial_binom(a, k):
    """a (a-1) ... (a-k+1) / k!, an entire function of ``a``."""
    out = 1.0 + 0j
    for j in range(k):
        out *= (a - j) / (j + 1)
    return out


def binom_general(a, k):
    """Generalized binomial coefficient Gamma(a+1) / (Gamma(k+1) Gamma(a-k+1)).

    ``k`` is a non-negative integer, ``a`` any complex number.  Up to
    k = 256 the falling-factorial product is used; beyond that, or on
    overflow, the ratio is evaluated through ``log_gamma``.  When ``Gamma(a-k+1)`` sits at a
    pole the coefficient is zero unless ``Gamma(a+1)`` is at a pole too;
    in that case the falling-factorial product is used.

    Returns a float for real ``a`` and a complex number otherwise.
    """
    k = int(k)
    if k < 0:
        return 0.0
    if k == 0:
        return 1.0
    a_c = complex(a)
    real_input = a_c.imag == 0.0
    bottom_pole = is_pole(a_c - k + 1)
    if bottom_pole:
        if is_pole(a_c + 1):
            val = falling_factorial_binom(round(a_c.real) if real_input else a_c, k)
            return val.real if real_input else val
        return 0.0
    if k <= _PRODUCT_CAP:
        # k rounding errors instead of eps * |log Gamma|
        try:
            val = falling_factorial_binom(a_c.real if real_input else a_c, k)
        except OverflowError:
            val = complex("inf")
        if cmath.isfinite(val):
            return val.real if real_input else val
    lg = log_gamma(a_c + 1) - log_gamma(k + 1.0) - log_gamma(a_c - k + 1)
    if real_input:
        sign = 1.0 if round(lg.imag / math.pi) % 2 == 0 else -1.0
        return sign * math.exp(lg.real)
    return cmath.exp(lg)


def kappa_sign(n, alpha, beta, tol=INT_TOL):
    """Sign of (-1)^n (alpha+1)...(alpha+n) (beta+1)...(beta+n).

    Counts negative factors instead of multiplying; returns 0 when any
    factor is within ``tol`` of zero.
    """
    negatives = n
    for p in (alpha, beta):
        for j in range(1, n + 1):
            f = p + j
            if abs(f) <= tol:
                return 0
            if f < 0:
                negatives += 1
    return -1 if negatives % 2 else 1


def log1p_complex(z):
    """Accurate log(1 + z) for complex arrays, including tiny ``z``.

    numpy's complex log1p drops the real part for very small arguments.
    """
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    small = np.abs(z) < 0.5
    with np.errstate(invalid="ignore", divide="ignore"):
        re_small = 0.5 * np.log1p(2.0 * x + x * x + y * y)
        im_small = np.arctan2(y, 1.0 + x)
        big = np.log(1.0 + z)
    return np.where(small, re_small + 1j * im_small, big)


@dataclass(frozen=True, eq=False)
class Poly:
    """Polynomial in the monomial basis, coefficients in ascending degree.

    The coefficient array is trimmed of trailing zeros, so ``degree`` is
    the index of the last nonzero entry.  The zero polynomial has an empty
    coefficient array and ``degree`` None.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs))
        if not np.iscomplexobj(c):
            c = c.astype(float)
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def monomial(cls, k, scale=1.0):
        c = np.zeros(k + 1)
        c[k] = 1.0
        return cls(c * scale)

    @property
    def degree(self):
        return len(self.coeffs) - 1 if len(self.coeffs) else None

    @property
    def lead(self):
        return self.coeffs[-1] if len(self.coeffs) else 0.0

    def __call__(self, z):
        return poly_eval(self, z)

    def __add__(self, other):
        return poly_add(self, other)

    def __mul__(self, other):
        if isinstance(other, Poly):
            return poly_mul(self, other)
        return Poly(self.coeffs * other)

    __rmul__ = __mul__

    def __neg__(self):
        return Poly(-self.coeffs)

    def __sub__(self, other):
        return poly_add(self, -other)

    def deriv(self):
        return poly_derivative(self)

    def monic(self):
        if self.degree is None:
            raise ValueError("zero polynomial has no monic form")
        return Poly(self.coeffs / self.coeffs[-1])

    def __repr__(self):
        return f"Poly({self.coeffs!r})"


def poly_eval(p, z):
    """Horner evaluation; ``z`` may be a scalar or an array."""
    z = np.asarray(z)
    c = p.coeffs
    if len(c) == 0:
        return np.zeros_like(z, dtype=complex if np.iscomplexobj(z) else float)[()]
    out = np.full(z.shape, c[-1], dtype=np.result_type(c, z, float))
    for a in c[-2::-1]:
        out = out * z + a
    return out[()]


def poly_add(p, q):
    return Poly(npoly.polyadd(p.coeffs if len(p.coeffs) else [0.0],
                              q.coeffs if len(q.coeffs) else [0.0]))


def poly_mul(p, q):
    if p.degree is None or q.degree is None:
        return Poly([])
    return Poly(npoly.polymul(p.coeffs, q.coeffs))


def poly_derivative(p):
    if p.degree is None or p.degree == 0:
        return Poly([])
    return Poly(npoly.polyder(p.coeffs))


def _initial_guesses(c, rng):
    n = len(c) - 1
    # radius from the geometric mean of the roots, clipped by the Cauchy bound
    r = abs(c[0] / c[-1]) ** (1.0 / n) if c[0] != 0 else 1.0
    cauchy = 1.0 + np.max(np.abs(c[:-1] / c[-1]))
    r = min(max(r, 1e-3), cauchy)
    phase = 2 * np.pi * np.arange(n) / n + 0.4 + 0.1 * rng.random(n)
    return r * (1.0 + 0.05 * rng.random(n)) * np.exp(1j * phase)


def aberth_refine(z, f, df, bound, maxiter=200):
    """Refine root approximations ``z`` of a function given by callables.

    ``f`` and ``df`` evaluate the function and its derivative on arrays;
    ``bound(z)`` is the rounding level of ``f`` at ``z``.  Aberth steps
    keep the approximations apart, so clustered roots are separated even
    when the evaluation is only accurate near the roots.
    """
    z = np.array(z, dtype=complex)
    n = len(z)
    eps = np.finfo(float).eps
    for _ in range(maxiter):
        fz, dfz = f(z), df(z)
        done = np.abs(fz) <= bound(z)
        if done.all():
            return z
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = fz / dfz
            step = ratio / (1.0 - ratio * inv.sum(axis=1))
        step = np.where(done | ~np.isfinite(step), 0.0, step)
        z = z - step
        if np.all(np.abs(step) <= 4 * eps * np.maximum(1.0, np.abs(z))):
            return z
    if n and not np.all(np.abs(f(z)) <= 1e3 * bound(z)):
        raise NoConvergence("Aberth refinement did not converge")
    return z


def find_roots(p, tol=1e-10, maxiter=500, seed=0):
    """All roots of ``p`` by Aberth-Ehrlich simultaneous iteration.

    Starting points lie on a slightly perturbed circle (``seed`` fixes the
    perturbation).  Converged roots get two Newton polishing steps.  Each
    returned root ``r`` satisfies ``|p(r)| <= tol * scale`` with ``scale =
    max|c_j| * max(1, |r|)**deg``.

    Raises
    ------
    NoConvergence
        If the iteration cap is reached or a root fails the residual check.
    """
    deg = p.degree
    if deg is None or deg < 1:
        raise ValueError("find_roots needs a polynomial of degree >= 1")
    c = np.asarray(p.coeffs, dtype=complex)
    # roots at the origin are split off exactly
    nzero = int(np.flatnonzero(c)[0])
    c = c[nzero:]
    roots = [0j] * nzero
    n = len(c) - 1
    if n == 0:
        return np.array(roots, dtype=complex)
    if n == 1:
        roots.append(-c[0] / c[1])
        return np.array(roots, dtype=complex)

    monic = Poly(c / c[-1])
    dmonic = monic.deriv()
    rng = np.random.default_rng(seed)
    z = _initial_guesses(monic.coeffs, rng)
    eps = np.finfo(float).eps
    absc = np.abs(monic.coeffs)
    converged = np.zeros(n, dtype=bool)
    for _ in range(maxiter):
        pz = monic(z)
        dpz = dmonic(z)
        # rounding-level residual bound from the running error of Horner
        bound = 4 * n * eps * Poly(absc)(np.abs(z))
        converged = np.abs(pz) <= bound
        if converged.all():
            break
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            step = ratio / (1.0 - ratio * inv.sum(axis=1))
        step = np.where(converged | ~np.isfinite(step), 0.0, step)
        z = z - step
        if np.all(np.abs(step) <= 4 * eps * np.maximum(1.0, np.abs(z))):
            break
    else:
        raise NoConvergence(f"Aberth iteration did not converge in {maxiter} steps")

    for _ in range(2):
        pz, dpz = monic(z), dmonic(z)
        ok = dpz != 0
        cand = np.where(ok, z - pz / np.where(ok, dpz, 1.0), z)
        better = np.abs(monic(cand)) < np.abs(pz)
        z = np.where(better, cand, z)

    orig = np.asarray(p.coeffs, dtype=complex)
    scale = np.max(np.abs(orig)) * np.maximum(1.0, np.abs(z)) ** deg
    resid = np.abs(Poly(orig)(z))
    if np.any(resid > tol * scale):
        raise NoConvergence(
            f"root residual {np.max(resid / scale):.3g} exceeds tolerance {tol:g}")
    roots.extend(z.tolist())
    return np.array(roots, dtype=complex)
