"""Jacobi polynomials P_n^(alpha, beta) for arbitrary complex parameters.

Evaluation uses the finite sum

    P_n(z) = 2^-n sum_k C(n+alpha, n-k) C(n+beta, k) (z-1)^k (z+1)^(n-k)

which is analytic in alpha and beta, so nothing here assumes the
classical range alpha, beta > -1.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import DegreeReduction, GeometryError
from .numerics import INT_TOL, Poly, binom_general, gamma, nearest_int, rgamma


@dataclass(frozen=True)
class JacobiParams:
    n: int
    alpha: complex
    beta: complex

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"degree label must be a non-negative integer, got {self.n}")


@dataclass(frozen=True)
class NormalizedJacobi:
    """P_n together with its monic normalization c_n = 1/leading."""

    params: JacobiParams
    coeffs: Poly
    leading: complex
    monic_factor: complex | None

    @property
    def monic(self):
        return Poly(self.coeffs.coeffs * self.monic_factor)


def _sum_coefficients(n, alpha, beta):
    b1 = [binom_general(n + alpha, n - k) for k in range(n + 1)]
    b2 = [binom_general(n + beta, k) for k in range(n + 1)]
    return [b1[k] * b2[k] for k in range(n + 1)]


def _compensated_sum(terms):
    # Neumaier summation along axis 0, applied to real and imaginary parts
    terms = np.asarray(terms)

    def _neumaier(x):
        s = np.zeros(x.shape[1:])
        c = np.zeros(x.shape[1:])
        for v in x:
            t = s + v
            big = np.abs(s) >= np.abs(v)
            c += np.where(big, (s - t) + v, (v - t) + s)
            s = t
        return s + c

    if np.iscomplexobj(terms):
        return _neumaier(terms.real) + 1j * _neumaier(terms.imag)
    return _neumaier(terms)


def jacobi_eval(n, alpha, beta, z):
    """Value of P_n^(alpha, beta) at ``z`` (scalar or array)."""
    z = np.asarray(z)
    coef = _sum_coefficients(n, alpha, beta)
    zm, zp = z - 1.0, z + 1.0
    terms = [coef[k] * zm**k * zp ** (n - k) for k in range(n + 1)]
    return (_compensated_sum(np.broadcast_arrays(*terms)) / 2.0**n)[()]


def eval_scale(n, alpha, beta, z):
    """Sum of the absolute values of the terms in the explicit sum at ``z``.

    Rounding error of ``jacobi_eval`` is a few ulps of this quantity, so
    it is the natural yardstick near zeros of P_n where relative error
    is meaningless.
    """
    z = np.asarray(z)
    coef = np.abs(np.asarray(_sum_coefficients(n, alpha, beta), dtype=complex))
    am, ap = np.abs(z - 1.0), np.abs(z + 1.0)
    return (sum(coef[k] * am**k * ap ** (n - k) for k in range(n + 1)) / 2.0**n)[()]


class JacobiEvaluator:
    """Evaluate P_n through whichever of three expansions cancels least.

    The candidates are the symmetric sum in (z-1) and (z+1), the expansion
    in powers of (z-1)/2 and the expansion in powers of (z+1)/2.  At each
    point the one with the smallest sum of absolute terms is used.  This
    matters when the leading coefficient is small compared to the others
    (near degree reduction) and |z| is large, or near one endpoint.
    """

    def __init__(self, n, alpha, beta):
        self.n = n
        self.sym = np.asarray(_sum_coefficients(n, alpha, beta), dtype=complex) / 2.0**n
        # P_n = sum_m C(n+a, n-m) C(n+a+b+m, m) ((z-1)/2)^m
        s = n + alpha + beta
        self.plus = np.array([binom_general(n + alpha, n - m) * binom_general(s + m, m)
                              for m in range(n + 1)], dtype=complex) / 2.0 ** np.arange(n + 1)
        self.minus = np.array([(-1) ** (n + m) * binom_general(n + beta, n - m)
                               * binom_general(s + m, m) for m in range(n + 1)],
                              dtype=complex) / 2.0 ** np.arange(n + 1)

    def __call__(self, z=None, u=None):
        """Values and term scales at z, or of P_n(1/u) u^n when ``u`` is given."""
        n = self.n
        if u is None:
            z = np.asarray(z, dtype=complex)
            a, b, c = z - 1.0, z + 1.0, np.ones_like(z)
        else:
            u = np.asarray(u, dtype=complex)
            a, b, c = 1.0 - u, 1.0 + u, u
        # powers 0..n of each base
        pa = [np.ones_like(a)]
        pb = [np.ones_like(b)]
        pc = [np.ones_like(c)]
        for _ in range(n):
            pa.append(pa[-1] * a)
            pb.append(pb[-1] * b)
            pc.append(pc[-1] * c)
        vals, scales = [], []
        for terms in (
            [self.sym[k] * pa[k] * pb[n - k] for k in range(n + 1)],
            [self.plus[m] * pa[m] * pc[n - m] for m in range(n + 1)],
            [self.minus[m] * pb[m] * pc[n - m] for m in range(n + 1)],
        ):
            T = np.array(terms)
            vals.append(T.sum(axis=0))
            scales.append(np.abs(T).sum(axis=0))
        S = np.array(scales)
        with np.errstate(invalid="ignore"):
            pick = np.argmin(np.where(np.isfinite(S), S, np.inf), axis=0)
        V = np.array(vals)
        return (np.take_along_axis(V, pick[None], 0)[0],
                np.take_along_axis(S, pick[None], 0)[0])


def _exact(x):
    # finite floats are exact rationals; complex values become pairs
    x = complex(x)
    return Fraction(x.real), Fraction(x.imag)


def _cmul(a, b):
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def _exact_binom(x, k):
    # C(x, k) = prod_{i<k} (x - i) / (i + 1), exactly
    out = (Fraction(1), Fraction(0))
    for i in range(k):
        out = _cmul(out, (x[0] - i, x[1]))
        out = (out[0] / (i + 1), out[1] / (i + 1))
    return out


def jacobi_coeffs(n, alpha, beta):
    """Monomial-basis coefficients of P_n^(alpha, beta) as a ``Poly``.

    The parameters are taken as the exact rationals their floating point
    values represent and the expansion of the explicit sum is carried out
    in exact rational arithmetic, so every coefficient is correctly
    rounded.  Small coefficients produced by cancellation (for instance
    the leading one near degree reduction) keep full relative accuracy.
    """
    a, b = _exact(alpha), _exact(beta)
    na, nb = (a[0] + n, a[1]), (b[0] + n, b[1])
    coef = [_cmul(_exact_binom(na, n - k), _exact_binom(nb, k)) for k in range(n + 1)]
    re = [Fraction(0)] * (n + 1)
    im = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        if coef[k] == (0, 0):
            continue
        # (z-1)^k (z+1)^(n-k) = sum_j e_j z^j with integer e_j
        for j in range(n + 1):
            e = 0
            for i in range(max(0, j - (n - k)), min(k, j) + 1):
                e += comb(k, i) * (-1) ** (k - i) * comb(n - k, j - i)
            if e:
                re[j] += coef[k][0] * e
                im[j] += coef[k][1] * e
    scale = Fraction(1, 2**n)
    if all(v == 0 for v in im) and not any(isinstance(v, complex) for v in (alpha, beta)):
        return Poly(np.array([float(v * scale) for v in re]))
    return Poly(np.array([complex(float(r * scale), float(i * scale)) for r, i in zip(re, im)]))


def degree_reduced(n, alpha, beta, tol=INT_TOL):
    """True iff -n-alpha-beta is in {1, ..., n} (within ``tol``)."""
    k = nearest_int(-n - complex(alpha) - complex(beta), tol)
    return k is not None and 1 <= k <= n


def leading_coefficient(n, alpha, beta):
    """Coefficient of z^n in P_n^(alpha, beta), 2^-n C(2n+alpha+beta, n).

    Returns exactly 0 and emits a ``DegreeReduction`` warning when the
    degree drops below n.  The exact integer criterion and the numeric
    size test against the remaining coefficients are both applied.
    """
    lead = binom_general(2 * n + complex(alpha) + complex(beta), n) / 2.0**n
    if isinstance(alpha, (int, float)) and isinstance(beta, (int, float)):
        lead = complex(lead).real
    scale = float(np.max(np.abs(jacobi_coeffs(n, alpha, beta).coeffs), initial=0.0))
    if degree_reduced(n, alpha, beta) or abs(lead) <= 1e-12 * max(scale, abs(lead)):
        warnings.warn(f"P_{n}^({alpha},{beta}) has degree < {n}", DegreeReduction,
                      stacklevel=2)
        return 0.0
    return lead


def normalized_jacobi(n, alpha, beta):
    """Bundle P_n with its leading coefficient and monic factor c_n."""
    params = JacobiParams(n, alpha, beta)
    coeffs = jacobi_coeffs(n, alpha, beta)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegreeReduction)
        lead = leading_coefficient(n, alpha, beta)
    factor = None if lead == 0 else 1.0 / lead
    return NormalizedJacobi(params, coeffs, lead, factor)


def _unwrapped_angles(points, center):
    ang = np.unwrap(np.angle(points - center))
    # principal value at the first point
    return ang - ang[0] + np.angle(points[0] - center)


def rodrigues_residual(n, alpha, beta, z, radius, npts=256):
    """Relative mismatch between the Rodrigues formula and ``jacobi_eval``.

    The n-th derivative of (t-1)^(n+alpha) (t+1)^(n+beta) at ``z`` is a
    Cauchy integral over the circle |t-z| = radius, done with the periodic
    trapezoidal rule.  Along the circle the powers use the branch that is
    principal at the start point z + radius and continuous from there; the
    prefactor (z-1)^-alpha (z+1)^-beta uses the same branch continued along
    the radius to ``z``.

    Returns ``|RHS - P_n(z)| / (1 + |P_n(z)|)``.
    """
    z = complex(z)
    if z in (1.0, -1.0) or abs(z - 1.0) <= radius or abs(z + 1.0) <= radius:
        raise GeometryError("the circle around z must exclude the branch points +-1")
    phi = 2 * np.pi * np.arange(npts) / npts
    t = z + radius * np.exp(1j * phi)
    a1 = _unwrapped_angles(t, 1.0)
    a2 = _unwrapped_angles(t, -1.0)
    log_g = ((n + alpha) * (np.log(np.abs(t - 1.0)) + 1j * a1)
             + (n + beta) * (np.log(np.abs(t + 1.0)) + 1j * a2))
    deriv = math.factorial(n) / radius**n * np.mean(np.exp(log_g - 1j * n * phi))

    ray = z + radius * np.linspace(1.0, 0.0, 65)
    b1 = _unwrapped_angles(ray, 1.0)[-1]
    b2 = _unwrapped_angles(ray, -1.0)[-1]
    log_pref = (-alpha * (math.log(abs(z - 1.0)) + 1j * b1)
                - beta * (math.log(abs(z + 1.0)) + 1j * b2))
    rhs = cmath.exp(log_pref) * deriv / (2.0**n * math.factorial(n))
    lhs = complex(jacobi_eval(n, alpha, beta, z))
    return abs(rhs - lhs) / (1.0 + abs(lhs))


def _rel_residual(lhs, rhs):
    lhs, rhs = complex(lhs), complex(rhs)
    denom = max(abs(lhs), abs(rhs))
    if denom == 0.0:
        return 0.0
    return abs(lhs - rhs) / denom


def identity_neg_k(n, k, beta, z):
    """Residual of P_n^(-k,beta) = G(n+b+1)/G(n+b+1-k) (n-k)!/n! ((z-1)/2)^k P_(n-k)^(k,b).

    Gamma ratio via reciprocal gamma so that a vanishing right-hand side
    comes out as an exact zero.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    z = complex(z)
    lhs = jacobi_eval(n, -k, beta, z)
    ratio = gamma(n + beta + 1) * rgamma(n + beta + 1 - k)
    rhs = (ratio * math.factorial(n - k) / math.factorial(n) * ((z - 1.0) / 2.0) ** k
           * jacobi_eval(n - k, k, beta, z))
    return _rel_residual(lhs, rhs)


def identity_both(n, k, l, z):
    """Residual of P_n^(-k,-l)(z) = 2^(-k-l) (z-1)^k (z+1)^l P_(n-k-l)^(k,l)(z)."""
    if k < 1 or l < 1 or k + l > n:
        raise ValueError("need k, l >= 1 and k + l <= n")
    z = complex(z)
    lhs = jacobi_eval(n, -k, -l, z)
    rhs = 2.0 ** (-k - l) * (z - 1.0) ** k * (z + 1.0) ** l * jacobi_eval(n - k - l, k, l, z)
    return _rel_residual(lhs, rhs)


def identity_degree_reduction(n, alpha, beta, z):
    """Residual of P_n = G(n+a+1)/G(k+a) (k-1)!/n! P_(k-1) when n+a+b = -k."""
    k = nearest_int(-(n + complex(alpha) + complex(beta)))
    if k is None or not 1 <= k <= n:
        raise ValueError("need n + alpha + beta = -k with k in 1..n")
    z = complex(z)
    lhs = jacobi_eval(n, alpha, beta, z)
    ratio = gamma(n + alpha + 1) * rgamma(k + alpha)
    rhs = ratio * math.factorial(k - 1) / math.factorial(n) * jacobi_eval(k - 1, alpha, beta, z)
    return _rel_residual(lhs, rhs)
