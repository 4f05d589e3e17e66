import math
import warnings
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genjacobi.errors import DegreeReduction, GeometryError
from genjacobi.jacobi import (JacobiEvaluator, degree_reduced, eval_scale, identity_both,
                              identity_degree_reduction, identity_neg_k, jacobi_coeffs,
                              jacobi_eval, leading_coefficient, normalized_jacobi,
                              rodrigues_residual)
from genjacobi.numerics import binom_general

mpmath.mp.dps = 50
EPS = np.finfo(float).eps


def mp_jacobi(n, a, b, z):
    # terminating hypergeometric series in (1 - z)/2, summed term by term
    a, b, z = mpmath.mpc(a), mpmath.mpc(b), mpmath.mpc(z)
    x = (1 - z) / 2
    s = mpmath.fsum(mpmath.rf(-n, k) * mpmath.rf(n + a + b + 1, k) / (mpmath.rf(a + 1, k)
                    * mpmath.factorial(k)) * x**k for k in range(n + 1))
    return complex(mpmath.binomial(n + a, n) * s)


def mp_coeffs(n, a, b):
    # monomial coefficients of the explicit sum, exactly in high precision
    a, b = mpmath.mpc(a), mpmath.mpc(b)
    out = [mpmath.mpc(0)] * (n + 1)
    for k in range(n + 1):
        c = mpmath.binomial(n + a, n - k) * mpmath.binomial(n + b, k)
        pm = np.poly1d([1, -1]) ** k
        pp = np.poly1d([1, 1]) ** (n - k)
        prod = (pm * pp).coeffs[::-1]
        for j, v in enumerate(prod):
            out[j] += c * int(round(v))
    return [complex(v / 2**n) for v in out]


params = st.floats(-12, 12).filter(lambda x: abs(x - round(x)) > 1e-3)


def test_small_degree_values():
    assert jacobi_eval(0, 1.5, -0.5, 0.3) == 1.0
    a, b, z = 0.7, -2.2, 0.3 + 0.4j
    assert abs(jacobi_eval(1, a, b, z) - ((a + b + 2) * z + (a - b)) / 2) <= 4 * EPS * 3
    assert abs(jacobi_eval(1, 0.5, 1.5, 0.0) + 0.5) <= 1e-15
    assert abs(jacobi_eval(2, 0.0, 0.0, 1.0) - 1.0) <= 1e-15
    for n in range(8):
        assert abs(jacobi_eval(n, -3.3, 0.4, 1.0) - binom_general(n - 3.3, n)) <= 1e-12 * max(
            1.0, abs(binom_general(n - 3.3, n)))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 20), params, params, st.floats(-3, 3), st.floats(-3, 3))
def test_eval_matches_hypergeometric(n, a, b, x, y):
    z = complex(x, y)
    ref = mp_jacobi(n, a, b, z)
    got = complex(jacobi_eval(n, a, b, z))
    assert abs(got - ref) <= 64 * (n + 1) * EPS * eval_scale(n, a, b, z)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 15), params, params, st.floats(-50, 50), st.floats(-50, 50))
def test_evaluator_matches_hypergeometric(n, a, b, x, y):
    z = complex(x, y)
    ev = JacobiEvaluator(n, a, b)
    val, scale = ev(z)
    ref = mp_jacobi(n, a, b, z)
    assert abs(complex(val) - ref) <= 64 * (n + 1) * EPS * float(scale)
    # the chosen expansion never cancels worse than the symmetric sum
    assert float(scale) <= eval_scale(n, a, b, z) * (1 + 1e-12)


def test_evaluator_scaled_mode():
    n, a, b = 6, 0.6, -9.3
    ev = JacobiEvaluator(n, a, b)
    for u in (0.01, 0.2 - 0.1j, 1e-4j):
        val, _ = ev(u=u)
        assert abs(complex(val) - mp_jacobi(n, a, b, 1 / u) * u**n) <= 1e-12 * max(
            1.0, abs(complex(val)))


def test_evaluator_near_degree_reduction_far_out():
    # leading coefficient tiny compared to the rest: symmetric sum cancels at large t
    n, a, b = 10, 0.6, -15.3
    ev = JacobiEvaluator(n, a, b)
    t = 1e4
    ref = mp_jacobi(n, a, b, t)
    assert abs(complex(ev(t)[0]) - ref) <= 1e-10 * abs(ref)


@pytest.mark.parametrize("n, a, b, expected", [
    (0, 0.3, 0.4, [1.0]), (1, 0.0, 0.0, [0.0, 1.0]), (2, 0.0, 0.0, [-0.5, 0.0, 1.5])])
def test_coeffs_examples(n, a, b, expected):
    assert np.allclose(jacobi_coeffs(n, a, b).coeffs, expected, rtol=0, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 14), params, params, st.floats(-3, 3))
def test_coeffs_correctly_rounded(n, a, b, y):
    beta = complex(b, y) if y else b
    got = np.asarray(jacobi_coeffs(n, a, beta).coeffs, dtype=complex)
    ref = mp_coeffs(n, a, beta)
    ref = np.asarray(ref)
    got = np.concatenate([got, np.zeros(len(ref) - len(got))])
    # exact arithmetic on the double inputs: a few ulps of each coefficient,
    # plus the working precision of the oracle for exact zeros
    floor = 1e-40 * np.max(np.abs(ref))
    assert np.all(np.abs(got - ref) <= 4 * EPS * np.abs(ref) + floor)


def test_coeffs_exact_rational_case():
    # alpha = beta = 1/2, n = 3: all arithmetic is dyadic-rational
    c = jacobi_coeffs(3, 0.5, 0.5).coeffs
    ref = mp_coeffs(3, 0.5, 0.5)
    assert np.array_equal(c, np.real(ref))


def test_leading_coefficient():
    assert leading_coefficient(1, 0.0, 0.0) == 1.0
    assert abs(leading_coefficient(2, 0.0, 0.0) - 1.5) <= 1e-15
    with pytest.warns(DegreeReduction):
        assert leading_coefficient(1, -0.5, -1.5) == 0.0
    assert degree_reduced(3, 0.2, -5.2) and not degree_reduced(3, 0.2, -2.7)
    nj = normalized_jacobi(4, 0.3, -2.1)
    assert abs(nj.monic.coeffs[-1] - 1.0) <= 1e-15
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert normalized_jacobi(2, -0.5, -2.5).monic_factor is None


@pytest.mark.parametrize("n, a, b, z, r", [(0, 0.7, -1.2, 0.3j, 0.2), (3, 0.4, -0.6, 2 + 1j, 0.5),
                                           (5, -2.3, 1.7, -3.0, 0.5), (4, 0.3 + 0.2j, -5.4, 0.5j, 0.4)])
def test_rodrigues(n, a, b, z, r):
    assert rodrigues_residual(n, a, b, z, r) <= 1e-8


def test_rodrigues_rejects_branch_points():
    with pytest.raises(GeometryError):
        rodrigues_residual(2, 0.5, 0.5, 0.8, 0.5)


@pytest.mark.parametrize("n, k, b, z", [(2, 1, 0.5, 0.3), (3, 3, 0.5, 1.0), (3, 2, -0.4, 2j)])
def test_identity_neg_k(n, k, b, z):
    assert identity_neg_k(n, k, b, z) <= 1e-10


@pytest.mark.parametrize("n, k, l, z", [(3, 1, 1, 0.5), (2, 1, 1, 1.0), (5, 2, 2, -2 + 1j)])
def test_identity_both(n, k, l, z):
    assert identity_both(n, k, l, z) <= 1e-10


@pytest.mark.parametrize("n, a, b, z", [(2, 0.3, -3.3, 0.7), (3, 0.5, -5.5, 0.0),
                                        (2, -0.25, -2.75, 5.0)])
def test_identity_degree_reduction(n, a, b, z):
    assert identity_degree_reduction(n, a, b, z) <= 1e-10


def test_identity_argument_checks():
    with pytest.raises(ValueError):
        identity_neg_k(2, 3, 0.5, 0.1)
    with pytest.raises(ValueError):
        identity_both(2, 1, 2, 0.1)
    with pytest.raises(ValueError):
        identity_degree_reduction(2, 0.3, 0.3, 0.1)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 12), params, params, st.floats(-2, 2), st.floats(-2, 2))
def test_symmetry(n, a, b, x, y):
    z = complex(x, y)
    lhs = complex(jacobi_eval(n, a, b, -z))
    rhs = (-1) ** n * complex(jacobi_eval(n, b, a, z))
    assert abs(lhs - rhs) <= 64 * (n + 1) * EPS * eval_scale(n, a, b, z)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), params, params, st.floats(-2, 2), st.floats(-2, 2))
def test_derivative_relation(n, a, b, x, y):
    z = complex(x, y)
    p = jacobi_coeffs(n, a, b)
    d = complex(p.deriv()(z))
    rhs = (n + a + b + 1) / 2 * complex(jacobi_eval(n - 1, a + 1, b + 1, z))
    tol = 1e-10 * max(1.0, eval_scale(n - 1, a + 1, b + 1, z) * abs(n + a + b + 1))
    assert abs(d - rhs) <= tol
