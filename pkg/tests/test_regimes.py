import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genjacobi.errors import CapExceeded, IntegerParameter, KappaZero
from genjacobi.regimes import (CHARACTERIZING, ConditionBlock, E_of, classify, fl, hilbert_klein,
                               quasi_blocks, quasi_lower_bound, zero_report)

mpmath.mp.dps = 60


def brute_count_in_interval(n, a, b):
    """Zeros of P_n in (-1, 1) from high-precision roots of the exact coefficients."""
    A, B = mpmath.mpf(a), mpmath.mpf(b)
    coeffs = [mpmath.mpf(0)] * (n + 1)
    for k in range(n + 1):
        c = mpmath.binomial(n + A, n - k) * mpmath.binomial(n + B, k)
        p = np.polynomial.polynomial.polymul(
            np.polynomial.polynomial.polypow([-1, 1], k),
            np.polynomial.polynomial.polypow([1, 1], n - k))
        for j, v in enumerate(p):
            coeffs[j] += c * int(round(v))
    while coeffs and abs(coeffs[-1]) < mpmath.mpf(10) ** -40 * max(abs(c) for c in coeffs):
        coeffs.pop()
    if len(coeffs) < 2:
        return 0
    roots = mpmath.polyroots(coeffs[::-1], maxsteps=400, extraprec=400)
    return sum(1 for r in roots if abs(mpmath.im(r)) < mpmath.mpf(10) ** -30
               and -1 < mpmath.re(r) < 1)


def test_classical():
    r = classify(4, 0.5, 0.5)
    assert r.tag == "ClassicalReal"
    assert [(b.contour, b.count) for b in r.blocks] == [("[-1,1]", 4)]


def test_multialt51_row1():
    r = classify(5, 2.5, -3.7)
    assert r.tag == "MultiAlt51"
    g, d = r.blocks
    assert (g.contour, g.max_vanishing_degree, g.weight_alpha, g.weight_beta) == (
        "gamma1", 2, 2.5, -3.7)
    assert (d.contour, d.count, d.weight_alpha) == ("[-1,1]", 2, 2.5)
    assert abs(d.weight_beta - (-0.7)) <= 1e-14
    assert d.expect_nonzero_at == 2


def test_multi54i_counts():
    r = classify(75, -37.4, -25.1)
    assert r.tag == "Multi54i"
    assert r.counts() == [37, 25, 13]
    assert [b.contour for b in r.blocks] == ["gammam1", "gamma1", "[-1,1]"]
    gm, g1, iv = r.blocks
    assert abs(gm.weight_beta - (-0.1)) < 1e-12 and gm.weight_alpha == -37.4
    assert abs(g1.weight_alpha - (-0.4)) < 1e-12 and g1.weight_beta == -25.1
    assert r.total_conditions == 75


def test_multilast():
    r = classify(5, -4.5, -4.3)
    assert r.tag == "MultiLast"
    assert [(b.contour, b.max_vanishing_degree) for b in r.blocks] == [
        ("gammam1", 0), ("gamma1", 0), ("gammainf", 2)]
    assert r.total_conditions == 5


@pytest.mark.parametrize("n, a, b, tag", [
    (4, 0.5, -10.3, "RealOnHalfLine"), (5, 0.3, -6.5, "MultiAlt52"),
    (5, -7.5, -1.2, "Multi54ii"), (5, -1.7, -7.4, "Multi54iii"),
    (3, -3.6, -4.7, "SingleContour"), (4, 0.3, -4.5, "DegenerateSingle"),
    (6, -3.3, 1.2, "MultiAlt51"), (5, -12.3, -3.4, "MultiAlt51")])
def test_tags(n, a, b, tag):
    assert classify(n, a, b).tag == tag


def test_degenerate_single_has_one_nonzero_condition():
    r = classify(4, 0.3, -4.5)
    assert len(r.blocks) == 1
    (blk,) = r.blocks
    assert blk.count == 0 and blk.expect_nonzero_at == 0
    assert r.alternative.tag == "SingleContour"


def test_divergence_flag():
    r = classify(2, -2.3, -2.25)
    assert r.divergent
    assert any("diverges" in (b.divergence_note or "") for b in r.blocks)


@pytest.mark.parametrize("a, b", [(-2.0, 0.5), (0.5, -3.0), (-1.5, -2.5)])
def test_integer_parameters_rejected(a, b):
    with pytest.raises(IntegerParameter):
        classify(4, a, b)


def test_block_invariants():
    with pytest.raises(ValueError):
        ConditionBlock("gamma1", 0.5, 0.5, 2, 4)
    assert ConditionBlock("gamma1", 0.5, 0.5, -5).max_vanishing_degree == -1


def _hypotheses_hold(n, a, b):
    # any of the multiple orthogonality hypotheses for alpha, beta < -1, 2n + alpha + beta > 0
    s = n + a + b
    return s > -1 or a < -n or b < -n or (a > -n and b > -n and s < -1)


def test_exhaustiveness(rng):
    seen = set()
    for _ in range(10000):
        n = int(rng.integers(1, 13))
        a, b = rng.uniform(-15, 15, 2)
        try:
            r = classify(n, a, b)
        except IntegerParameter:
            continue
        seen.add(r.tag)
        if r.tag == "Unclassified":
            assert a < -1 and b < -1 and 2 * n + a + b > 0, (n, a, b)
            assert not _hypotheses_hold(n, a, b), (n, a, b)
        if r.characterizing:
            assert r.total_conditions >= n, (n, a, b)
        if r.tag == "MultiLast":
            assert r.total_conditions == n, (n, a, b)
    assert CHARACTERIZING <= seen


_MIRROR_TAG = {"Multi54ii": "Multi54iii", "Multi54iii": "Multi54ii"}


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 15), st.floats(-20, 20), st.floats(-20, 20))
def test_swap_symmetry(n, a, b):
    try:
        r = classify(n, a, b)
    except IntegerParameter:
        return
    s = classify(n, b, a)
    assert _MIRROR_TAG.get(r.tag, r.tag) == s.tag
    mirrored = sorted(((m.contour, m.weight_alpha, m.weight_beta, m.max_vanishing_degree,
                        m.extra_monomial_power) for m in (blk.mirrored() for blk in r.blocks)))
    other = sorted((m.contour, m.weight_alpha, m.weight_beta, m.max_vanishing_degree,
                    m.extra_monomial_power) for m in s.blocks)
    assert mirrored == other


def test_floor_and_E():
    assert fl(2.9999999999999) == 3 and fl(-2.5) == -3
    assert E_of(-0.5) == 0 and E_of(3.0) == 2 and E_of(3.7) == 3


@pytest.mark.parametrize("n, a, b, expected", [(6, 0.5, 0.5, 6), (75, -37.4, -25.1, 13),
                                               (5, -2.3, 0.5, 3)])
def test_hilbert_klein_examples(n, a, b, expected):
    assert hilbert_klein(n, a, b) == expected


def test_hilbert_klein_kappa_zero():
    with pytest.raises(KappaZero):
        hilbert_klein(1, -1.0, 0.5)


def test_hilbert_klein_brute_force(rng):
    for _ in range(40):
        n = int(rng.integers(1, 12))
        a, b = rng.uniform(-15, 15, 2)
        assert hilbert_klein(n, a, b) == brute_count_in_interval(n, a, b), (n, a, b)


@pytest.mark.parametrize("n, a, b, expected", [(5, 2.5, -3.7, 2), (75, -37.4, -25.1, 13),
                                               (4, 0.5, 0.5, 4), (5, -4.5, -4.3, 0)])
def test_quasi_lower_bound(n, a, b, expected):
    assert quasi_lower_bound(n, a, b) == expected


def test_quasi_blocks():
    blocks = quasi_blocks(5, -2.3, 0.5)
    assert [b.contour for b in blocks] == ["gammam1", "gamma1"]
    assert blocks[1].weight_alpha == pytest.approx(-0.3) and blocks[1].count == 3


def test_zero_report_examples():
    z = zero_report(4, 0.5, 0.5)
    assert z.count_in_minus1_1 == 4 == z.hilbert_klein_N
    assert z.regions == ("interval",) * 4
    z = zero_report(5, -2.3, 0.5)
    assert z.count_in_minus1_1 == 3
    assert sorted(z.regions).count("complex") == 2
    z = zero_report(2, 0.0, 0.0)
    assert np.allclose(z.roots, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15, rtol=0)
    with pytest.raises(CapExceeded):
        zero_report(21, 0.5, 0.5)


def test_zero_report_degree_drop():
    z = zero_report(3, 0.5, -5.5)
    assert len(z.roots) == 1 and "degree drops" in z.notes
