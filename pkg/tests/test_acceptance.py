"""Acceptance criteria, one test (and one PASS/FAIL summary line) each."""

import io
import itertools
import math
import time

import numpy as np
import pytest

from genjacobi.cli import main
from genjacobi.contour import build_interval, integrate
from genjacobi.errors import IntegerParameter
from genjacobi.jacobi import (identity_both, identity_degree_reduction, identity_neg_k,
                              rodrigues_residual)
from genjacobi.numerics import Poly
from genjacobi.regimes import classify, hilbert_klein, quasi_lower_bound, zero_report
from genjacobi.rh import rh_verify
from genjacobi.verify import characterize, verify_main, verify_regime

GRID_VALUES = (-5.4, -2.3, -0.7, 0.5, 2.6)
COMPLEX_PAIRS = ((0.4 + 0.2j, 0.4 - 0.2j), (-1.3 + 0.5j, 0.4 + 0.2j), (0.4 + 0.2j, -1.3 + 0.5j))


def test_criterion_1_main_grid(acceptance_log):
    t0 = time.perf_counter()
    pairs = list(itertools.product(GRID_VALUES, repeat=2)) + list(COMPLEX_PAIRS)
    failures = []
    worst_van = worst_top = 0.0
    for n in range(9):
        for a, b in pairs:
            rep = verify_main(n, a, b, tol=1e-8)
            worst_van = max(worst_van, rep.max_vanishing_residual)
            worst_top = max(worst_top, rep.top_residual)
            if not rep.passed:
                failures.append((n, a, b, rep.max_vanishing_residual, rep.top_residual))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed <= 90
    acceptance_log(1, ok, f"{9 * len(pairs)} triples, worst vanishing {worst_van:.2e}, "
                          f"worst I_n rel {worst_top:.2e}, {elapsed:.1f} s (budget 90 s)")
    assert not failures, failures[:5]
    assert elapsed <= 90


def test_criterion_2_beta_anchor(acceptance_log):
    i0 = verify_main(0, 0.5, 0.5).values[0].value
    half = integrate(build_interval(), Poly([1.0]), None, 0.5, 0.5, tol=1e-12).value
    e1, e2 = abs(i0 - 2 * math.pi), abs(half - math.pi / 2)
    ok = e1 <= 1e-10 and e2 <= 1e-10
    acceptance_log(2, ok, f"|I_0 - 2pi| = {e1:.1e}, |beta integral - pi/2| = {e2:.1e}")
    assert ok


def test_criterion_3_regime_counts(acceptance_log):
    t0 = time.perf_counter()
    rep = classify(75, -37.4, -25.1)
    hk = hilbert_klein(75, -37.4, -25.1)
    elapsed = time.perf_counter() - t0
    ok = (rep.tag == "Multi54i" and rep.counts() == [37, 25, 13] and hk == 13
          and elapsed < 1.0)
    acceptance_log(3, ok, f"{rep.tag} {rep.counts()} hilbert_klein={hk}, {elapsed * 1e3:.1f} ms")
    assert ok


def _regime_samples(per_tag=5, seed=7):
    rng = np.random.default_rng(seed)
    found = {}
    tags = ("ClassicalReal", "RealOnHalfLine", "SingleContour", "MultiAlt51", "MultiAlt52",
            "Multi54i", "Multi54ii", "Multi54iii", "MultiLast", "DegenerateSingle")
    while any(len(found.get(t, [])) < per_tag for t in tags):
        n = int(rng.integers(1, 21))
        a, b = (float(v) for v in np.round(rng.uniform(-25, 15, 2), 2))
        try:
            tag = classify(n, a, b).tag
        except IntegerParameter:
            continue
        if abs(a - round(a)) < 1e-3 or abs(b - round(b)) < 1e-3:
            continue
        if len(found.setdefault(tag, [])) < per_tag:
            found[tag].append((n, a, b))
    return [t for tag in tags for t in found[tag]]


def test_criterion_4_hilbert_klein(acceptance_log):
    t0 = time.perf_counter()
    samples = _regime_samples()
    bad = []
    for n, a, b in samples:
        z = zero_report(n, a, b)
        lb = quasi_lower_bound(n, a, b)
        if z.count_in_minus1_1 != hilbert_klein(n, a, b) or lb > z.count_in_minus1_1:
            bad.append((n, a, b, z.count_in_minus1_1, z.hilbert_klein_N, lb))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed <= 60 and len(samples) == 50
    acceptance_log(4, ok, f"{len(samples)} triples over 10 regimes, {len(bad)} mismatches, "
                          f"{elapsed:.1f} s (budget 60 s)")
    assert not bad, bad
    assert elapsed <= 60


CHARACTERIZATION_SAMPLES = [
    (4, 0.5, 0.5), (4, 0.5, -10.3), (4, -10.3, 0.5),
    (5, 2.5, -3.7), (6, -3.3, 1.2), (5, -12.3, -3.4), (5, -3.4, -12.3),
    (5, 0.3, -6.5), (10, -5.4, -2.3), (5, -7.5, -1.2), (5, -1.7, -7.4), (5, -4.5, -4.3),
]


def test_criterion_5_characterization(acceptance_log):
    t0 = time.perf_counter()
    devs = {}
    for n, a, b in CHARACTERIZATION_SAMPLES:
        c = characterize(n, a, b)
        devs[(c.tag, n, a, b)] = c.deviation
    elapsed = time.perf_counter() - t0
    worst = max(devs.values())
    tags = sorted({k[0] for k in devs})
    ok = worst <= 1e-7 and elapsed <= 120
    acceptance_log(5, ok, f"{len(devs)} samples ({', '.join(tags)}), worst coefficient "
                          f"deviation {worst:.1e}, {elapsed:.1f} s (budget 120 s)")
    assert worst <= 1e-7, devs
    assert elapsed <= 120


def test_criterion_6_riemann_hilbert(acceptance_log):
    parts, ok = [], True
    for n, a, b in [(2, 0.3, 0.6), (3, 0.4, -0.7), (4, -0.6, 1.4)]:
        rep = rh_verify(n, a, b)
        good = (len(rep.jump_residuals) == 8 and rep.max_jump <= 1e-6
                and len(rep.det_residuals) == 10 and rep.max_det <= 1e-8 and rep.decay_ok)
        ok &= good
        parts.append(f"({n},{a},{b}) jump {rep.max_jump:.0e} det {rep.max_det:.0e} "
                     f"decay {rep.decay_ratio:.2f}")
    acceptance_log(6, ok, "; ".join(parts))
    assert ok


def test_criterion_7_degenerate_remarks(acceptance_log):
    rep = classify(4, 0.3, -4.5)
    single = (rep.tag == "DegenerateSingle" and len(rep.blocks) == 1
              and rep.blocks[0].count == 0 and rep.blocks[0].expect_nonzero_at == 0)
    single &= verify_regime(4, 0.3, -4.5).verdict == "PASS"
    rep = classify(2, -2.3, -2.25)
    flagged = any(b.contour == "gammainf" and b.divergence_note for b in rep.blocks)
    code = main(["verify", "--which", "regime", "--n", "2", "--alpha", "-2.3", "--beta", "-2.25"],
                out=io.StringIO())
    ok = single and flagged and code == 4
    acceptance_log(7, ok, f"DegenerateSingle one nonzero condition: {single}; "
                          f"divergence flag on gammainf: {flagged}; verify exit code {code}")
    assert ok


def test_criterion_8_identities(acceptance_log, rng):
    worst = {"integer 1": 0.0, "integer 2": 0.0, "integer 3": 0.0, "rodrigues": 0.0}

    def point():
        return complex(rng.uniform(-3, 3), rng.uniform(-3, 3))

    for _ in range(20):
        n = int(rng.integers(1, 12))
        k = int(rng.integers(1, n + 1))
        worst["integer 1"] = max(worst["integer 1"],
                                 identity_neg_k(n, k, rng.uniform(-8, 8), point()))
    for _ in range(20):
        n = int(rng.integers(2, 12))
        k = int(rng.integers(1, n))
        l = int(rng.integers(1, n - k + 1))
        worst["integer 2"] = max(worst["integer 2"], identity_both(n, k, l, point()))
    for _ in range(20):
        n = int(rng.integers(1, 12))
        k = int(rng.integers(1, n + 1))
        a = rng.uniform(-8, 8)
        worst["integer 3"] = max(worst["integer 3"],
                                 identity_degree_reduction(n, a, -n - k - a, point()))
    count = 0
    while count < 20:
        n = int(rng.integers(0, 10))
        a, b = rng.uniform(-6, 6, 2)
        z = point()
        r = min(0.5, 0.5 * min(abs(z - 1), abs(z + 1)))
        if r < 0.05:
            continue
        worst["rodrigues"] = max(worst["rodrigues"], rodrigues_residual(n, a, b, z, r))
        count += 1
    ok = max(worst.values()) <= 1e-8
    acceptance_log(8, ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
                   + " (20 instances each)")
    assert ok
