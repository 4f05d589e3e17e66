import numpy as np
import pytest

from genjacobi.errors import ConditionViolated, SelfIntersectionTooClose, TooCloseToContour
from genjacobi.rh import (RHSolution, check_rh_condition, default_det_points,
                          default_jump_points, rh_build_Y, rh_check_jump, rh_verify)


@pytest.fixture(scope="module")
def sol():
    return RHSolution(3, 0.4, -0.7)


def test_condition():
    check_rh_condition(2, 0.3, 0.6)
    for args in [(0, 0.3, 0.6), (2, 1.0, 0.6), (2, 0.3, -4.3), (3, -1.0, 0.5)]:
        with pytest.raises(ConditionViolated):
            check_rh_condition(*args)


def test_det_example(sol):
    Y = sol(3 + 2j)
    assert abs(Y.det - 1) <= 1e-8


def test_first_row_is_monic(sol):
    for z in (20.0, 40j):
        Y = sol(z)
        assert abs(Y.entries[0, 0] / z**3 - 1) <= 0.2
    z = 1e3 * np.exp(0.4j)
    assert abs(sol(z).entries[0, 0] / z**3 - 1) <= 1e-2


def test_cauchy_far_field_forms_agree(sol):
    z = 5.0 + 1.0j
    a = sol.cauchy(3, z, subtracted=False)
    b = sol.cauchy(3, z, subtracted=True)
    assert abs(a - b) <= 1e-9 * abs(b)


def test_decay(sol):
    z50 = 50 * np.exp(0.7j)
    z100 = 100 * np.exp(0.7j)
    d50 = abs(sol(z50).entries[1, 1] * z50**3 - 1)
    d100 = abs(sol(z100).entries[1, 1] * z100**3 - 1)
    assert abs(d50 / d100 / 2 - 1) <= 0.1


def test_jump_on_loop_around_plus_one():
    s = RHSolution(2, 0.3, 0.6)
    # the first circle of the double loop goes around +1
    seg = [i for i, _ in default_jump_points(s.path)][0]
    chk = rh_check_jump(s, seg, 0.3)
    assert abs(abs(chk.t - 1) - 0.5) <= 1e-12
    assert chk.residual <= 1e-6
    assert abs(np.linalg.det(chk.y_plus) - np.linalg.det(chk.y_minus)) <= 1e-8


def test_jump_extrapolation_improves_on_raw_offsets():
    s = RHSolution(2, 0.3, 0.6)
    seg = default_jump_points(s.path)[0][0]
    fine = rh_check_jump(s, seg, 0.7, levels=5).residual
    raw = rh_check_jump(s, seg, 0.7, levels=1).residual
    half = rh_check_jump(s, seg, 0.7, offset=0.01, levels=1).residual
    assert fine < half < raw
    # first-order approach to the boundary: halving the offset halves the error
    assert 1.5 <= raw / half <= 2.5


def test_errors(sol):
    with pytest.raises(TooCloseToContour):
        sol(1.5 + 1e-4j)
    with pytest.raises(SelfIntersectionTooClose):
        # the loops meet the real axis at the crossing connectors
        rh_check_jump(sol, default_jump_points(sol.path)[0][0], 0.999)


def test_build_Y_wrapper():
    Y = rh_build_Y(2, 0.3, 0.6, 2 + 2j)
    assert abs(Y.det - 1) <= 1e-8


@pytest.mark.parametrize("n, a, b", [(2, 0.3, 0.6)])
def test_rh_verify(n, a, b):
    rep = rh_verify(n, a, b, probe=True)
    assert rep.passed
    assert len(rep.jump_residuals) == 8 and len(rep.det_residuals) == 10
    assert rep.d_crosscheck <= 1e-10
    assert all(np.isfinite(m) for _, _, m in rep.boundedness)
    assert len(default_det_points()) == 10
