"""Orthogonality regimes, condition blocks and zero counts for real parameters.

Write C1: alpha > -1, C2: beta > -1, C3: 2n + alpha + beta < 0.  The number
of these that hold, together with where alpha, beta and n + alpha + beta
sit relative to -n and -1, decides which contours carry vanishing
integrals of P_n times a (possibly modified) weight.  ``classify`` returns
those conditions as an ordered list of ``ConditionBlock``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contour import ContourLabel, build_gamma_inf, build_gamma_minus1, build_gamma_plus1, build_interval
from .errors import CapExceeded, IntegerParameter, KappaZero
from .jacobi import eval_scale, jacobi_coeffs, jacobi_eval
from .numerics import INT_TOL, aberth_refine, find_roots, kappa_sign, nearest_int

FLOOR_EPS = 1e-12
ROOT_CAP = 20

# contour keys used in blocks
GAMMA_M1 = "gammam1"
GAMMA_1 = "gamma1"
GAMMA_INF = "gammainf"
INTERVAL = "[-1,1]"
RIGHT = "[1,inf)"
LEFT = "(-inf,-1]"

_BLOCK_ORDER = {GAMMA_M1: 0, GAMMA_1: 1, INTERVAL: 2, RIGHT: 2, LEFT: 2, GAMMA_INF: 3}
_MIRROR = {GAMMA_M1: GAMMA_1, GAMMA_1: GAMMA_M1, RIGHT: LEFT, LEFT: RIGHT,
           INTERVAL: INTERVAL, GAMMA_INF: GAMMA_INF}

CHARACTERIZING = frozenset({"ClassicalReal", "RealOnHalfLine", "SingleContour", "MultiAlt51",
                            "MultiAlt52", "Multi54i", "Multi54ii", "Multi54iii", "MultiLast"})


def fl(x):
    """Floor with a small upward nudge, [x] in the usual notation."""
    return math.floor(x + FLOOR_EPS)


def contour_path(key, shape=None):
    """PathSpec for a block's contour key.

    ``shape`` selects a member of the deformation family of the loop
    contours: the circle center for the loops through -1 or +1, the real
    crossing point for the vertical line.  Intervals ignore it.
    """
    if key == GAMMA_M1:
        return build_gamma_minus1() if shape is None else build_gamma_minus1(shape)
    if key == GAMMA_1:
        return build_gamma_plus1() if shape is None else build_gamma_plus1(shape)
    if key == GAMMA_INF:
        return build_gamma_inf() if shape is None else build_gamma_inf(shape)
    return build_interval(key)


@dataclass(frozen=True)
class ConditionBlock:
    """Integrals of q(t) t^extra P_n(t) w(t; weight_alpha, weight_beta) on one contour.

    They vanish for every q of degree <= ``max_vanishing_degree`` and, when
    ``expect_nonzero_at`` is set, are nonzero for q of exactly that degree.
    """

    contour: str
    weight_alpha: float
    weight_beta: float
    max_vanishing_degree: int
    expect_nonzero_at: int | None = None
    extra_monomial_power: int = 0
    divergence_note: str | None = None

    def __post_init__(self):
        if self.max_vanishing_degree < -1:
            object.__setattr__(self, "max_vanishing_degree", -1)
        if (self.expect_nonzero_at is not None
                and self.expect_nonzero_at != self.max_vanishing_degree + 1):
            raise ValueError("nonzero degree must follow the last vanishing degree")

    @property
    def count(self):
        return self.max_vanishing_degree + 1

    @property
    def label(self):
        return {GAMMA_M1: ContourLabel.GAMMA_MINUS1, GAMMA_1: ContourLabel.GAMMA_PLUS1,
                GAMMA_INF: ContourLabel.GAMMA_INF}.get(self.contour, ContourLabel.INTERVAL)

    def path(self, shape=None):
        return contour_path(self.contour, shape)

    def mirrored(self):
        return ConditionBlock(_MIRROR[self.contour], self.weight_beta, self.weight_alpha,
                              self.max_vanishing_degree, self.expect_nonzero_at,
                              self.extra_monomial_power, self.divergence_note)

    def as_dict(self):
        return {
            "contour": self.contour,
            "weight_alpha": self.weight_alpha,
            "weight_beta": self.weight_beta,
            "extra_monomial_power": self.extra_monomial_power,
            "max_vanishing_degree": self.max_vanishing_degree,
            "conditions": self.count,
            "expect_nonzero_at": self.expect_nonzero_at,
            "divergence_note": self.divergence_note,
        }


@dataclass(frozen=True)
class RegimeReport:
    tag: str
    n: int
    alpha: float
    beta: float
    blocks: tuple
    notes: str = ""
    alternative: RegimeReport | None = None

    @property
    def total_conditions(self):
        return sum(b.count for b in self.blocks)

    @property
    def characterizing(self):
        return self.tag in CHARACTERIZING

    @property
    def divergent(self):
        return any(b.divergence_note for b in self.blocks)

    def counts(self):
        return [b.count for b in self.blocks]

    def as_dict(self):
        out = {
            "tag": self.tag,
            "characterizing": self.characterizing,
            "total_conditions": self.total_conditions,
            "counts": self.counts(),
            "blocks": [b.as_dict() for b in self.blocks],
            "notes": self.notes,
        }
        if self.alternative is not None:
            out["alternative"] = self.alternative.as_dict()
        return out


def check_parameters(n, alpha, beta, tol=INT_TOL):
    """Raise ``IntegerParameter`` unless alpha, beta, alpha+beta are real non-integers.

    The classical range alpha, beta > -1 is exempt: orthogonality on
    [-1, 1] does not depend on integrality there.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    for v in (alpha, beta):
        if isinstance(v, complex) or np.iscomplexobj(v):
            raise ValueError("regime analysis needs real parameters")
    if alpha > -1 + tol and beta > -1 + tol:
        return
    for name, v in (("alpha", alpha), ("beta", beta), ("alpha+beta", alpha + beta)):
        if nearest_int(v, tol) is not None:
            raise IntegerParameter(f"{name} = {v} is an integer (tolerance {tol})")


def _divergent_half(n, alpha, beta):
    s = 2 * n + alpha + beta
    if -1.0 < s < 0.0:
        return f"integral diverges at degree exponent: 2n+alpha+beta = {s:g} lies in (-1, 0)"
    return None


def _sorted(blocks):
    return tuple(sorted(blocks, key=lambda b: _BLOCK_ORDER[b.contour]))


def _single_contour(n, alpha, beta, c1, c2, c3):
    if c1:
        return ConditionBlock(GAMMA_1, alpha, beta, n - 1, n)
    if c2:
        return ConditionBlock(GAMMA_M1, alpha, beta, n - 1, n)
    return ConditionBlock(GAMMA_INF, alpha, beta, n - 1, n,
                          divergence_note=_divergent_half(n, alpha, beta))


def classify(n, alpha, beta):
    """Route (n, alpha, beta) to its orthogonality regime.

    Examples
    --------
    >>> classify(75, -37.4, -25.1).counts()
    [37, 25, 13]
    """
    check_parameters(n, alpha, beta)
    alpha, beta = float(alpha), float(beta)
    c1, c2, c3 = alpha > -1, beta > -1, 2 * n + alpha + beta < 0
    held = c1 + c2 + c3
    ka, kb = fl(-alpha), fl(-beta)

    # (a) two conditions: real orthogonality
    if held >= 2:
        if c1 and c2:
            return RegimeReport("ClassicalReal", n, alpha, beta,
                                (ConditionBlock(INTERVAL, alpha, beta, n - 1, n),),
                                notes="full orthogonality on [-1,1]")
        side = LEFT if c2 else RIGHT
        note = _divergent_half(n, alpha, beta)
        return RegimeReport("RealOnHalfLine", n, alpha, beta,
                            (ConditionBlock(side, alpha, beta, n - 1, n, divergence_note=note),),
                            notes=f"full orthogonality on {side}")

    if held == 1:
        # (b) multiple orthogonality replacing a single contour
        if c1 and -n < beta < -1:
            blocks = [ConditionBlock(GAMMA_1, alpha, beta, kb - 1),
                      ConditionBlock(INTERVAL, alpha, beta + kb, n - kb - 1, n - kb)]
            return RegimeReport("MultiAlt51", n, alpha, beta, _sorted(blocks), notes="row 1")
        if c2 and -n < alpha < -1:
            blocks = [ConditionBlock(GAMMA_M1, alpha, beta, ka - 1),
                      ConditionBlock(INTERVAL, alpha + ka, beta, n - ka - 1, n - ka)]
            return RegimeReport("MultiAlt51", n, alpha, beta, _sorted(blocks), notes="row 2")
        if c3 and -n < beta < -1:
            blocks = [ConditionBlock(GAMMA_INF, alpha, beta, kb - 1),
                      ConditionBlock(LEFT, alpha, beta + kb, n - kb - 1, n - kb,
                                     divergence_note=_divergent_half(n, alpha, beta))]
            return RegimeReport("MultiAlt51", n, alpha, beta, _sorted(blocks), notes="row 3")
        if c3 and -n < alpha < -1:
            blocks = [ConditionBlock(GAMMA_INF, alpha, beta, ka - 1),
                      ConditionBlock(RIGHT, alpha + ka, beta, n - ka - 1, n - ka,
                                     divergence_note=_divergent_half(n, alpha, beta))]
            return RegimeReport("MultiAlt51", n, alpha, beta, _sorted(blocks), notes="row 4")
        # (c) pairing of a half-line with a loop
        s = alpha + beta + n
        if -n < s < -1 and (c1 or c2):
            m = fl(-(s + 1))
            if c1:
                blocks = [ConditionBlock(RIGHT, alpha, beta, m),
                          ConditionBlock(GAMMA_1, alpha, beta, n - m - 2, n - m - 1,
                                         extra_monomial_power=m + 1)]
            else:
                blocks = [ConditionBlock(LEFT, alpha, beta, m),
                          ConditionBlock(GAMMA_M1, alpha, beta, n - m - 2, n - m - 1,
                                         extra_monomial_power=m + 1)]
            return RegimeReport("MultiAlt52", n, alpha, beta, _sorted(blocks), notes=f"m = {m}")
        single = RegimeReport("SingleContour", n, alpha, beta,
                              (_single_contour(n, alpha, beta, c1, c2, c3),))
        # degenerate quasi-orthogonality: a single non-vanishing integral
        if c1 and -1 < n + beta < 0:
            blk = ConditionBlock(GAMMA_M1, alpha, n + beta, -1, 0)
            return RegimeReport("DegenerateSingle", n, alpha, beta, (blk,),
                                notes="-1 < n+beta < 0: one non-vanishing condition",
                                alternative=single)
        if c2 and -1 < n + alpha < 0:
            blk = ConditionBlock(GAMMA_1, n + alpha, beta, -1, 0)
            return RegimeReport("DegenerateSingle", n, alpha, beta, (blk,),
                                notes="-1 < n+alpha < 0: one non-vanishing condition",
                                alternative=single)
        return single

    # no single contour: alpha < -1, beta < -1, 2n + alpha + beta > 0
    s = alpha + beta + n
    if s > -1:
        blocks = [ConditionBlock(GAMMA_M1, alpha, beta + kb, ka - 1),
                  ConditionBlock(GAMMA_1, alpha + ka, beta, kb - 1),
                  ConditionBlock(INTERVAL, alpha + ka, beta + kb, n - ka - kb - 1, n - ka - kb)]
        return RegimeReport("Multi54i", n, alpha, beta, _sorted(blocks))
    if alpha < -n:
        p = 2 * n - ka - kb
        blocks = [ConditionBlock(LEFT, alpha, beta + kb, ka - n - 1),
                  ConditionBlock(GAMMA_INF, alpha, beta, kb - 1),
                  ConditionBlock(GAMMA_M1, alpha, beta + kb, p - 1, p,
                                 extra_monomial_power=ka - n)]
        return RegimeReport("Multi54ii", n, alpha, beta, _sorted(blocks))
    if beta < -n:
        p = 2 * n - ka - kb
        blocks = [ConditionBlock(RIGHT, alpha + ka, beta, kb - n - 1),
                  ConditionBlock(GAMMA_INF, alpha, beta, ka - 1),
                  ConditionBlock(GAMMA_1, alpha + ka, beta, p - 1, p,
                                 extra_monomial_power=kb - n)]
        return RegimeReport("Multi54iii", n, alpha, beta, _sorted(blocks))
    if alpha > -n and beta > -n and s < -1:
        blocks = [ConditionBlock(GAMMA_M1, alpha, beta + kb, n - kb - 1),
                  ConditionBlock(GAMMA_1, alpha + ka, beta, n - ka - 1),
                  ConditionBlock(GAMMA_INF, alpha, beta, ka + kb - n - 1)]
        return RegimeReport("MultiLast", n, alpha, beta, _sorted(blocks))
    return RegimeReport("Unclassified", n, alpha, beta, (), notes="no known condition set")


def quasi_blocks(n, alpha, beta):
    """Quasi-orthogonality conditions on Gamma_-1, Gamma_1 and Gamma_inf.

    Each applies on its own hypothesis (n+beta > -1, n+alpha > -1,
    n+alpha+beta < -1); any subset may be returned, in block order.
    """
    check_parameters(n, alpha, beta)
    alpha, beta = float(alpha), float(beta)
    out = []
    if n + beta > -1:
        k = max(0, fl(-beta))
        out.append(ConditionBlock(GAMMA_M1, alpha, beta + k, n - k - 1, n - k))
    if n + alpha > -1:
        k = max(0, fl(-alpha))
        out.append(ConditionBlock(GAMMA_1, alpha + k, beta, n - k - 1, n - k))
    s = n + alpha + beta
    if s < -1:
        if s < -n - 1:
            out.append(ConditionBlock(GAMMA_INF, alpha, beta, n - 1, n))
        else:
            m = min(n - 1, fl(-(s + 1)))
            out.append(ConditionBlock(
                GAMMA_INF, alpha, beta, m,
                divergence_note=f"integral diverges at degree {m + 1}"))
    return tuple(out)


# --------------------------------------------------------------------- zeros


def E_of(u, tol=INT_TOL):
    if u <= 0:
        return 0
    k = nearest_int(u, tol)
    if k is not None:
        return k - 1
    return math.floor(u)


def hilbert_klein(n, alpha, beta):
    """Number of zeros of P_n^(alpha, beta) in (-1, 1)."""
    sign = kappa_sign(n, alpha, beta)
    if sign == 0:
        raise KappaZero(f"kappa_{n}({alpha}, {beta}) vanishes")
    u = (abs(2 * n + alpha + beta + 1) - abs(alpha) - abs(beta) + 1) / 2
    e = E_of(u)
    want_even = sign > 0
    return e if (e % 2 == 0) == want_even else e + 1


def quasi_lower_bound(n, alpha, beta):
    """Lower bound on the number of distinct zeros in (-1, 1) from real quasi-orthogonality."""
    try:
        rep = classify(n, alpha, beta)
    except IntegerParameter:
        return n if (alpha > -1 and beta > -1) else 0
    if rep.tag == "ClassicalReal":
        return n
    if rep.tag in ("MultiAlt51", "Multi54i"):
        for b in rep.blocks:
            if b.contour == INTERVAL:
                return b.expect_nonzero_at
    return 0


@dataclass(frozen=True)
class ZeroReport:
    roots: tuple
    regions: tuple
    count_in_minus1_1: int
    count_left: int
    count_right: int
    hilbert_klein_N: int | None
    quasi_lower_bound: int
    notes: str = ""

    def as_dict(self):
        return {
            "roots": [complex(r) for r in self.roots],
            "regions": list(self.regions),
            "count_in_minus1_1": self.count_in_minus1_1,
            "count_left": self.count_left,
            "count_right": self.count_right,
            "hilbert_klein_N": self.hilbert_klein_N,
            "quasi_lower_bound": self.quasi_lower_bound,
            "notes": self.notes,
        }


def _polish(n, alpha, beta, roots):
    # Aberth on the explicit sum, which stays accurate where the monomial
    # basis does not; P_n' = (n+a+b+1)/2 P_(n-1)^(a+1,b+1)
    c = (n + alpha + beta + 1) / 2
    eps = np.finfo(float).eps
    return aberth_refine(
        roots,
        lambda z: jacobi_eval(n, alpha, beta, z),
        lambda z: c * jacobi_eval(n - 1, alpha + 1, beta + 1, z),
        lambda z: 8 * (n + 1) * eps * eval_scale(n, alpha, beta, z))


def zero_report(n, alpha, beta, realness_tol=1e-7, cap=ROOT_CAP, seed=0):
    """Roots of P_n with their location on the real line and the predicted counts."""
    if n > cap:
        raise CapExceeded(f"degree {n} exceeds the root-finding cap {cap}")
    coeffs = jacobi_coeffs(n, alpha, beta)
    deg = coeffs.degree or 0
    notes = []
    if deg < n:
        notes.append(f"degree drops to {deg}")
    roots = find_roots(coeffs, seed=seed) if deg > 0 else np.zeros(0, dtype=complex)
    if deg > 0:
        roots = _polish(n, alpha, beta, roots)
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order]
    regions = []
    inside = left = right = 0
    real_params = complex(alpha).imag == 0 and complex(beta).imag == 0
    for i, r in enumerate(roots):
        if abs(r.imag) <= realness_tol * (1 + abs(r.real)):
            if real_params:
                # real coefficients: the imaginary part is rounding noise
                roots[i] = r = complex(r.real, 0.0)
            if -1 < r.real < 1:
                regions.append("interval")
                inside += 1
            elif r.real <= -1:
                regions.append("left")
                left += 1
            else:
                regions.append("right")
                right += 1
        else:
            regions.append("complex")
    try:
        hk = hilbert_klein(n, alpha, beta)
    except KappaZero:
        hk = None
        notes.append("kappa vanishes, Hilbert-Klein count not defined")
    return ZeroReport(tuple(complex(r) for r in roots), tuple(regions), inside, left, right, hk,
                      quasi_lower_bound(n, alpha, beta), "; ".join(notes))
