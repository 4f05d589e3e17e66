"""Numerical checks of the orthogonality relations and recovery from moments.

Residuals of vanishing integrals are measured against the integral of the
absolute integrand (the quadrature ``scale``): that is the size rounding
and quadrature error are proportional to, and it is independent of how
the polynomial happens to be normalized.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from numpy.polynomial import polynomial as _poly

from .contour import QuadResult, build_gamma_double_loop, integrate_polys
from .errors import IllConditioned, RegimeNotCharacterizing
from .jacobi import JacobiParams, normalized_jacobi
from .numerics import Poly, is_pole, log_gamma
from .regimes import ConditionBlock, classify, contour_path

NONZERO_FACTOR = 1e3
COND_LIMIT = 1e12
CHARACTERIZE_CAP = 12
_RADII = (0.5, 0.35, 0.25, 0.15, 0.1, 0.05)
# deformation families of the loop contours (circle centers, line crossing)
_SHAPES = {
    "gamma1": (-1.0, -0.5, -0.25, -2.0, -4.0, -8.0),
    "gammam1": (1.0, 0.5, 0.25, 2.0, 4.0, 8.0),
    "gammainf": (0.0, -0.5, 0.5, -0.9, 0.9),
}


def orth_main_rhs(n, k, alpha, beta):
    """Closed form of the integral of t^k P_n w over the double loop.

    Zero for k < n, and zero whenever one of the gamma factors in the
    denominator sits at a pole.
    """
    if k < n:
        return 0j
    if k > n:
        raise ValueError("closed form is stated for k <= n")
    alpha, beta = complex(alpha), complex(beta)
    args = (2 * n + alpha + beta + 2, -n - alpha, -n - beta)
    if any(is_pole(a) for a in args):
        return 0j
    lg = (2 * math.log(math.pi) + (n + alpha + beta + 3) * math.log(2.0)
          + 1j * math.pi * (alpha + beta) - sum(log_gamma(a) for a in args))
    return -cmath.exp(lg)


def _monomial(k):
    c = np.zeros(k + 1, dtype=complex)
    c[k] = 1.0
    return Poly(c)


def _quad_tol(tol):
    return min(max(tol * 1e-4, 1e-14), 1e-10)


@dataclass
class OrthReport:
    """Outcome of one set of orthogonality checks.

    ``residuals[i]`` is |I_i| / scale_i for vanishing rows; the row at
    ``nonzero_degree`` (if any) is judged by ``nonzero_margin``.
    """

    values: list
    degrees: list
    residuals: list
    max_vanishing_residual: float
    tol: float
    rhs_closed_form: complex | None = None
    top_residual: float | None = None
    nonzero_degree: int | None = None
    nonzero_margin: float | None = None
    nonzero_floor: float | None = None
    verdict: str = "PASS"
    contour: str = ""
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.verdict == "PASS"

    def as_dict(self):
        return {
            "contour": self.contour,
            "verdict": self.verdict,
            "tol": self.tol,
            "degrees": list(self.degrees),
            "values": [q.value for q in self.values],
            "scales": [q.scale for q in self.values],
            "abs_errors": [q.abs_error for q in self.values],
            "residuals": list(self.residuals),
            "max_vanishing_residual": self.max_vanishing_residual,
            "rhs_closed_form": self.rhs_closed_form,
            "top_residual": self.top_residual,
            "nonzero_degree": self.nonzero_degree,
            "nonzero_margin": self.nonzero_margin,
            "nonzero_floor": self.nonzero_floor,
            "notes": list(self.notes),
        }


def choose_radius(n, alpha, beta, xi=0.0):
    """Loop radius for the double loop that minimizes cancellation in I_n.

    The integral does not depend on the radius, but its ratio to the
    integral of the absolute integrand does; a cheap pilot picks the
    best of a few candidates.
    """
    lim = min(1 - xi, 1 + xi)
    best, best_ratio = None, -1.0
    params = JacobiParams(n, alpha, beta)
    for r in _RADII:
        if r >= lim:
            continue
        res = integrate_polys(build_gamma_double_loop(xi, r), [_monomial(n)], alpha, beta,
                              jacobi=params, tol=1e-6)
        ratio = abs(res.value[0]) / res.scale[0] if res.scale[0] > 0 else 0.0
        if ratio > best_ratio:
            best, best_ratio = r, ratio
    return best


def verify_main(n, alpha, beta, tol=1e-8, xi=0.0, radius=None):
    """Check the vanishing moments of P_n on the double loop and the value of I_n.

    Examples
    --------
    >>> rep = verify_main(0, 0.5, 0.5)
    >>> abs(rep.values[0].value - 2 * np.pi) < 1e-10
    True
    """
    rhs = orth_main_rhs(n, n, alpha, beta)
    if radius is None:
        radius = choose_radius(n, alpha, beta, xi) if rhs != 0 else 0.5
    path = build_gamma_double_loop(xi, radius)
    res = integrate_polys(path, [_monomial(k) for k in range(n + 1)], alpha, beta,
                          jacobi=JacobiParams(n, alpha, beta), tol=_quad_tol(tol))
    values = [res[k] for k in range(n + 1)]
    residuals = [abs(v.value) / v.scale if v.scale > 0 else 0.0 for v in values[:n]]
    top = values[n]
    if rhs != 0:
        top_res = abs(top.value - rhs) / abs(rhs)
    else:
        top_res = abs(top.value) / top.scale if top.scale > 0 else 0.0
    worst = max(residuals, default=0.0)
    rep = OrthReport(values, list(range(n + 1)), residuals + [top_res], worst, tol,
                     rhs_closed_form=rhs, top_residual=top_res,
                     contour=f"gamma xi={xi} radius={radius}")
    rep.verdict = "PASS" if (worst <= tol and top_res <= tol) else "FAIL"
    return rep


def _choose_shape(block, poly, params):
    # the integral is shape independent; its cancellation is not
    best, best_ratio = None, -1.0
    for shape in _SHAPES[block.contour]:
        res = integrate_polys(block.path(shape), [poly], block.weight_alpha, block.weight_beta,
                              jacobi=params, tol=1e-6)
        ratio = abs(res.value[0]) / res.scale[0] if res.scale[0] > 0 else 0.0
        if ratio > best_ratio:
            best, best_ratio = shape, ratio
    return best


def verify_block(block, n, alpha, beta, tol=1e-8):
    """Check one condition block: vanishing rows and, if asserted, the nonzero row."""
    degrees = list(range(block.max_vanishing_degree + 1))
    divergent = block.divergence_note is not None
    check_nonzero = block.expect_nonzero_at is not None and not divergent
    if check_nonzero:
        degrees.append(block.expect_nonzero_at)
    rep = OrthReport([], degrees, [], 0.0, tol, contour=block.contour)
    if divergent:
        rep.notes.append(block.divergence_note)
    if not degrees:
        rep.verdict = "DIVERGENT" if divergent else "PASS"
        return rep
    polys = [_monomial(d + block.extra_monomial_power) for d in degrees]
    shape = None
    if check_nonzero and block.contour in _SHAPES:
        shape = _choose_shape(block, polys[-1], JacobiParams(n, alpha, beta))
        rep.contour = f"{block.contour} shape={shape}"
    res = integrate_polys(block.path(shape), polys, block.weight_alpha, block.weight_beta,
                          jacobi=JacobiParams(n, alpha, beta), tol=_quad_tol(tol))
    rep.values = [res[i] for i in range(len(degrees))]
    rel = [abs(v.value) / v.scale if v.scale > 0 else 0.0 for v in rep.values]
    nvan = block.max_vanishing_degree + 1
    rep.residuals = rel
    rep.max_vanishing_residual = max(rel[:nvan], default=0.0)
    ok = rep.max_vanishing_residual <= tol
    if check_nonzero:
        rep.nonzero_degree = block.expect_nonzero_at
        rep.nonzero_margin = rel[-1]
        rep.nonzero_floor = NONZERO_FACTOR * tol
        ok = ok and rep.nonzero_margin > rep.nonzero_floor
    if not ok:
        rep.verdict = "FAIL"
    elif divergent:
        rep.verdict = "DIVERGENT"
    return rep


@dataclass
class RegimeVerification:
    tag: str
    reports: list
    verdict: str

    def as_dict(self):
        return {"tag": self.tag, "verdict": self.verdict,
                "blocks": [r.as_dict() for r in self.reports]}


def verify_regime(n, alpha, beta, tol=1e-8):
    """Verify every block of ``classify(n, alpha, beta)``.

    The verdict is FAIL if any check fails, DIVERGENT if all computed
    checks pass but some asserted integral diverges, PASS otherwise.
    """
    rep = classify(n, alpha, beta)
    reports = [verify_block(b, n, alpha, beta, tol) for b in rep.blocks]
    verdicts = {r.verdict for r in reports}
    if "FAIL" in verdicts:
        verdict = "FAIL"
    elif "DIVERGENT" in verdicts:
        verdict = "DIVERGENT"
    else:
        verdict = "PASS"
    return RegimeVerification(rep.tag, reports, verdict)


# ------------------------------------------------------------ moment systems

# natural center and length of each contour; test functions ((t-c)/rho)^k
# span the same space as t^k but are far better scaled on the contour
_FRAME = {
    "gamma1": (-1.0, 2.0), "gammam1": (1.0, 2.0), "gammainf": (0.0, 1.0),
    "[-1,1]": (0.0, 1.0), "[1,inf)": (1.0, 1.0), "(-inf,-1]": (-1.0, 1.0),
}


@dataclass
class MomentSystem:
    """Conditions on p_n = sum_j d_j T_j + T_n / 2^(n-1) in the Chebyshev basis.

    ``matrix[r, j]`` is the r-th condition applied to T_j, ``rhs[r]`` is
    minus the condition applied to T_n, so that ``matrix @ d = rhs``.
    ``errors`` and ``scales`` hold, per entry, the quadrature error
    estimate and the integral of the absolute integrand (last column for T_n).
    """

    matrix: np.ndarray
    rhs: np.ndarray
    errors: np.ndarray
    scales: np.ndarray
    sources: list
    condition_estimate: float = float("nan")


def _block_rows(path, wa, wb, extra, count, n, frame, tol):
    if count <= 0:
        z = np.zeros((0, n + 1))
        return z.astype(complex), z, z
    c0, rho = frame
    basis = [_cheb.cheb2poly(np.eye(n + 1)[j]) for j in range(n + 1)]
    shift = np.concatenate([np.zeros(extra), [1.0]])
    polys = []
    for c in range(count):
        q = _poly.polymul(_poly.polypow([-c0 / rho, 1.0 / rho], c), shift)
        polys += [Poly(np.asarray(_poly.polymul(q, basis[j]), dtype=complex)) for j in range(n + 1)]
    res = integrate_polys(path, polys, wa, wb, tol=_quad_tol(tol))
    shape = (count, n + 1)
    scale = np.asarray(res.scale).reshape(shape)
    err = np.maximum(np.asarray(res.abs_error).reshape(shape), 2.2e-16 * scale)
    return np.asarray(res.value).reshape(shape), err, scale


def moment_system(n, blocks, tol=1e-8):
    """Stack the vanishing conditions of ``blocks`` in block order.

    Each entry of ``blocks`` is a ``ConditionBlock`` or a tuple
    (path, weight_alpha, weight_beta, extra_monomial_power, count).
    """
    mats, errs, scales, sources = [], [], [], []
    for i, b in enumerate(blocks):
        if isinstance(b, ConditionBlock):
            args = (b.path(), b.weight_alpha, b.weight_beta, b.extra_monomial_power, b.count,
                    _FRAME.get(b.contour, (0.0, 1.0)))
        else:
            args = tuple(b) + ((0.0, 1.0),)
        M, E, S = _block_rows(*args[:5], n, args[5], tol)
        mats.append(M)
        errs.append(E)
        scales.append(S)
        sources += [(i, c) for c in range(args[4])]
    empty = np.zeros((0, n + 1))
    M = np.vstack(mats) if mats else empty.astype(complex)
    E = np.vstack(errs) if errs else empty
    S = np.vstack(scales) if scales else empty
    return MomentSystem(M[:, :n], -M[:, n], E, S, sources)


def _cheb_to_monomial(n):
    C = np.zeros((n + 1, n + 1))
    for j in range(n + 1):
        c = _cheb.cheb2poly(np.eye(n + 1)[j])
        C[: len(c), j] = c
    return C


@dataclass
class MonicSolution:
    coeffs: np.ndarray  # monomial, ascending, leading 1
    chebyshev: np.ndarray
    condition_estimate: float
    error_bound: np.ndarray  # first-order bound on |coeffs - exact|


def solve_monic(system, n):
    """Solve the first n conditions after row and column equilibration.

    Returns a ``MonicSolution``.  The error bound propagates the per-entry
    quadrature errors through the inverse of the scaled matrix to first
    order.
    """
    C = _cheb_to_monomial(n)
    if n == 0:
        return MonicSolution(np.ones(1, dtype=complex), np.ones(1, dtype=complex), 1.0,
                             np.zeros(1))
    A = system.matrix[:n].copy()
    b = system.rhs[:n].copy()
    rs = np.max(np.abs(np.column_stack([A, b])), axis=1)
    rs[rs == 0] = 1.0
    A = A / rs[:, None]
    b = b / rs
    cs = np.max(np.abs(A), axis=0)
    cs[cs == 0] = 1.0
    A = A / cs[None, :]
    sol, _, _, sv = np.linalg.lstsq(A, b, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    cheb = np.concatenate([sol / cs, [1.0]])
    lead = C[n, n]
    noise = (system.errors[:n] @ np.abs(cheb)) / rs
    dx = (np.abs(np.linalg.pinv(A)) @ noise) / cs
    bound = (np.abs(C[:, :n]) @ dx) / abs(lead)
    return MonicSolution((C @ cheb) / lead, cheb, cond, bound)


@dataclass
class Characterization:
    tag: str
    recovered: Poly
    reference: Poly
    deviation: float
    condition_estimate: float
    rows_used: int
    extra_residuals: list
    error_estimate: float = float("nan")
    notes: list = field(default_factory=list)

    def as_dict(self):
        return {
            "tag": self.tag,
            "recovered": list(self.recovered.coeffs),
            "reference": list(self.reference.coeffs),
            "max_deviation": self.deviation,
            "error_estimate": self.error_estimate,
            "condition_estimate": self.condition_estimate,
            "rows_used": self.rows_used,
            "extra_residuals": list(self.extra_residuals),
            "notes": list(self.notes),
        }


def coefficient_deviation(a, b):
    """max_i |a_i - b_i| / max(|b_i|, 1)."""
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1.0), initial=0.0))


def characterize(n, alpha, beta, tol=1e-8, blocks=None, contour=None, radius=0.5):
    """Recover the monic P_n from the vanishing conditions of its regime.

    Parameters
    ----------
    blocks : sequence of ConditionBlock, optional
        Conditions to use instead of those from ``classify``.
    contour : {"gamma"}, optional
        Use the n moments on the double loop instead of a regime.

    Raises
    ------
    RegimeNotCharacterizing
        The regime does not determine the polynomial.
    IllConditioned
        Condition estimate of the scaled system above 1e12.
    """
    if n > CHARACTERIZE_CAP:
        raise ValueError(f"characterization is capped at n = {CHARACTERIZE_CAP}")
    notes = []
    if contour == "gamma":
        tag = "Gamma"
        use = [(build_gamma_double_loop(0.0, radius), alpha, beta, 0, n)]
    elif blocks is not None:
        tag = "Custom"
        use = list(blocks)
    else:
        rep = classify(n, alpha, beta)
        tag = rep.tag
        if not rep.characterizing and rep.alternative is not None:
            notes.append(f"{rep.tag} does not characterize; using {rep.alternative.tag} blocks")
            rep = rep.alternative
        if not rep.characterizing:
            raise RegimeNotCharacterizing(f"regime {rep.tag} does not determine P_{n}")
        use = list(rep.blocks)
    system = moment_system(n, use, tol)
    rows = system.matrix.shape[0]
    if rows < n:
        raise RegimeNotCharacterizing(f"only {rows} conditions for degree {n}")
    sol = solve_monic(system, n)
    system.condition_estimate = sol.condition_estimate
    if sol.condition_estimate > COND_LIMIT:
        raise IllConditioned(f"condition estimate {sol.condition_estimate:.3g} exceeds "
                             f"{COND_LIMIT:g}")
    extra = []
    full = sol.chebyshev
    for r in range(n, rows):
        row = np.concatenate([system.matrix[r], [-system.rhs[r]]])
        denom = float(np.abs(system.scales[r]) @ np.abs(full))
        extra.append(abs(row @ full) / denom if denom > 0 else 0.0)
    if rows > n:
        notes.append(f"{rows - n} conditions beyond n checked as residuals")
    ref = normalized_jacobi(n, alpha, beta)
    if ref.monic_factor is None:
        raise RegimeNotCharacterizing("P_n has reduced degree")
    ref_c = ref.monic.coeffs
    est = float(np.max(sol.error_bound / np.maximum(np.abs(ref_c), 1.0), initial=0.0))
    return Characterization(tag, Poly(sol.coeffs), Poly(ref_c),
                            coefficient_deviation(sol.coeffs, ref_c), sol.condition_estimate,
                            n, extra, est, notes)

__all__ = [
    "Characterization", "MomentSystem", "OrthReport", "QuadResult", "RegimeVerification",
    "MonicSolution", "characterize", "choose_radius", "coefficient_deviation", "moment_system",
    "orth_main_rhs", "solve_monic", "verify_block", "verify_main", "verify_regime",
]
