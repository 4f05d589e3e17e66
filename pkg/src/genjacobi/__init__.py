"""Jacobi polynomials P_n^(alpha, beta) with general real or complex parameters.

Evaluation, contour integration with tracked branches, orthogonality
regimes, numerical verification, recovery from moment conditions and the
Riemann-Hilbert characterization.
"""

__version__ = "0.1.0"

from .contour import (PathSpec, build_circle, build_contour, build_gamma_double_loop,
                      build_gamma_inf, build_gamma_minus1, build_gamma_plus1, build_interval,
                      continue_branch, integrate, integrate_polys)
from .errors import *  # noqa: F401,F403
from .jacobi import (JacobiEvaluator, JacobiParams, eval_scale, jacobi_coeffs, jacobi_eval,
                     leading_coefficient, normalized_jacobi)
from .regimes import (ConditionBlock, RegimeReport, classify, hilbert_klein, quasi_lower_bound,
                      zero_report)
from .rh import RHSolution, rh_build_Y, rh_check_jump, rh_verify
from .verify import characterize, orth_main_rhs, verify_block, verify_main, verify_regime
