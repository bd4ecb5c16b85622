"""Threshold feedback policies for random-beam vector broadcast channels.

Analytic ergodic rates, Schur-concavity conditions, threshold optimisation
and a Monte Carlo simulator to cross-check them.
"""

__version__ = "0.1.0"

from .channel import FadingModel, RayleighModel, sample_sinr_matrix
from .conditions import ConditionReport, schur_condition_numeric, schur_condition_rayleigh
from .majorization import majorizes, pinch, random_majorization_pair
from .montecarlo import RateEstimate, simulate, simulate_pair_conditional
from .numerics import QuadratureError, QuadratureSpec, central_diff, integrate, lambert_w0
from .optimizer import (OptimizationResult, exhaustive_two_user, homogeneous_policy,
                        optimize)
from .rate import (ConditionalRateInput, ThresholdPolicy, beam_rate, conditional_rate_q,
                   feedback_load, g_const, policy_from_probs, r1_cond, r2_cond, sum_rate,
                   truncated_cdf)

__all__ = [
    "FadingModel", "RayleighModel", "sample_sinr_matrix",
    "ConditionReport", "schur_condition_numeric", "schur_condition_rayleigh",
    "majorizes", "pinch", "random_majorization_pair",
    "RateEstimate", "simulate", "simulate_pair_conditional",
    "QuadratureError", "QuadratureSpec", "central_diff", "integrate", "lambert_w0",
    "OptimizationResult", "exhaustive_two_user", "homogeneous_policy", "optimize",
    "ConditionalRateInput", "ThresholdPolicy", "beam_rate", "conditional_rate_q",
    "feedback_load", "g_const", "policy_from_probs", "r1_cond", "r2_cond", "sum_rate",
    "truncated_cdf",
]
