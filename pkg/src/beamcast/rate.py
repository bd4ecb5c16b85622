"""Analytic ergodic rates of threshold feedback policies.

A user feeds back a beam's SINR only when it is at least the user's
threshold; below it the user is silent, which is the same as reporting a
"truncated" SINR of zero. The base station serves the best reporter on
each beam, so the per-beam rate is ``E[log(1 + max_i truncated_i)]``.

All rates are in nats.
"""

import math
from dataclasses import dataclass

import numpy as np

from .numerics import DEFAULT_QUADRATURE, integrate

__all__ = ["ThresholdPolicy", "ConditionalRateInput", "policy_from_probs",
           "truncated_cdf", "beam_rate", "sum_rate", "feedback_load",
           "feedback_probs", "g_const", "r1_cond", "r2_cond",
           "conditional_rate_q", "conditional_rate_q_slope", "pair_thresholds"]

_ORDER_SLACK = 1e-12


@dataclass(frozen=True)
class ThresholdPolicy:
    """Per-user feedback thresholds; ``inf`` means the user never reports."""

    thresholds: tuple

    def __post_init__(self):
        taus = tuple(float(t) for t in np.atleast_1d(self.thresholds))
        if not taus:
            raise ValueError("a policy needs at least one user")
        if any(math.isnan(t) or t < 0 for t in taus):
            raise ValueError(f"thresholds must be >= 0, got {taus}")
        object.__setattr__(self, "thresholds", taus)

    def __len__(self):
        return len(self.thresholds)

    @property
    def n_users(self):
        return len(self.thresholds)

    def probs(self, model):
        return feedback_probs(model, self)

    def load(self, model):
        return feedback_load(model, self)


@dataclass(frozen=True)
class ConditionalRateInput:
    """A user pair and the best competing truncated SINR ``y``.

    ``tau_low <= tau_high``; ``lambda_pair`` is the pair's combined feedback
    probability, kept for bookkeeping by callers working in probability
    space.
    """

    tau_low: float
    tau_high: float
    y: float
    lambda_pair: float = float("nan")

    def __post_init__(self):
        if not self.tau_low >= 0 or not self.tau_high >= self.tau_low:
            raise ValueError(f"need 0 <= tau_low <= tau_high, got "
                             f"({self.tau_low}, {self.tau_high})")
        if not self.y >= 0:
            raise ValueError(f"competing SINR y must be >= 0, got {self.y}")
        lam = self.lambda_pair
        if not math.isnan(lam) and not 0.0 <= lam <= 2.0:
            raise ValueError(f"lambda_pair must lie in [0, 2], got {lam}")


def policy_from_probs(model, probs):
    """Thresholds giving each user the requested feedback probability."""
    probs = np.atleast_1d(np.asarray(probs, dtype=float))
    if np.any(probs < -1e-12) or np.any(probs > 1 + 1e-12):
        raise ValueError(f"feedback probabilities must lie in [0, 1], got {probs}")
    return ThresholdPolicy(tuple(model.inv_sf(min(max(p, 0.0), 1.0)) for p in probs))


def feedback_probs(model, policy):
    return tuple(model.sf(t) for t in policy.thresholds)


def feedback_load(model, policy):
    """Expected number of users reporting on a given beam."""
    return math.fsum(model.sf(t) for t in policy.thresholds)


def truncated_cdf(model, tau, y):
    """``P(gamma * 1{gamma >= tau} <= y)`` for ``y >= 0``."""
    if y < 0:
        raise ValueError(f"truncated SINR is nonnegative; y={y}")
    if tau < 0:
        raise ValueError(f"threshold must be >= 0, got {tau}")
    if math.isinf(tau):
        return 1.0
    return model.cdf(max(y, tau))


def _exceed_prob(model, taus):
    """``y -> P(max_i truncated_i > y)`` computed from survival values."""
    finite = [t for t in taus if not math.isinf(t)]
    sf = model.sf

    def tail(y):
        acc = 0.0
        for t in finite:
            s = sf(t if t > y else y)
            if s >= 1.0:
                return 1.0
            acc += math.log1p(-s)
        return -math.expm1(acc)

    return tail


def beam_rate(model, policy, quad=DEFAULT_QUADRATURE):
    """Ergodic rate on one beam.

    Uses ``E[log(1+Z)] = int_0^inf P(Z > y) / (1 + y) dy`` with ``Z`` the
    best truncated SINR, whose exceedance probability factorises over users.
    """
    taus = policy.thresholds
    if all(math.isinf(t) for t in taus):
        return 0.0
    tail = _exceed_prob(model, taus)
    cuts = sorted({t for t in taus if 0.0 < t < math.inf})
    return integrate(lambda y: tail(y) / (1.0 + y), 0.0, math.inf, quad, points=cuts)


def sum_rate(model, policy, quad=DEFAULT_QUADRATURE):
    """Ergodic sum rate over all beams (beams are statistically identical)."""
    return model.beams * beam_rate(model, policy, quad)


# ---------------------------------------------------------------------------
# conditional pair rates given the best competing truncated SINR y
# ---------------------------------------------------------------------------
def _log_dF(model, a, b, quad):
    """``int_a^b log(1+x) dF(x)``."""
    if not a < b:
        return 0.0
    pdf = model.pdf
    return integrate(lambda x: math.log1p(x) * pdf(x), a, b, quad)


def _log_dF2(model, a, quad):
    """``int_a^inf log(1+x) d(F(x)^2)``."""
    if math.isinf(a):
        return 0.0
    pdf, cdf = model.pdf, model.cdf
    return integrate(lambda x: 2.0 * cdf(x) * pdf(x) * math.log1p(x), a, math.inf, quad)


def g_const(model, y, quad=DEFAULT_QUADRATURE):
    """Pair rate when ``y`` exceeds both thresholds.

    ``F(y)^2 log(1+y) + int_y^inf log(1+x) dF^2(x)``; independent of the
    thresholds.
    """
    if y < 0:
        raise ValueError(f"y must be >= 0, got {y}")
    fy = model.cdf(y)
    return fy * fy * math.log1p(y) + _log_dF2(model, y, quad)


def _unpack(inp):
    return float(inp.tau_low), float(inp.tau_high), float(inp.y)


def _cdf_inf(model, t):
    return 1.0 if math.isinf(t) else model.cdf(t)


def r1_cond(model, inp, quad=DEFAULT_QUADRATURE):
    """Pair rate when ``y`` lies below both thresholds."""
    lo, hi, y = _unpack(inp)
    if y > lo + _ORDER_SLACK * (1.0 + lo):
        raise ValueError(f"r1_cond requires y <= tau_low; y={y}, tau_low={lo}")
    f_hi = _cdf_inf(model, hi)
    f_lo = _cdf_inf(model, lo)
    return (_log_dF2(model, hi, quad)
            + f_hi * _log_dF(model, lo, hi, quad)
            + math.log1p(y) * f_lo * f_hi)


def r2_cond(model, inp, quad=DEFAULT_QUADRATURE):
    """Pair rate when ``y`` lies between the thresholds."""
    lo, hi, y = _unpack(inp)
    slack_lo = _ORDER_SLACK * (1.0 + lo)
    slack_hi = _ORDER_SLACK * (1.0 + y)
    if y < lo - slack_lo or y > hi + slack_hi:
        raise ValueError(f"r2_cond requires tau_low <= y <= tau_high; got "
                         f"y={y}, taus=({lo}, {hi})")
    f_hi = _cdf_inf(model, hi)
    return (_log_dF2(model, hi, quad)
            + f_hi * _log_dF(model, y, hi, quad)
            + math.log1p(y) * f_hi * model.cdf(y))


def pair_thresholds(model, q, lambda_pair):
    """Thresholds ``(tau_low, tau_high)`` for probabilities ``(lambda - q, q)``."""
    return model.inv_sf(lambda_pair - q), model.inv_sf(q)


def _check_q(q, lambda_pair):
    if not 0.0 <= lambda_pair <= 2.0:
        raise ValueError(f"lambda_pair must lie in [0, 2], got {lambda_pair}")
    lo = max(0.0, lambda_pair - 1.0)
    hi = lambda_pair / 2.0
    if q < lo - 1e-12 or q > hi + 1e-12:
        raise ValueError(f"q={q} outside [{lo}, {hi}] for lambda_pair={lambda_pair}")
    return min(max(q, lo), hi)


def conditional_rate_q(model, q, lambda_pair, y, quad=DEFAULT_QUADRATURE):
    """Pair rate as a function of the smaller feedback probability ``q``.

    The pair reports with probabilities ``lambda_pair - q`` and ``q``;
    ``y`` is the best competing truncated SINR. Dispatches to
    :func:`g_const`, :func:`r1_cond` or :func:`r2_cond` according to where
    ``y`` falls relative to the two thresholds.
    """
    q = _check_q(q, lambda_pair)
    if y < 0:
        raise ValueError(f"y must be >= 0, got {y}")
    above = model.sf(y)
    if q > above:
        return g_const(model, y, quad)
    lo, hi = pair_thresholds(model, q, lambda_pair)
    # clamp y against round-off in the inverse CDF at branch boundaries
    if q > lambda_pair - above:
        return r1_cond(model, ConditionalRateInput(lo, hi, min(y, lo), lambda_pair), quad)
    return r2_cond(model, ConditionalRateInput(lo, hi, min(max(y, lo), hi), lambda_pair), quad)


def conditional_rate_q_slope(model, q, lambda_pair, y, quad=DEFAULT_QUADRATURE):
    """Exact derivative of :func:`conditional_rate_q` with respect to ``q``.

    Zero while ``y`` is above both thresholds. Between the thresholds it is
    ``int_y^{tau_high} F(x)/(1+x) dx``. Below both thresholds an extra term
    appears because moving ``q`` also moves the lower threshold::

        -(lambda - 2q) log((1 + tau_low)/(1 + y)) + int_{tau_low}^{tau_high} F(x)/(1+x) dx
    """
    q = _check_q(q, lambda_pair)
    above = model.sf(y)
    if q > above:
        return 0.0
    lo, hi = pair_thresholds(model, q, lambda_pair)
    cdf = model.cdf

    def ratio(x):
        return cdf(x) / (1.0 + x)

    if math.isinf(hi):
        return math.inf
    if q > lambda_pair - above:
        return (-(lambda_pair - 2.0 * q) * (math.log1p(lo) - math.log1p(y))
                + integrate(ratio, lo, hi, quad))
    return integrate(ratio, y, hi, quad)
