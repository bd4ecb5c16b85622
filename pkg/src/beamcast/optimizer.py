"""Threshold selection under an average feedback-load budget.

Maximise the ergodic sum rate over per-user feedback probabilities ``p``
subject to ``sum(p) <= lam`` and ``0 <= p_i <= 1``. Thresholds follow from
``tau_i = F^{-1}(1 - p_i)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .majorization import _random_box_point
from .numerics import DEFAULT_QUADRATURE, QuadratureError
from .rate import ThresholdPolicy, feedback_load, policy_from_probs, sum_rate

__all__ = ["OptimizationResult", "TwoUserSearch", "homogeneous_policy", "optimize",
           "exhaustive_two_user", "rate_of_probs"]

_LOAD_SLACK = 1e-9
_TIE = 1e-12


@dataclass
class OptimizationResult:
    best_p: tuple
    best_thresholds: ThresholdPolicy
    best_rate: float
    load: float
    converged: bool
    iterations: int
    homogeneous_rate: float
    trace: list = field(default_factory=list, repr=False)


@dataclass
class TwoUserSearch:
    """Rate profile of the two-user split ``(lam - q, q)``."""

    best_q: float
    best_rate: float
    q: np.ndarray
    rate: np.ndarray
    lam: float

    @property
    def grid_step(self):
        return float(self.q[1] - self.q[0]) if self.q.size > 1 else 0.0


def _check_budget(n, lam):
    if int(n) != n or n < 1:
        raise ValueError(f"number of users must be a positive integer, got {n!r}")
    if not (0 < lam <= n):
        raise ValueError(f"feedback budget must satisfy 0 < lam <= n, got lam={lam}, n={n}")


def homogeneous_policy(model, n, lam):
    """Everyone uses the threshold that gives feedback probability ``lam/n``."""
    _check_budget(n, lam)
    tau = model.inv_sf(min(lam / n, 1.0))
    return ThresholdPolicy((tau,) * int(n))


def rate_of_probs(model, probs, quad=DEFAULT_QUADRATURE):
    """Sum rate of the policy with the given feedback probabilities."""
    try:
        return sum_rate(model, policy_from_probs(model, probs), quad)
    except QuadratureError as exc:
        raise QuadratureError(f"{exc} (feedback probabilities {list(probs)})",
                              exc.estimate, exc.abserr) from None


class _Objective:
    # the rate is symmetric in p, so sorted tuples make a good cache key
    def __init__(self, model, quad):
        self.model = model
        self.quad = quad
        self.cache = {}

    def __call__(self, p):
        key = tuple(sorted(float(v) for v in p))
        val = self.cache.get(key)
        if val is None:
            val = rate_of_probs(self.model, key, self.quad)
            self.cache[key] = val
        return val


def _fill_slack(p, lam):
    # the rate never decreases when any p_i goes up, so unused budget is
    # handed out to users with room left
    p = p.copy()
    for _ in range(p.size + 1):
        slack = lam - p.sum()
        room = 1.0 - p
        if slack <= 1e-15 or room.sum() <= 0:
            break
        share = min(slack / room.sum(), 1.0)
        p = np.minimum(p + share * room, 1.0)
    return p


def _poll(p, step, lam):
    n = p.size
    total = p.sum()
    for i in range(n):
        up = min(step, 1.0 - p[i], lam - total)
        if up > 0:
            q = p.copy()
            q[i] += up
            yield q
        down = min(step, p[i])
        if down > 0:
            q = p.copy()
            q[i] -= down
            yield q
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            amount = min(step, p[j], 1.0 - p[i])
            if amount > 0:
                q = p.copy()
                q[i] += amount
                q[j] -= amount
                yield q


def _pattern_search(objective, p0, lam, step0, step_tol, max_iters):
    p = np.array(p0, dtype=float)
    best = objective(p)
    trace = [(tuple(p), best)]
    step = step0
    iters = 0
    while step >= step_tol and iters < max_iters:
        iters += 1
        cand_p, cand_r = None, best
        for q in _poll(p, step, lam):
            r = objective(q)
            if r > cand_r + _TIE:
                cand_p, cand_r = q, r
        if cand_p is None:
            step *= 0.5
        else:
            p, best = cand_p, cand_r
            trace.append((tuple(p), best))
    converged = step < step_tol
    filled = _fill_slack(p, lam)
    if not np.array_equal(filled, p):
        r = objective(filled)
        if r >= best:
            p, best = filled, r
            trace.append((tuple(p), best))
    return p, best, converged, iters, trace


def _starts(n, lam, count, rng):
    uniform = np.full(n, lam / n)
    starts = [uniform]
    if n > 1 and count > 1:
        heavy = np.zeros(n)
        heavy[0] = min(1.0, lam)
        rest = lam - heavy[0]
        if rest > 0:
            heavy[1:] = rest / (n - 1)
        starts.append(np.minimum(heavy, 1.0))
    while len(starts) < count:
        starts.append(_random_box_point(rng, n, lam))
    return starts[:count]


def _better(a, b):
    """Order (rate, p) candidates: rate, then lower variance, then lexicographic."""
    (ra, pa), (rb, pb) = a, b
    if abs(ra - rb) > _TIE:
        return ra > rb
    va, vb = float(np.var(pa)), float(np.var(pb))
    if va != vb:
        return va < vb
    return tuple(pa) < tuple(pb)


def optimize(model, n, lam, starts=8, step_tol=1e-5, max_iters=2000,
             initial_step=None, seed=0, quad=DEFAULT_QUADRATURE):
    """Multi-start pattern search over feedback probabilities.

    Each start polls single-coordinate moves and pairwise transfers (which
    slide along the budget face) and halves the step whenever nothing
    improves. The equal-threshold policy is always evaluated and wins ties.
    """
    _check_budget(n, lam)
    n = int(n)
    if int(starts) < 1:
        raise ValueError("starts must be >= 1")
    rng = np.random.default_rng(seed)
    objective = _Objective(model, quad)
    step0 = initial_step if initial_step is not None else max(min(0.25, lam / n), 4 * step_tol)

    homog_p = np.full(n, min(lam / n, 1.0))
    homog_rate = objective(homog_p)
    best = (homog_rate, homog_p)
    trace = [(tuple(homog_p), homog_rate)]
    total_iters = 0
    all_converged = True
    for p0 in _starts(n, lam, int(starts), rng):
        p, r, conv, iters, tr = _pattern_search(objective, p0, lam, step0, step_tol, max_iters)
        trace.extend(tr)
        total_iters += iters
        all_converged &= conv
        if _better((r, p), best):
            best = (r, p)

    rate, p = best
    p = np.clip(p, 0.0, 1.0)
    policy = policy_from_probs(model, p)
    return OptimizationResult(best_p=tuple(float(v) for v in p), best_thresholds=policy,
                              best_rate=float(rate), load=feedback_load(model, policy),
                              converged=bool(all_converged), iterations=total_iters,
                              homogeneous_rate=float(homog_rate), trace=trace)


def exhaustive_two_user(model, lam, grid_points=2001, quad=DEFAULT_QUADRATURE):
    """Brute-force scan of the two-user split ``p = (lam - q, q)``.

    ``q`` runs over a uniform grid of ``[max(0, lam - 1), lam / 2]``.
    """
    if not 0 < lam <= 2:
        raise ValueError(f"two-user budget must satisfy 0 < lam <= 2, got {lam}")
    grid_points = int(grid_points)
    if grid_points < 11:
        raise ValueError("grid_points must be >= 11")
    qs = np.linspace(max(0.0, lam - 1.0), lam / 2.0, grid_points)
    rates = np.array([rate_of_probs(model, (lam - q, q), quad) for q in qs])
    k = int(np.argmax(rates))
    return TwoUserSearch(best_q=float(qs[k]), best_rate=float(rates[k]), q=qs,
                         rate=rates, lam=float(lam))
