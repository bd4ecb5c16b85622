"""Sufficient conditions for Schur-concavity of the rate in the feedback probabilities.

The rate is Schur-concave (so equal thresholds are optimal) when the SINR
density is bounded at zero and

    f'(t) (1 + t) + f(t) <= 0   for every t = F^{-1}(x), x in [0, 1).

For Rayleigh fading this holds for every SNR once there are two or more
beams, and for a single beam exactly when ``snr <= 1``.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["ConditionReport", "schur_condition_numeric", "schur_condition_rayleigh",
           "condition_margin", "MARGIN_TOL"]

MARGIN_TOL = 1e-10
_X_MAX = 1.0 - 1e-6


@dataclass(frozen=True)
class ConditionReport:
    holds: bool
    worst_margin: float
    witness_x: float
    grid_size: int

    def as_dict(self):
        return {"holds": self.holds, "worst_margin": self.worst_margin,
                "witness_x": self.witness_x, "grid_size": self.grid_size}


def condition_margin(model, t):
    """``f'(t)(1+t) + f(t)``; nonpositive where the condition is met."""
    return model.pdf_prime(t) * (1.0 + t) + model.pdf(t)


def schur_condition_numeric(model, grid_size=1000):
    """Check the density condition on a uniform grid of ``[0, 1 - 1e-6]``.

    The grid lives in probability space, so points concentrate where the
    distribution has most of its mass. Ties for the worst margin go to the
    smallest ``x``.
    """
    grid_size = int(grid_size)
    if grid_size < 100:
        raise ValueError("grid_size must be >= 100")
    f0 = model.pdf(0.0)
    if not math.isfinite(f0):
        raise ValueError("density must be bounded at zero")
    xs = np.linspace(0.0, _X_MAX, grid_size)
    margins = np.array([condition_margin(model, model.inv_cdf(x)) for x in xs])
    k = int(np.argmax(margins))  # first occurrence on ties
    worst = float(margins[k])
    return ConditionReport(holds=bool(worst <= MARGIN_TOL), worst_margin=worst,
                           witness_x=float(xs[k]), grid_size=grid_size)


def schur_condition_rayleigh(beams, snr):
    """Closed-form verdict for Rayleigh fading.

    With ``s = 1 + t`` the margin is
    ``-exp(-t/rho) s**-M (s**2/rho**2 + (2M-3) s/rho + (M-1)**2)``, which is
    negative for every ``t`` when ``M >= 2``; for ``M = 1`` it reduces to
    ``(s/rho)(1 - s/rho)``, nonpositive for all ``s >= 1`` iff ``rho <= 1``.
    """
    if int(beams) != beams or beams < 1:
        raise ValueError(f"beam count must be a positive integer, got {beams!r}")
    if not (snr > 0 and math.isfinite(snr)):
        raise ValueError(f"snr must be positive and finite, got {snr!r}")
    return bool(beams >= 2 or snr <= 1.0)
