"""SINR model of a random-beam vector broadcast channel.

Each user sees ``M`` beams. With unit-mean exponential received powers
``P_1..P_M`` the SINR on beam ``m`` is

    gamma_m = P_m / (1/rho + sum_{k != m} P_k)

so all beams share one marginal distribution but are coupled through the
common interference term.
"""

import math
from dataclasses import dataclass

import numpy as np

from .numerics import lambert_w0_from_log

__all__ = ["FadingModel", "RayleighModel", "cdf", "sf", "pdf", "pdf_prime",
           "inv_cdf", "inv_sf", "sample_sinr_matrix"]

_U_MAX = 1.0 - 1e-12


class FadingModel:
    """Interface shared by SINR distributions.

    Subclasses provide the marginal CDF and survival function, the density
    and its derivative, the inverse survival function and a joint sampler.
    Everything downstream (rates, the Schur-concavity checker) only talks
    to this surface.
    """

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def sf(self, x):
        raise NotImplementedError

    def pdf(self, x):
        raise NotImplementedError

    def pdf_prime(self, x):
        raise NotImplementedError

    def inv_sf(self, p):
        raise NotImplementedError

    def inv_cdf(self, u):
        u = float(u)
        if not 0.0 <= u < 1.0:
            raise ValueError(f"inv_cdf needs 0 <= u < 1, got {u!r}")
        return self.inv_sf(1.0 - min(u, _U_MAX))

    def sample(self, n_users, rng, size=None):
        raise NotImplementedError


@dataclass(frozen=True)
class RayleighModel(FadingModel):
    """Rayleigh fading with ``beams`` random beams at SNR ``snr``.

    Marginal SINR law::

        F(x) = 1 - exp(-x/rho) / (1 + x)**(M - 1),   x >= 0
    """

    beams: int
    snr: float

    def __post_init__(self):
        if int(self.beams) != self.beams or self.beams < 1:
            raise ValueError(f"beam count must be a positive integer, got {self.beams!r}")
        if not (self.snr > 0 and math.isfinite(self.snr)):
            raise ValueError(f"snr must be positive and finite, got {self.snr!r}")
        object.__setattr__(self, "beams", int(self.beams))
        object.__setattr__(self, "snr", float(self.snr))

    # scalar fast paths are used inside quadrature integrands; arrays go
    # through numpy.
    def sf(self, x):
        M, rho = self.beams, self.snr
        if np.ndim(x) == 0:
            x = float(x)
            if x <= 0.0:
                return 1.0
            if math.isinf(x):
                return 0.0
            return math.exp(-x / rho - (M - 1) * math.log1p(x))
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.exp(-xp / rho - (M - 1) * np.log1p(xp))
        return np.where(x <= 0.0, 1.0, np.where(np.isinf(x), 0.0, out))

    def cdf(self, x):
        M, rho = self.beams, self.snr
        if np.ndim(x) == 0:
            x = float(x)
            if x <= 0.0:
                return 0.0
            if math.isinf(x):
                return 1.0
            return -math.expm1(-x / rho - (M - 1) * math.log1p(x))
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        with np.errstate(over="ignore", invalid="ignore"):
            out = -np.expm1(-xp / rho - (M - 1) * np.log1p(xp))
        return np.where(x <= 0.0, 0.0, np.where(np.isinf(x), 1.0, out))

    def pdf(self, x):
        M, rho = self.beams, self.snr
        if np.ndim(x) == 0:
            x = float(x)
            if x < 0.0:
                return 0.0
            if math.isinf(x):
                return 0.0
            s = 1.0 + x
            return math.exp(-x / rho - M * math.log(s)) * (s / rho + M - 1)
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        s = 1.0 + xp
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.exp(-xp / rho - M * np.log(s)) * (s / rho + M - 1)
        return np.where((x < 0.0) | np.isinf(x), 0.0, out)

    def pdf_prime(self, x):
        """Exact derivative of the density.

        Writing ``s = 1 + x``::

            f'(x) = -exp(-x/rho) s**-(M+1) * (s**2/rho**2 + 2(M-1) s/rho + M(M-1))
        """
        M, rho = self.beams, self.snr
        if np.ndim(x) == 0:
            x = float(x)
            if x < 0.0 or math.isinf(x):
                return 0.0
            s = 1.0 + x
            poly = (s / rho) ** 2 + 2.0 * (M - 1) * s / rho + M * (M - 1)
            return -math.exp(-x / rho - (M + 1) * math.log(s)) * poly
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        s = 1.0 + xp
        poly = (s / rho) ** 2 + 2.0 * (M - 1) * s / rho + M * (M - 1)
        with np.errstate(over="ignore", invalid="ignore"):
            out = -np.exp(-xp / rho - (M + 1) * np.log(s)) * poly
        return np.where((x < 0.0) | np.isinf(x), 0.0, out)

    def inv_sf(self, p):
        """Threshold ``t`` with ``P(gamma >= t) = p``.

        ``p = 0`` maps to ``inf`` (never exceeded) and ``p = 1`` to 0.
        For ``M >= 2`` the Lambert-W closed form is evaluated in log space
        and refined with one Newton step on the survival function.
        """
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"survival probability must lie in [0, 1], got {p!r}")
        if p == 0.0:
            return math.inf
        if p == 1.0:
            return 0.0
        M, rho = self.beams, self.snr
        if M == 1:
            return -rho * math.log(p)
        p = max(p, 1e-12)
        a = (M - 1) * rho
        log_arg = 1.0 / a - math.log(a) - math.log(p) / (M - 1)
        t = -1.0 + a * lambert_w0_from_log(log_arg)
        t = max(t, 0.0)
        dens = self.pdf(t)
        if dens > 0.0:
            t_new = t + (self.sf(t) - p) / dens
            if t_new >= 0.0:
                t = t_new
        return t

    def sample(self, n_users, rng, size=None):
        """Joint SINR draws, shape ``(n_users, M)`` or ``(size, n_users, M)``."""
        n_users = int(n_users)
        if n_users < 1:
            raise ValueError("n_users must be >= 1")
        shape = (n_users, self.beams) if size is None else (int(size), n_users, self.beams)
        power = rng.standard_exponential(shape)
        interference = power.sum(axis=-1, keepdims=True) - power
        return power / (1.0 / self.snr + interference)


# functional spellings -------------------------------------------------------
def cdf(model, x):
    return model.cdf(x)


def sf(model, x):
    return model.sf(x)


def pdf(model, x):
    return model.pdf(x)


def pdf_prime(model, x):
    return model.pdf_prime(x)


def inv_cdf(model, u):
    return model.inv_cdf(u)


def inv_sf(model, p):
    return model.inv_sf(p)


def sample_sinr_matrix(model, n_users, rng, size=None):
    """Draw SINR vectors for ``n_users`` independent users.

    Rows are independent users; within a row the beams share interference.
    """
    return model.sample(n_users, rng, size=size)
