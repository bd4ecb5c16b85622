"""Special functions and quadrature shared by the analytic rate code."""

import math
from dataclasses import dataclass

from scipy import integrate as _sp_integrate

__all__ = ["QuadratureSpec", "QuadratureError", "lambert_w0",
           "lambert_w0_from_log", "integrate", "central_diff"]

_INV_E = math.exp(-1.0)
_BRANCH_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances handed to the adaptive integrator."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be strictly positive")
        if int(self.max_subdivisions) < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    The partial result is kept on the exception as ``estimate`` and
    ``abserr`` so callers can report it.
    """

    def __init__(self, message, estimate, abserr):
        super().__init__(message)
        self.estimate = estimate
        self.abserr = abserr


# ---------------------------------------------------------------------------
# Lambert W, principal branch
# ---------------------------------------------------------------------------
def _initial_guess(z):
    if z < -0.25:
        # branch-point series in p = sqrt(2(ez + 1))
        p = math.sqrt(max(2.0 * (math.e * z + 1.0), 0.0))
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    if z < 3.0:
        return math.log1p(z) * (1.0 - math.log1p(math.log1p(z)) / (2.0 + math.log1p(z)))
    l1 = math.log(z)
    l2 = math.log(l1)
    return l1 - l2 + l2 / l1


def _bisect_w(z, lo=-1.0, hi=None):
    if hi is None:
        hi = max(1.0, math.log(z) if z > 1 else 1.0)
        while hi * math.exp(hi) < z:
            hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * math.exp(mid) < z:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def lambert_w0(z):
    """Principal branch W0 of the Lambert W function.

    Solves ``w * exp(w) = z`` for real ``z >= -1/e`` with Halley's method,
    falling back to bisection whenever an iterate leaves ``[-1, inf)``.

    Parameters
    ----------
    z : float
        Argument, at least ``-1/e`` (a slack of 1e-12 is tolerated and
        clamped to the branch point).

    Returns
    -------
    float
        ``w >= -1``.
    """
    z = float(z)
    if math.isnan(z):
        raise ValueError("lambert_w0 of NaN")
    if z < -_INV_E - _BRANCH_TOL:
        raise ValueError(f"lambert_w0 domain error: z={z!r} < -1/e")
    if z <= -_INV_E:
        return -1.0
    if z == 0.0:
        return 0.0
    if math.isinf(z):
        return math.inf

    w = _initial_guess(z)
    for _ in range(64):
        ew = math.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        if wp1 <= 0.0:
            return _bisect_w(z)
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0 or not math.isfinite(denom):
            return _bisect_w(z)
        step = f / denom
        w_new = w - step
        if not math.isfinite(w_new) or w_new < -1.0:
            return _bisect_w(z)
        w = w_new
        if abs(step) <= 1e-15 * (1.0 + abs(w)):
            break
    return w


def lambert_w0_from_log(log_z):
    """W0(exp(log_z)) for arguments too large to exponentiate.

    Newton iteration on ``w + log(w) = log_z``; only valid for
    ``exp(log_z) > e`` (so that ``w > 1``). Smaller arguments are routed
    through :func:`lambert_w0`.
    """
    log_z = float(log_z)
    if log_z < 700.0:
        return lambert_w0(math.exp(log_z))
    w = log_z - math.log(log_z)
    for _ in range(64):
        step = (w + math.log(w) - log_z) / (1.0 + 1.0 / w)
        w -= step
        if abs(step) <= 1e-15 * w:
            break
    return w


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------
def _quad_piece(f, a, b, epsabs, epsrel, limit):
    value, abserr, info, *rest = _sp_integrate.quad(
        f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
    ier = rest[0] if rest else 0
    if ier not in (0,) and abserr > max(epsabs, epsrel * abs(value)):
        msg = rest[1] if len(rest) > 1 else "quadrature did not converge"
        raise QuadratureError(
            f"quadrature failed on [{a}, {b}]: {msg}", value, abserr)
    return value, abserr


def integrate(f, a, b, spec=DEFAULT_QUADRATURE, points=()):
    """Adaptive integral of ``f`` over ``[a, b]``; ``b`` may be ``inf``.

    Breakpoints in ``points`` that fall strictly inside the range split the
    interval so each piece has a smooth integrand. An infinite upper limit
    is mapped onto ``[0, 1)`` with ``x = c + t / (1 - t)`` where ``c`` is
    the last breakpoint.

    Raises
    ------
    QuadratureError
        If a piece does not converge within ``spec.max_subdivisions``; the
        partial estimate of the whole integral is attached.
    """
    a = float(a)
    b = float(b)
    if math.isinf(a) and a > 0:
        return 0.0
    if not a < b:
        if a == b:
            return 0.0
        raise ValueError(f"integrate requires a < b, got a={a}, b={b}")
    cuts = sorted({float(p) for p in points if a < p < b and math.isfinite(p)})
    nodes = [a] + cuts
    if math.isfinite(b):
        nodes.append(b)
    n_pieces = len(nodes) - 1 + (0 if math.isfinite(b) else 1)
    epsabs = spec.abs_tol / max(n_pieces, 1)
    limit = int(spec.max_subdivisions)

    total = 0.0
    err = 0.0
    try:
        for lo, hi in zip(nodes[:-1], nodes[1:]):
            v, e = _quad_piece(f, lo, hi, epsabs, spec.rel_tol, limit)
            total += v
            err += e
        if not math.isfinite(b):
            c = nodes[-1]

            def mapped(t, _c=c):
                s = 1.0 - t
                return f(_c + t / s) / (s * s)

            v, e = _quad_piece(mapped, 0.0, 1.0, epsabs, spec.rel_tol, limit)
            total += v
            err += e
    except QuadratureError as exc:
        raise QuadratureError(str(exc), total + exc.estimate, err + exc.abserr) from None
    return total


def central_diff(f, x, h):
    """Symmetric difference quotient ``(f(x+h) - f(x-h)) / 2h``."""
    if not h > 0:
        raise ValueError("step h must be positive")
    return (f(x + h) - f(x - h)) / (2.0 * h)
