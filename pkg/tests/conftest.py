"""Shared oracles for the test-suite.

These re-derive quantities from first principles (closed forms typed out
again, plain ``scipy.integrate.quad``) so they stay independent of the
code paths under test.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad


def rayleigh_cdf(x, M, rho):
    if x <= 0:
        return 0.0
    return 1.0 - math.exp(-x / rho) / (x + 1.0) ** (M - 1)


def rayleigh_pdf(x, M, rho):
    return math.exp(-x / rho) / (x + 1.0) ** M * ((x + 1.0) / rho + M - 1)


def _q(f, a, b):
    if not a < b:
        return 0.0
    return quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=500)[0]


def pair_rate_oracle(M, rho, tau1, tau2, y):
    """E[log(1 + max(trunc1, trunc2, y))] by direct two-dimensional quadrature."""
    F = lambda x: rayleigh_cdf(x, M, rho)
    f = lambda x: rayleigh_pdf(x, M, rho)

    def one_user(tau):
        # E[log(1+max(x, y)) ; x >= tau]
        lo = max(tau, y)
        return (math.log1p(y) * (F(lo) - F(tau))
                + _q(lambda x: math.log1p(x) * f(x), lo, math.inf))

    def inner(x1):
        c = max(x1, y, tau2)
        flat = math.log1p(max(x1, y)) * (F(c) - F(tau2))
        return flat + _q(lambda x2: math.log1p(x2) * f(x2), c, math.inf)

    def outer_piece(a, b):
        return _q(lambda x1: inner(x1) * f(x1), a, b)

    cut = max(tau1, y, tau2)
    both = outer_piece(tau1, cut) + outer_piece(cut, math.inf)
    return (F(tau1) * F(tau2) * math.log1p(y)
            + F(tau2) * one_user(tau1)
            + F(tau1) * one_user(tau2)
            + both)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def record_acceptance(label, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'}  {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
