"""Majorization predicates and pair-perturbation helpers."""

import numpy as np

__all__ = ["majorizes", "pinch", "random_majorization_pair"]

TOL = 1e-12


def majorizes(x, y, tol=TOL):
    """True if ``x`` majorizes ``y``.

    Partial sums of the descending-sorted ``x`` must dominate those of
    ``y`` for every prefix, and the totals must agree (within ``tol``).
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    cx = np.cumsum(np.sort(x)[::-1])
    cy = np.cumsum(np.sort(y)[::-1])
    if abs(cx[-1] - cy[-1]) > tol:
        return False
    return bool(np.all(cx[:-1] >= cy[:-1] - tol))


def pinch(z, i, eps):
    """Move ``eps`` of mass from coordinate ``i+1`` to ``i`` (1-based ``i``).

    ``z`` must be sorted in descending order. ``eps`` is limited so the
    order is preserved: ``eps <= z[i-1] - z[i]`` (skipped for ``i = 1``)
    and ``eps <= z[i+1] - z[i+2]`` (skipped for ``i = n - 1``).
    """
    z = np.array(z, dtype=float)
    n = z.size
    if not 1 <= i <= n - 1:
        raise ValueError(f"index i must be in 1..{n - 1}, got {i}")
    k = i - 1  # 0-based position of z_i
    bound = np.inf
    if k >= 1:
        bound = min(bound, z[k - 1] - z[k])
    if k + 2 <= n - 1:
        bound = min(bound, z[k + 1] - z[k + 2])
    if eps < 0 or eps > bound + TOL:
        raise ValueError(f"eps={eps} outside admissible range [0, {bound}]")
    z[k] += eps
    z[k + 1] -= eps
    return z


def random_majorization_pair(rng, n, total, max_transfers=10):
    """Random ``(x, y)`` with equal sums and ``x`` majorizing ``y``.

    ``x`` is a random point in ``[0, 1]^n`` with the requested total; ``y``
    follows from 1 to ``max_transfers`` Robin-Hood transfers, each moving
    mass from a richer coordinate to a poorer one without letting them
    swap order.
    """
    n = int(n)
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0 < total <= n:
        raise ValueError(f"total must lie in (0, {n}], got {total}")
    x = _random_box_point(rng, n, total)
    y = x.copy()
    for _ in range(int(rng.integers(1, max_transfers + 1))):
        i, j = rng.choice(n, size=2, replace=False)
        if y[i] < y[j]:
            i, j = j, i
        gap = y[i] - y[j]
        amount = rng.uniform(0.0, 0.5) * gap
        y[i] -= amount
        y[j] += amount
    return x, y


def _random_box_point(rng, n, total):
    # Dirichlet direction scaled to ``total`` then repaired onto [0, 1]^n by
    # redistributing any overflow among coordinates with spare room.
    x = rng.dirichlet(np.ones(n)) * total
    for _ in range(100):
        over = np.clip(x - 1.0, 0.0, None)
        excess = over.sum()
        if excess <= 0:
            break
        x = np.minimum(x, 1.0)
        room = 1.0 - x
        x += excess * room / room.sum()
    x = np.minimum(x, 1.0)
    return x
