import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beamcast.majorization import majorizes, pinch, random_majorization_pair


def test_basic_examples():
    assert majorizes((0.7, 0.3), (0.5, 0.5))
    assert not majorizes((0.5, 0.5), (0.7, 0.3))
    assert majorizes((3, 2, 1), (2, 2, 2))


def test_unequal_totals_do_not_majorize():
    assert not majorizes((0.7, 0.4), (0.5, 0.5))


def test_length_mismatch():
    with pytest.raises(ValueError):
        majorizes((1, 2), (1, 2, 3))


def test_order_of_entries_is_irrelevant():
    assert majorizes((0.1, 0.9), (0.5, 0.5))


def test_pinch_examples():
    assert np.allclose(pinch((0.5, 0.5), 1, 0.2), (0.7, 0.3))
    z = (0.6, 0.4, 0.2)
    assert np.array_equal(pinch(z, 2, 0.0), z)
    out = pinch(z, 2, 0.1)
    assert np.allclose(out, (0.6, 0.5, 0.1))
    assert majorizes(out, z)


def test_pinch_range_checks():
    with pytest.raises(ValueError):
        pinch((0.6, 0.4, 0.2), 2, 0.3)  # would overtake z_1
    with pytest.raises(ValueError):
        pinch((0.6, 0.4, 0.2), 1, -0.1)
    with pytest.raises(ValueError):
        pinch((0.6, 0.4, 0.2), 3, 0.0)


vectors = st.lists(st.floats(0.0, 1.0), min_size=2, max_size=6)


@settings(max_examples=200)
@given(vectors, st.integers(0, 10), st.floats(0.0, 1.0))
def test_pinch_output_majorizes_input(values, raw_i, frac):
    z = np.sort(np.array(values))[::-1]
    n = z.size
    i = 1 + raw_i % (n - 1)
    k = i - 1
    bound = math.inf
    if k >= 1:
        bound = min(bound, z[k - 1] - z[k])
    if k + 2 <= n - 1:
        bound = min(bound, z[k + 1] - z[k + 2])
    if math.isinf(bound):
        bound = z[k + 1]
    out = pinch(z, i, frac * bound)
    assert majorizes(out, z)
    assert math.fsum(out) == pytest.approx(math.fsum(z), abs=4e-16 * n)


@settings(max_examples=100)
@given(vectors)
def test_reflexive(values):
    assert majorizes(values, values)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_transitive_on_generated_chains(seed, n):
    rng = np.random.default_rng(seed)
    x, y = random_majorization_pair(rng, n, n / 2)
    # push y further towards equality with another Robin-Hood transfer
    z = y.copy()
    i, j = int(np.argmax(z)), int(np.argmin(z))
    move = 0.25 * (z[i] - z[j])
    z[i] -= move
    z[j] += move
    assert majorizes(x, y) and majorizes(y, z)
    assert majorizes(x, z)


def test_random_pairs_always_majorize(rng):
    for n in (2, 3, 5):
        for _ in range(1000 if n == 3 else 200):
            total = rng.uniform(0.01, n)
            x, y = random_majorization_pair(rng, n, total)
            assert majorizes(x, y)
            assert np.all((0 <= x) & (x <= 1)) and np.all((0 <= y) & (y <= 1))
            assert math.fsum(x) == pytest.approx(total, abs=1e-12)


def test_random_pair_argument_checks(rng):
    with pytest.raises(ValueError):
        random_majorization_pair(rng, 1, 0.5)
    with pytest.raises(ValueError):
        random_majorization_pair(rng, 2, 2.5)
