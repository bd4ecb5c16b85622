import math

import numpy as np
import pytest
from scipy import stats
from scipy.optimize import brentq

from beamcast.channel import RayleighModel, sample_sinr_matrix
from beamcast.numerics import central_diff

from conftest import rayleigh_cdf, rayleigh_pdf

MODELS = [RayleighModel(M, rho) for M in (1, 2, 3, 5) for rho in (0.1, 1.0, 10.0)]


class TestDistribution:
    def test_cdf_values(self):
        assert RayleighModel(1, 1.0).cdf(0.0) == 0.0
        assert RayleighModel(1, 1.0).cdf(1.0) == pytest.approx(0.6321206, abs=1e-7)
        assert RayleighModel(2, 1.0).cdf(1.0) == pytest.approx(0.8160603, abs=1e-7)
        assert RayleighModel(2, 1.0).cdf(-3.0) == 0.0

    def test_pdf_at_zero(self):
        assert RayleighModel(1, 1.0).pdf(0.0) == pytest.approx(1.0)
        assert RayleighModel(1, 2.0).pdf(0.0) == pytest.approx(0.5)
        assert RayleighModel(3, 1.0).pdf(0.0) == pytest.approx(3.0)

    @pytest.mark.parametrize("model", MODELS, ids=repr)
    def test_pdf_bounded_at_zero(self, model):
        assert model.pdf(0.0) == pytest.approx(1 / model.snr + model.beams - 1)

    def test_pdf_prime_values(self):
        m = RayleighModel(1, 1.0)
        assert m.pdf_prime(0.0) == pytest.approx(-1.0)
        assert m.pdf_prime(1.0) == pytest.approx(-math.exp(-1.0))
        assert abs(RayleighModel(3, 2.0).pdf_prime(500.0)) < 1e-100

    @pytest.mark.parametrize("model", MODELS, ids=repr)
    def test_pdf_prime_matches_finite_difference(self, model):
        for x in np.linspace(1e-5, 50, 201):
            fd = central_diff(model.pdf, x, 1e-6)
            assert model.pdf_prime(x) == pytest.approx(fd, abs=1e-6)

    @pytest.mark.parametrize("model", MODELS, ids=repr)
    def test_pdf_matches_cdf_derivative(self, model):
        for x in np.linspace(1e-5, 50, 201):
            assert model.pdf(x) == pytest.approx(central_diff(model.cdf, x, 1e-6), abs=1e-6)

    @pytest.mark.parametrize("model", MODELS, ids=repr)
    def test_matches_independent_formula(self, model):
        for x in (0.0, 0.3, 2.0, 17.0):
            assert model.cdf(x) == pytest.approx(rayleigh_cdf(x, model.beams, model.snr), abs=1e-14)
            assert model.pdf(x) == pytest.approx(rayleigh_pdf(x, model.beams, model.snr), rel=1e-12)

    @pytest.mark.parametrize("model", MODELS, ids=repr)
    def test_cdf_monotone_with_unit_limit(self, model):
        xs = np.linspace(0.0, 100.0, 2001)
        vals = model.cdf(xs)
        assert np.all(np.diff(vals) >= 0)
        assert vals[0] == 0.0
        assert model.cdf(1e3 * model.snr * model.beams) > 1 - 1e-6

    def test_array_and_scalar_paths_agree(self):
        m = RayleighModel(3, 0.7)
        xs = np.array([-1.0, 0.0, 0.5, 3.0, np.inf])
        for fn in ("cdf", "sf", "pdf", "pdf_prime"):
            arr = getattr(m, fn)(xs)
            assert np.allclose(arr, [getattr(m, fn)(float(x)) for x in xs], rtol=1e-14, atol=0)

    def test_invalid_model(self):
        with pytest.raises(ValueError):
            RayleighModel(0, 1.0)
        with pytest.raises(ValueError):
            RayleighModel(2, -1.0)


class TestInverse:
    def test_single_beam_closed_form(self):
        assert RayleighModel(1, 1.0).inv_cdf(0.0) == 0.0
        assert RayleighModel(1, 2.0).inv_cdf(0.5) == pytest.approx(1.3862944, abs=1e-7)

    def test_two_beams_against_bisection(self):
        m = RayleighModel(2, 1.0)
        oracle = brentq(lambda x: rayleigh_cdf(x, 2, 1.0) - 0.9, 0.0, 50.0, xtol=1e-14)
        assert oracle == pytest.approx(1.4191633399, abs=1e-9)
        v = m.inv_cdf(0.9)
        assert v == pytest.approx(oracle, abs=1e-9)
        assert m.cdf(v) == pytest.approx(0.9, abs=1e-9)

    @pytest.mark.parametrize("model", MODELS + [RayleighModel(8, 0.001), RayleighModel(2, 1e6)],
                             ids=repr)
    def test_round_trip(self, model):
        for u in np.linspace(0.0, 0.999, 1001):
            assert abs(model.cdf(model.inv_cdf(u)) - u) < 1e-9

    def test_survival_inverse_for_tiny_probabilities(self):
        m = RayleighModel(3, 1.0)
        for p in (1e-3, 1e-8, 1e-11):
            assert m.sf(m.inv_sf(p)) == pytest.approx(p, rel=1e-9)
        assert m.inv_sf(0.0) == math.inf
        assert m.inv_sf(1.0) == 0.0

    def test_domain_errors(self):
        m = RayleighModel(2, 1.0)
        for u in (-0.1, 1.0, 1.5):
            with pytest.raises(ValueError):
                m.inv_cdf(u)


class TestSampler:
    def test_shapes_and_support(self, rng):
        m = RayleighModel(4, 3.0)
        g = sample_sinr_matrix(m, 5, rng)
        assert g.shape == (5, 4)
        batch = sample_sinr_matrix(m, 5, rng, size=100)
        assert batch.shape == (100, 5, 4)
        assert np.all(batch >= 0) and np.all(np.isfinite(batch))

    def test_single_beam_is_scaled_exponential(self, rng):
        m = RayleighModel(1, 2.0)
        g = m.sample(1, rng, size=100_000)[:, 0, 0]
        ks = stats.kstest(g, lambda x: 1 - np.exp(-x / 2.0)).statistic
        assert ks < 0.01

    @pytest.mark.parametrize("M,rho", [(2, 1.0), (3, 0.5), (4, 10.0)])
    def test_every_beam_marginal_matches_cdf(self, rng, M, rho):
        m = RayleighModel(M, rho)
        g = m.sample(1, rng, size=100_000)[:, 0, :]
        for beam in range(M):
            assert stats.kstest(g[:, beam], m.cdf).statistic < 0.01

    def test_beams_share_interference(self, rng):
        # strong beam k means weaker SINR elsewhere: negative correlation
        g = RayleighModel(2, 10.0).sample(1, rng, size=50_000)[:, 0, :]
        assert np.corrcoef(np.log(g[:, 0]), np.log(g[:, 1]))[0, 1] < -0.1
