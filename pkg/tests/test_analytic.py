"""Closed-form checks against independent numerical oracles.

The subscriber-count law is validated against direct quadrature of the
Poisson mixture over a shape-3.5 gamma cell-area density, built here
from scipy.stats primitives rather than package code.
"""

import numpy as np
import numpy.testing as npt
import pytest
from scipy import integrate, stats

from cellcast import (
    ModelParams,
    ParameterError,
    avg_saved,
    avg_wasted,
    cell_size_pdf,
    expected_subscribers,
    subscriber_pmf,
    subscriber_pmf_series,
)
from cellcast.analytic import pmf_support

SHAPE = 3.5


def mixture_pmf_oracle(k, mu, lambda_b=1.0):
    """P[K=k] by integrating Poisson(k; a*lu*x) over the cell-area gamma."""
    cell_area = stats.gamma(a=SHAPE, scale=1.0 / (SHAPE * lambda_b))
    rate = mu * lambda_b  # alpha * lambda_u

    def integrand(x):
        return cell_area.pdf(x) * stats.poisson.pmf(k, rate * x)

    val, err = integrate.quad(integrand, 0.0, np.inf, limit=200)
    assert err < 1e-7
    return val


class TestCellSizePdf:
    def test_zero_at_origin(self):
        assert cell_size_pdf(0.0, 1.0) == 0.0

    def test_matches_gamma_density(self):
        xs = np.linspace(0.01, 5.0, 40)
        for lb in (0.5, 1.0, 2.0):
            ref = stats.gamma.pdf(xs, a=SHAPE, scale=1.0 / (SHAPE * lb))
            npt.assert_allclose(cell_size_pdf(xs, lb), ref, rtol=1e-12)

    def test_normalizes_to_one(self):
        total, _ = integrate.quad(lambda x: cell_size_pdf(x, 2.0), 0, np.inf)
        assert abs(total - 1.0) < 1e-8

    def test_mean_is_inverse_density(self):
        for lb in (0.5, 1.0, 3.0):
            mean, _ = integrate.quad(lambda x: x * cell_size_pdf(x, lb), 0, np.inf)
            assert abs(mean - 1.0 / lb) < 1e-8

    def test_rejects_bad_arguments(self):
        with pytest.raises(ParameterError):
            cell_size_pdf(1.0, 0.0)
        with pytest.raises(ParameterError):
            cell_size_pdf(-1.0, 1.0)


class TestSubscriberPmf:
    # frozen from mixture_pmf_oracle (quad error < 1e-8)
    def test_frozen_oracle_values(self):
        p = ModelParams(1.0, 3.0, 1.0)  # mu = 3
        assert subscriber_pmf(0, p) == pytest.approx(0.114562216337, abs=2e-8)
        assert subscriber_pmf(1, p) == pytest.approx(0.185062041779, abs=2e-8)

    def test_degenerate_at_mu_zero(self):
        p = ModelParams(1.0, 3.0, 0.0)
        assert subscriber_pmf(0, p) == 1.0
        assert subscriber_pmf(5, p) == 0.0

    @pytest.mark.parametrize("mu", [0.1, 1.0, 3.0, 10.0])
    def test_matches_mixture_quadrature(self, mu):
        p = ModelParams(1.0, mu, 1.0)
        ks = np.arange(51)
        got = subscriber_pmf(ks, p)
        want = np.array([mixture_pmf_oracle(k, mu) for k in ks])
        npt.assert_allclose(got, want, atol=1e-6, rtol=0)

    def test_rejects_negative_or_fractional_k(self):
        p = ModelParams(1.0, 3.0, 1.0)
        with pytest.raises(ParameterError):
            subscriber_pmf(-1, p)
        with pytest.raises(ParameterError):
            subscriber_pmf(1.5, p)

    @pytest.mark.parametrize("mu", [0.1, 1.0, 3.0, 10.0])
    def test_normalization_and_mean(self, mu):
        p = ModelParams(1.0, mu, 1.0)
        support = pmf_support(p)
        total = support.sum()
        assert 1.0 - 1e-10 <= total <= 1.0
        mean = (np.arange(support.shape[0]) * support).sum()
        assert abs(mean - mu) < 1e-8

    @pytest.mark.parametrize("mu", [0.1, 1.0, 3.0, 10.0, 100.0])
    def test_recurrence_agrees_with_log_space(self, mu):
        p = ModelParams(1.0, mu, 1.0)
        ks = np.arange(10_001)
        a = subscriber_pmf(ks, p)
        b = subscriber_pmf_series(p, 10_000)
        assert np.all(np.abs(a - b) <= 1e-12 + 1e-12 * np.maximum(a, b))


class TestSavedWasted:
    def test_reference_points(self):
        zero = ModelParams(1.0, 3.0, 0.0)
        assert avg_saved(zero) == 0.0
        assert avg_wasted(zero) == 1.0

        full = ModelParams(1.0, 3.0, 1.0)
        assert avg_saved(full) == pytest.approx(2.114562216339, abs=1e-10)
        assert avg_wasted(full) == pytest.approx(0.114562216339, abs=1e-10)
        half = ModelParams(1.0, 3.0, 0.5)
        assert avg_wasted(half) == pytest.approx(0.286974389101, abs=1e-10)

    def test_crowded_cell_asymptote(self):
        p = ModelParams(1.0, 350.0, 1.0)  # mu = 350
        assert abs(avg_saved(p) - (p.mu - 1.0)) / p.mu < 0.002
        assert avg_wasted(p) < 1e-6

    def test_empty_cell_asymptote(self):
        p = ModelParams(1.0, 0.001, 1.0)
        assert avg_saved(p) < 1e-3
        assert avg_wasted(p) > 0.999

    def test_proof_identities_randomized(self):
        rng = np.random.default_rng(2024)
        for _ in range(500):
            lam_ratio = 10.0 ** rng.uniform(-1.5, 2.0)
            p = ModelParams(1.0, lam_ratio, rng.uniform(0.0, 1.0))
            saved = avg_saved(p)
            rhs = expected_subscribers(p) + subscriber_pmf(0, p) - 1.0
            assert saved == pytest.approx(rhs, rel=1e-12, abs=1e-13)
            assert avg_wasted(p) == pytest.approx(subscriber_pmf(0, p), rel=1e-12)

    def test_monotone_in_rating(self):
        alphas = np.linspace(0.0, 1.0, 201)
        saved = [avg_saved(ModelParams(1.0, 3.0, a)) for a in alphas]
        wasted = [avg_wasted(ModelParams(1.0, 3.0, a)) for a in alphas]
        assert np.all(np.diff(saved) >= 0)
        assert np.all(np.diff(wasted) <= 0)

    def test_curves_cross_at_inverse_ratio(self):
        # saved - wasted = mu - 1, so the crossing sits at alpha = lb/lu
        alphas = np.linspace(0.0, 1.0, 201)
        gap = np.array([
            avg_saved(ModelParams(1.0, 3.0, a)) - avg_wasted(ModelParams(1.0, 3.0, a))
            for a in alphas
        ])
        signs = np.sign(gap[gap != 0.0])
        assert (np.diff(signs) != 0).sum() == 1
        at_cross = ModelParams(1.0, 3.0, 1.0 / 3.0)
        assert abs(avg_saved(at_cross) - avg_wasted(at_cross)) < 1e-15


class TestModelParams:
    def test_mu(self):
        assert ModelParams(2.0, 6.0, 1.0).mu == 3.0
        assert ModelParams(1.0, 3.0, 0.5).mu == 1.5
        assert expected_subscribers(ModelParams(1.0, 3.0, 0.0)) == 0.0

    def test_invariants(self):
        with pytest.raises(ParameterError):
            ModelParams(0.0, 1.0, 0.5)
        with pytest.raises(ParameterError):
            ModelParams(1.0, -1.0, 0.5)
        with pytest.raises(ParameterError):
            ModelParams(1.0, 1.0, 1.5)
