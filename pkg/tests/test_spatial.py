"""
Unit Tests for the sampling design and Gaussian random field simulation.
"""
import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from models.dataset import ResponseScale, load_csv
from models.errors import CovarianceNotPD, DataError
from spatial import (
    CovarianceFamily,
    CovarianceSpec,
    CovariateStructure,
    SamplingDesign,
    cholesky_factor,
    covariance_matrix,
    covariate_covariance,
    export_dataset_csv,
    sample_locations,
    simulate_covariates,
    simulate_field,
)


class TestSampling:
    def test_locations_fill_growing_square(self):
        locations = sample_locations(SamplingDesign(), 400, seed=1)
        assert locations.shape == (400, 2)
        assert locations.min() >= 0.0
        assert locations.max() <= 20.0
        # not squeezed into the unit square
        assert locations.max() > 15.0

    def test_same_seed_same_locations(self):
        first = sample_locations(SamplingDesign(), 50, seed=9)
        second = sample_locations(SamplingDesign(), 50, seed=9)
        np.testing.assert_array_equal(first, second)

    def test_rejects_empty(self):
        with pytest.raises(DataError):
            sample_locations(SamplingDesign(), 0, seed=1)

    def test_eta(self):
        assert SamplingDesign(d=2).eta(100) == pytest.approx(10.0)
        assert SamplingDesign(d=1).eta(100) == pytest.approx(100.0)


class TestCovarianceSpec:
    def test_default_names(self):
        assert CovarianceSpec(CovarianceFamily.EXPONENTIAL, range=2.0).name == "Exp2"
        assert CovarianceSpec(CovarianceFamily.GAUSSIAN, range=1.0).name == "Gauss1"

    @pytest.mark.parametrize("kwargs", [{"range": 0.0}, {"nugget": 1.5}, {"sd": -1.0}])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(DataError):
            CovarianceSpec(**kwargs)

    def test_covariance_values(self):
        exp = CovarianceSpec(CovarianceFamily.EXPONENTIAL, range=1.0, nugget=0.2, sd=2.0)
        assert exp.covariance(0.0) == pytest.approx(4.0)
        assert exp.covariance(1.0) == pytest.approx(4.0 * 0.8 * np.exp(-1.0))
        gauss = CovarianceSpec(CovarianceFamily.GAUSSIAN, range=2.0, nugget=0.0)
        assert gauss.covariance(2.0) == pytest.approx(np.exp(-1.0))


class TestCovarianceMatrix:
    def test_symmetric_with_full_diagonal(self):
        cov = CovarianceSpec(CovarianceFamily.GAUSSIAN, range=1.0, nugget=0.2, sd=1.5)
        locations = sample_locations(SamplingDesign(), 30, seed=2)
        matrix = covariance_matrix(cov, locations)
        np.testing.assert_array_equal(matrix, matrix.T)
        np.testing.assert_allclose(np.diag(matrix), 2.25)
        assert np.all(np.linalg.eigvalsh(matrix) > 0)

    def test_nugget_only_at_zero_lag(self):
        cov = CovarianceSpec(CovarianceFamily.EXPONENTIAL, range=1.0, nugget=1.0)
        matrix = covariance_matrix(cov, np.array([[0.0, 0.0], [0.5, 0.0]]))
        np.testing.assert_allclose(matrix, np.eye(2))


class TestSimulateField:
    def test_deterministic_given_seed(self):
        cov = CovarianceSpec(range=1.0)
        locations = sample_locations(SamplingDesign(), 40, seed=3)
        np.testing.assert_array_equal(
            simulate_field(cov, locations, seed=4), simulate_field(cov, locations, seed=4)
        )

    def test_zero_sd_returns_mean(self):
        cov = CovarianceSpec(sd=0.0, mean=0.5)
        field = simulate_field(cov, np.zeros((5, 2)) + np.arange(5)[:, None], seed=1)
        np.testing.assert_array_equal(field, np.full(5, 0.5))

    def test_empirical_correlation(self):
        """Two sites at distance 1 under Exp1 with nugget 0.2 correlate at 0.8 / e."""
        cov = CovarianceSpec(CovarianceFamily.EXPONENTIAL, range=1.0, nugget=0.2, sd=1.0)
        locations = np.array([[0.0, 0.0], [1.0, 0.0]])
        rng = np.random.default_rng(2024)
        draws = np.array([simulate_field(cov, locations, rng) for _ in range(10_000)])
        observed = np.corrcoef(draws[:, 0], draws[:, 1])[0, 1]
        expected = 0.8 * np.exp(-1.0)
        standard_error = (1 - expected ** 2) / np.sqrt(len(draws))
        assert abs(observed - expected) < 3 * standard_error

    def test_duplicate_sites_need_jitter(self, caplog):
        cov = CovarianceSpec(range=1.0, nugget=0.0)
        locations = np.array([[1.0, 1.0], [1.0, 1.0], [3.0, 2.0]])
        with caplog.at_level(logging.WARNING):
            field = simulate_field(cov, locations, seed=0)
        assert field.shape == (3,)
        assert "Duplicate" in caplog.text
        assert "jitter" in caplog.text

    def test_indefinite_matrix_raises(self):
        with pytest.raises(CovarianceNotPD):
            cholesky_factor(np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestCovariates:
    def test_equicorrelation_matrix(self):
        sigma = covariate_covariance(3, 0.5)
        np.testing.assert_allclose(sigma, [[1, 0.5, 0.5], [0.5, 1, 0.5], [0.5, 0.5, 1]])

    def test_ar1_matrix(self):
        sigma = covariate_covariance(3, 0.5, CovariateStructure.AR1)
        np.testing.assert_allclose(sigma[0], [1.0, 0.5, 0.25])

    def test_sample_correlation(self):
        x = simulate_covariates(20_000, 4, 0.5, seed=8)
        sample = np.corrcoef(x, rowvar=False)
        off_diagonal = sample[~np.eye(4, dtype=bool)]
        np.testing.assert_allclose(off_diagonal, 0.5, atol=0.03)
        np.testing.assert_allclose(x.std(axis=0), 1.0, atol=0.03)

    def test_rejects_bad_correlation(self):
        with pytest.raises(DataError):
            simulate_covariates(10, 3, 1.0, seed=1)


def test_export_dataset_csv(tmp_path):
    """Simulated samples land in the same CSV format the fit command reads."""
    locations = sample_locations(SamplingDesign(), 10, seed=1)
    covariates = simulate_covariates(10, 2, 0.3, seed=2)
    response = np.linspace(-1.0, 1.0, 10)
    path = export_dataset_csv(locations, covariates, response, tmp_path / "sample.csv")
    loaded = load_csv(path, scale=ResponseScale.LOG)
    assert loaded.scale is ResponseScale.LOG
    np.testing.assert_array_equal(loaded.response, response)


def test_location_mean_is_domain_center():
    """Uniform design: the coordinate means sit at eta_n / 2 within 3 standard errors."""
    n = 100_000
    locations = sample_locations(SamplingDesign(), n, seed=17)
    eta = SamplingDesign().eta(n)
    standard_error = eta / np.sqrt(12 * n)
    assert np.all(np.abs(locations.mean(axis=0) - eta / 2) < 3 * standard_error)


def test_pure_nugget_is_uncorrelated():
    cov = CovarianceSpec(CovarianceFamily.GAUSSIAN, range=1.0, nugget=1.0, sd=2.0, mean=1.0)
    locations = np.array([[0.0, 0.0], [0.3, 0.0]])
    rng = np.random.default_rng(5)
    draws = np.array([simulate_field(cov, locations, rng) for _ in range(10_000)])
    observed = np.corrcoef(draws[:, 0], draws[:, 1])[0, 1]
    assert abs(observed) < 3 / np.sqrt(len(draws))
    assert draws.mean() == pytest.approx(1.0, abs=0.06)


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    family=st.sampled_from(list(CovarianceFamily)),
    range_=st.floats(0.2, 5.0),
    nugget=st.floats(0.05, 1.0),
    sd=st.floats(0.1, 3.0),
)
def test_field_marginal_variance_is_sd_squared(seed, family, range_, nugget, sd):
    cov = CovarianceSpec(family, range=range_, nugget=nugget, sd=sd)
    rng = np.random.default_rng(seed)
    locations = rng.uniform(0.0, 20.0, size=(30, 2))
    factor = cholesky_factor(covariance_matrix(cov, locations), sd ** 2)
    np.testing.assert_allclose(np.sum(factor * factor, axis=1), sd ** 2, rtol=1e-10)

    # sites 50 ranges apart are independent draws of the marginal
    spread = np.column_stack([50.0 * range_ * np.arange(400), np.zeros(400)])
    field = simulate_field(cov, spread, rng)
    assert field.var(ddof=1) == pytest.approx(sd ** 2, rel=0.3)
