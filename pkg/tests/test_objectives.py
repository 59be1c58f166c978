"""
Unit Tests for the PMLS, POLS and Additive objectives.
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from models.dataset import Dataset, ResponseScale
from models.errors import DataError, ScaleMismatch
from models.mean_functions import ModelKind, ModelSpec
from objectives import (
    Method,
    ObjectiveSpec,
    join_params,
    objective_gradient,
    objective_value,
    penalty_term,
    profiled_intercept,
    residuals,
    smooth_value,
)
from penalties import PenaltyFamily, PenaltySpec


def _random_problem(seed, kind, scale=ResponseScale.LOG):
    """Random feasible (model, data, theta) for one model kind."""
    rng = np.random.default_rng(seed)
    n = 15
    if kind is ModelKind.LOG_LINEAR:
        covariates = rng.uniform(0.5, 2.0, size=(n, 3))
        theta = rng.uniform(0.2, 2.0, size=3)
    elif kind is ModelKind.LOGISTIC:
        covariates = rng.uniform(-1.0, 1.0, size=(n, 2))
        theta = np.concatenate([[rng.uniform(0.2, 2.0)], rng.uniform(-1.5, 1.5, size=2)])
    elif kind is ModelKind.SURFACE_2D:
        covariates = rng.uniform(-2.0, 2.0, size=(n, 2))
        theta = rng.uniform(-1.0, 1.0, size=6)
    else:
        covariates = rng.standard_normal((n, 3))
        theta = rng.standard_normal(3)
    model = ModelSpec.for_covariates(kind, covariates.shape[1])
    noise = 0.3 * rng.standard_normal(n)
    if scale is ResponseScale.RAW:
        response = np.exp(noise + rng.uniform(-1, 1))
    else:
        response = model.evaluate_matrix(covariates, theta) + noise + rng.uniform(-1, 1)
    data = Dataset(rng.uniform(0, 4, size=(n, 2)), covariates, response, scale=scale)
    # evaluate away from the generating value; positive coordinates stay positive
    theta = theta * rng.uniform(0.8, 1.2, size=theta.shape[0])
    return model, data, theta, rng


class TestObjectiveSpec:
    def test_pols_carries_intercept(self):
        spec = ObjectiveSpec(Method.POLS, ModelSpec(ModelKind.LINEAR, 3))
        assert spec.has_intercept
        assert spec.n_params == 4

    def test_penalty_mask_excludes_exempt_and_anchor(self):
        spec = ObjectiveSpec(Method.PMLS, ModelSpec(ModelKind.LINEAR, 4), exempt={1}, anchor=0)
        np.testing.assert_array_equal(spec.penalty_mask(), [False, False, True, True])

    def test_rejects_out_of_range_exempt(self):
        with pytest.raises(DataError):
            ObjectiveSpec(Method.PMLS, ModelSpec(ModelKind.LINEAR, 2), exempt={5})

    def test_log_scale_must_be_exempt(self):
        model = ModelSpec(ModelKind.LOGISTIC, 3)
        with pytest.raises(DataError, match="exempt"):
            ObjectiveSpec(Method.PMLS, model, log_scale={0})
        spec = ObjectiveSpec(Method.PMLS, model, exempt={0}, log_scale={0})
        assert spec.with_penalty(PenaltySpec(PenaltyFamily.SCAD, lam=0.1)).log_scale == frozenset({0})

    def test_required_scales(self):
        model = ModelSpec(ModelKind.LINEAR, 2)
        assert ObjectiveSpec(Method.PMLS, model).required_scale is ResponseScale.LOG
        assert ObjectiveSpec(Method.ADDITIVE, model).required_scale is ResponseScale.RAW


class TestResiduals:
    def test_pmls_residuals_are_centered(self, linear_data):
        spec = ObjectiveSpec(Method.PMLS, ModelSpec(ModelKind.LINEAR, 4))
        res = residuals(spec, linear_data, np.zeros(4))
        assert res.working.mean() == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(res.raw, linear_data.response)

    def test_additive_rejects_log_data(self, linear_data):
        spec = ObjectiveSpec(Method.ADDITIVE, ModelSpec(ModelKind.LINEAR, 4))
        with pytest.raises(ScaleMismatch):
            objective_value(spec, linear_data, np.zeros(4))

    def test_penalty_term_scales_with_n(self, linear_data):
        penalty = PenaltySpec(PenaltyFamily.LASSO, lam=0.5)
        spec = ObjectiveSpec(Method.PMLS, ModelSpec(ModelKind.LINEAR, 4), penalty)
        theta = np.array([1.0, -2.0, 0.0, 0.5])
        assert penalty_term(spec, linear_data, theta) == pytest.approx(linear_data.n * 0.5 * 3.5)


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    shift=st.sampled_from([-3.0, 0.5, 10.0]),
    kind=st.sampled_from(list(ModelKind)),
)
def test_pmls_invariant_to_response_shift(seed, shift, kind):
    """S_n(theta) on y and on y + c agree: the error mean is absorbed by centering."""
    model, data, theta, _ = _random_problem(seed, kind)
    shifted = Dataset(data.locations, data.covariates, data.response + shift, scale=ResponseScale.LOG)
    spec = ObjectiveSpec(Method.PMLS, model)
    base = smooth_value(spec, data, theta)
    moved = smooth_value(spec, shifted, theta)
    assert moved == pytest.approx(base, rel=1e-9, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(list(ModelKind)))
def test_pols_profile_equals_pmls(seed, kind):
    """min over b0 of the POLS smooth part is the PMLS objective."""
    model, data, theta, _ = _random_problem(seed, kind)
    pmls = ObjectiveSpec(Method.PMLS, model)
    pols = ObjectiveSpec(Method.POLS, model)
    b0 = profiled_intercept(pols, data, theta)
    profiled = smooth_value(pols, data, join_params(pols, b0, theta))
    assert profiled == pytest.approx(smooth_value(pmls, data, theta), rel=1e-10, abs=1e-12)
    # b0 really is the minimizer
    for offset in (-1e-3, 1e-3):
        assert smooth_value(pols, data, join_params(pols, b0 + offset, theta)) > profiled


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    kind=st.sampled_from(list(ModelKind)),
    method=st.sampled_from(list(Method)),
)
def test_smooth_gradient_matches_central_differences(seed, kind, method):
    scale = ResponseScale.RAW if method is Method.ADDITIVE else ResponseScale.LOG
    model, data, theta, rng = _random_problem(seed, kind, scale)
    spec = ObjectiveSpec(method, model)
    intercept = float(rng.uniform(-0.5, 0.5)) if spec.has_intercept else None
    params = join_params(spec, intercept, theta)

    analytic = objective_gradient(spec, data, params)
    h = 1e-6
    numeric = np.empty_like(params)
    for k in range(params.shape[0]):
        step = np.zeros_like(params)
        step[k] = h
        numeric[k] = (smooth_value(spec, data, params + step) - smooth_value(spec, data, params - step)) / (2 * h)
    scale_ref = max(1.0, float(np.max(np.abs(analytic))))
    np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-6 * scale_ref)


def test_pmls_matches_dense_centering_matrix():
    """Subtract-the-mean equals (y - g)' (I - 11'/n) (y - g) on a small instance."""
    rng = np.random.default_rng(21)
    covariates = rng.standard_normal((6, 2))
    data = Dataset(np.zeros((6, 2)), covariates, rng.standard_normal(6), scale=ResponseScale.LOG)
    spec = ObjectiveSpec(Method.PMLS, ModelSpec(ModelKind.LINEAR, 2))
    theta = np.array([0.7, -1.1])
    r = data.response - covariates @ theta
    centering = np.eye(6) - np.ones((6, 6)) / 6
    assert smooth_value(spec, data, theta) == pytest.approx(float(r @ centering @ r), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    kind=st.sampled_from(list(ModelKind)),
    b0=st.floats(-5.0, 5.0),
    lam=st.floats(0.0, 1.0),
)
def test_pols_never_below_pmls(seed, kind, b0, lam):
    """At any b0 the penalized POLS objective is at least the PMLS one."""
    model, data, theta, _ = _random_problem(seed, kind)
    penalty = PenaltySpec(PenaltyFamily.SCAD, lam=lam)
    pmls = ObjectiveSpec(Method.PMLS, model, penalty)
    pols = ObjectiveSpec(Method.POLS, model, penalty)
    pols_value = objective_value(pols, data, join_params(pols, b0, theta))
    assert pols_value >= objective_value(pmls, data, theta) - 1e-6
