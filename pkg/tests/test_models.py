import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from roughdens.drivers import SeedSpec, StableDriverSpec
from roughdens.errors import ParameterError, SimulationError, StateError
from roughdens.models import (BUILTIN_MODELS, CoefficientSpec, ModelSpec, PathView, Weierstrass,
                              brownian_model, build_model, drift_lp_membership,
                              linear_hypoelliptic_model, read_ensemble_csv, reintegrate_window,
                              running_max_model, running_max_profile, simulate_ensemble,
                              simulate_with_checkpoint, stable_model, time_grid,
                              truncated_singular_drift, weierstrass_sigma_model, write_ensemble_csv)


def test_brownian_endpoint_moments():
    e = simulate_ensemble(brownian_model(), 1.0, 4, 10**6, SeedSpec(1))
    assert abs(e.endpoints.mean()) < 4e-3
    assert abs(e.endpoints.var() - 1) < 1e-2


@pytest.mark.parametrize("n_steps", [1, 3, 16])
def test_additive_noise_exact_for_every_grid(n_steps):
    e = simulate_ensemble(brownian_model(), 1.0, n_steps, 10**5, SeedSpec(2))
    assert stats.kstest(e.endpoints[:, 0], stats.norm.cdf).statistic < 0.01


def test_constant_drift_without_noise_is_exact():
    m = brownian_model(sigma=0.0, drift=0.3, x0=[1.0])
    e = simulate_ensemble(m, 2.0, 7, 100, SeedSpec(3))
    np.testing.assert_allclose(e.endpoints, 1.6, rtol=0, atol=1e-14)


def test_hypoelliptic_time_integral_variance():
    e = simulate_ensemble(linear_hypoelliptic_model(), 1.0, 256, 10**6, SeedSpec(4), workers=4)
    assert abs(np.var(e.endpoints[:, 1]) / (1 / 3) - 1) < 0.05


def test_checkpoint_law_and_reintegration():
    m = brownian_model()
    e = simulate_with_checkpoint(m, 1.0, 0.5, 8, 10**5, SeedSpec(5))
    assert stats.kstest(e.checkpoints[:, 0], stats.norm(scale=math.sqrt(0.5)).cdf).statistic < 0.01
    np.testing.assert_array_equal(reintegrate_window(m, e), e.endpoints)


def test_reintegration_is_exact_for_rough_and_path_dependent_models():
    for m, keep in [(weierstrass_sigma_model(), False), (running_max_model(), True)]:
        e = simulate_with_checkpoint(m, 1.0, 0.25, 16, 2000, SeedSpec(6), window_steps=8, keep_paths=keep)
        np.testing.assert_array_equal(reintegrate_window(m, e), e.endpoints)


def test_checkpoint_preconditions():
    m = brownian_model()
    with pytest.raises(ParameterError):
        simulate_with_checkpoint(m, 1.0, 1.0, 8, 10, SeedSpec(0))
    e = simulate_ensemble(m, 1.0, 8, 10, SeedSpec(0))
    with pytest.raises(StateError):
        reintegrate_window(m, e)
    pd = running_max_model()
    e = simulate_with_checkpoint(pd, 1.0, 0.5, 8, 10, SeedSpec(0))
    with pytest.raises(StateError):
        reintegrate_window(pd, e)


@given(k=st.integers(1, 6), n=st.integers(1, 40), w=st.integers(1, 20))
def test_checkpoint_is_on_grid(k, n, w):
    t, eps = 1.0, 2.0**-k
    times, dts, idx = time_grid(t, n, eps, w)
    assert times[idx] == t - eps and times[-1] == t
    assert np.all(np.diff(times) > 0)
    np.testing.assert_allclose(dts.sum(), t, rtol=1e-14)


def test_grid_refinement_weak_order_one():
    # mean of cos(X_1) for dX = -sin(X) dt + 0.5 dB on 4, 8, 16, 32 steps:
    # successive differences shrink by about 2
    def drift(time, x):
        return -np.sin(x)

    coeffs = CoefficientSpec(drift, lambda time, x: np.full((x.shape[0], 1, 1), 0.5), 1, 1)
    m = ModelSpec(coeffs, "brownian", [1.0])
    means = [np.cos(simulate_ensemble(m, 1.0, n, 2 * 10**5, SeedSpec(7)).endpoints).mean()
             for n in (2, 4, 8, 16)]
    diffs = np.abs(np.diff(means))
    ratios = diffs[:-1] / diffs[1:]
    assert np.all((ratios > 2 / 1.5) & (ratios < 2 * 1.5)), ratios


def test_worker_count_never_changes_results():
    m = weierstrass_sigma_model()
    runs = [simulate_with_checkpoint(m, 1.0, 0.125, 16, 20000, SeedSpec(8), workers=w) for w in (1, 4, 8)]
    for r in runs[1:]:
        np.testing.assert_array_equal(r.endpoints, runs[0].endpoints)
        np.testing.assert_array_equal(r.retained_noise, runs[0].retained_noise)


def test_path_stream_assignment():
    # path i uses stream_id + i, so a shifted stream id shifts the paths
    m = brownian_model()
    a = simulate_ensemble(m, 1.0, 4, 10, SeedSpec(9, 0)).endpoints
    b = simulate_ensemble(m, 1.0, 4, 7, SeedSpec(9, 3)).endpoints
    np.testing.assert_array_equal(a[3:], b)


def test_non_finite_coefficient_names_path_and_step():
    def drift(time, x):
        out = np.zeros_like(x)
        if time > 0.4:
            out[2] = np.nan
        return out

    coeffs = CoefficientSpec(drift, lambda time, x: np.ones((x.shape[0], 1, 1)), 1, 1)
    with pytest.raises(SimulationError) as info:
        simulate_ensemble(ModelSpec(coeffs, "brownian", [0.0]), 1.0, 10, 5, SeedSpec(0))
    assert info.value.path == 2 and info.value.step == 5


def test_nondegeneracy_floor_is_spot_checked():
    coeffs = CoefficientSpec(lambda t, x: np.zeros_like(x), lambda t, x: np.full((x.shape[0], 1, 1), 0.1),
                             1, 1, nondegeneracy_floor=1.0)
    with pytest.raises(SimulationError):
        simulate_ensemble(ModelSpec(coeffs, "brownian", [0.0]), 1.0, 2, 5, SeedSpec(0))


def test_shape_and_spec_errors():
    coeffs = CoefficientSpec(lambda t, x: np.zeros((x.shape[0], 3)), lambda t, x: np.ones((x.shape[0], 1, 1)), 1, 1)
    with pytest.raises(ParameterError):
        simulate_ensemble(ModelSpec(coeffs, "brownian", [0.0]), 1.0, 2, 5, SeedSpec(0))
    two = CoefficientSpec(lambda t, x: 0.0, lambda t, x: np.ones((x.shape[0], 2, 1)), 2, 1)
    with pytest.raises(ParameterError):
        ModelSpec(two, StableDriverSpec(1.5), [0.0, 0.0])
    with pytest.raises(ParameterError):
        ModelSpec(two, "poisson", [0.0, 0.0])
    with pytest.raises(ParameterError):
        ModelSpec(two, "brownian", [0.0])
    with pytest.raises(ParameterError):
        simulate_ensemble(brownian_model(), 0.0, 2, 5, SeedSpec(0))
    with pytest.raises(ParameterError):
        simulate_ensemble(brownian_model(), 1.0, 0, 5, SeedSpec(0))


def test_path_view_adaptedness():
    seen = []

    def diffusion(time, view):
        seen.append((time, len(view), view.states.flags.writeable))
        return np.ones((view.current.shape[0], 1, 1))

    coeffs = CoefficientSpec(lambda t, v: 0.0, diffusion, 1, 1, path_dependent=True)
    e = simulate_ensemble(ModelSpec(coeffs, "brownian", [0.0]), 1.0, 4, 3, SeedSpec(0))
    assert [s[1] for s in seen] == [1, 2, 3, 4]
    assert not any(s[2] for s in seen)
    np.testing.assert_allclose([s[0] for s in seen], e.times[:-1])


def test_running_max_bookkeeping_identity():
    m = running_max_model(0.5)
    f = running_max_profile(0.5)
    e = simulate_ensemble(m, 1.0, 16, 500, SeedSpec(10), keep_paths=True)
    for k in range(e.paths.shape[0]):
        view = PathView(e.times[: k + 1], e.paths[: k + 1])
        _, s = m.coefficients.evaluate(e.times[k], view, 500)
        np.testing.assert_array_equal(s[:, 0, 0], f(np.abs(e.paths[: k + 1]).max(axis=0))[:, 0])


def test_stable_model_simulation_is_stable_law():
    e = simulate_ensemble(stable_model(1.0), 1.0, 4, 10**5, SeedSpec(11))
    assert stats.kstest(e.endpoints[:, 0], stats.cauchy.cdf).statistic < 0.01


def test_ensemble_csv_round_trip(tmp_path):
    e = simulate_with_checkpoint(linear_hypoelliptic_model(), 1.0, 0.5, 4, 20, SeedSpec(12))
    path = tmp_path / "ens.csv"
    write_ensemble_csv(e, path)
    assert path.read_text().splitlines()[0] == "path_id,x_1,x_2,c_1,c_2"
    x, c = read_ensemble_csv(path)
    np.testing.assert_array_equal(x, e.endpoints)
    np.testing.assert_array_equal(c, e.checkpoints)


@given(beta=st.floats(0.1, 0.9), x=st.floats(-5, 5), h=st.floats(1e-6, 1.0))
def test_weierstrass_holder_bound(beta, x, h):
    w = Weierstrass(beta)
    diff = abs(w(np.array([x + h])) - w(np.array([x])))[0]
    # sum_k 2^{-k beta} min(2, 2^k h) <= C h^beta with C = 2 + 1/(1 - 2^{-beta}) + 1/(2^{1-beta} - 1)
    bound = (2 / (1 - 2.0**-beta) + 1 / (2.0 ** (1 - beta) - 1)) * h**beta
    assert diff <= bound


def test_weierstrass_derivative_matches_finite_difference():
    w = Weierstrass(1.5)
    x = np.linspace(-2, 2, 11)
    fd = (w(x + 1e-6) - w(x - 1e-6)) / 2e-6
    np.testing.assert_allclose(w.derivative(x), fd, atol=1e-5)
    assert np.all(np.abs(w(np.linspace(-10, 10, 1001))) <= w.sup_bound)


def test_truncated_singular_drift_and_membership():
    b = truncated_singular_drift(0.3, 50.0)
    assert b(np.array([0.0]))[0] == 0.0
    np.testing.assert_allclose(b(np.array([0.5, -0.5, 2.0])), [0.5**-0.3, -(0.5**-0.3), 0.0])
    assert b(np.array([1e-12]))[0] == 50.0
    assert drift_lp_membership(0.3) == pytest.approx(1 / 0.3)


def test_registry_builds_every_model():
    assert len(BUILTIN_MODELS) >= 9
    for name in BUILTIN_MODELS:
        m = build_model(name)
        assert isinstance(m, ModelSpec)
    with pytest.raises(ParameterError):
        build_model("nope")
    with pytest.raises(ParameterError):
        build_model("brownian", bogus=1)
