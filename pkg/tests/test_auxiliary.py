import numpy as np
import pytest
from hypothesis import given, strategies as st

from roughdens.auxiliary import (AuxKind, build_coupled, hypo_conditional_covariance,
                                 taylor_conditional_variance, window_brownian_pair)
from roughdens.drivers import SeedSpec
from roughdens.errors import ParameterError, StateError
from roughdens.estimators import coupling_error_moments, fit_scaling
from roughdens.models import (brownian_model, holder_kink_model, hypoelliptic_model,
                              linear_hypoelliptic_model, running_max_model, simulate_ensemble,
                              simulate_with_checkpoint, stable_holder_model, stable_model,
                              taylor_drift_model, weierstrass_drift_model, weierstrass_sigma_model)

EPS = [2.0**-k for k in range(3, 9)]


def coupled(model, eps, aux, n=2000, seed=1, window_steps=16, keep_paths=False):
    ens = simulate_with_checkpoint(model, 1.0, eps, 32, n, SeedSpec(seed), window_steps=window_steps,
                                   keep_paths=keep_paths)
    return ens, build_coupled(ens, model, aux)


def slope(model, aux, power, component=None, n=10**5):
    pairs = []
    for eps in EPS:
        _, c = coupled(model, eps, aux, n=n, window_steps=32)
        pairs.append((eps, coupling_error_moments(c, [power], component)[0]))
    return fit_scaling(pairs).slope


def test_frozen_with_constant_coefficients_is_exact():
    _, c = coupled(brownian_model(sigma=1.3), 0.25, AuxKind("frozen"))
    assert np.max(np.abs(c.x_end - c.y_end)) == 0.0


def test_drift_frozen_with_constant_coefficients_is_exact():
    _, c = coupled(brownian_model(sigma=0.7, drift=0.4), 0.25, AuxKind("drift_frozen"))
    assert np.max(np.abs(c.x_end - c.y_end)) == 0.0


def test_frozen_formula():
    m = weierstrass_sigma_model()
    ens, c = coupled(m, 0.125, AuxKind("frozen"))
    sig = m.coefficients.diffusion(1 - 0.125, ens.checkpoints)[:, 0, 0]
    expect = ens.checkpoints[:, 0] + sig * ens.retained_noise[:, :, 0].sum(axis=1)
    np.testing.assert_allclose(c.y_end[:, 0], expect, rtol=1e-12, atol=1e-12)


def test_drift_frozen_formula():
    m = weierstrass_drift_model()
    ens, c = coupled(m, 0.125, AuxKind("drift_frozen"))
    b = m.coefficients.drift(1 - 0.125, ens.checkpoints)[:, 0]
    expect = ens.checkpoints[:, 0] + 0.125 * b + ens.retained_noise[:, :, 0].sum(axis=1)
    np.testing.assert_allclose(c.y_end[:, 0], expect, rtol=1e-12, atol=1e-12)


def test_taylor_formula_uses_left_point_integral():
    m, jac = taylor_drift_model()
    ens, c = coupled(m, 0.125, AuxKind("taylor", jac))
    cp = ens.checkpoints
    b = m.coefficients.drift(1 - 0.125, cp)[:, 0]
    bp = jac(1 - 0.125, cp)[:, 0, 0]
    bw = window_brownian_pair(ens)
    expect = cp[:, 0] + 0.125 * b + bp * bw[:, 1] + bw[:, 0]
    np.testing.assert_allclose(c.y_end[:, 0], expect, rtol=1e-12, atol=1e-12)


def test_levy_frozen_formula():
    m = stable_holder_model()
    ens, c = coupled(m, 0.125, AuxKind("levy_frozen"))
    sig = m.coefficients.diffusion(1 - 0.125, ens.checkpoints)[:, 0, 0]
    expect = ens.checkpoints[:, 0] + sig * ens.retained_noise[:, :, 0].sum(axis=1)
    np.testing.assert_allclose(c.y_end[:, 0], expect, rtol=1e-12, atol=1e-12)
    assert c.alpha_stable == 1.5


def test_path_dependent_frozen_uses_history():
    m = running_max_model()
    ens, c = coupled(m, 0.25, AuxKind("frozen"), keep_paths=True)
    running = np.abs(ens.paths[: ens.checkpoint_index + 1]).max(axis=0)[:, 0]
    sig = 1 + 0.5 * np.minimum(1, running) ** 0.5
    expect = ens.checkpoints[:, 0] + sig * ens.retained_noise[:, :, 0].sum(axis=1)
    np.testing.assert_allclose(c.y_end[:, 0], expect, rtol=1e-12, atol=1e-12)
    plain = simulate_with_checkpoint(m, 1.0, 0.25, 32, 10, SeedSpec(1))
    with pytest.raises(StateError):
        build_coupled(plain, m, AuxKind("frozen"))


def test_errors():
    m = brownian_model()
    with pytest.raises(StateError):
        build_coupled(simulate_ensemble(m, 1.0, 4, 10, SeedSpec(0)), m, AuxKind("frozen"))
    with pytest.raises(ParameterError):
        AuxKind("taylor")
    with pytest.raises(ParameterError):
        AuxKind("hypo_taylor")
    with pytest.raises(ParameterError):
        AuxKind("magic")
    ens = simulate_with_checkpoint(m, 1.0, 0.5, 4, 10, SeedSpec(0))
    with pytest.raises(ParameterError):
        build_coupled(ens, m, AuxKind("levy_frozen"))
    with pytest.raises(ParameterError):
        build_coupled(ens, m, AuxKind("hypo_taylor", lambda t, x: np.zeros((x.shape[0], 1, 1))))
    sm = stable_model()
    sens = simulate_with_checkpoint(sm, 1.0, 0.5, 4, 10, SeedSpec(0))
    with pytest.raises(ParameterError):
        build_coupled(sens, sm, AuxKind("frozen"))


def test_hypo_covariance_closed_form():
    np.testing.assert_allclose(hypo_conditional_covariance(1.0), [[1, 0.5], [0.5, 1 / 3]], rtol=1e-15)
    np.testing.assert_allclose(hypo_conditional_covariance(1e-12), 0.0, atol=1e-11)
    assert np.all(hypo_conditional_covariance(0.0) == 0)


def test_hypo_covariance_eigen_slopes():
    lam = np.array([np.linalg.eigvalsh(hypo_conditional_covariance(e)) for e in EPS])
    s_small = np.polyfit(np.log(EPS), np.log(lam[:, 0]), 1)[0]
    s_large = np.polyfit(np.log(EPS), np.log(lam[:, 1]), 1)[0]
    assert abs(s_large - 1) < 0.05 and abs(s_small - 3) < 0.05


def test_hypo_covariance_matches_double_integral():
    # E[B_e int B] = int_0^e s ds and E[(int B)^2] = int int min(s, r) ds dr
    from scipy import integrate
    e = 0.7
    c12 = integrate.quad(lambda s: s, 0, e)[0]
    # min(r, s) is symmetric: twice the integral of r over the triangle r < s
    c22 = 2 * integrate.dblquad(lambda r, s: r, 0, e, 0, lambda s: s)[0]
    np.testing.assert_allclose(hypo_conditional_covariance(e), [[e, c12], [c12, c22]], rtol=1e-10)


@given(eps=st.floats(1e-4, 1.0), bp=st.floats(-5, 5))
def test_taylor_variance_formula(eps, bp):
    v = taylor_conditional_variance(eps, bp)
    np.testing.assert_allclose(v, eps + bp * eps**2 + bp**2 * eps**3 / 3, rtol=1e-12)
    assert v > 0


def test_window_pair_monte_carlo_covariance():
    ens = simulate_with_checkpoint(linear_hypoelliptic_model(), 1.0, 0.5, 8, 10**5, SeedSpec(3),
                                   window_steps=256)
    emp = np.cov(window_brownian_pair(ens), rowvar=False)
    exact = hypo_conditional_covariance(0.5)
    assert np.max(np.abs(emp - exact) / exact) < 0.05


@pytest.mark.parametrize("model,aux", [
    (weierstrass_sigma_model(), AuxKind("frozen")),
    (weierstrass_drift_model(), AuxKind("drift_frozen")),
    (taylor_drift_model()[0], AuxKind("taylor", taylor_drift_model()[1])),
    (hypoelliptic_model()[0], AuxKind("hypo_taylor", hypoelliptic_model()[1])),
    (stable_holder_model(), AuxKind("levy_frozen")),
])
def test_coupling_error_shrinks_with_epsilon(model, aux):
    errs = []
    for eps in EPS:
        _, c = coupled(model, eps, aux, n=4000)
        errs.append(coupling_error_moments(c, [0.5])[0].value)
    assert np.all(np.diff(errs) < 0)


def test_frozen_rate_holder_kink_sigma():
    # sigma(x) = 2 + min(1, |x|^beta), beta = 0.5: slope of E|X_t - Y_t|^2 in 1 + beta +- 0.15
    assert abs(slope(holder_kink_model(0.5), AuxKind("frozen"), 2.0) - 1.5) <= 0.15


def test_frozen_rate_weierstrass_sigma():
    assert abs(slope(weierstrass_sigma_model(0.5), AuxKind("frozen"), 2.0) - 1.5) <= 0.15


def test_drift_frozen_improves_on_frozen():
    m = weierstrass_drift_model(0.5)
    s_frozen = slope(m, AuxKind("frozen"), 1.0)
    s_drift = slope(m, AuxKind("drift_frozen"), 1.0)
    assert s_drift >= s_frozen
    assert abs(s_drift - 1.25) <= 0.15


def test_taylor_rate():
    m, jac = taylor_drift_model(0.5)
    assert abs(slope(m, AuxKind("taylor", jac), 1.0) - 1.75) <= 0.2


def test_hypo_taylor_rate():
    m, jac = hypoelliptic_model(0.5)
    assert abs(slope(m, AuxKind("hypo_taylor", jac), 1.0, component=1) - 2.0) <= 0.2
