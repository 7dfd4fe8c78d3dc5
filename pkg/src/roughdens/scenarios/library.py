"""The built-in scenarios.

Each scenario is a function ``run(cfg, ctx) -> None`` that adds checks and
plot-ready sweep tables to ``ctx``.  Model parameters come from
``ctx.param(name)`` (scenario default, overridable with ``model.<name>``) and
tolerances from ``ctx.tol(check_id)`` (overridable with ``tol.<check_id>``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np
from numpy.polynomial import hermite_e
from scipy import integrate, ndimage, special, stats

from ..auxiliary import (AuxKind, build_coupled, hypo_conditional_covariance,
                         taylor_conditional_variance, window_brownian_pair)
from ..besov import (GridDomain, GridFunction, besov_seminorm, delta_m, gaussian_difference_l1,
                     lp_norm, mollified_density)
from ..drivers import SeedSpec, StableDriverSpec, make_stream, stable_increments
from ..estimators.exponents import (bulk_parameters_from_rates, levy_feasibility, levy_kappa,
                                    rough_drift_exponent)
from ..estimators.montecarlo import (EstimateWithError, ae_pe_split, batch_means,
                                     coupling_error_moments, difference_values,
                                     inverse_sigma_weight, mc_weighted_difference)
from ..estimators.scaling import ScalingFit, fit_scaling
from ..estimators.testfunctions import make_probe, make_test_function
from ..errors import ParameterError
from ..models.core import PathView, simulate_ensemble, simulate_with_checkpoint
from ..models.library import (brownian_model, drift_lp_membership, hypoelliptic_model,
                              linear_hypoelliptic_model, running_max_model, running_max_profile,
                              singular_sigma_model, stable_holder_model, taylor_drift_model,
                              truncated_singular_drift_model, weierstrass_drift_model,
                              weierstrass_sigma_model)
from .config import ScenarioConfig, dyadic
from .report import CheckRecord

__all__ = ["ScenarioDef", "ScenarioContext", "SCENARIOS"]

# sub-experiments of one scenario draw from disjoint stream blocks
_STREAM_BLOCK = 1 << 40


@dataclass(frozen=True)
class ScenarioDef:
    name: str
    anchor: str
    description: str
    run: Callable
    model_defaults: Dict[str, float]
    tolerances: Dict[str, float]
    config_defaults: Dict[str, object] = field(default_factory=dict)

    def default_config(self) -> ScenarioConfig:
        return ScenarioConfig(self.name, **self.config_defaults)


class ScenarioContext:
    """Collects checks and sweep tables while a scenario runs."""

    def __init__(self, definition: ScenarioDef, cfg: ScenarioConfig):
        self.definition = definition
        self.cfg = cfg
        self.checks: List[CheckRecord] = []
        self.tables: Dict[str, list] = {}

    def param(self, name: str) -> float:
        return float(self.cfg.model.get(name, self.definition.model_defaults[name]))

    def tol(self, check_id: str) -> float:
        return float(self.cfg.tolerances.get(check_id, self.definition.tolerances[check_id]))

    def seed(self, block: int) -> SeedSpec:
        s = self.cfg.seed
        return s.with_stream((s.stream_id + block * _STREAM_BLOCK) % (1 << 64))

    def add(self, check_id: str, kind: str, predicted: float, fitted, anchor: str,
            basis: str = "theory", note: str = "") -> None:
        self.checks.append(CheckRecord(check_id, anchor, kind, float(predicted), fitted,
                                       self.tol(check_id), basis, note))

    def table(self, name: str, pairs) -> None:
        self.tables[name] = list(pairs)


# ---------------------------------------------------------------- helpers

def _coupled(ctx, model, eps, aux, block=0, keep_paths=False, window_steps=None):
    cfg = ctx.cfg
    ens = simulate_with_checkpoint(model, cfg.t, eps, cfg.n_steps, cfg.n_paths, ctx.seed(block),
                                   window_steps=window_steps or cfg.window_steps,
                                   keep_paths=keep_paths, workers=cfg.workers)
    return ens, build_coupled(ens, model, aux)


def _moment_sweep(ctx, model, aux, power, block=0, component=None, keep_paths=False):
    """``[(eps, E|X_t - Y_t|^power)]`` over the epsilon sweep, plus the coupled ensembles."""
    pairs, coupled = [], []
    for eps in ctx.cfg.epsilon_sweep:
        _, c = _coupled(ctx, model, eps, aux, block, keep_paths)
        pairs.append((eps, coupling_error_moments(c, [power], component)[0]))
        coupled.append(c)
    return pairs, coupled


def _abs_estimate(est: EstimateWithError) -> EstimateWithError:
    return EstimateWithError(abs(est.value), est.stderr, est.n)


def _pe_panel(ctx, coupled, tf, weight_fn=None):
    """``{(eps, h): (ae, pe)}`` over the full epsilon x h sweep."""
    out = {}
    m = ctx.cfg.m
    for c in coupled:
        w = None if weight_fn is None else weight_fn(c)
        for h in ctx.cfg.h_sweep:
            probe = make_probe(tf, m, [[h]])
            out[(c.epsilon, h)] = ae_pe_split(c, probe, [h], weight=w)
    return out


def _pe_slope(ctx, panel, check_id, anchor, name, index=2.0):
    """Fit ``|pe|`` against ``h`` on the largest epsilon, restricted to ``h <= eps^(1/index) / 4``."""
    eps = max(ctx.cfg.epsilon_sweep)
    pairs = [(h, _abs_estimate(panel[(eps, h)][1])) for h in ctx.cfg.h_sweep
             if h <= eps ** (1.0 / index) / 4.0]
    ctx.table(name, pairs)
    ctx.add(check_id, "within", ctx.cfg.m, fit_scaling(pairs), anchor)


def _gaussian_envelope_constant(ctx, sigma_min):
    """``C = max ||Delta_h^m g||_1 / min(1, h/sqrt(eps))^m`` over the sweep at the smallest sigma."""
    m = ctx.cfg.m
    c = 0.0
    for eps in ctx.cfg.epsilon_sweep:
        for h in ctx.cfg.h_sweep:
            l1 = gaussian_difference_l1([[sigma_min**2]], eps, [h], m)
            c = max(c, l1 / min(1.0, h / math.sqrt(eps)) ** m)
    return c


def _envelope_ratio(ctx, panel, sup_bound, const, weighted=False):
    """``max (|pe| - 4 stderr) / (sup_phi C min(1, h/sqrt(eps))^m)`` over the panel."""
    m = ctx.cfg.m
    worst = -math.inf
    for (eps, h), (_, pe) in panel.items():
        r = h / math.sqrt(eps)
        env = sup_bound * const * (r**m if weighted else min(1.0, r) ** m)
        worst = max(worst, (abs(pe.value) - 4.0 * pe.stderr) / env)
    return worst


def _telescoping_gap(coupled, panel, tf, m):
    gap = 0.0
    for c in coupled:
        for (eps, h), (ae, pe) in panel.items():
            if eps != c.epsilon:
                continue
            direct = mc_weighted_difference(c.x_end, make_probe(tf, m, [[h]]), [h])
            gap = max(gap, abs(ae.value + pe.value - direct.value))
    return gap


def _normal_derivative_l1(m):
    """``||g^(m)||_1 = int |He_m| g`` for the standard normal density ``g``.

    It bounds ``||Delta_a^m g||_1 / a^m`` for every ``a > 0``.
    """
    roots = np.sort(hermite_e.hermeroots([0] * m + [1]).real)
    coef = [0] * m + [1]
    f = lambda x: abs(hermite_e.hermeval(x, coef)) * math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
    edges = [-math.inf] + list(roots) + [math.inf]
    return float(sum(integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-12)[0]
                     for a, b in zip(edges[:-1], edges[1:])))


def _kde_delta_slope(samples, bw, lower, upper, spacing, hs, m):
    dom = GridDomain.box([lower], [upper], spacing)
    p = mollified_density(samples, bw, dom)
    pairs = [(h, lp_norm(delta_m(p, m, [h]), 1)) for h in hs]
    return pairs, p


# ---------------------------------------------------------------- scenarios

def run_bulk_bm(cfg, ctx):
    sigma = ctx.param("sigma")
    model = brownian_model(sigma=sigma)
    # smooth Gaussian density: second differences of the estimate scale like h^2
    ens = simulate_ensemble(model, cfg.t, 1, cfg.n_paths, ctx.seed(0), workers=cfg.workers)
    scale = sigma * math.sqrt(cfg.t)
    pairs, p = _kde_delta_slope(ens.endpoints, ctx.param("bandwidth") * scale, -8 * scale,
                                8 * scale, scale * 2.0**-9, cfg.h_sweep, 2)
    ctx.table("kde_delta", pairs)
    ctx.add("kde_slope", "within", 2.0, fit_scaling(pairs),
            "smooth density: ||Delta_h^2 p||_1 ~ |h|^2", basis="derived")
    ctx.add("kde_mass", "within", 1.0, p.integral(), "density estimate has unit mass",
            basis="structural")

    coupled = [_coupled(ctx, model, eps, AuxKind("frozen"), 1)[1] for eps in cfg.epsilon_sweep]
    gap = max(float(np.max(np.abs(c.x_end - c.y_end))) for c in coupled)
    ctx.add("ae_zero", "at_most", 0.0, gap, "constant coefficients: X_t = Y_t pathwise",
            basis="structural")
    tf = make_test_function("cosine", cfg.alpha, omega=ctx.param("omega"))
    panel = _pe_panel(ctx, coupled, tf)
    _pe_slope(ctx, panel, "pe_slope", "Pe <~ ||phi|| (|h|/sqrt(eps))^m", "pe_h")
    const = _gaussian_envelope_constant(ctx, sigma)
    ctx.add("pe_envelope", "at_most", 1.0, _envelope_ratio(ctx, panel, tf.sup_bound, const),
            "Pe <~ ||phi|| (1 ^ |h|/sqrt(eps))^m")
    ctx.add("telescoping", "at_most", 0.0, _telescoping_gap(coupled, panel, tf, cfg.m),
            "Ae + Pe = E[Delta_h^m phi(X_t)]", basis="structural")


def run_bulk_holder_sigma(cfg, ctx):
    beta = ctx.param("beta")
    model = weierstrass_sigma_model(beta, ctx.param("amplitude"), ctx.param("center"))
    pairs, coupled = _moment_sweep(ctx, model, AuxKind("frozen"), 2.0)
    ctx.table("coupling_l2", pairs)
    fit = fit_scaling(pairs)
    ctx.add("coupling_slope", "within", 1.0 + beta, fit, "E|X_t - Y_t|^2 <~ eps^(1+beta)")
    # Ae ~ eps^(alpha (1+beta)/2) and Pe ~ eps^(-m/2) give theta = 2 and a0 = beta
    _, a0 = bulk_parameters_from_rates(fit.slope / 2.0, 0.5)
    ctx.add("a0_from_rates", "within", beta, a0, "regularity index a0 = beta for Hoelder sigma")

    sigma_min = math.sqrt(model.coefficients.nondegeneracy_floor)
    const = _gaussian_envelope_constant(ctx, sigma_min)
    cos_tf = make_test_function("cosine", cfg.alpha, omega=ctx.param("omega"))
    kink_tf = make_test_function("kink", cfg.alpha, center=ctx.param("kink_center"))
    cos_panel = _pe_panel(ctx, coupled, cos_tf)
    kink_panel = _pe_panel(ctx, coupled, kink_tf)
    _pe_slope(ctx, cos_panel, "pe_slope", "Pe <~ ||phi|| (|h|/sqrt(eps))^m", "pe_h")
    ctx.add("pe_envelope_cosine", "at_most", 1.0,
            _envelope_ratio(ctx, cos_panel, cos_tf.sup_bound, const),
            "Pe <~ ||phi|| (1 ^ |h|/sqrt(eps))^m")
    ctx.add("pe_envelope_kink", "at_most", 1.0,
            _envelope_ratio(ctx, kink_panel, kink_tf.sup_bound, const),
            "Pe <~ ||phi|| (1 ^ |h|/sqrt(eps))^m")
    ctx.add("telescoping", "at_most", 0.0, _telescoping_gap(coupled, kink_panel, kink_tf, cfg.m),
            "Ae + Pe = E[Delta_h^m phi(X_t)]", basis="structural")


def run_morereg_drift(cfg, ctx):
    beta = ctx.param("beta")
    model = weierstrass_drift_model(beta, ctx.param("amplitude"))
    frozen, _ = _moment_sweep(ctx, model, AuxKind("frozen"), 1.0)
    improved, _ = _moment_sweep(ctx, model, AuxKind("drift_frozen"), 1.0)
    ctx.table("coupling_l1_frozen", frozen)
    ctx.table("coupling_l1_drift_frozen", improved)
    fit_frozen, fit_improved = fit_scaling(frozen), fit_scaling(improved)
    ctx.add("drift_frozen_slope", "within", 1.0 + beta / 2.0, fit_improved,
            "E|X_t - Y_t| <~ eps^(1+beta/2) with the drift kept in the auxiliary")
    ctx.add("drift_frozen_improves", "at_least", fit_frozen.slope, fit_improved,
            "keeping b(X_{t-eps}) never lowers the coupling rate", basis="derived")

    tmodel, jac = taylor_drift_model(beta, ctx.param("amplitude"))
    aux = AuxKind("taylor", jac)
    taylor, coupled = _moment_sweep(ctx, tmodel, aux, 1.0, block=1)
    ctx.table("coupling_l1_taylor", taylor)
    ctx.add("taylor_slope", "within", (3.0 + beta) / 2.0, fit_scaling(taylor),
            "E|X_t - Y_t| <~ eps^((3+beta)/2) for b in C^(1+beta)")

    # conditional law of the Taylor auxiliary: Gaussian with variance
    # eps + b' eps^2 + b'^2 eps^3 / 3 around c + b(c) eps
    c = coupled[0]
    t_check = cfg.t - c.epsilon
    c0 = c.checkpoint
    b = tmodel.coefficients.drift(t_check, c0)[:, 0]
    bprime = jac(t_check, c0)[:, 0, 0]
    var = np.array([taylor_conditional_variance(c.epsilon, v) for v in bprime])
    z = (c.y_end[:, 0] - c0[:, 0] - b * c.epsilon) / np.sqrt(var)
    ctx.add("taylor_conditional_variance", "within", 1.0, float(np.var(z)),
            "Var(Y_t | X_{t-eps}) = eps + b' eps^2 + b'^2 eps^3 / 3")


def run_hypoelliptic(cfg, ctx):
    beta = ctx.param("beta")
    eigs = [np.linalg.eigvalsh(hypo_conditional_covariance(e)) for e in cfg.epsilon_sweep]
    small = [(e, v[0]) for e, v in zip(cfg.epsilon_sweep, eigs)]
    large = [(e, v[1]) for e, v in zip(cfg.epsilon_sweep, eigs)]
    ctx.table("eigen_small", small)
    ctx.table("eigen_large", large)
    ctx.add("eigen_slope_large", "within", 1.0, fit_scaling(large),
            "conditional covariance eigenvalues of order eps and eps^3")
    ctx.add("eigen_slope_small", "within", 3.0, fit_scaling(small),
            "conditional covariance eigenvalues of order eps and eps^3")

    # Monte Carlo covariance of (B_eps, int B) on a fine window grid
    fine = int(ctx.param("fine_steps"))
    eps = max(cfg.epsilon_sweep)
    ens = simulate_with_checkpoint(linear_hypoelliptic_model(), cfg.t, eps, cfg.n_steps,
                                   cfg.n_paths, ctx.seed(0), window_steps=fine,
                                   workers=cfg.workers)
    emp = np.cov(window_brownian_pair(ens), rowvar=False)
    exact = hypo_conditional_covariance(eps)
    rel = float(np.max(np.abs(emp - exact) / np.abs(exact)))
    ctx.add("mc_covariance", "at_most", 0.0, rel,
            "Cov(B_eps, int_0^eps B) = [[eps, eps^2/2], [eps^2/2, eps^3/3]]", basis="derived")

    lin = simulate_ensemble(linear_hypoelliptic_model(), cfg.t, fine, cfg.n_paths, ctx.seed(1),
                            workers=cfg.workers)
    ratio = float(np.var(lin.endpoints[:, 1]) / (cfg.t**3 / 3.0))
    ctx.add("var_x2", "within", 1.0, ratio, "Var(int_0^t B) = t^3 / 3", basis="derived")

    model, jac = hypoelliptic_model(beta, ctx.param("amplitude"))
    pairs, _ = _moment_sweep(ctx, model, AuxKind("hypo_taylor", jac), 1.0, block=2, component=1)
    ctx.table("coupling_x2", pairs)
    ctx.add("hypo_taylor_slope", "within", 2.0, fit_scaling(pairs),
            "E|X2_t - Y2_t| <~ eps^2 for the two-block Taylor auxiliary")
    # Pe ~ eps^(-3m/2), Ae ~ eps^(alpha (3+beta)/2): theta = 2/3, a0 = beta/3
    theta, a0 = bulk_parameters_from_rates((3.0 + beta) / 2.0, 1.5)
    ctx.add("a0_hypoelliptic", "within", beta / 3.0, a0,
            "regularity index beta/3 for the degenerate two-block system")


def run_weighted_singular(cfg, ctx):
    beta = ctx.param("beta")
    model = singular_sigma_model(beta, ctx.param("x0"))
    m = cfg.m
    pairs, coupled = _moment_sweep(ctx, model, AuxKind("frozen"), 2.0)
    ctx.table("coupling_l2", pairs)
    ctx.add("coupling_slope", "at_least", 1.0 + beta, fit_scaling(pairs),
            "E|X_t - Y_t|^2 <~ eps^(1+beta)", note="one-sided: sigma is smooth away from 0")

    weight = inverse_sigma_weight(model, m)
    tf = make_test_function("cosine", cfg.alpha, omega=ctx.param("omega"))
    panel = _pe_panel(ctx, coupled, tf, weight_fn=lambda c: weight)
    _pe_slope(ctx, panel, "weighted_pe_slope",
              "E[Delta_h^m phi(Y) |sigma^-1|^-m] <~ eps^(-m/2) |h|^m", "weighted_pe_h")
    const = _normal_derivative_l1(m)
    ctx.add("weighted_pe_envelope", "at_most", 1.0,
            _envelope_ratio(ctx, panel, tf.sup_bound, const, weighted=True),
            "E[Delta_h^m phi(Y) |sigma^-1|^-m] <~ eps^(-m/2) |h|^m")

    # weighted first term, pathwise: E[|Delta phi(X) - Delta phi(Y)| w] <~ |h|^alpha eps^(beta/2)
    kink = make_test_function("kink", cfg.alpha, center=ctx.param("kink_center"))
    h = ctx.param("first_term_h")
    first = []
    for c in coupled:
        d = difference_values(c.x_end, kink.phi, m, [h]) - difference_values(c.y_end, kink.phi, m, [h])
        first.append((c.epsilon, batch_means(np.abs(d) * weight(c.checkpoint))))
    ctx.table("weighted_first_term", first)
    ctx.add("weighted_first_term_slope", "at_least", beta / 2.0, fit_scaling(first),
            "weighted approximation term <~ |h|^alpha eps^(beta/2)", note="one-sided upper bound")


def _bessel_cell_density(t, first_center, n_cells, spacing):
    """Cell averages of ``(2 pi t x)^(-1/2) e^(-x/2t)`` on cells centred at ``first_center + j spacing``."""
    edges = first_center + spacing * (np.arange(n_cells + 1) - 0.5)
    cdf = special.erf(np.sqrt(np.maximum(edges, 0.0) / (2.0 * t)))
    return GridFunction([first_center], spacing, np.diff(cdf) / spacing)


def run_squared_bessel(cfg, ctx):
    t = cfg.t
    # analytic density (2 pi t x)^(-1/2) exp(-x / 2t) as exact cell averages
    spacing = 2.0 ** -ctx.param("grid_level")
    f = _bessel_cell_density(t, spacing / 2.0, int(round(ctx.param("box") * t / spacing)), spacing)
    hs = cfg.h_sweep
    norms = np.array([lp_norm(delta_m(f, 2, [h]), 1) for h in hs])
    ctx.table("analytic_delta2", list(zip(hs, norms)))
    hs_arr = np.array(hs)
    r_low = norms / hs_arr**0.45
    r_high = norms / hs_arr**0.6
    ctx.add("ratio_045_bounded", "at_most", 3.0, float(r_low.max() / r_low.min()),
            "p_t in B^alpha_{1,inf} for alpha <= 1/2")
    ctx.add("ratio_06_growth", "at_least", 2.0, float(r_high[-1] / r_high[0]),
            "p_t not in B^alpha_{1,inf} for alpha > 1/2")
    ctx.add("ratio_06_monotone", "at_most", 0.0, float(np.sum(np.diff(r_high) <= 0)),
            "p_t not in B^alpha_{1,inf} for alpha > 1/2")
    ctx.add("analytic_slope", "within", 0.5, fit_scaling(list(zip(hs, norms))),
            "Besov index 1/2 of p_t(x) = (2 pi t x)^(-1/2) e^(-x/2t)")

    # Monte Carlo: X_t = B_t^2 in law; compare its density estimate with the
    # analytic density smoothed by the same kernel
    ens = simulate_ensemble(brownian_model(), t, 1, cfg.n_paths, ctx.seed(0), workers=cfg.workers)
    samples = ens.endpoints[:, 0] ** 2
    bw = ctx.param("mc_bandwidth") * t
    spacing = 2.0**-9 * t
    lower, upper = -1.0 * t, 30.0 * t
    dom = GridDomain.box([lower], [upper], spacing)
    est = mollified_density(samples, bw, dom)
    k = int(math.ceil(8 * bw / spacing))
    n_out = est.values.shape[0]
    exact = _bessel_cell_density(t, dom.origin[0] - k * spacing, n_out + 2 * k, spacing)
    offsets = spacing * np.arange(-k, k + 1)
    kernel = np.exp(-0.5 * (offsets / bw) ** 2) / (math.sqrt(2 * math.pi) * bw) * spacing
    smooth = ndimage.convolve1d(exact.values, kernel, mode="constant")[k:k + n_out]
    dist = float(np.sum(np.abs(est.values - smooth)) * spacing)
    ctx.add("mc_crosscheck_l1", "at_most", 0.0, dist,
            "B_t^2 has the density (2 pi t x)^(-1/2) e^(-x/2t)", basis="derived")


def run_pathdep(cfg, ctx):
    beta = ctx.param("beta")
    model = running_max_model(beta)
    f = running_max_profile(beta)
    pairs, coupled = _moment_sweep(ctx, model, AuxKind("frozen"), 2.0, keep_paths=True)
    ctx.table("coupling_l2", pairs)
    ctx.add("coupling_slope", "at_least", 1.0 + beta, fit_scaling(pairs),
            "E|X_t - Y_t|^2 <~ eps^(1+beta) for path-dependent Hoelder sigma",
            note="one-sided upper bound")

    # sigma(t, w) evaluated through the path view equals f(running max) exactly
    ens = simulate_ensemble(model, cfg.t, cfg.n_steps, min(cfg.n_paths, 4096), ctx.seed(1),
                            keep_paths=True, workers=cfg.workers)
    gap = 0.0
    for k in range(1, ens.paths.shape[0]):
        view = PathView(ens.times[: k + 1], ens.paths[: k + 1])
        _, s = model.coefficients.evaluate(float(ens.times[k]), view, ens.n_paths)
        running = np.abs(ens.paths[: k + 1]).max(axis=0)
        gap = max(gap, float(np.max(np.abs(s[:, :, 0] - f(running)))))
    ctx.add("bookkeeping_identity", "at_most", 0.0, gap,
            "sigma(t, w) = f(sup_{r <= t} |w_r|) on simulated paths", basis="structural")

    tf = make_test_function("cosine", cfg.alpha, omega=ctx.param("omega"))
    panel = _pe_panel(ctx, coupled, tf)
    _pe_slope(ctx, panel, "pe_slope", "Pe <~ ||phi|| (|h|/sqrt(eps))^m", "pe_h")


def run_levy_stable(cfg, ctx):
    n = cfg.n_paths
    cauchy = stable_increments(make_stream(ctx.seed(0)), n, StableDriverSpec(1.0), 1.0)
    ks1 = stats.kstest(cauchy, stats.cauchy.cdf).statistic
    ctx.add("ks_cauchy", "at_most", 0.0, ks1, "alpha = 1 symmetric stable law is Cauchy",
            basis="derived")
    gauss = stable_increments(make_stream(ctx.seed(1)), n, StableDriverSpec(2.0), 1.0)
    ks2 = stats.kstest(gauss, stats.norm(scale=math.sqrt(2.0)).cdf).statistic
    ctx.add("ks_normal2", "at_most", 0.0, ks2, "alpha = 2 symmetric stable law is N(0, 2)",
            basis="derived")

    # kernel scaling ||Delta_h g_t||_1 ~ (1 ^ t)^(-1/alpha) |h| for d = 1, m = 1
    a = ctx.param("alpha_stable")
    spec = StableDriverSpec(a)
    bw_factor = ctx.param("bandwidth")
    ts = [cfg.t * 2.0**-k for k in range(6)]
    h_fixed = 2.0**-9
    t_pairs = []
    for tt in ts:
        s = stable_increments(make_stream(ctx.seed(2)), n, spec, tt)
        box = 40.0 * max(tt, 0.05) ** (1.0 / a)
        pairs, _ = _kde_delta_slope(s, bw_factor * tt ** (1.0 / a), -box, box, 2.0**-11,
                                    [h_fixed], 1)
        t_pairs.append((tt, pairs[0][1]))
    ctx.table("kernel_t", t_pairs)
    ctx.add("kernel_t_slope", "within", -1.0 / a, fit_scaling(t_pairs),
            "||Delta_h^m g_t||_p <~ (1 ^ t)^(-m/alpha - d/(alpha q)) |h|^m")
    s = stable_increments(make_stream(ctx.seed(3)), n, spec, 1.0)
    h_pairs, _ = _kde_delta_slope(s, bw_factor, -40.0, 40.0, 2.0**-10, dyadic(3, 8), 1)
    ctx.table("kernel_h", h_pairs)
    ctx.add("kernel_h_slope", "within", 1.0, fit_scaling(h_pairs),
            "||Delta_h^m g_t||_p <~ (1 ^ t)^(-m/alpha - d/(alpha q)) |h|^m")

    # coupling moment of order gamma < alpha
    beta = ctx.param("beta")
    gamma = ctx.param("moment")
    model = stable_holder_model(a, beta, ctx.param("amplitude"))
    pairs, coupled = _moment_sweep(ctx, model, AuxKind("levy_frozen"), gamma, block=4)
    ctx.table("coupling_moment", pairs)
    ctx.add("coupling_moment_slope", "at_least", gamma * (1.0 + beta) / a, fit_scaling(pairs),
            "E|X_t - Y_t|^gamma <~ eps^(gamma (1+beta)/alpha) for gamma < alpha",
            note="one-sided upper bound")

    tf = make_test_function("cosine", cfg.alpha, omega=ctx.param("omega"))
    panel = _pe_panel(ctx, coupled[:1], tf)
    _pe_slope(ctx, panel, "pe_slope", "Pe <~ ||phi|| (|h| / eps^(1/alpha))^m", "pe_h", index=a)

    # feasibility window with constant sigma: (kappa d / (p (alpha kappa - 1) - d), 1/q')
    p, q, d = ctx.param("p"), ctx.param("q"), 1
    res = levy_feasibility(a, 1.0, p, q, d, sigma_constant=True)
    kappa = 1.0 - 1.0 / q
    lo = kappa * d / (p * (a * kappa - 1.0) - d)
    err = max(abs(res.kappa - kappa) / kappa, abs(res.e_window[0] - lo) / lo,
              abs(res.e_window[1] - kappa) / kappa)
    ctx.add("feasibility_window", "at_most", 0.0, err,
            "e in (kappa d / (p (alpha kappa - 1) - d), 1/q') with kappa = 1/q'")
    # kappa with a Hoelder sigma at the window's upper end
    e_top = res.e_window[1]
    expect = min(1.0 - 1.0 / q, (1.0 + beta) / a, 1.0 / a + beta * (1.0 - 1.0 / q) - beta * e_top / 2.0)
    got = levy_kappa(a, beta, q, e_top)
    ctx.add("kappa_formula", "at_most", 0.0, abs(got - expect) / expect,
            "kappa = min(1/q', (1+beta)/alpha, 1/alpha + beta/q' - beta e/2)")


def run_rough_drift(cfg, ctx):
    gamma_sing = ctx.param("gamma_sing")
    p, gamma = ctx.param("p"), ctx.param("gamma")
    if not p < drift_lp_membership(gamma_sing):
        raise ParameterError(f"drift with gamma_sing={gamma_sing} is not in L^{p}")
    model = truncated_singular_drift_model(gamma_sing, ctx.param("cap"))
    q, d = math.inf, 1
    e_gamma = rough_drift_exponent(p, q, d, gamma)
    closed = gamma / (1.0 - d / p)
    ctx.add("e_gamma_formula", "at_most", 0.0, abs(e_gamma - closed) / closed,
            "e_gamma = (1 - 1/q) / (1 - 2/q - d/p) gamma")

    # density Besov seminorm against time; bound (1 ^ t)^(-e) for every e > e_gamma
    ts = [cfg.t * 2.0**-k for k in range(1, 7)]
    semis = []
    for tt in ts:
        ens = simulate_ensemble(model, tt, cfg.n_steps, cfg.n_paths, ctx.seed(0), workers=cfg.workers)
        st = math.sqrt(tt)
        dom = GridDomain.box([-8 * st], [8 * st], st * 2.0**-7)
        dens = mollified_density(ens.endpoints, ctx.param("bandwidth") * st, dom)
        hs = [[dom.spacing * 2**k] for k in range(9)]
        semis.append((tt, besov_seminorm(dens, gamma, 1, 1, hs)))
    ctx.table("seminorm_t", semis)
    ctx.add("seminorm_time_trend", "at_least", -e_gamma, fit_scaling(semis),
            "||p_t||_{B^gamma_{1,inf}} <~ t^(-e) for e > e_gamma",
            note="consistency, not proof: Euler convergence for singular drifts is not established")

    pairs, _ = _moment_sweep(ctx, model, AuxKind("frozen"), 1.0, block=1)
    ctx.table("coupling_l1", pairs)
    ctx.add("coupling_slope", "at_least", 1.0 - 1.0 / q, fit_scaling(pairs),
            "E|int_{t-eps}^t b(X_s) ds| <~ eps^(1/q')", note="one-sided upper bound")


def _sdef(name, anchor, description, run, model_defaults, tolerances, **config_defaults):
    return ScenarioDef(name, anchor, description, run, model_defaults, tolerances, config_defaults)


SCENARIOS: Dict[str, ScenarioDef] = {s.name: s for s in [
    _sdef("bulk_bm", "Ae/Pe split for Brownian motion: Pe <~ (1 ^ |h|/sqrt(eps))^m",
          "Gaussian baseline: smooth density slope, zero Ae, Pe envelope and h^m slope",
          run_bulk_bm, {"sigma": 1.0, "bandwidth": 0.2, "omega": 1.0},
          {"kde_slope": 0.2, "kde_mass": 1e-3, "ae_zero": 1e-300, "pe_slope": 0.2,
           "pe_envelope": 1e-9, "telescoping": 1e-12}),
    _sdef("bulk_holder_sigma", "E|X_t - Y_t|^2 <~ eps^(1+beta); Pe <~ (1 ^ |h|/sqrt(eps))^m",
          "Hoelder diffusion coefficient with the frozen auxiliary",
          run_bulk_holder_sigma,
          {"beta": 0.5, "amplitude": 0.25, "center": 2.0, "omega": 1.0, "kink_center": 0.3},
          {"coupling_slope": 0.15, "a0_from_rates": 0.15, "pe_slope": 0.2,
           "pe_envelope_cosine": 1e-9, "pe_envelope_kink": 1e-9, "telescoping": 1e-12}),
    _sdef("morereg_drift", "E|X_t - Y_t| <~ eps^(1+beta/2), eps^((3+beta)/2) with Taylor auxiliary",
          "Higher-order auxiliaries for rough and C^(1+beta) drifts",
          run_morereg_drift, {"beta": 0.5, "amplitude": 0.5},
          {"drift_frozen_slope": 0.15, "drift_frozen_improves": 1e-9, "taylor_slope": 0.2,
           "taylor_conditional_variance": 0.03}),
    _sdef("hypoelliptic", "conditional covariance eigenvalues of order eps and eps^3",
          "Degenerate two-block system: covariance, Taylor coupling and the beta/3 index",
          run_hypoelliptic, {"beta": 0.5, "amplitude": 0.5, "fine_steps": 256},
          {"eigen_slope_large": 0.05, "eigen_slope_small": 0.05, "mc_covariance": 0.05,
           "var_x2": 0.05, "hypo_taylor_slope": 0.2, "a0_hypoelliptic": 1e-12}),
    _sdef("weighted_singular", "E[Delta_h^m phi(X_t) |sigma^-1(X_t)|^-m] <~ eps^(-m/2) |h|^m",
          "Diffusion coefficient vanishing at the origin, weighted difference functional",
          run_weighted_singular,
          {"beta": 0.5, "x0": 0.5, "omega": 1.0, "kink_center": 0.3, "first_term_h": 2.0**-4},
          {"coupling_slope": 0.15, "weighted_pe_slope": 0.2, "weighted_pe_envelope": 1e-9,
           "weighted_first_term_slope": 0.15}),
    _sdef("squared_bessel", "p_t(x) = (2 pi t x)^(-1/2) e^(-x/2t) lies in B^alpha_{1,inf} iff alpha <= 1/2",
          "Squared Bessel process of dimension 1: sharp Besov index of the analytic density",
          run_squared_bessel,
          {"box": 40.0, "grid_level": 16.0, "mc_bandwidth": 0.05},
          {"ratio_045_bounded": 1e-9, "ratio_06_growth": 1e-9, "ratio_06_monotone": 0.5,
           "analytic_slope": 0.05, "mc_crosscheck_l1": 0.05},
          h_sweep=dyadic(2, 14)),
    _sdef("pathdep", "path-dependent sigma(t, w): E|X_t - Y_t|^2 <~ eps^(1+beta)",
          "Running-maximum diffusion coefficient with the frozen auxiliary",
          run_pathdep, {"beta": 0.5, "omega": 1.0},
          {"coupling_slope": 0.15, "bookkeeping_identity": 1e-300, "pe_slope": 0.2}),
    _sdef("levy_stable", "||Delta_h^m g_t||_p <~ (1 ^ t)^(-m/alpha - d/(alpha q)) |h|^m",
          "Symmetric stable driver: laws, kernel scaling, coupling moments and exponent window",
          run_levy_stable,
          {"alpha_stable": 1.5, "bandwidth": 0.2, "beta": 0.5, "amplitude": 0.25, "moment": 0.5,
           "p": 10.0, "q": 20.0, "omega": 1.0},
          {"ks_cauchy": 0.01, "pe_slope": 0.2, "ks_normal2": 0.01, "kernel_t_slope": 0.1, "kernel_h_slope": 0.1,
           "coupling_moment_slope": 0.15, "feasibility_window": 1e-12, "kappa_formula": 1e-12}),
    _sdef("rough_drift", "||p_t||_{B^gamma_{1,inf}} <~ t^(-e), e > e_gamma, for b in L^q(L^p)",
          "Truncated power-singular drift: exponent arithmetic and density time trend",
          run_rough_drift,
          {"gamma_sing": 0.3, "cap": 50.0, "p": 3.0, "gamma": 0.25, "bandwidth": 0.1},
          {"e_gamma_formula": 1e-12, "seminorm_time_trend": 0.1, "coupling_slope": 0.15},
          n_steps=64),
]}
