"""Hand-derived exponent cases shared by the estimator and acceptance tests.

Each case is ``(name, compute, expected)``; ``compute`` returns a float or a
tuple of floats, ``expected`` was worked out by hand from the closed forms.
"""

import math

from roughdens.estimators import (
    ExponentParams,
    bulk_parameters_from_rates,
    epsilon_schedule,
    levy_feasibility,
    levy_kappa,
    predicted_regularity,
    rough_drift_exponent,
)

_BULK = ExponentParams(alpha=0.5, m=2, theta=2.0, a0=0.5)
_BULK_DELTA = ExponentParams(alpha=0.5, m=2, theta=2.0, a0=0.5, delta=0.1)
_HYPO = ExponentParams(alpha=0.5, m=2, theta=2.0 / 3.0, a0=0.2)


def _window(res):
    return (res.kappa,) + tuple(res.e_window)


PANEL = [
    # epsilon schedule: 0.1^2 / 2
    ("schedule_bulk", lambda: epsilon_schedule(0.1, 1.0, _BULK), 0.005),
    # t below |h|^theta: t / 2
    ("schedule_small_t", lambda: epsilon_schedule(0.1, 1e-6, _BULK), 5e-7),
    # delta1 = 2*2*0.5*0.1/2.5 = 0.08, delta2 = 0.08/1.5, power 0.25^(2 (1 - 0.08/1.5))
    ("schedule_delta", lambda: epsilon_schedule(0.25, 1.0, _BULK_DELTA),
     0.5 * 2.0 ** (-4.0 * (1.0 - 0.08 / 1.5))),
    # hypoelliptic scaling theta = 2/3: 0.5 * 0.125^(2/3) = 0.5 * 0.25
    ("schedule_hypo", lambda: epsilon_schedule(0.125, 1.0, _HYPO), 0.125),
    # Brownian rates: Ae ~ eps^(alpha (1 + beta)/2), Pe ~ eps^(-m/2) -> (theta, a0) = (2, beta)
    ("bulk_rates_brownian", lambda: bulk_parameters_from_rates(0.75, 0.5), (2.0, 0.5)),
    # hypoelliptic rates (3 + beta)/2 and 3/2 with beta = 0.6 -> (2/3, beta/3)
    ("bulk_rates_hypo", lambda: bulk_parameters_from_rates(1.8, 1.5), (2.0 / 3.0, 0.2)),
    ("a_max_bulk", lambda: predicted_regularity(_BULK, 1.0).a_max, 0.5),
    ("a_max_hypo", lambda: predicted_regularity(_HYPO, 1.0).a_max, 0.2),
    # c = alpha (1 + a0) = 0.75, h exponent m c / (m + c) = 1.5 / 2.75
    ("h_exponent", lambda: predicted_regularity(_BULK, 1.0).h_exponent, 6.0 / 11.0),
    # time exponent (1 + a0) a / (theta a0) = 1.5 * 0.2, K0 exponent a / (theta a0) = 0.2
    ("time_k0_exponents", lambda: (lambda r: (r.time_exponent, r.k0_exponent))(
        predicted_regularity(_BULK, 1.0, a=0.2)), (0.3, 0.2)),
    # K0 = 4, t = 1/4: 4^0.2 * 4^0.3 = 2
    ("prefactor", lambda: predicted_regularity(
        ExponentParams(alpha=0.5, m=2, theta=2.0, a0=0.5, K0=4.0), 0.25, a=0.2).prefactor, 2.0),
    # delta1 = 0.04, alpha = 0.68, delta2 = 0.04 / 2.04, m = 1.02 * 50 = 51
    ("for_target", lambda: (lambda p: (p.alpha, float(p.m), p.delta2))(
        ExponentParams.for_target(0.3, 2.0, 0.5, 0.05)), (0.68, 51.0, 0.04 / 2.04)),
    # (1 - 1/8) / (1 - 2/8 - 1/2) * 0.1 = 0.35
    ("rough_drift_q8", lambda: rough_drift_exponent(2.0, 8.0, 1, 0.1), 0.35),
    ("rough_drift_gamma0", lambda: rough_drift_exponent(2.0, 8.0, 1, 0.0), 0.0),
    # q = inf, p = 3: 0.25 / (2/3) = 0.375
    ("rough_drift_qinf", lambda: rough_drift_exponent(3.0, math.inf, 1, 0.25), 0.375),
    # min(0.75, 1.3/1.5, 1/1.5 + 0.225 - 0.03) = 0.75
    ("kappa_conjugate", lambda: levy_kappa(1.5, 0.3, 4.0, 0.2), 0.75),
    # min(1, 1.2/1.8, 1/1.8 + 0.2 - 0.05) = 2/3
    ("kappa_beta", lambda: levy_kappa(1.8, 0.2, math.inf, 0.5), 2.0 / 3.0),
    # constant sigma: kappa = 19/20, lower end 0.95 / (10 * 0.425 - 1)
    ("levy_constant_sigma", lambda: _window(levy_feasibility(1.5, 0.0, 10.0, 20.0, 1, sigma_constant=True)),
     (0.95, 0.95 / 3.25, 0.95)),
    # 2/20 + 1.5/4 < 0.5, q >= 3, beta >= 0.5: kappa = 3/4, lower end 0.75 / (20 * 0.125 - 1)
    ("levy_large_p", lambda: _window(levy_feasibility(1.5, 0.6, 20.0, 4.0, 1)), (0.75, 0.5, 0.75)),
    # same window from the scan with bisection refinement
    ("levy_large_p_scan", lambda: _window(levy_feasibility(1.5, 0.6, 20.0, 4.0, 1, method="bisection")),
     (0.75, 0.5, 0.75)),
]

INFEASIBLE = [
    # 2/q + d/p = 1.5
    ("rough_drift_infeasible", lambda: rough_drift_exponent(2.0, 2.0, 1, 0.1)),
]


def relative_error(got, expected) -> float:
    got = got if isinstance(got, tuple) else (got,)
    expected = expected if isinstance(expected, tuple) else (expected,)
    assert len(got) == len(expected)
    worst = 0.0
    for g, e in zip(got, expected):
        worst = max(worst, abs(g - e) if e == 0 else abs(g - e) / abs(e))
    return worst
