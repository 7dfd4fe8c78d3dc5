"""Fitted coupling rate of the frozen auxiliary against 1 + beta for several beta.

For a Weierstrass-type diffusion coefficient of Hoelder index beta, the
second moment E|X_t - Y_t|^2 of the frozen auxiliary should scale like
eps^(1 + beta).  Prints one row per beta.

Usage: python3 scripts/ae_rate_sweep.py [--n-paths N] [--seed S]
"""

import argparse

from roughdens.auxiliary import AuxKind, build_coupled
from roughdens.drivers import SeedSpec
from roughdens.estimators import coupling_error_moments, fit_scaling
from roughdens.models import simulate_with_checkpoint, weierstrass_sigma_model
from roughdens.scenarios.config import dyadic


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=20240601)
    p.add_argument("--betas", default="0.25,0.5,0.75")
    args = p.parse_args(argv)
    print(f"{'beta':>6} {'predicted':>10} {'fitted':>8} {'95% CI':>20}")
    for beta in (float(b) for b in args.betas.split(",")):
        model = weierstrass_sigma_model(beta)
        pairs = []
        for eps in dyadic(3, 8):
            ens = simulate_with_checkpoint(model, 1.0, eps, 32, args.n_paths, SeedSpec(args.seed),
                                           window_steps=32)
            c = build_coupled(ens, model, AuxKind("frozen"))
            pairs.append((eps, coupling_error_moments(c, [2.0])[0]))
        fit = fit_scaling(pairs)
        lo, hi = fit.ci
        print(f"{beta:6.2f} {1 + beta:10.3f} {fit.slope:8.3f}   [{lo:7.3f}, {hi:7.3f}]")


if __name__ == "__main__":
    main()
