"""Cosh diffusion: stationary density from the speed measure and its criterion residual."""
import argparse

import numpy as np

from symcrit import (DifferentialCharacteristics, Diffusion1D, fokker_planck_residual, residual_profile,
                     stationary_density, symbol_from_characteristics)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", type=float, default=1.0)
    ap.add_argument("--c", type=float, default=1.0)
    args = ap.parse_args()
    diff = Diffusion1D.cosh(args.theta, args.c)
    res = stationary_density(diff)
    print(f"M = {res.M:.15g} on window {res.window}, mass check {res.mass_check:.12f}")
    sym = symbol_from_characteristics(DifferentialCharacteristics(diff.b, lambda x: diff.sigma(x) ** 2))
    rep = residual_profile(sym, res.to_density(), np.linspace(-8, 8, 161), tol=1e-4)
    print(rep.summary())
    probe = np.linspace(*res.window, 22)[1:-1]
    fp = max(fokker_planck_residual(diff, res.pi, x) for x in probe)
    print(f"max Fokker-Planck residual at 20 points: {fp:.3e}")


if __name__ == "__main__":
    main()
