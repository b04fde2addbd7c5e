"""OU criterion residual for a sweep of candidate variances.

The residual vanishes only at the stationary variance sigma^2 / (2 lambda)
(canonical) or sigma^2 / lambda (paper convention).
"""
import argparse

import numpy as np

from symcrit import GaussianParam, residual_profile, symbol_diffusion


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--paper-mode", action="store_true")
    args = ap.parse_args()
    sym = symbol_diffusion(args.lam, args.sigma, paper_mode=args.paper_mode)
    print("variance  max|S|        argmax xi  verdict")
    for v in np.round(np.linspace(0.1, 2.0, 20), 3):
        rep = residual_profile(sym, GaussianParam(0.0, v), np.linspace(-5, 5, 101))
        print(f"{v:8.3f}  {rep.max_abs:.6e}  {rep.argmax[0]:+9.3f}  {rep.verdict.value}")


if __name__ == "__main__":
    main()
