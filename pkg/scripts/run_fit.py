"""Gaussian fits for OU (both conventions) and the stochastic exponential."""
import numpy as np
from numpy.polynomial import Polynomial

from symcrit import FitProblem, fit_invariant, gaussian_family, ou_variance_ode_solve, symbol_diffusion


def main():
    fam = gaussian_family(mean=(-1.0, 1.0), variance=(0.01, 10.0))
    for lam, sigma in ((1.0, 1.0), (2.0, 0.5), (0.5, 1.5)):
        for mode in ("canonical", "paper"):
            sym = symbol_diffusion(lam, sigma, paper_mode=mode == "paper")
            res = fit_invariant(FitProblem(sym, fam), restarts=5)
            target = ou_variance_ode_solve(lam, sigma, mode)
            print(f"OU lam={lam} sigma={sigma} {mode:9s}: v = {res.params[1]:.6f} (target {target:.6f}), "
                  f"mean {res.params[0]:+.1e}, objective {res.objective_value:.1e}, converged {res.converged}")
    sym = symbol_diffusion(0.0, Polynomial([0.0, 1.0]), paper_mode=True)
    res = fit_invariant(FitProblem(sym, fam))
    floor = min(FitProblem(sym, fam).value([0.0, v]) for v in np.geomspace(0.01, 10, 200))
    print(f"stochastic exponential: objective {res.objective_value:.4f}, converged {res.converged}, "
          f"grid minimum over variances {floor:.4f}")


if __name__ == "__main__":
    main()
