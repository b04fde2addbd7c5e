"""Monte Carlo convergence of lambda_xi(x, t) to p(x, xi) for OU as t shrinks."""
import argparse

from symcrit import SDESpec, estimate_symbol


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x", type=float, default=1.0)
    ap.add_argument("--xi", type=float, default=1.0)
    ap.add_argument("--n-paths", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    sde = SDESpec.ou(1.0, 1.0)
    exact = sde.symbol()(args.x, args.xi)
    print(f"p({args.x}, {args.xi}) = {exact:.6f}")
    for t in (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 5e-4):
        est = estimate_symbol(sde, args.x, args.xi, t, n_paths=args.n_paths, seed=args.seed)
        print(f"t = {t:7.1e}: {est.value:.5f}  se {est.std_error:.4f}  gap {abs(est.value - exact):.4f}")


if __name__ == "__main__":
    main()
