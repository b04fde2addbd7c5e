"""Stable-noise criterion: c_alpha table and the sech / tanh example."""
import math

import numpy as np

from symcrit import Density, albeverio_residual, stable_constant


def main():
    print("alpha   c_alpha (d=1)")
    for alpha in (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 1.95):
        print(f"{alpha:5.2f}  {stable_constant(alpha):+.12f}")
    print(f"c_1 + pi = {stable_constant(1.0) + math.pi:.2e}")
    sech = Density(lambda x: 1 / (math.pi * np.cosh(x)), (-40.0, 40.0), normalize=True)
    for a2 in (0.0, 0.5):
        worst = max(abs(albeverio_residual(1.0, a2, 1.0, lambda x: -np.tanh(x), sech, xi).value)
                    for xi in np.linspace(-5, 5, 101))
        print(f"a1 = 1, a2 = {a2}, beta = -tanh, rho = sech/pi: max residual {worst:.3e}")


if __name__ == "__main__":
    main()
