"""Measure the O(eps) constant in b = -conj(z1 z2)/(z1 z2) * (1 + O(eps)) on the torus.

Prints max |b + conj(z1 z2)/(z1 z2)| / eps over samples for a range of eps.
The acceptance bound freezes the constant at 5; the measured value is sqrt(2).
"""
import argparse

import numpy as np

from projumbilic.catalog import fixture


def measure(eps, n, seed):
    fx = fixture("torus", [eps])
    z1, z2 = fx.sample(n, seed)
    b = fx.beltrami(z1, z2)
    dev = np.abs(b - fx.closed_form_b(z1, z2))
    return dev.max() / eps, np.abs(b).min(), np.abs(b).max()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("eps,ratio,min_abs_b,max_abs_b")
    for eps in (0.005, 0.01, 0.02, 0.05, 0.1, 0.15, 0.19):
        ratio, lo, hi = measure(eps, args.n, args.seed)
        print(f"{eps:g},{ratio:.6f},{lo:.6f},{hi:.6f}")
    print(f"# sqrt(2) = {np.sqrt(2):.6f}")


if __name__ == "__main__":
    main()
