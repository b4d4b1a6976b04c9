"""Ellipse fields of the Rossi structures: axis ratio and minor-axis direction.

Compares the computed axis ratio with (1+t)/(1-t) and the minor direction
with X = (i conj z2, -i conj z1) over random points of the unit sphere.
"""
import argparse

import numpy as np

from projumbilic.ellipse import rossi_frame
from projumbilic.verify import rossi_points


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print("t,expected_ratio,max_ratio_err,max_direction_err,fallback_points")
    for t in (0.1, 0.3, 0.5, 0.7, 0.9):
        z1, z2 = rossi_points(args.n, rng)
        fields = [rossi_frame(p, t) for p in zip(z1, z2)]
        want = (1 + t) / (1 - t)
        rerr = max(abs(f.axis_ratio - want) for f in fields)
        derr = max(abs(f.minor_dir.real) for f in fields)
        fb = sum(f.source != "f" for f in fields)
        print(f"{t:g},{want:.12f},{rerr:.2e},{derr:.2e},{fb}")


if __name__ == "__main__":
    main()
