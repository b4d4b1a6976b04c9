"""Write |b| over the zeta-plane for deformed spheres of several eps to CSV files.

Each file has columns re_zeta, im_zeta, re_b, im_b, abs_b (row-major), the
same layout as the ``scan`` command.
"""
import argparse
from pathlib import Path

from projumbilic.catalog import fixture
from projumbilic.cli import fmt, scan_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--resolution", type=int, default=201)
    ap.add_argument("--halfwidth", type=float, default=2.0)
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    h = args.halfwidth
    for eps in (0.02, 0.05, 0.1, 0.15):
        circ = fixture("deformed_sphere", [eps]).circular_surface()
        xs, ys, vals = scan_grid(circ, (-h, h, -h, h), args.resolution, args.threads)
        path = args.out / f"deformed_sphere_{eps:g}.csv"
        with path.open("w") as fh:
            fh.write("re_zeta,im_zeta,re_b,im_b,abs_b\n")
            for i, y in enumerate(ys):
                for k, x in enumerate(xs):
                    b = vals[i, k]
                    fh.write(",".join(fmt(v) for v in (x, y, b.real, b.imag, abs(b))) + "\n")
        print(f"eps={eps:g}: min |b| = {abs(vals).min():.3e} -> {path}")


if __name__ == "__main__":
    main()
