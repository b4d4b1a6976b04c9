"""Locate projective-umbilic circles of deformed spheres across eps.

For each eps: certified zero cells of b in the zeta-plane, their indices,
the refined zeros and the large-circle winding.  Each zero zeta is a whole
circle {(zeta s e^{it}, s e^{it})} of umbilic points on the hypersurface.
"""
import argparse

import numpy as np

from projumbilic.catalog import fixture
from projumbilic.cli import find_umbilics


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-halfwidth", type=float, default=1e-2)
    args = ap.parse_args()
    print("eps,n_cells,index_sum,large_winding,zeta_re,zeta_im,abs_b")
    for eps in (0.01, 0.05, 0.1, 0.15, 0.19):
        circ = fixture("deformed_sphere", [eps]).circular_surface()
        rep = find_umbilics(circ, (-4, 4, -4, 4), args.min_halfwidth, 20.0)
        for cell in rep["cells"]:
            z = cell["refined"]
            print(f"{eps:g},{len(rep['cells'])},{rep['index_sum']},{rep['large_circle_winding']},"
                  f"{z.real:.12f},{z.imag:.12f},{cell['refined_abs_b']:.2e}")
        # the zeros sit on |zeta| = 1 at arguments near +-pi/4 and +-3pi/4
        args_deg = sorted(np.degrees(np.angle([c["refined"] for c in rep["cells"]])))
        print(f"# eps={eps:g}: arguments (deg) {np.round(args_deg, 4).tolist()}")


if __name__ == "__main__":
    main()
