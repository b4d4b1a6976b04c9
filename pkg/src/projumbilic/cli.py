"""Command-line driver: ``projumbilic <command> [options]``.

Every command writes deterministic output (fixed seeds, fixed ordering,
floats printed with 17 significant digits).  Failures print a JSON object
``{"error", "message", "exit_code"}`` and exit with

    1  verification failure or other numerical error
    2  parse error, unknown fixture or bad parameters
    3  point not on the surface
    4  Levi-degenerate point
    5  surface is not complete circular
"""
import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import catalog
from .beltrami import beltrami_coeff, classify
from .circular import CircularSurface
from .config import tolerances
from .ellipse import rossi_frame
from .errors import (BadParams, CircularityError, LeviDegenerate, NotOnSurface, ParseError,
                     ProjUmbilicError, UnknownFixture)
from .projective import CAYLEY, INVERSION, ProjectiveMap, random_near_identity, transformation_law_terms
from .verify import GROUPS, run_checks
from .winding import (Contour, large_circle_winding_fn, locate_zero_cells, refine_zero,
                      winding_number)

EXIT_CODES = ((ParseError, 2), (UnknownFixture, 2), (BadParams, 2), (NotOnSurface, 3),
              (LeviDegenerate, 4), (CircularityError, 5))
DEFAULT_TOLERANCE = 1e-4


# ---------------------------------------------------------------------------
# formatting

def fmt(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x + 0.0, ".17g")


def dumps(obj, indent=0):
    """JSON with fixed float formatting; complex numbers become [re, im]."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, complex, np.number)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{fmt(obj.real)}, {fmt(obj.imag)}]"
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    return json.dumps(str(obj))


def point_json(p):
    return [complex(p[0]), complex(p[1])]


# ---------------------------------------------------------------------------
# argument helpers

def floats(text, n=None):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} numbers, got {len(vals)}")
    return vals


def point_arg(text):
    a, b, c, d = floats(text, 4)
    return complex(a, b), complex(c, d)


def region_arg(text):
    x0, x1, y0, y1 = floats(text, 4)
    if not (x1 > x0 and y1 > y0):
        raise argparse.ArgumentTypeError("region must satisfy x0 < x1 and y0 < y1")
    return x0, x1, y0, y1


def load_fixture(args):
    if args.expr is not None:
        return catalog.fixture_from_spec({"expression": args.expr})
    if args.catalog is not None:
        with open(args.catalog) as fh:
            entries = json.load(fh)
        if not isinstance(entries, list) or not entries:
            raise BadParams("catalog must be a nonempty JSON array of surface specs")
        if not 0 <= args.entry < len(entries):
            raise BadParams(f"catalog has {len(entries)} entries, asked for {args.entry}")
        return catalog.fixture_from_spec(entries[args.entry])
    return catalog.fixture(args.fixture, args.param)


def circular_of(fx):
    return fx.circular_surface() if fx.circular else CircularSurface(fx.defining)


# ---------------------------------------------------------------------------
# commands

def cmd_eval(args, out):
    fx = load_fixture(args)
    val = beltrami_coeff(fx.defining, args.point)
    cls = classify(val.coeff)
    out.write(dumps({
        "surface": fx.source,
        "point": point_json(val.point),
        "coeff": val.coeff,
        "numerator": val.numerator,
        "denominator": val.denominator,
        "beta": cls.beta,
        "contact_order": cls.contact_order.value,
        "strongly_c_convex_here": cls.strongly_c_convex_here,
    }) + "\n")
    return 0


def scan_grid(circ, region, resolution, threads=1):
    """Row-major grid of ``b_S`` (NaN where it cannot be evaluated)."""
    x0, x1, y0, y1 = region
    xs, ys = np.linspace(x0, x1, resolution), np.linspace(y0, y1, resolution)

    def row(y):
        zeta = xs + 1j * y
        try:
            return np.asarray(circ.b_chart(zeta), dtype=complex)
        except ProjUmbilicError:
            vals = np.full(zeta.shape, np.nan + 0j)
            for k, z in enumerate(zeta):
                try:
                    vals[k] = circ.b_chart(z)
                except ProjUmbilicError:
                    pass
            return vals

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        rows = list(pool.map(row, ys))
    return xs, ys, np.array(rows)


def cmd_scan(args, out):
    if args.resolution < 2:
        raise BadParams("resolution must be at least 2")
    circ = circular_of(load_fixture(args))
    xs, ys, vals = scan_grid(circ, args.region, args.resolution, args.threads)
    out.write("re_zeta,im_zeta,re_b,im_b,abs_b\n")
    for i, y in enumerate(ys):
        for k, x in enumerate(xs):
            b = vals[i, k]
            out.write(",".join(fmt(v) if math.isfinite(v) else "nan"
                               for v in (x, y, b.real, b.imag, abs(b))) + "\n")
    return 0


def _axis_report(circ):
    try:
        b_inf = abs(circ.b_chart_infinity(0.0))
    except ProjUmbilicError:
        b_inf = float("nan")
    return b_inf


def find_umbilics(circ, region, min_halfwidth, large_radius):
    report = {"region": list(region), "min_halfwidth": min_halfwidth,
              "axes_smooth": circ.axes_smooth}
    warnings = []
    if not circ.axes_smooth:
        warnings.append("surface is not smooth and strongly pseudoconvex on the coordinate "
                        "axes; the winding argument does not apply and no cells are searched")
        _, _, vals = scan_grid(circ, _offset_region(region), 64)
        finite = np.abs(vals[np.isfinite(vals)])
        report.update(cells=[], index_sum=0, boundary_winding=None, stokes_consistent=None,
                      min_abs_b_sampled=float(finite.min()) if finite.size else None,
                      large_circle_winding=None, axis_abs_b_infinity=None)
        report["warnings"] = warnings
        return report
    loc = locate_zero_cells(circ, region, min_halfwidth)
    cells = []
    for cell in loc.cells:
        entry = cell.to_json()
        zeta = refine_zero(circ, cell)
        entry["refined"] = zeta
        entry["refined_abs_b"] = abs(circ.b_chart(zeta))
        cells.append(entry)
    b_inf = _axis_report(circ)
    if not b_inf > 1e-8:
        warnings.append("axis-umbilic: b vanishes on the z1-axis (chart at infinity), so the "
                        "large-circle winding need not equal -4")
    try:
        w, radius = large_circle_winding_fn(circ.b_chart, large_radius)
    except ProjUmbilicError as err:
        w, radius = None, None
        warnings.append(f"large-circle winding unavailable: {type(err).__name__}: {err}")
    report.update(cells=cells, index_sum=loc.index_sum, boundary_winding=loc.boundary_winding,
                  stokes_consistent=loc.stokes_consistent, n_contours=loc.n_contours,
                  large_circle_winding=w, large_circle_radius=radius,
                  axis_abs_b_infinity=b_inf)
    report["warnings"] = warnings
    return report


def _offset_region(region):
    # shift by a fraction of a grid step so a symmetric grid misses the axes
    x0, x1, y0, y1 = region
    dx, dy = (x1 - x0) / 127, (y1 - y0) / 127
    return (x0 + dx / np.pi, x1 + dx / np.pi, y0 + dy / np.e, y1 + dy / np.e)


def cmd_find_umbilics(args, out):
    fx = load_fixture(args)
    circ = circular_of(fx)
    report = {"surface": fx.source}
    report.update(find_umbilics(circ, args.region, args.min_halfwidth, args.large_radius))
    out.write(dumps(report) + "\n")
    return 0


def cmd_winding(args, out):
    fx = load_fixture(args)
    circ = circular_of(fx)
    if args.large is not None:
        w, radius = large_circle_winding_fn(circ.b_chart, args.large)
        b_inf = _axis_report(circ)
        report = {"contour": "large_circle", "radius": radius, "winding": w,
                  "axis_abs_b_infinity": b_inf, "axis_umbilic": not b_inf > 1e-8}
    elif args.square is not None:
        c, h = complex(args.square[0], args.square[1]), args.square[2]
        w = winding_number(circ.b_chart, Contour.square(c, h, args.samples))
        report = {"contour": "square", "center": c, "halfwidth": h, "winding": w}
    else:
        circle = args.circle or [0.0, 0.0, 1.0]
        c, r = complex(circle[0], circle[1]), circle[2]
        w = winding_number(circ.b_chart, Contour.circle(c, r, args.samples))
        report = {"contour": "circle", "center": c, "radius": r, "winding": w}
    out.write(dumps({"surface": fx.source, **report}) + "\n")
    return 0


NAMED_MAPS = {"cayley": CAYLEY, "inversion": INVERSION}


def cmd_transform_check(args, out):
    fx = load_fixture(args)
    rng = np.random.default_rng(args.seed)
    if args.point is not None:
        points = [args.point]
    else:
        if fx.sampler is None:
            raise BadParams("--point is required for surfaces given by expression")
        z1, z2 = fx.sample(args.count, args.seed)
        points = list(zip(z1, z2))
    rows = []
    for p in points:
        if args.map == "random":
            m = random_near_identity(rng)
        elif args.map in NAMED_MAPS:
            m = NAMED_MAPS[args.map]
        else:
            with open(args.map) as fh:
                m = ProjectiveMap.from_json(json.load(fh))
        lhs, rhs = transformation_law_terms(m, fx.defining, p)
        rows.append({"point": point_json(p), "b": lhs, "b_image_times_phase": rhs,
                     "residual": abs(lhs - rhs)})
    worst = max(r["residual"] for r in rows)
    out.write(dumps({"surface": fx.source, "map": args.map, "max_residual": worst,
                     "checks": rows}) + "\n")
    return 0


def cmd_rossi(args, out):
    if not -1 < args.t < 1:
        raise BadParams("t must lie in (-1, 1)")
    if args.point is not None:
        points = [args.point]
    else:
        rng = np.random.default_rng(args.seed)
        v = rng.normal(size=(4, args.count))
        v /= np.linalg.norm(v, axis=0)
        points = list(zip(v[0] + 1j * v[1], v[2] + 1j * v[3]))
    rows = []
    for p in points:
        fld = rossi_frame(p, args.t)
        rows.append({"point": point_json(p), "axis_ratio": fld.axis_ratio,
                     "minor_dir": fld.minor_dir, "vector": list(fld.vector),
                     "source": fld.source})
    out.write(dumps({"t": args.t, "expected_ratio": (1 + args.t) / (1 - args.t),
                     "fields": rows}) + "\n")
    return 0


def cmd_verify(args, out):
    only = []
    for item in args.only or []:
        only.extend(x for x in item.split(",") if x)
    unknown = sorted(set(only) - set(GROUPS))
    if unknown:
        raise BadParams(f"unknown check group(s) {unknown}; choose from {sorted(GROUPS)}")
    failed = 0
    for check in run_checks(only or None):
        failed += not check.passed
        out.write(check.line() + "\n")
        out.flush()
    out.write(f"{'FAIL' if failed else 'PASS'}: {failed} check(s) failed\n")
    return 1 if failed else 0


# ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("surface")
    src.add_argument("--fixture", default="sphere", choices=catalog.FIXTURE_NAMES)
    src.add_argument("--param", type=float, action="append", default=[],
                     help="fixture parameter (p for lp, epsilon otherwise)")
    src.add_argument("--expr", help="defining expression, e.g. 'abs2(z1)+abs2(z2)-1'")
    src.add_argument("--catalog", help="JSON array of {name, params} or {expression} specs")
    src.add_argument("--entry", type=int, default=0, help="index into --catalog")
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                        help="on-surface tolerance for |r(p)|")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", help="write results here instead of stdout")

    parser = argparse.ArgumentParser(prog="projumbilic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="Beltrami coefficient at a point")
    p.add_argument("--point", type=point_arg, required=True, help="Re z1,Im z1,Re z2,Im z2")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("scan", parents=[common], help="CSV grid of b over the zeta-plane")
    p.add_argument("--region", type=region_arg, default=(-2.0, 2.0, -2.0, 2.0),
                   help="x0,x1,y0,y1")
    p.add_argument("--resolution", type=int, default=101)
    p.set_defaults(run=cmd_scan)

    p = sub.add_parser("find-umbilics", parents=[common], help="certified zero cells of b")
    p.add_argument("--region", type=region_arg, default=(-4.0, 4.0, -4.0, 4.0))
    p.add_argument("--min-halfwidth", type=float, default=1e-2)
    p.add_argument("--large-radius", type=float, default=20.0)
    p.set_defaults(run=cmd_find_umbilics)

    p = sub.add_parser("winding", parents=[common], help="winding number of b on a contour")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--circle", type=lambda s: floats(s, 3), help="re,im,radius")
    g.add_argument("--square", type=lambda s: floats(s, 3), help="re,im,halfwidth")
    g.add_argument("--large", type=float, help="starting radius of the large circle")
    p.add_argument("--samples", type=int, default=64)
    p.set_defaults(run=cmd_winding)

    p = sub.add_parser("transform-check", parents=[common],
                       help="transformation law under a projective map")
    p.add_argument("--map", default="random",
                   help="random, cayley, inversion, or a JSON file of nine [re, im] pairs")
    p.add_argument("--point", type=point_arg)
    p.add_argument("--count", type=int, default=10)
    p.set_defaults(run=cmd_transform_check)

    p = sub.add_parser("rossi", parents=[common], help="ellipse field of a Rossi structure")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--point", type=point_arg)
    p.add_argument("--count", type=int, default=10)
    p.set_defaults(run=cmd_rossi)

    p = sub.add_parser("verify", parents=[common], help="run the numerical checks")
    p.add_argument("--only", action="append",
                   help=f"restrict to group(s): {', '.join(GROUPS)}")
    p.set_defaults(run=cmd_verify)
    return parser


def exit_code(err):
    for cls, code in EXIT_CODES:
        if isinstance(err, cls):
            return code
    return 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        with tolerances(on_surface=args.tolerance):
            return args.run(args, out)
    except (ProjUmbilicError, OSError, json.JSONDecodeError) as err:
        code = exit_code(err) if isinstance(err, ProjUmbilicError) else 2
        sys.stdout.write(dumps({"error": type(err).__name__, "message": str(err),
                                "exit_code": code}) + "\n")
        return code
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
