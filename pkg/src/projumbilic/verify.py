"""Numerical checks reproducing the geometric claims, grouped for ``verify``.

Each check returns a :class:`Check` holding the measured quantity and the
threshold it is held to.  Checks are deterministic (fixed seeds).
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import catalog
from .beltrami import beltrami_coeff, rescaling_invariance_check
from .ellipse import rlinear_ellipse, rossi_frame
from .expr import parse, surface
from .projective import (CAYLEY, INVERSION, apply, pullback_surface, random_near_identity,
                         transformation_law_terms)
from .winding import Contour, locate_zero_cells, refine_zero, winding_number

SEED = 2016


@dataclass
class Check:
    group: str
    name: str
    value: float
    threshold: float
    passed: bool
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} [{self.group}] {self.name}: {self.detail}"


def _le(group, name, value, threshold, what="value"):
    value = float(value)
    return Check(group, name, value, threshold, bool(value <= threshold),
                 f"{what} {value:.3e} <= {threshold:.1e}")


# ---------------------------------------------------------------------------
# fixtures

def sphere_heisenberg_vanishing(n=200):
    out = []
    for name in ("sphere", "heisenberg"):
        fx = catalog.fixture(name)
        z1, z2 = fx.sample(n, SEED)
        out.append(_le("fixtures", f"{name} b = 0", np.abs(fx.beltrami(z1, z2)).max(), 1e-10,
                       "max |b|"))
    return out


def lp_closed_form(p, n=200):
    fx = catalog.fixture("lp", [p])
    rep = catalog.verify_fixture(fx, n, SEED)
    floor = abs(2 - p) / p - 1e-8
    ok = rep.max_deviation <= 1e-8 and rep.min_abs_b >= floor
    return Check("fixtures", f"lp({p:g}) closed form", rep.max_deviation, 1e-8, ok,
                 f"max dev {rep.max_deviation:.3e} <= 1e-8, min |b| {rep.min_abs_b:.6f} "
                 f">= {floor:.6f}")


def bulge_closed_form(n=200):
    rep = catalog.verify_fixture(catalog.fixture("bulge"), n, SEED)
    return _le("fixtures", "bulge closed form", rep.max_deviation, 1e-8, "max dev")


def bulge_zero_cell():
    circ = catalog.fixture("bulge").circular_surface()
    loc = locate_zero_cells(circ, (0, 0.5), 1e-3)
    near = all(abs(c.center) <= 2 * c.halfwidth + 1e-12 for c in loc.cells)
    ok = bool(loc.cells) and loc.index_sum == -2 and near and loc.stokes_consistent
    return Check("fixtures", "bulge zero cell at zeta=0", loc.index_sum, -2, ok,
                 f"{len(loc.cells)} cell(s) near 0, index sum {loc.index_sum} (want -2)")


def torus_checks(eps=0.01, n=200):
    fx = catalog.fixture("torus", [eps])
    z1, z2 = fx.sample(n, SEED)
    b = fx.beltrami(z1, z2)
    dev = np.abs(b - fx.closed_form_b(z1, z2)).max()
    mags = np.abs(b)
    c_convex_fails = mags.max() >= 1 - 10 * eps
    ok = dev <= 5 * eps and mags.min() >= 0.9 and c_convex_fails
    return Check("fixtures", f"torus({eps:g})", dev, 5 * eps, bool(ok),
                 f"max dev {dev:.3e} <= {5 * eps:.2e}, min |b| {mags.min():.4f} >= 0.9, "
                 f"max |b| {mags.max():.4f} >= {1 - 10 * eps:.2f} (not strongly C-convex)")


def contact_checks():
    out = []
    for rep in catalog.fourth_order_contact_check():
        out.append(Check("contact", f"bulge 4th-order contact on {rep.axis}-axis", rep.slope,
                         4.0, rep.passed, f"slope {rep.slope:.4f} in [3.8, 4.2]"))
    return out


# ---------------------------------------------------------------------------
# invariance under change of defining function

ETAS = ("1+abs2(z1)", "exp(re(z1))")


def defining_function_independence(n=20):
    out = []
    for fx in catalog.default_fixtures():
        z1, z2 = fx.sample(n, SEED)
        worst = 0.0
        for eta_src in ETAS:
            eta = parse(eta_src)
            for p in zip(z1, z2):
                b = beltrami_coeff(fx.defining, p).coeff
                d = rescaling_invariance_check(fx.defining, eta, p)
                worst = max(worst, d / (1 + abs(b)))
        out.append(_le("invariance", f"{fx.label} eta-rescaling", worst, 1e-9, "max rel dev"))
    return out


# ---------------------------------------------------------------------------
# projective transformation law

def _law_residual(m, expr, p):
    lhs, rhs = transformation_law_terms(m, expr, p)
    return abs(lhs - rhs) / max(1.0, abs(lhs)), abs(abs(lhs) - abs(rhs))


def transformation_law_random(fx, n_maps=50):
    rng = np.random.default_rng(SEED)
    z1, z2 = fx.sample(n_maps, SEED + 1)
    worst = worst_mod = 0.0
    for k in range(n_maps):
        m = random_near_identity(rng)
        r, rm = _law_residual(m, fx.defining, (z1[k], z2[k]))
        worst, worst_mod = max(worst, r), max(worst_mod, rm)
    ok = worst <= 1e-7 and worst_mod <= 1e-7
    return Check("transform", f"{fx.label} {n_maps} near-identity maps", worst, 1e-7, ok,
                 f"max rel residual {worst:.3e}, max ||b|-|b'|| {worst_mod:.3e} <= 1e-7")


def transformation_law_generator(fx, n=10):
    z1, z2 = fx.sample(n, SEED + 2)
    worst = 0.0
    for p in zip(z1, z2):
        if abs(p[0]) < 1e-3:
            continue
        worst = max(worst, _law_residual(INVERSION, fx.defining, p)[0])
    return _le("transform", f"{fx.label} generator (1/z1, z2/z1)", worst, 1e-7, "max rel residual")


def cayley_checks(n=50):
    heis = catalog.fixture("heisenberg")
    z1, z2 = heis.sample(n, SEED + 3)
    worst = 0.0
    on_sphere = 0.0
    for p in zip(z1, z2):
        worst = max(worst, _law_residual(CAYLEY, heis.defining, p)[0])
        w = apply(CAYLEY, p)
        on_sphere = max(on_sphere, abs(abs(w[0]) ** 2 + abs(w[1]) ** 2 - 1))
    # the sphere pulled back by the Cayley map vanishes on the Heisenberg hypersurface
    pb = surface(pullback_surface(CAYLEY, parse("abs2(z1)+abs2(z2)-1")))
    vanish = float(np.abs(pb.value(z1, z2)).max())
    ok = worst <= 1e-7 and on_sphere <= 1e-10 and vanish <= 1e-10
    return Check("transform", "Cayley map heisenberg -> sphere", worst, 1e-7, ok,
                 f"law residual {worst:.3e}, |w|^2-1 {on_sphere:.1e}, pullback {vanish:.1e}")


# ---------------------------------------------------------------------------
# chart machinery and winding

CIRCULAR = (("sphere", ()), ("lp", (3,)), ("lp", (4,)), ("lp", (6,)), ("bulge", ()),
            ("deformed_sphere", (0.05,)))


def annulus_samples(n, rng, r0=0.2, r1=5.0):
    r = np.exp(rng.uniform(np.log(r0), np.log(r1), n))
    return r * np.exp(2j * np.pi * rng.uniform(size=n))


def chart_compatibility(name, params, n=200):
    fx = catalog.fixture(name, params)
    circ = fx.circular_surface()
    zeta = annulus_samples(n, np.random.default_rng(SEED))
    res = circ.chart_compatibility_residual(zeta)
    b = np.abs(circ.b_chart(zeta))
    worst = float(np.max(res / (1 + b)))
    return _le("chart", f"{fx.label} chart compatibility", worst, 1e-8, "max rel residual")


def deformed_large_circle(M=20.0):
    circ = catalog.fixture("deformed_sphere", [0.05]).circular_surface()
    ws = [winding_number(circ.b_chart, Contour.circle(0, M * 2 ** k)) for k in range(3)]
    b_inf = abs(circ.b_chart_infinity(0.0))
    ok = ws == [-4, -4, -4] and b_inf > 1e-8
    return Check("chart", "deformed_sphere(0.05) large-circle winding", ws[0], -4, ok,
                 f"windings at M={M:g},{2 * M:g},{4 * M:g}: {ws} (want -4), |b_inf(0)| {b_inf:.3g}")


def theorem_deformed_sphere(region=(0, 4.0), min_halfwidth=1e-2):
    circ = catalog.fixture("deformed_sphere", [0.05]).circular_surface()
    loc = locate_zero_cells(circ, region, min_halfwidth)
    worst = 0.0
    for k, cell in enumerate(loc.cells):
        zeta = refine_zero(circ, cell)
        worst = max(worst, resample_abs_b(circ, zeta, theta=0.37 * (k + 1)))
    ok = bool(loc.cells) and loc.index_sum == -4 and loc.stokes_consistent and worst <= 1e-5
    return Check("theorem", "deformed_sphere(0.05) umbilic cells", worst, 1e-5, ok,
                 f"{len(loc.cells)} cells, index sum {loc.index_sum} (want -4), "
                 f"Stokes {loc.stokes_consistent}, refined max |b| {worst:.2e} <= 1e-5")


def resample_abs_b(circ, zeta, theta):
    """|b| at the circle of surface points over ``zeta``, computed away from
    the chart (at phase ``theta``, directly from the ambient formula)."""
    s = circ.radial_solve(zeta)
    p = (zeta * s * np.exp(1j * theta), s * np.exp(1j * theta))
    return abs(beltrami_coeff(circ.defining, p).coeff)


# ---------------------------------------------------------------------------
# Rossi structures

def rossi_points(n, rng):
    """Random points on S^3 plus points where f degenerates (z1, z2 real-collinear)."""
    k = n - n // 4
    v = rng.normal(size=(4, k))
    v /= np.linalg.norm(v, axis=0)
    z1, z2 = v[0] + 1j * v[1], v[2] + 1j * v[3]
    m = n // 4
    a = rng.uniform(0, 2 * np.pi, m)
    th = rng.uniform(0, 2 * np.pi, m)
    z1 = np.concatenate([z1, np.cos(a) * np.exp(1j * th)])
    z2 = np.concatenate([z2, np.sin(a) * np.exp(1j * th)])
    return z1, z2


def rossi_suite(t, n=200):
    rng = np.random.default_rng(SEED)
    z1, z2 = rossi_points(n, rng)
    want = (1 + t) / (1 - t)
    ratio_err = coll_err = 0.0
    fallbacks = 0
    for p in zip(z1, z2):
        fld = rossi_frame(p, t)
        fallbacks += fld.source != "f"
        ratio_err = max(ratio_err, abs(fld.axis_ratio - want))
        # collinear with X = (i conj z2, -i conj z1)  <=>  gamma in iR
        coll_err = max(coll_err, abs(fld.minor_dir.real))
    ok = ratio_err <= 1e-9 and coll_err <= 1e-9 and fallbacks > 0
    return Check("rossi", f"Rossi t={t:g}", ratio_err, 1e-9, ok,
                 f"ratio err {ratio_err:.2e}, minor-dir err {coll_err:.2e} <= 1e-9, "
                 f"{fallbacks} fallback points")


def brute_force_extremes(a, b, n=10_000):
    """Max/min of ``|gamma a + conj(gamma) b|`` on the unit circle and the
    maximising direction, from a phase sweep polished by a bounded search."""
    phi = np.linspace(0, np.pi, n, endpoint=False)
    g = np.exp(1j * phi)
    vals = np.abs(g * a + np.conj(g) * b)
    out = []
    for sign, k in ((-1, int(np.argmax(vals))), (1, int(np.argmin(vals)))):
        h = np.pi / n
        res = minimize_scalar(
            lambda x: sign * abs(np.exp(1j * x) * a + np.exp(-1j * x) * b),
            bounds=(phi[k] - h, phi[k] + h), method="bounded", options={"xatol": 1e-12})
        out.append((sign * res.fun, res.x))
    (vmax, xmax), (vmin, _) = out
    return vmax, vmin, np.exp(1j * xmax)


def rlinear_sweep(n_pairs=50):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(n_pairs):
        a = complex(*rng.normal(size=2))
        b = complex(*rng.normal(size=2))
        b *= rng.uniform(0.05, 0.95) * abs(a) / abs(b)
        fld = rlinear_ellipse(a, b)
        vmax, vmin, gmax = brute_force_extremes(a, b)
        worst = max(worst, abs(fld.axis_ratio - vmax / vmin) / fld.axis_ratio,
                    abs((fld.minor_dir / gmax).imag))
    return _le("rossi", "R-linear ellipse vs phase sweep", worst, 1e-6, "max err")


# ---------------------------------------------------------------------------
# properties

def wirtinger_fd(n=100):
    """Symbolic derivatives of fixture expressions vs central differences."""
    worst = 0.0
    h = 1e-5
    for fx in catalog.default_fixtures():
        surf = surface(fx.defining)
        z1, z2 = fx.sample(max(1, n // 8), SEED)
        _, g = surf.gradient(z1, z2)
        for k, (dz1, dz2) in enumerate(((1, 0), (0, 1))):
            fxp = surf.value(z1 + h * dz1, z2 + h * dz2)
            fxm = surf.value(z1 - h * dz1, z2 - h * dz2)
            fyp = surf.value(z1 + 1j * h * dz1, z2 + 1j * h * dz2)
            fym = surf.value(z1 - 1j * h * dz1, z2 - 1j * h * dz2)
            dx, dy = (fxp - fxm) / (2 * h), (fyp - fym) / (2 * h)
            for approx, exact in ((0.5 * (dx - 1j * dy), g[k]), (0.5 * (dx + 1j * dy), g[k + 2])):
                rel = np.abs(approx - exact) / np.maximum(1.0, np.abs(exact))
                worst = max(worst, float(rel.max()))
    return _le("properties", "Wirtinger derivatives vs finite differences", worst, 1e-6,
               "max rel err")


def jet_symmetry():
    worst = 0.0
    for fx in catalog.default_fixtures():
        z1, z2 = fx.sample(100, SEED)
        j = surface(fx.defining).jet(z1, z2)
        g, h = j.grad, j.hess
        pairs = [(g[0], g[2]), (g[1], g[3])]
        # conj swaps z <-> zbar in each index: (i, j) -> (i^2, j^2)
        for i in range(4):
            for k in range(i, 4):
                pairs.append((h[i, k], h[(i + 2) % 4, (k + 2) % 4]))
        for x, y in pairs:
            scale = np.maximum(1.0, np.abs(x))
            worst = max(worst, float(np.max(np.abs(np.conj(x) - y) / scale)))
    return _le("properties", "jet conjugate symmetry", worst, 1e-10, "max rel err")


def winding_additivity():
    circ = catalog.fixture("deformed_sphere", [0.05]).circular_surface()
    ok = True
    details = []
    for c, h in ((0.0, 2.0), (0.5 + 0.5j, 0.5), (-1 + 1j, 1.0)):
        whole = winding_number(circ.b_chart, Contour.square(c, h))
        parts = sum(winding_number(circ.b_chart, Contour.square(c + off * h / 2, h / 2))
                    for off in (-1 - 1j, 1 - 1j, -1 + 1j, 1 + 1j))
        w256 = winding_number(circ.b_chart, Contour.square(c, h, samples=256))
        ok &= whole == parts == w256
        details.append(f"{whole}={parts}={w256}")
    return Check("properties", "winding additivity / sample-count independence",
                 0.0 if ok else 1.0, 0.0, bool(ok), ", ".join(details))


GROUPS = {
    "fixtures": lambda: [*sphere_heisenberg_vanishing(), *(lp_closed_form(p) for p in (3, 4, 6)),
                         bulge_closed_form(), bulge_zero_cell(), torus_checks()],
    "contact": contact_checks,
    "invariance": defining_function_independence,
    "transform": lambda: [*(transformation_law_random(fx) for fx in catalog.default_fixtures()),
                          *(transformation_law_generator(fx) for fx in catalog.default_fixtures()),
                          cayley_checks()],
    "chart": lambda: [*(chart_compatibility(n, p) for n, p in CIRCULAR), deformed_large_circle()],
    "theorem": lambda: [theorem_deformed_sphere()],
    "rossi": lambda: [*(rossi_suite(t) for t in (0.1, 0.3, 0.7)), rlinear_sweep()],
    "properties": lambda: [wirtinger_fd(), jet_symmetry(), winding_additivity()],
}


def run_checks(only=None):
    """Yield checks for the selected groups (all by default)."""
    names = list(GROUPS) if not only else list(only)
    for name in names:
        if name not in GROUPS:
            raise KeyError(f"unknown check group {name!r}; choose from {sorted(GROUPS)}")
        yield from GROUPS[name]()
