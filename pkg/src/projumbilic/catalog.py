"""Built-in hypersurfaces with known Beltrami coefficients.

    sphere            |z1|^2 + |z2|^2 = 1                  b = 0
    heisenberg        Im z2 = |z1|^2                       b = 0
    lp(p)             |z1|^p + |z2|^p = 1, z1 z2 != 0      b = (2-p)/p conj(z1 z2)/(z1 z2)
    bulge             (|z1|^2+|z2|^2)^2 + |z1|^4 + |z2|^4 = 2
    torus(eps)        (log|z1|)^2 + (log|z2|)^2 = eps^2    b ~ -conj(z1 z2)/(z1 z2)
    deformed_sphere   |z|^2 - 1 + eps Re(z1^2 conj(z2)^2) = 0 (no closed form)
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .beltrami import coeff_arrays
from .circular import CircularSurface, ray_solve
from .errors import BadParams, UnknownFixture
from .expr import parse, surface

EPS_MAX = 0.2


@dataclass
class Fixture:
    name: str
    params: tuple
    defining: object
    closed_form_b: Optional[Callable] = None
    sampler: Callable = None
    admissible: Callable = None
    circular: bool = True
    # max allowed |numeric - closed form|
    closed_form_tol: float = 1e-8
    _circ: object = field(default=None, init=False, repr=False)

    @property
    def label(self):
        if not self.params:
            return self.name
        return f"{self.name}({', '.join(f'{p:g}' for p in self.params)})"

    @property
    def source(self):
        return str(self.defining)

    def circular_surface(self):
        if not self.circular:
            raise ValueError(f"{self.label} is not a circular fixture")
        if self._circ is None:
            self._circ = CircularSurface(self.defining)
        return self._circ

    def sample(self, n, seed=0):
        """``n`` on-surface points as two complex arrays."""
        return self.sampler(np.random.default_rng(seed), n)

    def beltrami(self, z1, z2):
        return coeff_arrays(surface(self.defining), z1, z2)[0]


def _circular_sampler(defining, min_abs=0.0):
    surf = surface(defining)

    def sample(rng, n):
        # uniform in the unit disk of one chart or the other, random phase
        rad = np.sqrt(rng.uniform(min_abs ** 2, 1.0, n))
        w = rad * np.exp(2j * np.pi * rng.uniform(size=n))
        swap = rng.uniform(size=n) < 0.5
        a = np.where(swap, 1.0, w)
        c = np.where(swap, w, 1.0)
        s = ray_solve(surf, a, c)
        phase = np.exp(2j * np.pi * rng.uniform(size=n))
        return a * s * phase, c * s * phase
    return sample


def _heisenberg_sampler(rng, n):
    z1 = rng.normal(size=n) + 1j * rng.normal(size=n)
    x = rng.normal(size=n)
    return z1, x + 1j * np.abs(z1) ** 2


def _torus_sampler(eps):
    def sample(rng, n):
        alpha = rng.uniform(0, 2 * np.pi, n)
        th = rng.uniform(0, 2 * np.pi, (2, n))
        return (np.exp(eps * np.cos(alpha) + 1j * th[0]),
                np.exp(eps * np.sin(alpha) + 1j * th[1]))
    return sample


def _lp_closed(p):
    k = (2.0 - p) / p

    def b(z1, z2):
        w = np.asarray(z1) * np.asarray(z2)
        return k * np.conj(w) / w
    return b


def _bulge_closed(z1, z2):
    z1, z2 = np.asarray(z1), np.asarray(z2)
    a1, a2 = np.abs(z1) ** 2, np.abs(z2) ** 2
    return -3 * np.conj(z1 ** 2 * z2 ** 2) / (2 * (a1 ** 2 + 4 * a1 * a2 + a2 ** 2))


def _torus_closed(z1, z2):
    w = np.asarray(z1) * np.asarray(z2)
    return -np.conj(w) / w


def _zero(z1, z2):
    return np.zeros(np.broadcast(np.asarray(z1), np.asarray(z2)).shape, dtype=complex)


def _num(x):
    return repr(float(x))


def _check_eps(name, params, default):
    eps = float(params[0]) if params else default
    if not 0 < eps < EPS_MAX:
        raise BadParams(f"{name}: epsilon must lie in (0, {EPS_MAX}), got {eps}")
    return eps


FIXTURE_NAMES = ("sphere", "heisenberg", "lp", "bulge", "torus", "deformed_sphere")


def fixture(name, params=()):
    """Build a fixture by name; ``params`` holds p for lp, epsilon otherwise."""
    params = tuple(float(x) for x in (params or ()))
    if name == "sphere":
        e = parse("abs2(z1)+abs2(z2)-1")
        return Fixture(name, (), e, _zero, _circular_sampler(e), closed_form_tol=1e-10)
    if name == "heisenberg":
        e = parse("abs2(z1)-im(z2)")
        return Fixture(name, (), e, _zero, _heisenberg_sampler, circular=False,
                       closed_form_tol=1e-10)
    if name == "lp":
        p = params[0] if params else 4.0
        if not p > 0:
            raise BadParams(f"lp: p must be positive, got {p}")
        half = _num(p / 2)
        e = parse(f"powr(abs2(z1),{half})+powr(abs2(z2),{half})-1")
        return Fixture(name, (p,), e, _lp_closed(p), _circular_sampler(e, min_abs=0.05),
                       admissible=lambda z1, z2: np.abs(z1 * z2) > 0)
    if name == "bulge":
        e = parse("(abs2(z1)+abs2(z2))^2+abs2(z1)^2+abs2(z2)^2-2")
        return Fixture(name, (), e, _bulge_closed, _circular_sampler(e))
    if name == "torus":
        eps = _check_eps(name, params, 0.01)
        e = parse(f"(log(abs2(z1))/2)^2+(log(abs2(z2))/2)^2-{_num(eps * eps)}")
        return Fixture(name, (eps,), e, _torus_closed, _torus_sampler(eps), circular=False,
                       admissible=lambda z1, z2: np.abs(z1 * z2) > 0,
                       closed_form_tol=TORUS_CONSTANT * eps)
    if name == "deformed_sphere":
        eps = _check_eps(name, params, 0.05)
        e = parse(f"abs2(z1)+abs2(z2)-1+{_num(eps)}*re(z1^2*conj(z2)^2)")
        return Fixture(name, (eps,), e, None, _circular_sampler(e))
    raise UnknownFixture(name)


# |b + conj(z1 z2)/(z1 z2)| <= TORUS_CONSTANT * eps; the measured ratio is
# sqrt(2) for eps in [0.005, 0.19] (scripts/torus_constant.py)
TORUS_CONSTANT = 5.0


def fixture_from_spec(spec):
    """``{"name": ..., "params": [...]}`` or ``{"expression": "..."}``."""
    if "expression" in spec:
        e = parse(spec["expression"])
        return Fixture("expression", (), e, None, None, circular=False)
    return fixture(spec["name"], spec.get("params", ()))


def default_fixtures():
    return [fixture("sphere"), fixture("heisenberg"), fixture("lp", [3]), fixture("lp", [4]),
            fixture("lp", [6]), fixture("bulge"), fixture("torus", [0.01]),
            fixture("deformed_sphere", [0.05])]


@dataclass
class FixtureReport:
    label: str
    max_deviation: float
    worst_point: tuple
    max_abs_b: float
    min_abs_b: float
    tolerance: float

    @property
    def passed(self):
        return self.max_deviation <= self.tolerance


def verify_fixture(fx, n_samples=200, seed=0):
    """Compare the numeric coefficient with the closed form on samples."""
    if fx.closed_form_b is None:
        raise ValueError(f"{fx.label} has no closed form")
    z1, z2 = fx.sample(n_samples, seed)
    b = fx.beltrami(z1, z2)
    dev = np.abs(b - fx.closed_form_b(z1, z2))
    k = int(np.argmax(dev))
    return FixtureReport(fx.label, float(dev[k]), (complex(z1[k]), complex(z2[k])),
                         float(np.abs(b).max()), float(np.abs(b).min()), fx.closed_form_tol)


@dataclass
class ContactReport:
    axis: str
    slope: float
    d: np.ndarray
    gap: np.ndarray

    @property
    def passed(self):
        return 3.8 <= self.slope <= 4.2


def radial_gap(surface_a, surface_b, a, c):
    """Difference of the radii at which the ray through (a, c) meets each surface."""
    sa = ray_solve(surface(surface_a), a, c)
    sb = ray_solve(surface(surface_b), a, c)
    return np.abs(sa - sb) * np.sqrt(np.abs(a) ** 2 + np.abs(c) ** 2)


def contact_slope(surface_a, surface_b, axis, d=None, phase=0.3):
    """Log-log slope of the radial gap against the angle d from an axis."""
    d = np.logspace(-3, -1, 21) if d is None else np.asarray(d)
    w = np.tan(d) * np.exp(1j * phase)
    if axis == "z1":
        a, c = np.ones_like(w), w
    else:
        a, c = w, np.ones_like(w)
    gap = radial_gap(surface_a, surface_b, a, c)
    pos = gap > 0
    if np.count_nonzero(pos) < 2:
        # identical surfaces along these rays: contact of infinite order
        return ContactReport(axis, float("inf"), d, gap)
    slope = float(np.polyfit(np.log(d[pos]), np.log(gap[pos]), 1)[0])
    return ContactReport(axis, slope, d, gap)


def fourth_order_contact_check():
    """Order of contact of the bulge with the two osculating ellipsoids."""
    bulge = fixture("bulge").defining
    return [contact_slope(bulge, "2*abs2(z1)+abs2(z2)-2", "z1"),
            contact_slope(bulge, "abs2(z1)+2*abs2(z2)-2", "z2")]
