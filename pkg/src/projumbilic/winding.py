"""Winding numbers of continuous complex functions and zero localisation.

The chart coefficient ``b_S`` is not holomorphic, so zero indices can be
negative and the argument principle only certifies that a cell whose
boundary winding is nonzero contains a zero.  :func:`locate_zero_cells`
returns such certified cells from a quadtree refinement.
"""
from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import (AxisUmbilic, BoundaryZero, IdenticallyZero, NonConvergent,
                     ZeroOnContour)

MIN_SAMPLES = 64
MAX_SAMPLES = 2 ** 20
MAX_STEP = np.pi / 2
IDENTICALLY_ZERO = 1e-9
CELL_MARGIN = 1e-6
JITTER = 1e-3
MAX_RETRIES = 5
JITTER_SEED = 20170601


@dataclass(frozen=True)
class Contour:
    """Circle or axis-parallel rectangle, traversed counterclockwise."""
    kind: str
    center: complex
    radius: float = 0.0
    bounds: tuple = ()
    samples: int = MIN_SAMPLES

    def __post_init__(self):
        if self.samples < MIN_SAMPLES:
            raise ValueError(f"need at least {MIN_SAMPLES} samples")
        if self.kind == "circle" and not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.kind == "rect":
            x0, x1, y0, y1 = self.bounds
            if not (x1 > x0 and y1 > y0):
                raise ValueError("empty rectangle")

    @classmethod
    def circle(cls, center, radius, samples=MIN_SAMPLES):
        return cls("circle", complex(center), radius=float(radius), samples=samples)

    @classmethod
    def square(cls, center, halfwidth, samples=MIN_SAMPLES):
        c = complex(center)
        h = float(halfwidth)
        return cls.rect((c.real - h, c.real + h, c.imag - h, c.imag + h), samples)

    @classmethod
    def rect(cls, bounds, samples=MIN_SAMPLES):
        x0, x1, y0, y1 = map(float, bounds)
        return cls("rect", complex((x0 + x1) / 2, (y0 + y1) / 2),
                   bounds=(x0, x1, y0, y1), samples=samples)

    def at(self, t):
        """Points at parameters ``t`` in [0, 1)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "circle":
            return self.center + self.radius * np.exp(2j * np.pi * t)
        x0, x1, y0, y1 = self.bounds
        corners = np.array([x0 + 1j * y0, x1 + 1j * y0, x1 + 1j * y1, x0 + 1j * y1, x0 + 1j * y0])
        u = 4.0 * t
        k = np.minimum(u.astype(int), 3)
        frac = u - k
        return corners[k] + frac * (corners[k + 1] - corners[k])


def _phase_steps(vals):
    closed = np.append(vals, vals[:1])
    return np.angle(closed[1:] / closed[:-1])


def winding_number(f, contour, floor=None):
    """Winding number of ``f`` around 0 along ``contour``.

    ``f`` maps an array of complex points to an array of values.  The sample
    count doubles until every principal phase increment is at most pi/2; the
    result is accepted once one further doubling confirms it, which guards
    against aliased phase sequences that happen to pass the step test.
    """
    floor = TOL.winding_floor if floor is None else floor
    n = contour.samples
    t = np.arange(n) / n
    vals = np.asarray(f(contour.at(t)), dtype=complex)
    previous = None
    while True:
        mags = np.abs(vals)
        top = mags.max()
        if not top > IDENTICALLY_ZERO:
            raise IdenticallyZero(f"max |f| = {top:.3g} on the contour")
        if not mags.min() >= floor * top:
            k = int(np.argmin(mags))
            raise ZeroOnContour(f"|f| = {mags[k]:.3g} at {contour.at(t[k])}")
        steps = _phase_steps(vals)
        current = None
        if np.max(np.abs(steps)) <= MAX_STEP:
            total = steps.sum() / (2 * np.pi)
            current = int(np.rint(total))
            if abs(total - current) > TOL.winding_residual:
                raise NonConvergent(f"winding sum {total:.4f} is not close to an integer")
            if current == previous:
                return current
        previous = current
        if 2 * n > MAX_SAMPLES:
            raise NonConvergent(f"phase still jumps by {np.max(np.abs(steps)):.3g} "
                                f"with {n} samples")
        # interleave midpoints
        mid_t = t + 0.5 / n
        mid = np.asarray(f(contour.at(mid_t)), dtype=complex)
        t = np.column_stack([t, mid_t]).ravel()
        vals = np.column_stack([vals, mid]).ravel()
        n *= 2


def large_circle_winding_fn(f, radius, max_doublings=8, floor=None):
    """Winding of ``f`` on circles ``|zeta| = radius * 2^k``, doubled until stable.

    Returns ``(winding, radius_used)`` where two consecutive radii agree.
    """
    prev = winding_number(f, Contour.circle(0, radius), floor)
    for _ in range(max_doublings):
        radius *= 2
        cur = winding_number(f, Contour.circle(0, radius), floor)
        if cur == prev:
            return cur, radius / 2
        prev = cur
    raise NonConvergent("large-circle winding did not stabilise")


def large_circle_winding(s, M, strict=True):
    """Winding of the chart coefficient of ``s`` on a large circle.

    With ``strict`` the axis hypothesis (b at infinity nonzero) is enforced
    and :class:`AxisUmbilic` is raised when it fails.
    """
    w, _ = large_circle_winding_fn(s.b_chart, M)
    if strict:
        b_inf = abs(s.b_chart_infinity(0.0))
        if not b_inf > TOL.umbilic:
            raise AxisUmbilic(f"|b| = {b_inf:.3g} on the z1-axis (chart at infinity)")
    return w


# ---------------------------------------------------------------------------
# quadtree

@dataclass(frozen=True)
class ZeroCell:
    bounds: tuple
    index: int
    min_abs_b: float

    @property
    def center(self):
        x0, x1, y0, y1 = self.bounds
        return complex((x0 + x1) / 2, (y0 + y1) / 2)

    @property
    def halfwidth(self):
        x0, x1, y0, y1 = self.bounds
        return max(x1 - x0, y1 - y0) / 2

    def to_json(self):
        c = self.center
        return {"center": [c.real, c.imag], "halfwidth": float(self.halfwidth),
                "index": int(self.index), "min_abs_b": float(self.min_abs_b)}


@dataclass
class Localization:
    cells: list
    boundary_winding: int
    n_contours: int = 0

    @property
    def index_sum(self):
        return sum(c.index for c in self.cells)

    @property
    def stokes_consistent(self):
        return self.index_sum == self.boundary_winding


def _region(search):
    if len(search) == 2:
        c, h = complex(search[0]), float(search[1])
        return (c.real - h, c.real + h, c.imag - h, c.imag + h)
    return tuple(map(float, search))


def _cell_winding(f, bounds):
    return winding_number(f, Contour.rect(bounds), floor=CELL_MARGIN)


def _split(f, bounds, parent, rng):
    x0, x1, y0, y1 = bounds
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    hw = max(x1 - x0, y1 - y0) / 2
    for attempt in range(MAX_RETRIES + 1):
        if attempt:
            off = attempt * JITTER * hw * rng.uniform(0.5, 1.0, 2) * rng.choice([-1, 1], 2)
            sx, sy = cx + off[0], cy + off[1]
        else:
            sx, sy = cx, cy
        kids = [(x0, sx, y0, sy), (sx, x1, y0, sy), (x0, sx, sy, y1), (sx, x1, sy, y1)]
        try:
            ws = [_cell_winding(f, k) for k in kids]
        except ZeroOnContour:
            continue
        if sum(ws) != parent:
            continue
        return list(zip(kids, ws))
    raise BoundaryZero(f"could not split cell {bounds} away from zeros of b")


def _min_abs(f, bounds, n=9):
    x0, x1, y0, y1 = bounds
    x, y = np.meshgrid(np.linspace(x0, x1, n), np.linspace(y0, y1, n))
    return float(np.min(np.abs(f((x + 1j * y).ravel()))))


def locate_zero_cells(s, search, min_halfwidth):
    """Quadtree search for cells with nonzero boundary winding of ``b_S``.

    ``search`` is ``(center, halfwidth)`` or ``(x0, x1, y0, y1)``.  ``s`` is
    a :class:`CircularSurface` or any vectorised callable of zeta.
    """
    f = s.b_chart if hasattr(s, "b_chart") else s
    bounds = _region(search)
    rng = np.random.default_rng(JITTER_SEED)
    outer = winding_number(f, Contour.rect(bounds))
    leaves = []
    stack = [(bounds, outer)]
    count = 1
    while stack:
        b, w = stack.pop()
        if w == 0:
            continue
        x0, x1, y0, y1 = b
        if max(x1 - x0, y1 - y0) / 2 <= min_halfwidth:
            leaves.append(ZeroCell(b, w, _min_abs(f, b)))
            continue
        kids = _split(f, b, w, rng)
        count += 4
        stack.extend(kids)
    leaves.sort(key=lambda c: (c.bounds[0], c.bounds[2], c.bounds[1], c.bounds[3]))
    loc = Localization(leaves, outer, count)
    assert loc.stokes_consistent, "leaf indices do not add up to the boundary winding"
    return loc


def refine_zero(s, cell, grid=15, max_iter=60, fd_step=1e-7):
    """Best-effort location of a zero of ``b`` inside ``cell``.

    Picks the grid minimum of ``|b|`` and runs damped Newton iterations on
    ``(Re b, Im b)`` with a finite-difference Jacobian, staying in the cell.
    """
    f = s.b_chart if hasattr(s, "b_chart") else s
    x0, x1, y0, y1 = cell.bounds
    x, y = np.meshgrid(np.linspace(x0, x1, grid), np.linspace(y0, y1, grid))
    pts = (x + 1j * y).ravel()
    vals = np.abs(f(pts))
    z = pts[int(np.argmin(vals))]
    fz = complex(f(np.array([z]))[0])

    def clip(w):
        return complex(min(max(w.real, x0), x1), min(max(w.imag, y0), y1))

    for _ in range(max_iter):
        if abs(fz) <= 1e-15:
            break
        h = fd_step * max(1.0, abs(z))
        fx, fy = f(np.array([z + h, z + 1j * h]))
        jac = np.array([[(fx - fz).real, (fy - fz).real],
                        [(fx - fz).imag, (fy - fz).imag]]) / h
        try:
            step = np.linalg.lstsq(jac, -np.array([fz.real, fz.imag]), rcond=None)[0]
        except np.linalg.LinAlgError:
            break
        dz = complex(step[0], step[1])
        lam = 1.0
        improved = False
        while lam > 1e-6:
            trial = clip(z + lam * dz)
            ft = complex(f(np.array([trial]))[0])
            if abs(ft) < abs(fz):
                z, fz, improved = trial, ft, True
                break
            lam /= 2
        if not improved:
            break
    return z
