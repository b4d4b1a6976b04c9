"""Complete circular hypersurfaces in the chart zeta = z1 / z2.

Along the ray through ``(a, c)`` the surface is met at ``s * (a, c)`` for a
unique ``s > 0``.  The chart coefficient ``b_S(zeta)`` is the Beltrami
coefficient at ``(zeta * s, s)``; since z2 = s is real there, the phase
factor ``conj(z2)^2 / z2^2`` equals one.  The chart at infinity uses
``(s, xi * s)`` with ``xi = z2 / z1``.  The radial function rho is never
formed explicitly.
"""
from dataclasses import dataclass, field

import numpy as np

from .beltrami import coeff_arrays
from .config import TOL
from .errors import BranchError, CircularityError, LeviDegenerate, NoCrossing, NotOnSurface
from .expr import Surface, surface

S_MIN = 1e-3
S_MAX_START = 10.0
S_MAX_LIMIT = 1e6
BISECTION_STEPS = 60
NEWTON_STEPS = 3


def _ray_value(surf, a, c, s):
    return surf.value(a * s, c * s).real


def ray_solve(surf, a, c, s_min=S_MIN, s_max_limit=S_MAX_LIMIT):
    """Smallest ``s > s_min`` with ``r(a s, c s) = 0``; vectorised over a, c.

    Walks outward from ``s_min`` doubling s until r turns nonnegative,
    bisects the last bracket, then polishes with Newton steps on
    ``s -> r(a s, c s)``.
    """
    a, c = np.broadcast_arrays(np.asarray(a, dtype=complex), np.asarray(c, dtype=complex))
    shape = a.shape
    a, c = a.ravel(), c.ravel()
    lo = np.full(a.shape, float(s_min))
    r_lo = _ray_value(surf, a, c, lo)
    if np.any(~(r_lo < 0)):
        k = np.flatnonzero(~(r_lo < 0))[0]
        raise NoCrossing(f"r >= 0 near the origin along direction {(a[k], c[k])}")
    hi = np.full(a.shape, np.nan)
    todo = np.arange(a.size)
    while todo.size:
        nxt = np.minimum(2.0 * lo[todo], s_max_limit)
        hit = _ray_value(surf, a[todo], c[todo], nxt) >= 0
        hi[todo[hit]] = nxt[hit]
        miss = todo[~hit]
        if np.any(nxt[~hit] >= s_max_limit):
            k = miss[nxt[~hit] >= s_max_limit][0]
            raise NoCrossing(f"no sign change up to s = {s_max_limit:g} along {(a[k], c[k])}")
        lo[miss] = nxt[~hit]
        todo = miss
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        neg = _ray_value(surf, a, c, mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
        if np.all(hi - lo <= 4e-16 * hi):
            break
    s = 0.5 * (lo + hi)
    for _ in range(NEWTON_STEPS):
        val, g = surf.gradient(a * s, c * s)
        slope = (g[0] * a + g[1] * c + g[2] * np.conj(a) + g[3] * np.conj(c)).real
        with np.errstate(all="ignore"):
            ds = -val.real / slope
        ok = np.isfinite(ds) & (np.abs(ds) <= (hi - lo) + 1e-14 * s)
        s = np.where(ok, s + np.where(ok, ds, 0.0), s)
    return s.reshape(shape)


@dataclass
class CircularSurface:
    """A defining expression of a complete circular hypersurface.

    Construction verifies invariance under ``(z1, z2) -> e^{it} (z1, z2)``
    on random samples and that sampled rays cross the surface once,
    transversally, starting from inside.
    """
    defining: object
    radial_bracket: tuple = (S_MIN, S_MAX_START)
    circularity_residual: float = 0.0
    axes_smooth: bool = True
    seed: int = 0
    surf: Surface = field(init=False, repr=False)

    def __post_init__(self):
        self.surf = surface(self.defining)
        self.defining = self.surf.expr
        rng = np.random.default_rng(self.seed)
        self.circularity_residual = self._check_circularity(rng)
        self.radial_bracket = self._check_starlike(rng)
        self.axes_smooth = self._probe_axes()

    def _check_circularity(self, rng, n=200):
        z = (rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))) / np.sqrt(2)
        rot = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        try:
            r0 = self.surf.value(z[0], z[1])
            r1 = self.surf.value(rot * z[0], rot * z[1])
        except BranchError:
            keep = []
            for k in range(n):
                try:
                    self.surf.value(z[0, k], z[1, k])
                    keep.append(k)
                except BranchError:
                    pass
            z, rot = z[:, keep], rot[keep]
            r0 = self.surf.value(z[0], z[1])
            r1 = self.surf.value(rot * z[0], rot * z[1])
        residual = float(np.max(np.abs(r1 - r0)))
        scale = 1.0 + float(np.max(np.abs(r0)))
        if not residual <= TOL.circularity * scale:
            raise CircularityError(
                f"not invariant under simultaneous rotation (residual {residual:.3g})")
        return residual

    def _check_starlike(self, rng, n=24, grid=400):
        zeta = np.exp(2j * np.pi * rng.uniform(size=n)) * np.exp(rng.uniform(-1.5, 1.5, size=n))
        a = np.concatenate([zeta, np.ones(n)])
        c = np.concatenate([np.ones(n), zeta])
        try:
            s = ray_solve(self.surf, a, c)
        except NoCrossing as err:
            raise CircularityError(f"not complete circular: {err}") from None
        # exactly one sign change on (0, 2 s*] and an outward crossing
        ts = np.linspace(S_MIN / s.max(), 2.0, grid)
        vals = self.surf.value(np.outer(a * s, ts), np.outer(c * s, ts)).real
        changes = np.count_nonzero(np.diff(np.sign(vals), axis=1) != 0, axis=1)
        if np.any(changes != 1):
            k = int(np.flatnonzero(changes != 1)[0])
            raise CircularityError(
                f"ray through {(a[k], c[k])} crosses the surface {changes[k]} times")
        return (S_MIN, float(max(S_MAX_START, 2 * s.max())))

    def _probe_axes(self):
        try:
            for pt in (self.chart_point(0.0), self.chart_point_infinity(0.0)):
                coeff_arrays(self.surf, *pt)
        except (BranchError, LeviDegenerate, NotOnSurface):
            return False
        return True

    def radial_solve(self, zeta):
        """``s > 0`` with ``(zeta s, s)`` on the surface."""
        s = ray_solve(self.surf, zeta, 1.0)
        return float(s) if np.ndim(s) == 0 else s

    def chart_point(self, zeta):
        s = ray_solve(self.surf, zeta, 1.0)
        return np.asarray(zeta) * s + 0j, s + 0j

    def chart_point_infinity(self, xi):
        s = ray_solve(self.surf, 1.0, xi)
        return s + 0j, np.asarray(xi) * s + 0j

    def b_chart(self, zeta):
        z1, z2 = self.chart_point(zeta)
        b = coeff_arrays(self.surf, z1, z2)[0]
        return complex(b) if b.ndim == 0 else b

    def b_chart_infinity(self, xi):
        z1, z2 = self.chart_point_infinity(xi)
        b = coeff_arrays(self.surf, z1, z2)[0]
        return complex(b) if b.ndim == 0 else b

    def chart_compatibility_residual(self, zeta):
        """``|b(zeta) - b_inf(1/zeta) conj(zeta)^2 / zeta^2|``."""
        zeta = np.asarray(zeta, dtype=complex)
        if np.any(zeta == 0):
            raise ValueError("chart compatibility needs zeta != 0")
        lhs = np.asarray(self.b_chart(zeta))
        rhs = np.asarray(self.b_chart_infinity(1.0 / zeta)) * np.conj(zeta) ** 2 / zeta ** 2
        out = np.abs(lhs - rhs)
        return float(out) if out.ndim == 0 else out


def radial_solve(s, zeta):
    return s.radial_solve(zeta)


def b_chart(s, zeta):
    return s.b_chart(zeta)


def b_chart_infinity(s, xi):
    return s.b_chart_infinity(xi)


def chart_compatibility_residual(s, zeta):
    return s.chart_compatibility_residual(zeta)
