"""Beltrami coefficient of a strongly pseudoconvex hypersurface in C^2.

For a defining function r the coefficient against the frame
``dz1^dz2 / conj(dz1^dz2)`` is ``b = -N / D`` with the bordered determinants

    N = det [[0, r1, r2], [r1, r11, r21], [r2, r12, r22]]
    D = det [[0, r1, r2], [r1b, r11b, r21b], [r2b, r12b, r22b]]

Defining functions are expected to be negative inside the domain, in
which case strong pseudoconvexity is equivalent to ``D < 0``.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import TOL
from .errors import LeviDegenerate, NotOnSurface
from .expr import mul, surface


@dataclass(frozen=True)
class BeltramiValue:
    point: tuple
    coeff: complex
    numerator: complex
    denominator: complex


class ContactOrder(Enum):
    AT_LEAST_3 = "AtLeast3"
    EXACTLY_2 = "Exactly2"


@dataclass(frozen=True)
class PointClassification:
    beta: float
    contact_order: ContactOrder
    strongly_c_convex_here: bool

    @property
    def umbilic(self):
        return self.contact_order is ContactOrder.AT_LEAST_3


def bordered_determinants(j):
    """Return ``(N, D)`` from a second-order jet (works on arrays)."""
    r1, r2, r1b, r2b = j.grad
    h = j.hess
    r11, r12, r22 = h[0, 0], h[0, 1], h[1, 1]
    r11b, r12b = h[0, 2], h[0, 3]     # d2/dz1 dz1b, d2/dz1 dz2b
    r21b, r22b = h[1, 2], h[1, 3]     # d2/dz2 dz1b, d2/dz2 dz2b
    n = -r1 * r1 * r22 + 2.0 * r1 * r2 * r12 - r2 * r2 * r11
    d = -r1 * (r1b * r22b - r21b * r2b) + r2 * (r1b * r12b - r11b * r2b)
    return n, d


def _entry_scale(j):
    g = np.abs(j.grad).max(axis=0)
    h = np.abs(j.hess).reshape((16,) + np.shape(j.value)).max(axis=0)
    return np.maximum(g, h)


def _levi_ok(j, d):
    scale = _entry_scale(j)
    return (np.abs(d) > TOL.levi_degenerate * scale ** 3) & (d.real < 0) \
        & (np.abs(d.imag) <= TOL.levi_imag * np.abs(d))


def coeff_arrays(surf, z1, z2, check=True):
    """Vectorised core: ``(b, N, D, r)`` at arrays of points.

    With ``check`` the on-surface and strong pseudoconvexity conditions are
    enforced for every point.
    """
    j = surf.jet(z1, z2)
    n, d = bordered_determinants(j)
    if check:
        off = ~(np.abs(j.value) <= TOL.on_surface)
        if np.any(off):
            k = np.flatnonzero(np.atleast_1d(off))[0]
            raise NotOnSurface(
                f"|r| = {np.abs(np.atleast_1d(j.value)[k]):.3g} at "
                f"{_pt(z1, z2, k)} exceeds {TOL.on_surface:g}")
        bad = ~_levi_ok(j, d)
        if np.any(bad):
            k = np.flatnonzero(np.atleast_1d(bad))[0]
            dk = complex(np.atleast_1d(d)[k])
            hint = " (D > 0: negate the defining function)" if dk.real > 0 else ""
            raise LeviDegenerate(f"D = {dk:.6g} at {_pt(z1, z2, k)}{hint}")
    with np.errstate(all="ignore"):
        b = -n / d
    return b, n, d, j.value


def _pt(z1, z2, k):
    a, c = np.broadcast_arrays(np.atleast_1d(z1), np.atleast_1d(z2))
    return (complex(a.ravel()[k]), complex(c.ravel()[k]))


def beltrami_coeff(expr, p):
    """Beltrami coefficient of ``{expr = 0}`` at the point ``p = (z1, z2)``."""
    surf = surface(expr)
    b, n, d, _ = coeff_arrays(surf, complex(p[0]), complex(p[1]))
    return BeltramiValue((complex(p[0]), complex(p[1])), complex(b), complex(n), complex(d))


def rescaling_invariance_check(expr, eta, p):
    """``|b(eta * r, p) - b(r, p)|`` for a nonvanishing real factor eta."""
    b0 = beltrami_coeff(expr, p).coeff
    b1 = beltrami_coeff(mul(eta, surface(expr).expr), p).coeff
    return abs(b1 - b0)


def classify(b):
    beta = abs(b)
    order = ContactOrder.AT_LEAST_3 if beta <= TOL.umbilic else ContactOrder.EXACTLY_2
    return PointClassification(beta, order, beta < 1.0)


def classify_point(expr, p):
    return classify(beltrami_coeff(expr, p).coeff)
