"""Ellipse fields of competing CR structures with the same complex tangents.

An alternate CR structure on a hypersurface is encoded by a field of
ellipses (up to dilation) in each complex tangent line H_pS.  Directions in
H_pS are parametrised as ``X = gamma * (r2, -r1)``; on the unit sphere this
is ``(gamma conj(z2), -gamma conj(z1))``.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import TOL
from .errors import AllDegenerate, Degenerate, NotCConvex, UmbilicPoint
from .expr import Z1, Z1B, Z2, Z2B, Surface, surface

CANONICAL = "canonical"    # frame dz1^dz2 / conj(dz1^dz2)
CONJUGATE = "conjugate"    # frame conj(dz1^dz2) / dz1^dz2


@dataclass(frozen=True)
class EllipseField:
    axis_ratio: float
    minor_dir: complex
    vector: tuple = None
    source: str = ""

    @property
    def modulus(self):
        """kappa in [0, 1) with axis_ratio = (1 + kappa) / (1 - kappa)."""
        return (self.axis_ratio - 1.0) / (self.axis_ratio + 1.0)


def canonical_direction(gamma):
    """Unit representative of the real line through ``gamma``.

    Real part made nonnegative; on the imaginary axis the imaginary part is.
    """
    gamma = complex(gamma)
    gamma /= abs(gamma)
    if gamma.real < -1e-15 or (abs(gamma.real) <= 1e-15 and gamma.imag < 0):
        gamma = -gamma
    return gamma


def rlinear_ellipse(a, b):
    """Ellipse field of the R-linear form ``gamma -> gamma a + conj(gamma) b``.

    The level sets of ``|gamma a + conj(gamma) b|`` are ellipses whose minor
    axis points where the form is largest on the unit circle, i.e. along
    ``exp(i (arg b - arg a) / 2)``.
    """
    a, b = complex(a), complex(b)
    if not abs(b) < abs(a):
        raise Degenerate(f"|B| = {abs(b):.3g} >= |A| = {abs(a):.3g}")
    ratio = (abs(a) + abs(b)) / (abs(a) - abs(b))
    if abs(b) <= 1e-15 * abs(a):
        return EllipseField(1.0, 1 + 0j)
    phi = 0.5 * (np.angle(b) - np.angle(a))
    return EllipseField(ratio, canonical_direction(np.exp(1j * phi)))


@lru_cache(maxsize=64)
def _rossi_functions(t):
    f = Z1 ** 2 + Z2 ** 2 + t * (Z1B ** 2 + Z2B ** 2)
    g = Z1 ** 2 - Z2 ** 2 - t * (Z1B ** 2 - Z2B ** 2)
    h = Z1 * Z2 - t * Z1B * Z2B
    return (("f", Surface(f)), ("g", Surface(g)), ("h", Surface(h)))


def rossi_forms(p, t):
    """``[(name, A, B)]``: the differential of each of f, g, h on H_pS^3
    written as ``gamma -> gamma A + conj(gamma) B``."""
    z1, z2 = complex(p[0]), complex(p[1])
    out = []
    for name, surf in _rossi_functions(float(t)):
        _, grad = surf.gradient(z1, z2)
        f1, f2, f1b, f2b = (complex(x) for x in grad)
        a = f1 * z2.conjugate() - f2 * z1.conjugate()
        b = f1b * z2 - f2b * z1
        out.append((name, a, b))
    return out


def rossi_frame(p, t):
    """Ellipse field of the Rossi structure ``ker(Lbar + t L)`` at p in S^3.

    Uses the CR function f and falls back to g, then h, where the
    differential of the previous one vanishes on H_pS^3.
    """
    z1, z2 = complex(p[0]), complex(p[1])
    if abs(abs(z1) ** 2 + abs(z2) ** 2 - 1) > 1e-10:
        raise ValueError("point is not on the unit sphere")
    for name, a, b in rossi_forms(p, t):
        if abs(a) > TOL.rossi_degenerate:
            field = rlinear_ellipse(a, b)
            return EllipseField(field.axis_ratio, field.minor_dir,
                                (field.minor_dir * z2.conjugate(),
                                 -field.minor_dir * z1.conjugate()),
                                name)
    raise AllDegenerate(f"f, g and h all degenerate at {p}")


def _frame_pair(expr, p):
    """Complex tangent direction V = (r2, -r1) and transverse Y = i conj(grad)."""
    _, grad = surface(expr).gradient(complex(p[0]), complex(p[1]))
    r1, r2 = complex(grad[0]), complex(grad[1])
    v = np.array([r2, -r1])
    y = 1j * np.array([r1.conjugate(), r2.conjugate()])
    return v, y


def wedge(x, y):
    """``(dz1 ^ dz2)(X, Y)`` for real vectors given by complex coordinates."""
    return x[0] * y[1] - x[1] * y[0]


def positivity(b, x, y, bundle=CANONICAL):
    """``b * frame(X, Y)``: real positive exactly along minor axes."""
    w = wedge(x, y)
    return b * w / np.conj(w) if bundle == CANONICAL else b * np.conj(w) / w


def minor_axis_from_beltrami(b, p, expr, bundle=CANONICAL):
    """Ellipse field determined by a Beltrami coefficient with 0 < |b| < 1.

    The minor axis is the direction X in H_pS with ``b * frame(X, Y)``
    real positive for a transverse tangent vector Y.
    """
    b = complex(b)
    if abs(b) <= TOL.umbilic:
        raise UmbilicPoint(f"|b| = {abs(b):.3g}: no distinguished direction")
    if abs(b) >= 1:
        raise NotCConvex(f"|b| = {abs(b):.6g} >= 1")
    v, y = _frame_pair(expr, p)
    c = wedge(v, y)
    if bundle == CANONICAL:
        arg = -0.5 * (np.angle(b) + 2 * np.angle(c))
    else:
        arg = 0.5 * (np.angle(b) - 2 * np.angle(c))
    gamma = canonical_direction(np.exp(1j * arg))
    ratio = (1 + abs(b)) / (1 - abs(b))
    return EllipseField(ratio, gamma, tuple(complex(x) for x in gamma * v), bundle)
