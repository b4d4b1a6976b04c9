"""Projective automorphisms of CP^2 acting on the affine chart C^2.

A 3x3 matrix [[A, B, C], [D, E, F], [G, H, I]] acts by

    (z1, z2) -> ((D + E z1 + F z2) / (A + B z1 + C z2),
                 (G + H z1 + I z2) / (A + B z1 + C z2)).
"""
from dataclasses import dataclass

import numpy as np

from .beltrami import beltrami_coeff
from .config import TOL
from .errors import AtInfinity, SingularMatrix
from .expr import V, Z1, Z2, Const, add, conjugate, div, mul, substitute, surface


@dataclass(frozen=True, eq=False)
class ProjectiveMap:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
        scale = np.abs(m).max()
        if scale == 0 or abs(np.linalg.det(m)) <= TOL.singular * scale ** 3:
            raise SingularMatrix("projective matrix is not invertible")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __call__(self, p):
        return apply(self, p)

    def __matmul__(self, other):
        """Composition: ``(f @ g)(p) == f(g(p))``."""
        return ProjectiveMap(self.matrix @ other.matrix)

    @classmethod
    def identity(cls):
        return cls(np.eye(3))

    @classmethod
    def affine(cls, linear, shift=(0, 0)):
        """``z -> linear @ z + shift``."""
        a = np.asarray(linear, dtype=complex)
        m = np.zeros((3, 3), dtype=complex)
        m[0, 0] = 1
        m[1:, 0] = shift
        m[1:, 1:] = a
        return cls(m)

    def to_json(self):
        """Row-major list of nine ``[re, im]`` pairs."""
        return [[float(c.real), float(c.imag)] for c in self.matrix.ravel()]

    @classmethod
    def from_json(cls, data):
        vals = [complex(re, im) for re, im in data]
        if len(vals) != 9:
            raise ValueError("a projective map needs nine complex entries")
        return cls(np.array(vals).reshape(3, 3))


CAYLEY = ProjectiveMap([[1j, 0, 1], [0, 2, 0], [1j, 0, -1]])
"""Heisenberg hypersurface to unit sphere: (2 z1/(i+z2), (i-z2)/(i+z2))."""

INVERSION = ProjectiveMap([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
"""The generator (z1, z2) -> (1/z1, z2/z1)."""


def _denominator(m, z1, z2):
    a, b, c = m.matrix[0]
    den = a + b * z1 + c * z2
    scale = np.abs(m.matrix).max() * (1 + np.abs(z1) + np.abs(z2))
    if np.any(np.abs(den) <= 1e-12 * scale):
        raise AtInfinity("point lies on the line sent to infinity")
    return den


def apply(m, p):
    z1, z2 = np.asarray(p[0], dtype=complex), np.asarray(p[1], dtype=complex)
    den = _denominator(m, z1, z2)
    (_, e1, f1), (_, e2, f2) = m.matrix[1:, :]
    d, g = m.matrix[1, 0], m.matrix[2, 0]
    w1 = (d + e1 * z1 + f1 * z2) / den
    w2 = (g + e2 * z1 + f2 * z2) / den
    if w1.ndim == 0:
        return complex(w1), complex(w2)
    return w1, w2


def inverse(m):
    try:
        inv = np.linalg.inv(m.matrix)
    except np.linalg.LinAlgError as err:
        raise SingularMatrix(str(err)) from None
    return ProjectiveMap(inv)


def holomorphic_jacobian_det(m, p):
    """Complex Jacobian determinant of the map at ``p``: det(M) / den^3."""
    z1, z2 = np.asarray(p[0], dtype=complex), np.asarray(p[1], dtype=complex)
    den = _denominator(m, z1, z2)
    out = np.linalg.det(m.matrix) / den ** 3
    return complex(out) if np.ndim(out) == 0 else out


def component_exprs(m):
    """The two rational component functions of the map as expressions."""
    (a, b, c), (d, e, f), (g, h, i) = (tuple(Const(x) for x in row) for row in m.matrix)
    den = add(add(a, mul(b, Z1)), mul(c, Z2))
    w1 = div(add(add(d, mul(e, Z1)), mul(f, Z2)), den)
    w2 = div(add(add(g, mul(h, Z1)), mul(i, Z2)), den)
    return w1, w2


def pullback_surface(m, expr):
    """Expression for ``r o psi`` with ``psi = apply(m, .)``.

    ``r o psi`` defines ``psi^-1(S)``; to get a defining expression for the
    image ``psi(S)`` pull back by ``inverse(m)``.
    """
    expr = surface(expr).expr
    w1, w2 = component_exprs(m)
    mapping = {V.Z1: w1, V.Z2: w2, V.Z1B: conjugate(w1), V.Z2B: conjugate(w2)}
    return substitute(expr, mapping)


def push_forward_surface(m, expr):
    """Defining expression of the image surface ``psi(S)``."""
    return pullback_surface(inverse(m), expr)


def transformation_law_terms(m, expr, p):
    """``(b_S(p), b_psiS(psi(p)) * J / conj(J))`` for the law b_S = psi^* b_psiS."""
    b_src = beltrami_coeff(expr, p).coeff
    q = apply(m, p)
    b_img = beltrami_coeff(push_forward_surface(m, expr), q).coeff
    jac = holomorphic_jacobian_det(m, p)
    return b_src, b_img * jac / jac.conjugate()


def check_transformation_law(m, expr, p):
    """Residual ``|b_S(p) - b_psiS(psi(p)) * J(p) / conj(J(p))|``."""
    lhs, rhs = transformation_law_terms(m, expr, p)
    return abs(lhs - rhs)


def random_near_identity(rng, noise=0.05):
    """Identity plus complex noise with entries of modulus at most ``noise``."""
    mod = rng.uniform(0, noise, size=(3, 3))
    arg = rng.uniform(0, 2 * np.pi, size=(3, 3))
    return ProjectiveMap(np.eye(3) + mod * np.exp(1j * arg))
