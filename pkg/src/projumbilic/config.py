"""Numerical tolerances used across the package.

All thresholds live on one mutable dataclass instance, ``TOL``.  Use
:func:`tolerances` to override some of them temporarily::

    with tolerances(on_surface=1e-6):
        beltrami_coeff(expr, p)
"""
from contextlib import contextmanager
from dataclasses import dataclass, fields


@dataclass
class Tolerances:
    # positive-real test for log/powr arguments, relative to magnitude
    branch: float = 1e-12
    # imaginary part allowed when evaluating a real defining expression
    reality: float = 1e-12
    # conjugate symmetry of second-order jets
    jet_symmetry: float = 1e-10
    # |r(p)| accepted as "on the surface"
    on_surface: float = 1e-8
    # |D| <= levi_degenerate * scale**3 counts as degenerate
    levi_degenerate: float = 1e-10
    # |Im D| <= levi_imag * |D|
    levi_imag: float = 1e-8
    # |b| at or below this is projective-umbilic
    umbilic: float = 1e-8
    # invertibility of projective matrices, relative to max entry cubed
    singular: float = 1e-12
    # circularity residual, relative to the sampled scale
    circularity: float = 1e-9
    # winding: |f| floor relative to contour max, rounding residual
    winding_floor: float = 1e-9
    winding_residual: float = 0.05
    # fallback threshold for degenerate R-linear forms in the Rossi frame
    rossi_degenerate: float = 1e-8


TOL = Tolerances()


@contextmanager
def tolerances(**overrides):
    """Temporarily override fields of the global ``TOL``."""
    names = {f.name for f in fields(Tolerances)}
    unknown = set(overrides) - names
    if unknown:
        raise TypeError(f"unknown tolerance(s): {sorted(unknown)}")
    saved = {k: getattr(TOL, k) for k in overrides}
    for k, v in overrides.items():
        setattr(TOL, k, v)
    try:
        yield TOL
    finally:
        for k, v in saved.items():
            setattr(TOL, k, v)
