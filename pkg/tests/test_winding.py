import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projumbilic import winding as W
from projumbilic.catalog import fixture
from projumbilic.errors import AxisUmbilic, BoundaryZero, IdenticallyZero, ZeroOnContour
from projumbilic.winding import (Contour, large_circle_winding, large_circle_winding_fn,
                                 locate_zero_cells, refine_zero, winding_number)

UNIT = Contour.circle(0, 1)


@pytest.fixture(scope="module")
def deformed():
    return fixture("deformed_sphere", [0.05]).circular_surface()


@pytest.fixture(scope="module")
def bulge():
    return fixture("bulge").circular_surface()


def test_basic_windings():
    assert winding_number(lambda z: z, UNIT) == 1
    assert winding_number(lambda z: np.conj(z) ** 2, UNIT) == -2
    assert winding_number(lambda z: z ** 7 * np.conj(z) ** 2, UNIT) == 5
    assert winding_number(lambda z: z - 3, UNIT) == 0
    assert winding_number(lambda z: z - 0.5j, Contour.square(0, 1)) == 1


def test_lp4_winding():
    lp = fixture("lp", [4]).circular_surface()
    assert winding_number(lp.b_chart, UNIT) == -2


def test_high_frequency_needs_doubling():
    assert winding_number(lambda z: z ** 100, UNIT) == 100


def test_rectangle_traversal_is_counterclockwise():
    c = Contour.rect((0, 2, 0, 1))
    pts = c.at(np.array([0, 0.25, 0.5, 0.75]))
    np.testing.assert_allclose(pts, [0, 2, 2 + 1j, 1j])


def test_contour_validation():
    with pytest.raises(ValueError):
        Contour.circle(0, 1, samples=32)
    with pytest.raises(ValueError):
        Contour.circle(0, 0)


def test_zero_on_contour():
    with pytest.raises(ZeroOnContour):
        winding_number(lambda z: z - 1, UNIT)
    with pytest.raises(IdenticallyZero):
        winding_number(lambda z: 0 * z, UNIT)


def test_large_circle(deformed, bulge):
    assert large_circle_winding(deformed, 20) == -4
    assert large_circle_winding(bulge, 20, strict=False) == -2
    with pytest.raises(AxisUmbilic):
        large_circle_winding(bulge, 20)
    with pytest.raises(ZeroOnContour):
        large_circle_winding(fixture("sphere").circular_surface(), 20)


@pytest.mark.parametrize("name,params", [("deformed_sphere", (0.05,)), ("bulge", ()),
                                         ("lp", (3,)), ("lp", (6,))])
def test_sample_count_independence(name, params):
    s = fixture(name, params).circular_surface()
    for contour in [(0.6 + 0.6j, 0.5), (1, 0.3), (-0.7 - 0.7j, 0.2)]:
        c, h = contour
        a = winding_number(s.b_chart, Contour.square(c, h, samples=64))
        b = winding_number(s.b_chart, Contour.square(c, h, samples=256))
        assert a == b


@pytest.mark.parametrize("c,h", [(0, 2), (0.7 + 0.7j, 0.3), (-0.6 + 0.8j, 0.5), (1.5, 1)])
def test_additivity(deformed, c, h):
    whole = winding_number(deformed.b_chart, Contour.square(c, h))
    parts = sum(winding_number(deformed.b_chart, Contour.square(c + d * h / 2, h / 2))
                for d in (-1 - 1j, 1 - 1j, -1 + 1j, 1 + 1j))
    assert whole == parts


def _synthetic(c, a, d):
    def f(z):
        z = np.asarray(z)
        return (c * np.conj(z) ** 4 + a * z + d) / (1 + np.abs(z) ** 4)
    return f


@settings(max_examples=30, deadline=None)
@given(st.complex_numbers(min_magnitude=0.5, max_magnitude=2),
       st.complex_numbers(max_magnitude=1), st.complex_numbers(max_magnitude=1))
def test_rotation_invariant_generalisation(c, a, d):
    f = _synthetic(c, a, d)
    w, _ = large_circle_winding_fn(f, 20)
    assert w == -4


def test_synthetic_localisation():
    f = _synthetic(1 + 0.5j, 0.4 - 0.2j, 0.3j)
    loc = locate_zero_cells(f, (0, 8), 1e-3)
    assert loc.index_sum == loc.boundary_winding == -4
    for cell in loc.cells:
        assert abs(f(np.array([refine_zero(f, cell)]))[0]) <= 1e-8


def test_deformed_sphere_cells(deformed):
    loc = locate_zero_cells(deformed, (0, 4), 1e-2)
    assert loc.cells and loc.index_sum == -4 and loc.stokes_consistent
    zeros = np.array([refine_zero(deformed, c) for c in loc.cells])
    # oracle: sympy + mpmath root of b (scripts/independent_oracles.py)
    oracle = 0.689202437604511088 + 0.724568837309471929j
    expect = oracle * np.array([1, 1j, -1, -1j]) * np.array([1, 1, 1, 1])
    expect = np.concatenate([expect, np.conj(expect)])
    for z in zeros:
        assert np.abs(expect - z).min() <= 1e-8
    for z in zeros:
        assert np.abs(zeros + z).min() <= 1e-8          # zeta -> -zeta
        assert np.abs(zeros - 1 / z).min() <= 1e-8      # zeta -> 1/zeta
    # cells come sorted by coordinates
    keys = [c.bounds for c in loc.cells]
    assert keys == sorted(keys, key=lambda b: (b[0], b[2], b[1], b[3]))


def test_bulge_cell(bulge):
    loc = locate_zero_cells(bulge, (0, 0.5), 1e-3)
    assert loc.index_sum == -2
    for cell in loc.cells:
        assert abs(refine_zero(bulge, cell)) <= 1e-3


def test_sphere_localisation_is_identically_zero():
    with pytest.raises(IdenticallyZero):
        locate_zero_cells(fixture("sphere").circular_surface(), (0, 1), 1e-2)


def test_jitter_recovers_from_zero_on_split_line():
    loc = locate_zero_cells(lambda z: z, (0, 1), 1e-2)
    assert loc.index_sum == 1 and len(loc.cells) == 1


def test_boundary_zero_without_retries(monkeypatch):
    monkeypatch.setattr(W, "MAX_RETRIES", 0)
    with pytest.raises(BoundaryZero):
        locate_zero_cells(lambda z: z, (0, 1), 1e-2)


def test_localisation_is_deterministic(deformed):
    a = locate_zero_cells(deformed, (0, 4), 1e-2)
    b = locate_zero_cells(deformed, (0, 4), 1e-2)
    assert [c.to_json() for c in a.cells] == [c.to_json() for c in b.cells]


def test_zero_cell_json():
    cell = W.ZeroCell((0.0, 1.0, -1.0, 0.0), -2, np.float64(1e-3))
    assert cell.to_json() == {"center": [0.5, -0.5], "halfwidth": 0.5, "index": -2,
                              "min_abs_b": 1e-3}
