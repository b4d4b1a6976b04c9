import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projumbilic.catalog import fixture
from projumbilic.ellipse import (CANONICAL, CONJUGATE, _frame_pair, canonical_direction,
                                 minor_axis_from_beltrami, positivity, rlinear_ellipse,
                                 rossi_forms, rossi_frame, wedge)
from projumbilic.errors import Degenerate, NotCConvex, UmbilicPoint
from projumbilic.expr import parse
from projumbilic.verify import brute_force_extremes

from conftest import sphere_points

H = 2 ** -0.5
SPHERE = parse("abs2(z1)+abs2(z2)-1")


def test_rlinear_examples():
    f = rlinear_ellipse(1, 0)
    assert (f.axis_ratio, f.minor_dir) == (1.0, 1)
    assert rlinear_ellipse(1, 0.3).axis_ratio == pytest.approx(13 / 7)
    f = rlinear_ellipse(1j, 0.5j)
    assert f.axis_ratio == pytest.approx(3)
    vmax, vmin, gmax = brute_force_extremes(1j, 0.5j)
    assert vmax / vmin == pytest.approx(3, rel=1e-9)
    assert abs((f.minor_dir / gmax).imag) <= 1e-6
    with pytest.raises(Degenerate):
        rlinear_ellipse(1, 1)


@settings(max_examples=60, deadline=None)
@given(st.complex_numbers(min_magnitude=0.1, max_magnitude=10),
       st.floats(0.01, 0.95), st.floats(0, 2 * np.pi))
def test_rlinear_matches_phase_sweep(a, k, arg):
    b = k * abs(a) * np.exp(1j * arg)
    f = rlinear_ellipse(a, b)
    vmax, vmin, gmax = brute_force_extremes(a, b)
    assert f.axis_ratio == pytest.approx(vmax / vmin, rel=1e-6)
    # the minor axis of the level ellipse is where the form is largest
    assert abs((f.minor_dir / gmax).imag) <= 1e-6
    assert f.modulus == pytest.approx(k, rel=1e-9)


def test_canonical_direction():
    assert canonical_direction(-2) == 1
    assert canonical_direction(-3j) == 1j
    assert canonical_direction(-1 + 1j) == pytest.approx((1 - 1j) * H)


def test_rossi_examples():
    f = rossi_frame((H, 1j * H), 0.3)
    assert f.axis_ratio == pytest.approx(13 / 7)
    assert f.minor_dir == pytest.approx(1j)
    assert f.source == "f"
    f = rossi_frame((H, H), 0.3)
    assert f.source != "f" and f.axis_ratio == pytest.approx(13 / 7)
    for p in zip(*sphere_points(10)):
        assert rossi_frame(p, 0).axis_ratio == pytest.approx(1)
    with pytest.raises(ValueError):
        rossi_frame((1, 1), 0.3)


@pytest.mark.parametrize("t", [0.1, 0.3, 0.7, -0.4])
def test_rossi_modulus_is_t(t):
    for p in zip(*sphere_points(200, seed=7)):
        f = rossi_frame(p, t)
        assert f.modulus == pytest.approx(abs(t), abs=1e-9)
        assert abs(f.minor_dir.real) <= 1e-9 if t > 0 else abs(f.minor_dir.imag) <= 1e-9


def test_rossi_functions_agree():
    t = 0.3
    for p in zip(*sphere_points(100, seed=8)):
        fields = [rlinear_ellipse(a, b) for _, a, b in rossi_forms(p, t) if abs(a) > 1e-6]
        assert len(fields) >= 2
        for g in fields[1:]:
            assert g.axis_ratio == pytest.approx(fields[0].axis_ratio, rel=1e-9)
            assert abs((g.minor_dir / fields[0].minor_dir).imag) <= 1e-9


def test_rossi_wedge_is_minus_one():
    for z1, z2 in zip(*sphere_points(20, seed=9)):
        x = (1j * np.conj(z2), -1j * np.conj(z1))
        y = (1j * z1, 1j * z2)
        assert wedge(x, y) == pytest.approx(-1)
        assert positivity(0.3, x, y, CONJUGATE).real > 0


def test_minor_axis_errors():
    with pytest.raises(UmbilicPoint):
        minor_axis_from_beltrami(0, (H, H), SPHERE)
    eps = 0.01
    torus = fixture("torus", [eps])
    p = (np.exp(eps), 1)
    b = torus.beltrami(*p)
    with pytest.raises(NotCConvex):
        minor_axis_from_beltrami(b, p, torus.defining)


@pytest.mark.parametrize("bundle", [CANONICAL, CONJUGATE])
def test_minor_axis_from_beltrami_by_sweep(bundle):
    lp = fixture("lp", [4])
    x = 2 ** -0.25
    p = (x * np.exp(0.4j), x * np.exp(-1.1j))
    b = complex(lp.beltrami(*p))
    f = minor_axis_from_beltrami(b, p, lp.defining, bundle)
    assert f.axis_ratio == pytest.approx(3)
    # brute force: directions gamma*V in H_pS with b*frame(X, Y) real positive
    v, y = _frame_pair(lp.defining, p)
    phis = np.linspace(0, 2 * np.pi, 10_000, endpoint=False)
    vals = np.array([positivity(b, np.exp(1j * a) * v, y, bundle) for a in phis])
    best = phis[np.argmax(vals.real / np.abs(vals))]
    assert abs((f.minor_dir / np.exp(1j * best)).imag) <= 1e-3
    val = positivity(b, f.minor_dir * v, y, bundle)
    assert val.real > 0 and abs(val.imag) <= 1e-12
