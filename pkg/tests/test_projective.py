import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projumbilic.catalog import fixture
from projumbilic.errors import AtInfinity, SingularMatrix
from projumbilic.expr import evaluate, parse
from projumbilic.projective import (CAYLEY, INVERSION, ProjectiveMap, apply,
                                    check_transformation_law, holomorphic_jacobian_det, inverse,
                                    pullback_surface, random_near_identity,
                                    transformation_law_terms)

SPHERE = parse("abs2(z1)+abs2(z2)-1")
ID = ProjectiveMap.identity()


def test_apply_examples():
    assert apply(ID, (0.3, 0.4j)) == (0.3, 0.4j)
    assert apply(CAYLEY, (0, 0)) == pytest.approx((0, 1))
    w = apply(CAYLEY, (0.5, 0.25j))
    assert abs(abs(w[0]) ** 2 + abs(w[1]) ** 2 - 1) <= 1e-12


def test_at_infinity():
    with pytest.raises(AtInfinity):
        apply(INVERSION, (0, 1))


def test_singular_matrix():
    with pytest.raises(SingularMatrix):
        ProjectiveMap(np.ones((3, 3)))


def test_inverse_examples():
    np.testing.assert_allclose(inverse(ID).matrix, np.eye(3))
    m = inverse(ProjectiveMap(np.diag([1.0, 2.0, 3.0]))).matrix
    np.testing.assert_allclose(m / m[0, 0], np.diag([1, 1 / 2, 1 / 3]))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_inverse_round_trip(seed):
    rng = np.random.default_rng(seed)
    m = random_near_identity(rng, noise=0.3)
    p = tuple(rng.normal(size=2) * 0.5 + 1j * rng.normal(size=2) * 0.5)
    q = apply(inverse(m), apply(m, p))
    assert max(abs(q[0] - p[0]), abs(q[1] - p[1])) <= 1e-10


def test_jacobian_examples():
    assert holomorphic_jacobian_det(ID, (0.3, 2j)) == pytest.approx(1)
    scale = ProjectiveMap.affine(2 * np.eye(2))
    assert holomorphic_jacobian_det(scale, (0.3, 2j)) == pytest.approx(4)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_jacobian_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    m = random_near_identity(rng, noise=0.3)
    p = rng.normal(size=2) * 0.5 + 1j * rng.normal(size=2) * 0.5
    h = 1e-6
    cols = []
    for k in range(2):
        dp = np.zeros(2, dtype=complex)
        dp[k] = h
        cols.append((np.array(apply(m, p + dp)) - np.array(apply(m, p - dp))) / (2 * h))
    fd = cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1]
    j = holomorphic_jacobian_det(m, p)
    assert abs(fd - j) <= 1e-6 * max(1, abs(j))


def test_pullback_examples():
    rng = np.random.default_rng(0)
    z1, z2 = rng.normal(size=(2, 20)) + 1j * rng.normal(size=(2, 20))
    pb = pullback_surface(ID, SPHERE)
    for p in zip(z1, z2):
        assert abs(evaluate(pb, p) - evaluate(SPHERE, p)) <= 1e-12
    heis = fixture("heisenberg")
    pb = pullback_surface(CAYLEY, SPHERE)
    h1, h2 = heis.sample(100, seed=1)
    assert max(abs(evaluate(pb, p)) for p in zip(h1, h2)) <= 1e-10
    assert evaluate(pullback_surface(INVERSION, SPHERE), (2, 0.5)) == pytest.approx(0.25 + 1 / 16 - 1)


def test_map_json_round_trip():
    m = random_near_identity(np.random.default_rng(3))
    np.testing.assert_array_equal(ProjectiveMap.from_json(m.to_json()).matrix, m.matrix)


def test_transformation_law_examples():
    bulge = fixture("bulge")
    z1, z2 = bulge.sample(1, seed=4)
    p = (z1[0], z2[0])
    assert check_transformation_law(ID, bulge.defining, p) <= 1e-12
    theta = 0.7
    rot = ProjectiveMap.affine(np.diag([np.exp(1j * theta), 1]))
    lhs, rhs = transformation_law_terms(rot, bulge.defining, p)
    assert abs(lhs - rhs) <= 1e-8
    scale = ProjectiveMap.affine(2 * np.eye(2))
    x = 2 ** -0.5
    assert transformation_law_terms(scale, SPHERE, (x, x)) == (0, 0)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["sphere", "bulge", "lp", "deformed_sphere", "torus"]),
       st.integers(0, 2 ** 32 - 1))
def test_transformation_law_random_maps(name, seed):
    fx = fixture(name)
    rng = np.random.default_rng(seed)
    z1, z2 = fx.sample(1, seed)
    p = (z1[0], z2[0])
    lhs, rhs = transformation_law_terms(random_near_identity(rng), fx.defining, p)
    assert abs(lhs - rhs) <= 1e-7 * max(1, abs(lhs))
    assert abs(abs(lhs) - abs(rhs)) <= 1e-7


def test_cayley_law_on_heisenberg():
    heis = fixture("heisenberg")
    z1, z2 = heis.sample(10, seed=6)
    for p in zip(z1, z2):
        assert check_transformation_law(CAYLEY, heis.defining, p) <= 1e-7
