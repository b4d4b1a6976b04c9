import numpy as np
from hypothesis import strategies as st

from projumbilic import expr as E

VARS = st.sampled_from([E.Z1, E.Z2, E.Z1B, E.Z2B])
CONSTS = st.builds(lambda a, b: E.Const(complex(a, b)),
                   st.floats(-2, 2, allow_nan=False).map(lambda x: round(x, 3)),
                   st.floats(-2, 2, allow_nan=False).map(lambda x: round(x, 3)))


def _extend(children):
    pos = children.map(lambda e: 1 + e * E.conjugate(e))
    return st.one_of(
        st.builds(E.add, children, children),
        st.builds(E.sub, children, children),
        st.builds(E.mul, children, children),
        st.builds(E.neg, children),
        st.builds(E.powi, children, st.integers(0, 3)),
        st.builds(E.div, children, pos),
        st.builds(lambda e: E.exp(0.3 * e), children),
        st.builds(E.powr, pos, st.sampled_from([0.5, 1.5, -0.75])),
        st.builds(E.log, pos),
    )


exprs = st.recursive(st.one_of(VARS, CONSTS), _extend, max_leaves=8)
points = st.tuples(
    st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False))


def sphere_points(n, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(4, n))
    v /= np.linalg.norm(v, axis=0)
    return v[0] + 1j * v[1], v[2] + 1j * v[3]
