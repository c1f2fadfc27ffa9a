"""Hypothesis strategies shared by the test modules."""
import numpy as np
from hypothesis import strategies as st

from ymforms.coefficients import poly
from ymforms.yang_mills import Connection

small = st.floats(-2, 2, allow_nan=False, allow_infinity=False)


@st.composite
def cmatrices(draw, n=2):
    re = draw(st.lists(small, min_size=n * n, max_size=n * n))
    im = draw(st.lists(small, min_size=n * n, max_size=n * n))
    return (np.array(re) + 1j * np.array(im)).reshape(n, n)


powers = st.tuples(*(st.integers(0, 2) for _ in range(4)))


@st.composite
def polynomials(draw, n=2, max_terms=3):
    k = draw(st.integers(1, max_terms))
    return poly([(draw(powers), draw(cmatrices(n))) for _ in range(k)], n)


@st.composite
def connections(draw, n=2):
    return Connection(*(draw(polynomials(n)) for _ in range(4)))
