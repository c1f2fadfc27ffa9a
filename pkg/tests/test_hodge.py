import itertools

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from ymforms.algebra import TraceKind
from ymforms.coefficients import constant, radial_term
from ymforms.forms import FormField, FormValue, basis
from ymforms.hodge import (
    EUCLIDEAN, MINKOWSKI, DualityClass, QuadratureSpec, build_star_table, classify_duality, form_pairing,
    get_metric, global_inner, integrate, pointwise_inner, self_dual_eigenvalue, star,
)
from ymforms.radial import R, SymRadial

from strategies import small

V = np.array([[1, 1j, 0, 0], [0, 0, 1, 1j], [1, -1j, 0, 0], [0, 0, 1, -1j]])
DIAG = {"euclidean": (1, 1, 1, 1), "minkowski": (1, -1, -1, -1)}


def perm_sign(seq):
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def real_star_oracle(p, metric):
    """Star on complex coefficient vectors, built from the real-coordinate formula.

    On real basis forms *dx^I = (prod_{i in I} g^ii) sign(I J) dx^J with J the
    complement, orientation dx0^dx1^dx2^dx3.  Complex forms are mapped to real
    ones through minors of V.
    """
    g = DIAG[metric]
    rp = list(itertools.combinations(range(4), p))
    rq = list(itertools.combinations(range(4), 4 - p))

    def to_real(k, rb):
        return np.array([[np.linalg.det(V[np.ix_(b, I)]) if k else 1.0 for I in rb] for b in basis(k)])

    S = np.zeros((len(rq), len(rp)))
    for a, I in enumerate(rp):
        J = tuple(i for i in range(4) if i not in I)
        S[rq.index(J), a] = np.prod([1.0 / g[i] for i in I]) * perm_sign(I + J)
    Cp, Cq = to_real(p, rp), to_real(4 - p, rq)
    return np.linalg.solve(Cq.T, S @ Cp.T)


@pytest.mark.parametrize("metric", ["euclidean", "minkowski"])
@pytest.mark.parametrize("p", range(5))
def test_star_matches_real_coordinate_oracle(metric, p):
    np.testing.assert_allclose(build_star_table(metric).tables[p], real_star_oracle(p, metric), atol=1e-12)


@pytest.mark.parametrize("metric,sign", [("euclidean", 0), ("minkowski", 1)])
@pytest.mark.parametrize("p", range(5))
def test_star_star(metric, sign, p):
    T = build_star_table(metric).tables
    np.testing.assert_allclose(T[4 - p] @ T[p], (-1) ** (p * (4 - p) + sign) * np.eye(len(basis(p))), atol=1e-12)


def test_star_of_volume_minkowski():
    assert build_star_table(MINKOWSKI).image((0, 1, 2, 3)) == {(): pytest.approx(-4)}


@pytest.mark.parametrize("metric", ["euclidean", "minkowski"])
def test_two_form_eigenvalues(metric):
    lam = self_dual_eigenvalue(metric)
    ev = np.linalg.eigvals(build_star_table(metric).tables[2])
    assert sorted(np.round(ev / lam, 12).real.tolist()) == [-1, -1, -1, 1, 1, 1]


@given(st.lists(small, min_size=24, max_size=24))
def test_star_commutes_with_adjoint(xs):
    a = np.array(xs[:12]) + 1j * np.array(xs[12:])
    v = FormValue(2, a.reshape(6, 1, 2)[:, :, :].repeat(2, axis=1).reshape(6, 2, 2))
    for m in (EUCLIDEAN, MINKOWSKI):
        np.testing.assert_allclose(star(v, m).adjoint().data, star(v.adjoint(), m).data, atol=1e-12)


@given(st.lists(small, min_size=48, max_size=48))
def test_euclidean_pointwise_inner_is_positive(xs):
    a = (np.array(xs[:24]) + 1j * np.array(xs[24:])).reshape(6, 2, 2)
    v = FormValue(2, a)
    val = pointwise_inner(v, v, EUCLIDEAN)
    assert abs(val.imag) < 1e-10 and val.real >= -1e-12


def test_generator_pairing_euclidean():
    assert form_pairing((0,), (0,)) == pytest.approx(2)
    assert form_pairing((0,), (2,)) == pytest.approx(0)
    with pytest.raises(ValueError):
        form_pairing((0,), (0, 1))


def test_field_and_value_star_agree():
    f = FormField(2, 2, {(0, 1): constant(np.eye(2)), (1, 2): constant([[0, 1], [2j, 0]])})
    z = np.array([0.1j])
    np.testing.assert_allclose(star(f, MINKOWSKI)(z, z).data, star(f(z, z), MINKOWSKI).data)


def test_classify_duality():
    T = build_star_table(EUCLIDEAN).tables[2]
    w, vecs = np.linalg.eig(T)
    sd = vecs[:, np.argmax(w.real)]
    v = FormValue(2, np.einsum("i,jk->ijk", sd, np.eye(2)))
    assert classify_duality(v) is DualityClass.SD
    assert classify_duality(FormValue.zeros(2, 2)) is DualityClass.ZERO
    mixed = FormValue.from_dict(2, {(0, 1): np.eye(2), (0, 2): np.eye(2)})
    assert classify_duality(mixed, MINKOWSKI) is DualityClass.MIXED
    with pytest.raises(ValueError):
        classify_duality(FormValue.zeros(1, 2))


def test_metric_lookup():
    assert get_metric("M") is MINKOWSKI and get_metric("euclid") is EUCLIDEAN
    with pytest.raises(ValueError):
        get_metric("lorentzian-ish")


@pytest.mark.parametrize("rule,nodes", [("gauss", 32), ("midpoint", 24), ("radial", 64)])
def test_gaussian_integral(rule, nodes):
    q = QuadratureSpec(radius=6.0, nodes_per_axis=nodes, rule=rule)
    val = integrate(lambda a, b: np.exp(-(abs(a) ** 2 + abs(b) ** 2)), q)
    assert val == pytest.approx(np.pi ** 2, rel=1e-8)


def test_global_inner_of_scalars():
    q = QuadratureSpec(radius=2.0, nodes_per_axis=6)
    one = FormField.scalar(constant([[1.0]]))
    assert global_inner(one, one, EUCLIDEAN, q) == pytest.approx(4.0 ** 4)
    # exp(-|z|^2), squared and integrated over R^4, is pi^2 / 4
    g = FormField.scalar(radial_term(SymRadial(sp.exp(-R)), [[1]]))
    q = QuadratureSpec(radius=4.0, nodes_per_axis=32)
    assert global_inner(g, g, EUCLIDEAN, q) == pytest.approx(np.pi ** 2 / 4, rel=1e-8)


def test_state_trace_in_inner():
    v = FormValue.from_dict(1, {(0,): np.eye(3)})
    full = pointwise_inner(v, v, EUCLIDEAN, TraceKind.MATRIX)
    assert pointwise_inner(v, v, EUCLIDEAN, "state") == pytest.approx(full / 3)


def test_quadrature_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(radius=-1)
    with pytest.raises(ValueError):
        QuadratureSpec(rule="simpson")
    with pytest.raises(ValueError):
        QuadratureSpec.from_json({"radius": 1, "bogus": 2})
    with pytest.raises(FloatingPointError):
        integrate(lambda a, b: np.full(a.shape, np.nan), QuadratureSpec(radius=1, nodes_per_axis=2))
