import csv
import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ymforms.checks import bpst_knots, perturbed_bpst_profile
from ymforms.coefficients import constant, poly, zero
from ymforms.forms import FormValue
from ymforms.hodge import EUCLIDEAN, MINKOWSKI, QuadratureSpec
from ymforms.instantons import build_bpst
from ymforms.variational import (
    FieldPair, ProfileParam, bump_radial, directional_derivative, eb_inner, extract_eb, fields_to_curvature,
    functional, hermitian_field_check, optimize_profile, profile_connection, random_bump_direction,
)
from ymforms.yang_mills import Connection, current, curvature, sample_points_shell

from strategies import small


def abelian_constant_curvature(c):
    # A = c (zb1 dz1 - z1 dzb1) is skew with F = -2c dz1^dzb1
    return Connection(poly([((0, 0, 1, 0), [[c]])]), zero(1), poly([((1, 0, 0, 0), [[-c]])]), zero(1))


@given(st.lists(small, min_size=48, max_size=48))
def test_eb_roundtrip(xs):
    a = (np.array(xs[:24]) + 1j * np.array(xs[24:])).reshape(6, 2, 2)
    v = FormValue(2, a)
    np.testing.assert_allclose(fields_to_curvature(extract_eb(v)).data, a, atol=1e-12)


def test_bpst_eb_inner_closed_form():
    z1, z2 = sample_points_shell(100, seed=6)
    b = build_bpst(1.0)
    fp = extract_eb(curvature(b.connection), z1, z2)
    want = -24 * b.p_of(z1, z2) ** 2
    np.testing.assert_allclose(eb_inner(fp), want, rtol=1e-8, atol=0)
    assert all(hermitian_field_check(FieldPair(1j * fp.E, 1j * fp.B)))


def test_extract_eb_rejects_other_degrees():
    with pytest.raises(ValueError):
        extract_eb(FormValue.zeros(1, 2))


@pytest.mark.parametrize("c", [0.5, 1.3])
def test_functional_of_constant_curvature(c):
    # |dz1^dzb1|^2 = det [[2, 0], [0, 2]] = 4, so 1/2 (F, F) = 8 c^2 vol(box)
    q = QuadratureSpec(radius=1.5, nodes_per_axis=4)
    H = functional(abelian_constant_curvature(c), None, EUCLIDEAN, q)
    assert H.value == pytest.approx(8 * c ** 2 * 3.0 ** 4)
    assert H.split_gap < 1e-10 * abs(H.value)


def test_functional_split_with_source():
    A = Connection(poly([((0, 1, 1, 0), [[0, 1], [1j, 0]])]), constant([[0.3, 0], [0, 1]]),
                   poly([((1, 0, 0, 0), [[1, 0], [0, 0]])]), zero(2))
    J = current(A, MINKOWSKI)
    q = QuadratureSpec(radius=1.0, nodes_per_axis=6)
    H = functional(A, J, MINKOWSKI, q)
    assert H.split_gap <= 1e-10 * max(1.0, abs(H.value))
    assert np.isnan(functional(A, J, MINKOWSKI, q, split=False).split_gap)


def test_bump_is_compactly_supported():
    b = bump_radial(2.0)
    r = np.array([0.0, 1.0, 3.99, 4.0, 9.0])
    v = b(r)
    assert v[0] == pytest.approx(np.exp(-1)) and v[2] < 1e-100 and v[3] == 0 and v[4] == 0
    B = random_bump_direction(2, seed=1, radius=2.0)
    z = np.array([3.0 + 0j])
    assert np.max(np.abs(B(z, z).data)) == 0
    w = np.array([0.2 + 0.1j])
    np.testing.assert_allclose(B(w, w).adjoint().data, -B(w, w).data, atol=1e-14)


def test_directional_derivative_of_abelian_functional():
    # D^*F = 0 for constant abelian curvature, so dH/dt vanishes up to quadrature error,
    # and that error shrinks as the grid is refined
    A = abelian_constant_curvature(0.7)
    B = random_bump_direction(1, seed=3, radius=2.0, degree=1)
    errs = []
    for n in (8, 16):
        d = directional_derivative(A, B, None, EUCLIDEAN, QuadratureSpec(radius=2.0, nodes_per_axis=n, rule="midpoint"))
        assert abs(d.finite_difference - d.inner) == pytest.approx(abs(d.finite_difference))
        errs.append(abs(d.finite_difference) / d.scale)
    assert errs[1] < 1e-4 and errs[1] < errs[0] / 10


def test_profile_param_validation():
    with pytest.raises(ValueError):
        ProfileParam(np.array([0, 1, 2, 3]), np.zeros(4))
    with pytest.raises(ValueError):
        ProfileParam(np.array([0.5, 1, 2, 3, 4]), np.zeros(5))
    p = ProfileParam(bpst_knots(1.0), np.linspace(-1, 2, 8))
    assert p.values[0] == 0 and p.values.max() <= 1


def test_profile_connection_reproduces_bpst():
    z1, z2 = sample_points_shell(20, seed=2, lo=0.5, hi=3)
    b = build_bpst(1.0)
    A = profile_connection(b.f)
    np.testing.assert_allclose(A(z1, z2).data, b.connection(z1, z2).data, atol=1e-14)


def test_zero_profile_stays_zero():
    res = optimize_profile(ProfileParam(bpst_knots(1.0), np.zeros(8)))
    assert res.accepted_steps == 0 and np.all(res.profile.values == 0)


def test_exact_profile_takes_no_significant_steps():
    # the discrete minimiser sits within 1% of the exact knots, which moves H by < 1e-4 relative
    res = optimize_profile(perturbed_bpst_profile(1.0, 0.0), rtol=1e-4, min_step=1e-3)
    assert res.accepted_steps == 0
    assert res.final_residual < 1e-3


def test_optimizer_history_csv():
    res = optimize_profile(perturbed_bpst_profile(1.0, 0.1), max_sweeps=1)
    rows = list(csv.DictReader(io.StringIO(res.history_csv())))
    assert len(rows) == res.accepted_steps + 1
    H = [float(r["H"]) for r in rows]
    assert all(b < a for a, b in zip(H, H[1:]))
    with pytest.raises(ValueError):
        optimize_profile(perturbed_bpst_profile(1.0, 0.1), m=MINKOWSKI)
