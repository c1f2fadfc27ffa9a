import csv
import io

import numpy as np
import pytest
from hypothesis import given

from ymforms.coefficients import constant, expm, monomial, poly, variable, zero
from ymforms.forms import FormField
from ymforms.hodge import EUCLIDEAN, MINKOWSKI
from ymforms.yang_mills import (
    Connection, GaugeMap, covariant_costar, covariant_d, current, current_closed_form, curvature, gauge_transform,
    lorenz_residual, residual_report_csv, sample_points, sample_points_shell, ym_residuals,
)

from strategies import connections

Z1 = np.array([0.3 - 0.5j, -0.8 + 0.1j])
Z2 = np.array([1.1 + 0.4j, 0.2 - 0.9j])
METRICS = (EUCLIDEAN, MINKOWSKI)


def rel_gap(a, b):
    return np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(b)))


@given(connections())
def test_curvature_routes_agree(A):
    gap = rel_gap(curvature(A, "components")(Z1, Z2).data, curvature(A)(Z1, Z2).data)
    assert gap < 1e-12


@given(connections())
def test_current_routes_agree(A):
    for m in METRICS:
        gap = rel_gap(current(A, m, "closed-form").form(Z1, Z2).data, current(A, m).form(Z1, Z2).data)
        assert gap < 1e-12


@given(connections())
def test_bianchi_identity(A):
    F = curvature(A)
    assert rel_gap(covariant_d(A, F.form)(Z1, Z2).data, 0 * F.form(Z1, Z2).data[..., :4, :, :]) < 1e-10


@given(connections())
def test_lorenz_residual_is_costar_of_A(A):
    for m in METRICS:
        direct = covariant_costar(A, A.form, m)(Z1, Z2).data[..., 0, :, :]
        assert rel_gap(lorenz_residual(A, m)(Z1, Z2), direct) < 1e-12


def test_abelian_codifferential_matches_divergence():
    # for alpha = f dz1 the real components are (f, i f, 0, 0); d^* alpha = -g^ii d_i alpha_i
    f = monomial((2, 1, 1, 0), [[1]]) + monomial((0, 1, 0, 2), [[0.5j]])
    flat = Connection(zero(1), zero(1), zero(1), zero(1))
    alpha = FormField.one_form(f, None, None, None, dim=1)
    want = {"euclidean": -2 * f.wirtinger(2)(Z1, Z2), "minkowski": -2 * f.wirtinger(0)(Z1, Z2)}
    for m in METRICS:
        got = covariant_costar(flat, alpha, m)(Z1, Z2).data[..., 0, :, :]
        np.testing.assert_allclose(got, want[m.name], atol=1e-12)


def _unitary_gauge():
    # g = exp(i Im(z1) H) with H Hermitian; the exponent commutes with its derivatives
    H = np.array([[1.0, 0.5 - 0.2j], [0.5 + 0.2j, -0.3]])
    im_z1 = (variable(0, 1) - variable(2, 1)) * (-0.5j)
    return GaugeMap(expm(im_z1.times_matrix(1j * H), commuting=True), unitary=True)


def test_gauge_covariance_of_curvature_and_current():
    A = Connection(
        poly([((1, 0, 0, 0), [[0, 1], [2, 0]]), ((0, 0, 0, 1), [[1j, 0], [0, 1]])]),
        poly([((0, 1, 0, 0), [[1, 0], [0, -1]])]),
        poly([((0, 0, 1, 0), [[0, 1j], [0, 0]])]),
        constant([[0.5, 0], [1, 0]]),
    )
    gm = _unitary_gauge()
    assert np.max(gm.unitarity_defect(Z1, Z2)) < 1e-12
    Ag = gauge_transform(A, gm)
    g, gi = gm.g(Z1, Z2), gm.inv(Z1, Z2)
    F, Fg = curvature(A)(Z1, Z2).data, curvature(Ag)(Z1, Z2).data
    np.testing.assert_allclose(Fg, gi[:, None] @ F @ g[:, None], atol=1e-9)
    for m in METRICS:
        J, Jg = current(A, m).form(Z1, Z2).data, current(Ag, m).form(Z1, Z2).data
        np.testing.assert_allclose(Jg, gi[:, None] @ J @ g[:, None], atol=1e-8)


def test_pure_gauge_is_flat():
    gm = _unitary_gauge()
    flat = Connection(*(zero(2) for _ in range(4)))
    F = curvature(gauge_transform(flat, gm))(Z1, Z2).data
    np.testing.assert_allclose(F, 0, atol=1e-10)


def test_ym_residuals_of_constant_abelian():
    A = Connection(constant([[1j]]), constant([[2.0]]), constant([[1j]]), constant([[-2.0]]))
    b, c = ym_residuals(A, None, EUCLIDEAN, Z1, Z2)
    assert np.max(b) == 0 and np.max(c) == 0


def test_current_errors():
    A = Connection(*(zero(2) for _ in range(4)))
    with pytest.raises(ValueError):
        current(A, EUCLIDEAN, "guess")
    assert current_closed_form(A, MINKOWSKI).form(Z1, Z2).data.shape == (2, 4, 2, 2)


def test_sampling_is_seeded_and_bounded():
    a = sample_points(50, seed=7, radius=1.5)
    b = sample_points(50, seed=7, radius=1.5)
    np.testing.assert_array_equal(a[0], b[0])
    assert np.all(np.abs(a[0]) <= 1.5) and np.all(np.abs(a[1]) <= 1.5)
    z1, z2 = sample_points_shell(200, seed=1, lo=0.1, hi=10)
    r = np.sqrt(abs(z1) ** 2 + abs(z2) ** 2)
    assert r.min() >= 0.1 - 1e-12 and r.max() <= 10 + 1e-12


def test_residual_csv():
    text = residual_report_csv(Z1, Z2, {"bianchi": np.array([0.0, 1e-3])}, "ASD")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 2 and float(rows[1]["bianchi"]) == pytest.approx(1e-3)
