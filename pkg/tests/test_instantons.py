import numpy as np
import pytest
import sympy as sp

from ymforms.algebra import is_normal
from ymforms.coefficients import constant, monomial, variable
from ymforms.hodge import EUCLIDEAN, MINKOWSKI, DualityClass, QuadratureSpec, classify_duality, global_inner
from ymforms.instantons import (
    EtaForm, build_bpst, build_constant, build_dirac_monopole, build_eta_potential, eta_duality_residual,
    eta_potential_form, from_eta, gauge_normalize, maurer_cartan_residual, nilpotent_minkowski_sd,
    profile_ode_residual, random_normal,
)
from ymforms.radial import R, SymRadial
from ymforms.yang_mills import curvature, sample_points, sample_points_shell, ym_residuals

DIRAC_B1 = np.array([[-1, 1], [-1j, -1j]])
DIRAC_B2 = np.array([[1, -1j], [-1, -1j]])


@pytest.fixture(scope="module")
def shell():
    return sample_points_shell(60, seed=5)


@pytest.mark.parametrize("mu", [0.5, 1.0, 4.0])
def test_bpst_is_an_asd_vacuum_solution(mu, shell):
    z1, z2 = shell
    b = build_bpst(mu)
    F = curvature(b.connection)
    assert b.sign == -1
    assert classify_duality(F(z1, z2), EUCLIDEAN) is DualityClass.ASD
    bianchi, costar = ym_residuals(b.connection, None, EUCLIDEAN, z1, z2, F)
    assert bianchi.max() < 1e-10 and costar.max() < 1e-8
    gap = (F.form - b.predicted_curvature())(z1, z2).norm()
    assert np.max(gap / b.p_of(z1, z2)) < 1e-8


def test_bpst_gamma_is_special_unitary(shell):
    g = build_bpst(1.0).gamma(*shell)
    np.testing.assert_allclose(np.conj(np.swapaxes(g, -1, -2)) @ g, np.broadcast_to(np.eye(2), g.shape), atol=1e-12)
    np.testing.assert_allclose(np.linalg.det(g), 1, atol=1e-12)


@pytest.mark.parametrize("mu", [0.5, 1.0])
def test_bpst_action_is_scale_free(mu):
    # (F, F) = 8 pi^2 for every scale; the truncation tail is O(mu^2 / R^4)
    F = curvature(build_bpst(mu).connection).form
    q = QuadratureSpec(radius=60.0, nodes_per_axis=200, rule="radial", directions=4)
    assert global_inner(F, F, EUCLIDEAN, q).real == pytest.approx(8 * np.pi ** 2, rel=1e-6)


def test_profile_ode():
    r = np.geomspace(0.01, 100, 50)
    for c in (0.3, 1.0, 7.0):
        assert np.max(profile_ode_residual(SymRadial(R / (R + c)), r)) < 1e-12
    assert np.max(profile_ode_residual(SymRadial(R ** 2 / (R ** 2 + 1)), r)) > 1e-3
    # the callable-pair form agrees with the symbolic one
    f = sp.lambdify(R, R / (R + 2))
    df = sp.lambdify(R, sp.diff(R / (R + 2), R))
    assert np.max(profile_ode_residual((f, df), r)) < 1e-12


def test_dirac_monopole_classifies_asd():
    z1, z2 = sample_points(50, seed=2)
    A, rep = build_dirac_monopole(DIRAC_B1, DIRAC_B2, z1, z2)
    assert rep.B1_normal and rep.B2_normal and rep.condition_b
    assert rep.classification == "ASD" and rep.curvature_norm > 1
    b, c = ym_residuals(A, None, EUCLIDEAN, z1, z2)
    assert b.max() < 1e-10 and c.max() < 1e-10


def test_dirac_rejects_bad_shapes():
    with pytest.raises(ValueError):
        build_dirac_monopole(np.eye(2), np.eye(3))


def test_dirac_family(rng):
    z1, z2 = sample_points(30, seed=4)
    for _ in range(3):
        B1 = random_normal(2, rng)
        _, rep = build_dirac_monopole(B1, -B1.conj().T, z1, z2)
        assert rep.classification == "ASD" and rep.B1B2_commutator < 1e-12


def test_random_normal_is_normal(rng):
    for n in (2, 3, 4):
        assert is_normal(random_normal(n, rng))


@pytest.mark.parametrize("h", [None, monomial((1, 1, 0, 0), [[1]])])
def test_eta_potential_satisfies_minkowski_sd_condition(h):
    z1, z2 = sample_points(50, seed=1)
    eta, A = build_eta_potential(h)
    r = eta_duality_residual(eta, MINKOWSKI, "SD", z1, z2, tol=1e-12)
    assert r.residual < 1e-12
    # the connection is not a vacuum solution and its curvature is mixed
    assert r.classification is DualityClass.MIXED
    assert np.max(curvature(A)(z1, z2).norm()) > 1


def test_gauge_normalize_removes_h():
    z1, z2 = sample_points(40, seed=8)
    ref = curvature(from_eta(eta_potential_form()))(z1, z2).data
    res = gauge_normalize(eta_potential_form(monomial((1, 1, 0, 0), [[1]])), z1=z1, z2=z2)
    assert res.unitarity_defect < 1e-10
    np.testing.assert_allclose(curvature(res.connection)(z1, z2).data, ref, atol=1e-9)
    with pytest.raises(ValueError):
        gauge_normalize(eta_potential_form(), mode="sideways")


def test_euclidean_sd_condition_for_commuting_eta():
    # [A1, A2] = 0 for diagonal holomorphic potentials: F is self-dual
    eta = EtaForm(variable(1, 1).times_matrix(np.diag([1, 2j])), variable(0, 1).times_matrix(np.diag([0.5, -1])))
    z1, z2 = sample_points(30, seed=9)
    r = eta_duality_residual(eta, EUCLIDEAN, "SD", z1, z2)
    assert r.residual < 1e-12 and r.crosscheck_gap < 1e-12
    assert r.classification is DualityClass.SD


def test_eta_flags_are_enforced():
    eta = EtaForm(variable(2, 1).times_matrix(np.eye(2)), constant(np.eye(2)))
    with pytest.raises(ValueError):
        eta_duality_residual(eta, EUCLIDEAN, "SD")
    with pytest.raises(ValueError):
        eta_duality_residual(eta_potential_form(), EUCLIDEAN, "both")
    with pytest.raises(ValueError):
        from_eta(eta, "neither")


def test_constant_connection_report():
    A, rep = build_constant(np.diag([1, 1j]), np.diag([2, -1]))
    assert rep.conditions["euclidean_SD"] and rep.conditions["euclidean_ASD"]
    assert rep.classification["euclidean"] == "zero"
    with pytest.raises(ValueError):
        build_constant(np.eye(2), np.eye(3))


def test_nilpotent_connection_is_minkowski_sd():
    A = nilpotent_minkowski_sd()
    F = curvature(A)(0.0, 0.0)
    assert classify_duality(F, MINKOWSKI) is DualityClass.SD


def test_maurer_cartan_residual_of_pure_gauge():
    # a = g^{-1} dg for g = exp(z1) I is flat and (1,0)
    a = EtaForm(constant(np.eye(2)), constant(0 * np.eye(2)))
    res = maurer_cartan_residual(a, *sample_points(10, seed=0))
    assert np.max(res["total"]) < 1e-14
