import math

import numpy as np
import pytest

from projconn.connections import (
    LEVI_CIVITA,
    PROJECTIVE,
    TensorField,
    check_parallel_unit_xi,
    connection_at,
    covariant_derivative,
    levi_civita_at,
    metric_field,
    nonmetricity_at,
    nonmetricity_components,
    one_forms_at,
    pi_field,
    projective_coeffs_at,
    torsion_at,
    torsion_components,
    xi_field,
)
from projconn import expr as ex
from projconn.geometry import load_spec, metric_at, sample

ZERO_FIELD_3D = """
name = flat_no_field
dim = 3
coords = x, y, z
g[0][0] = 1
g[0][1] = 0
g[0][2] = 0
g[1][1] = 1
g[1][2] = 0
g[2][2] = 1
xi[0] = 0
xi[1] = 0
xi[2] = 0
box[0] = -1, 1
box[1] = -1, 1
box[2] = -1, 1
"""


def test_euclidean_christoffel_vanishes(euclidean3):
    conn = levi_civita_at(euclidean3, (0.3, -0.2, 0.8), order=2)
    np.testing.assert_allclose(conn.Gamma, 0.0)
    np.testing.assert_allclose(conn.dGamma, 0.0)
    np.testing.assert_allclose(conn.d2Gamma, 0.0)


def test_cylinder_christoffel_hand_values(cylinder):
    # round-sphere factor: Gamma^theta_{phi phi} = -sin cos, Gamma^phi_{theta phi} = cot
    for theta in (0.5, 1.0, 2.2):
        conn = levi_civita_at(cylinder, (theta, 1.0, 0.0), order=0)
        assert conn.Gamma[0, 1, 1] == pytest.approx(
            -math.sin(theta) * math.cos(theta), abs=1e-14
        )
        assert conn.Gamma[1, 0, 1] == pytest.approx(1.0 / math.tan(theta), abs=1e-13)
        assert conn.Gamma[1, 1, 0] == pytest.approx(1.0 / math.tan(theta), abs=1e-13)
        np.testing.assert_allclose(conn.Gamma[2], 0.0, atol=1e-15)
        np.testing.assert_allclose(conn.Gamma[:, 2, 2], 0.0, atol=1e-15)


def test_levi_civita_is_symmetric(cylinder):
    conn = levi_civita_at(cylinder, (0.9, 2.0, -0.3), order=0)
    np.testing.assert_allclose(conn.Gamma, conn.Gamma.transpose(0, 2, 1), atol=1e-15)


def test_metric_compatibility_spot_check(cylinder):
    s = sample(cylinder, 10, seed=23)
    for point in s.points:
        mv = metric_at(cylinder, point, order=1)
        conn = levi_civita_at(cylinder, point, order=0)
        nabla_g = (
            mv.dG
            - np.einsum("mij,mk->ijk", conn.Gamma, mv.G)
            - np.einsum("mik,jm->ijk", conn.Gamma, mv.G)
        )
        assert np.max(np.abs(nabla_g)) <= 1e-11


def test_projective_coefficient_hand_values(euclidean3):
    # with a unit field along the first axis, n = 3:
    # the symmetric shift is 3/4 on the argument slot, -1/4 on the direction slot
    conn = projective_coeffs_at(euclidean3, (0.0, 0.0, 0.0), order=0)
    assert conn.Gamma[1, 1, 0] == pytest.approx(0.75)
    assert conn.Gamma[1, 0, 1] == pytest.approx(-0.25)
    assert conn.Gamma[2, 2, 0] == pytest.approx(0.75)
    assert conn.Gamma[0, 0, 0] == pytest.approx(0.5)  # 3/4 - 1/4


def test_one_forms_scale(euclidean3):
    pair = one_forms_at(euclidean3, (0.0, 0.0, 0.0))
    np.testing.assert_allclose(pair.phi, [0.5, 0.0, 0.0])
    np.testing.assert_allclose(pair.psi, [0.25, 0.0, 0.0])


def test_vanishing_form_gives_metric_connection():
    spec = load_spec(ZERO_FIELD_3D)
    lc = levi_civita_at(spec, (0.1, 0.2, 0.3), order=0)
    pr = projective_coeffs_at(spec, (0.1, 0.2, 0.3), order=0)
    np.testing.assert_allclose(pr.Gamma, lc.Gamma)


def test_projective_symmetric_part_identity(cylinder):
    s = sample(cylinder, 20, seed=31)
    n = cylinder.n
    factor = (n - 1.0) / (2.0 * (n + 1.0))
    eye = np.eye(n)
    for point in s.points:
        lc = levi_civita_at(cylinder, point, order=0)
        pr = projective_coeffs_at(cylinder, point, order=0)
        pi = metric_at(cylinder, point, order=0).G @ np.array([0.0, 0.0, 1.0])
        sym_extra = factor * (
            np.einsum("i,kj->kij", pi, eye) + np.einsum("j,ki->kij", pi, eye)
        )
        sym_pr = 0.5 * (pr.Gamma + pr.Gamma.transpose(0, 2, 1))
        sym_lc = 0.5 * (lc.Gamma + lc.Gamma.transpose(0, 2, 1))
        assert np.max(np.abs(sym_pr - (sym_lc + sym_extra))) <= 1e-14


def test_torsion_hand_values(euclidean3):
    origin = (0.0, 0.0, 0.0)
    e1 = np.array([1.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0])
    np.testing.assert_allclose(torsion_at(euclidean3, origin, e1, e2), -e2)
    np.testing.assert_allclose(torsion_at(euclidean3, origin, e2, e2), 0.0)
    # T(xi, Y) = pi(Y) xi - Y
    np.testing.assert_allclose(torsion_at(euclidean3, origin, e1, e2), -e2)


def test_torsion_antisymmetry_random(cylinder):
    s = sample(cylinder, 10, seed=37)
    for idx in range(s.count):
        point = s.points[idx]
        X, Y = s.frames[idx, 0], s.frames[idx, 1]
        t_xy = torsion_at(cylinder, point, X, Y)
        t_yx = torsion_at(cylinder, point, Y, X)
        np.testing.assert_allclose(t_xy, -t_yx, atol=1e-14)
        np.testing.assert_allclose(
            torsion_at(cylinder, point, X, X), 0.0, atol=1e-14
        )


def test_torsion_matches_antisymmetric_coefficients(cylinder):
    s = sample(cylinder, 50, seed=41)
    for point in s.points:
        pr = projective_coeffs_at(cylinder, point, order=0)
        # Gamma[k,i,j] - Gamma[k,j,i] contracts against X^i Y^j as T(X,Y)
        antisym = pr.Gamma - pr.Gamma.transpose(0, 2, 1)
        assert np.max(np.abs(antisym - torsion_components(cylinder, point))) <= 1e-12


def test_nonmetricity_hand_value(euclidean3):
    xi = np.array([1.0, 0.0, 0.0])
    value = nonmetricity_at(euclidean3, (0.0, 0.0, 0.0), xi, xi, xi)
    assert value.closed_form == pytest.approx(-1.0)
    assert value.direct == pytest.approx(-1.0)


def test_nonmetricity_orthogonal_directions_vanish(euclidean3):
    e2 = np.array([0.0, 1.0, 0.0])
    e3 = np.array([0.0, 0.0, 1.0])
    value = nonmetricity_at(euclidean3, (0.0, 0.0, 0.0), e2, e3, e3)
    assert value.closed_form == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("name", ["cylinder_s2xr", "sphere3_bad_xi"])
def test_nonmetricity_two_path_agreement(name, request):
    from projconn.catalog import builtin

    spec = builtin(name).spec
    s = sample(spec, 100, seed=43)
    worst = 0.0
    for point in s.points:
        closed, direct = nonmetricity_components(spec, point)
        worst = max(worst, float(np.max(np.abs(closed - direct))))
    assert worst <= 1e-11


def test_covariant_derivative_of_form_projective(euclidean3):
    value = covariant_derivative(euclidean3, pi_field(euclidean3), PROJECTIVE, (0, 0, 0))
    # (grad~ pi)(X, Y) = -(n-1)/(n+1) pi(X) pi(Y); at (xi, xi) with n=3: -1/2
    assert value.components[0, 0] == pytest.approx(-0.5)
    assert value.variance == ("l", "l")


def test_covariant_derivative_of_field_projective(euclidean3):
    value = covariant_derivative(euclidean3, xi_field(euclidean3), PROJECTIVE, (0, 0, 0))
    # grad~_X xi = (n X - pi(X) xi)/(n+1); along e2 with n=3 that is (3/4) e2
    np.testing.assert_allclose(value.components[1], [0.0, 0.75, 0.0])


def test_covariant_derivative_metric_matches_nonmetricity(cylinder):
    point = (1.2, 0.7, 0.1)
    value = covariant_derivative(cylinder, metric_field(cylinder), PROJECTIVE, point)
    _, direct = nonmetricity_components(cylinder, point)
    np.testing.assert_allclose(value.components, direct, atol=1e-14)


def test_covariant_derivative_parallel_form_on_catalog(euclidean3, cylinder):
    for spec in (euclidean3, cylinder):
        s = sample(spec, 20, seed=51)
        for point in s.points:
            value = covariant_derivative(spec, pi_field(spec), LEVI_CIVITA, point)
            assert np.max(np.abs(value.components)) <= 1e-11


def test_covariant_derivative_rank_gate(euclidean3):
    n = euclidean3.n
    comp = np.empty((n,) * 5, dtype=object)
    comp[...] = ex.Const(1.0)
    with pytest.raises(ValueError, match="unsupported tensor rank"):
        covariant_derivative(
            euclidean3, TensorField(comp, ("u", "l", "l", "l", "l")), LEVI_CIVITA, (0, 0, 0)
        )


def test_geodesic_spray_difference_is_radial(cylinder):
    # the two connections share geodesics: the quadratic-form difference is
    # parallel to the velocity, with factor (n-1)/(n+1) pi(V)
    rng = np.random.default_rng(61)
    s = sample(cylinder, 25, seed=61)
    n = cylinder.n
    for idx in range(s.count):
        point = s.points[idx]
        lc = connection_at(cylinder, LEVI_CIVITA, point, order=0)
        pr = connection_at(cylinder, PROJECTIVE, point, order=0)
        pi = metric_at(cylinder, point, order=0).G @ np.array([0.0, 0.0, 1.0])
        for _ in range(4):
            V = rng.uniform(-1.0, 1.0, size=n)
            diff = np.einsum("kij,i,j->k", pr.Gamma - lc.Gamma, V, V)
            vv = float(V @ V)
            radial = (float(diff @ V) / vv) * V
            assert np.max(np.abs(diff - radial)) <= 1e-10
            expected_factor = (n - 1.0) / (n + 1.0) * float(pi @ V)
            assert float(diff @ V) / vv == pytest.approx(expected_factor, abs=1e-12)


def test_gate_passes_on_parallel_charts(euclidean3, cylinder):
    for spec in (euclidean3, cylinder):
        report = check_parallel_unit_xi(spec, sample(spec, 30, seed=71))
        assert report.passed
        assert report.gate_status == "passed"
        assert report.residual_max <= 1e-12


def test_gate_fails_on_sphere_control(sphere):
    report = check_parallel_unit_xi(sphere, sample(sphere, 30, seed=71))
    assert report.gate_status == "failed"
    assert report.residual_max > 0.1
    assert report.skipped  # declared negative control
    assert not report.passed


def test_gate_flags_inconsistent_declaration(sphere):
    from dataclasses import replace

    lying = replace(sphere, parallel_xi_expected=True, _tables=None)
    report = check_parallel_unit_xi(lying, sample(lying, 10, seed=71))
    assert not report.passed
    assert not report.skipped
