import math

import numpy as np
import pytest

from entroflow.errors import (
    DimensionMismatch,
    FaceClassificationError,
    ParameterOutOfRange,
    PositivityError,
)
from entroflow.grid import (
    Domain,
    Face,
    FaceKind,
    Field,
    VectorField,
    boundary_flux,
    boundary_integral,
    check_bochner_integral_identity,
    check_cd_condition,
    check_gamma2_forms,
    check_hessian_gamma_identity,
    check_integration_by_parts,
    divergence,
    face_values,
    gradient,
    integrate,
    laplacian,
    normal_derivative,
    trace_integrate,
)
from entroflow.inequalities import random_smooth_field, sample_rng


def test_half_space_faces():
    domain = Domain.half_space(2, 3.0, 12)
    assert domain.is_half_space()
    assert domain.face_kind(Face(1, False)) == FaceKind.TRUE_BOUNDARY
    assert domain.face_kind(Face(1, True)) == FaceKind.TRUNCATION
    assert domain.face_kind(Face(0, False)) == FaceKind.TRUNCATION
    assert domain.describe() == {"cells": [12, 12], "box": [[-3.0, 3.0], [0.0, 3.0]]}
    assert not Domain.box([0.0, 0.0], [1.0, 1.0], 8).is_half_space()


def test_domain_rejects_bad_boxes():
    with pytest.raises(DimensionMismatch):
        Domain.box([0.0] * 4, [1.0] * 4, 4)
    with pytest.raises(ParameterOutOfRange):
        Domain.box([0.0], [0.0], 4)
    with pytest.raises(ParameterOutOfRange):
        Domain.box([0.0], [1.0], 0)


def test_field_arithmetic_and_positivity():
    domain = Domain.box([0.0], [1.0], 10)
    u = Field.constant(domain, 2.0)
    w = (u * 3.0 - 1.0) / 5.0
    np.testing.assert_allclose(w.values, 1.0)
    np.testing.assert_allclose((1.0 - u).values, -1.0)
    np.testing.assert_allclose((u**2).values, 4.0)
    assert (-u).min() == -2.0
    with pytest.raises(PositivityError):
        (u - 2.0).require_positive("u")
    with pytest.raises(DimensionMismatch):
        _ = u + Field.constant(Domain.box([0.0], [1.0], 11), 1.0)


def test_midpoint_quadrature_is_exact_up_to_known_error():
    n = 16
    domain = Domain.box([0.0], [1.0], n)
    x2 = Field.from_function(domain, lambda x: x**2)
    assert integrate(x2) == pytest.approx(1.0 / 3.0 - 1.0 / (12.0 * n**2), rel=1e-13)


def test_trace_integral_only_on_true_boundary():
    domain = Domain.half_space(2, 1.0, 8)
    u = Field.constant(domain, 2.0)
    assert trace_integrate(u, Face(1, False)) == pytest.approx(4.0)
    with pytest.raises(FaceClassificationError):
        trace_integrate(u, Face(1, True))


def test_boundary_integral_of_constant_is_perimeter():
    domain = Domain.box([0.0, 0.0], [2.0, 1.0], 8)
    assert boundary_integral(Field.constant(domain, 1.0)) == pytest.approx(6.0)


def test_divergence_theorem_for_linear_field():
    domain = Domain.box([0.0, 0.0], [1.0, 1.0], 10)
    X, Y = domain.mesh()
    F = VectorField(domain, np.stack([X, Y]))
    np.testing.assert_allclose(divergence(F).values, 2.0)
    assert boundary_flux(F) == pytest.approx(2.0)


def test_operators_are_exact_on_quadratics():
    domain = Domain.box([0.0, 0.0], [1.0, 2.0], 9)
    f = Field.from_function(domain, lambda x, y: x**2 + 3.0 * x * y + y**2)
    grad = gradient(f)
    X, Y = domain.mesh()
    np.testing.assert_allclose(grad[0].values, 2.0 * X + 3.0 * Y, atol=1e-10)
    np.testing.assert_allclose(grad[1].values, 3.0 * X + 2.0 * Y, atol=1e-10)
    np.testing.assert_allclose(laplacian(f).values, 4.0, atol=1e-9)
    upper_x = Face(0, True)
    np.testing.assert_allclose(
        normal_derivative(f, upper_x), 2.0 + 3.0 * domain.axes()[1], atol=1e-10
    )
    np.testing.assert_allclose(
        face_values(f, upper_x), 1.0 + 3.0 * domain.axes()[1] + domain.axes()[1] ** 2, atol=1e-12
    )


def test_operators_need_four_cells():
    with pytest.raises(ParameterOutOfRange):
        gradient(Field.constant(Domain.box([0.0], [1.0], 3), 1.0))


def test_hessian_gamma_identity_exact_for_quadratics():
    domain = Domain.box([-1.0, -1.0], [1.0, 1.0], 12)
    f = Field.from_function(domain, lambda x, y: x**2 - x * y)
    g = Field.from_function(domain, lambda x, y: 0.5 * y**2 + x)
    h = Field.from_function(domain, lambda x, y: x * y + y)
    report = check_hessian_gamma_identity(f, g, h, tolerance=1e-9)
    assert report.passed, report


def test_gamma2_forms_agree_for_quadratics():
    domain = Domain.box([0.0, 0.0, 0.0], [1.0, 1.0, 1.0], 8)
    a = Field.from_function(domain, lambda x, y, z: x**2 + y * z)
    b = Field.from_function(domain, lambda x, y, z: x * y - z**2)
    assert check_gamma2_forms(a, b, tolerance=1e-8).passed


@pytest.mark.parametrize("d", [1, 2, 3])
def test_cd_condition_holds_for_random_fields(d):
    domain = Domain.box([0.0] * d, [1.0] * d, 12 if d == 3 else 32)
    for i in range(5):
        report = check_cd_condition(random_smooth_field(domain, sample_rng(3, i)))
        assert report.passed
        assert report.worst >= -1e-9
        assert report.as_dict()["name"] == "cd-margin"


def test_integration_by_parts_converges_at_second_order():
    def error(n):
        domain = Domain.box([0.0], [1.0], n)
        a = Field.from_function(domain, lambda x: np.sin(2.0 * x) + x**3)
        b = Field.from_function(domain, lambda x: np.exp(x))
        return check_integration_by_parts(a, b, tolerance=math.inf).worst

    coarse, fine = error(64), error(128)
    assert fine < 1e-2
    assert coarse / fine > 3.0


def test_bochner_integral_identity_converges():
    def error(n):
        domain = Domain.box([0.0, 0.0], [1.0, 1.0], n)
        phi = Field.from_function(domain, lambda x, y: np.cos(np.pi * x) * np.cos(np.pi * y))
        return check_bochner_integral_identity(phi, tolerance=math.inf).worst

    coarse, fine = error(24), error(48)
    assert fine < 0.5
    assert coarse / fine > 2.5


@pytest.mark.parametrize("d", [1, 2, 3])
def test_cd_condition_is_an_equality_for_the_squared_norm(d):
    domain = Domain.box([-1.0] * d, [1.0] * d, 10)
    a = Field.from_function(domain, lambda *xs: 0.5 * sum(x**2 for x in xs))
    report = check_cd_condition(a)
    assert abs(report.worst) <= 1e-9


def test_hessian_gamma_identity_converges_for_random_fields():
    def error(n):
        domain = Domain.box([0.0, 0.0], [1.0, 1.0], n)
        f, g, h = (random_smooth_field(domain, sample_rng(6, i)) for i in range(3))
        return check_hessian_gamma_identity(f, g, h, tolerance=math.inf).worst

    coarse, fine = error(24), error(48)
    assert fine <= coarse / 2.0
