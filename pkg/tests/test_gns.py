import numpy as np
import pytest

from entroflow.errors import ParameterOutOfRange, ZeroFieldError
from entroflow.grid import Domain, Field
from entroflow.inequalities import (
    gns_constant,
    gns_constant_closed_form,
    gns_extremizer,
    gns_quotient,
    gns_theta,
    random_bumps,
    sample_rng,
    verify_gns,
)
from entroflow.inequalities.gns import _half_ball_moment


def test_polynomial_integrals_of_the_one_dimensional_extremizer():
    # f = (1 - x^2)^{3/2} on [0, 1]: int f^{4/3}, int f^{2/3}, int |f'|^2
    assert _half_ball_moment(1, 0, 2.0) == pytest.approx(8.0 / 15.0)
    assert _half_ball_moment(1, 0, 1.0) == pytest.approx(2.0 / 3.0)
    assert 9.0 * _half_ball_moment(1, 2, 1.0) == pytest.approx(6.0 / 5.0)


def test_closed_form_constant_for_alpha_two_in_one_dimension():
    theta = gns_theta(2.0, 1)
    assert theta == pytest.approx(3.0 / 8.0)
    expected = (8.0 / 15.0) ** 0.75 / ((6.0 / 5.0) ** (theta / 2.0) * (2.0 / 3.0) ** (1.5 * (1.0 - theta)))
    assert gns_constant_closed_form(2.0, 1) == pytest.approx(expected, rel=1e-14)
    assert gns_constant(2.0, 1) == gns_constant_closed_form(2.0, 1)


@pytest.mark.parametrize("alpha", [1.5, 2.0, 3.0])
def test_grid_quotient_of_extremizer_matches_closed_form(alpha):
    domain = Domain.half_space(1, 1.5, 4096)
    assert gns_constant(alpha, 1, domain) == pytest.approx(gns_constant_closed_form(alpha, 1), rel=1e-4)


def test_quotient_is_invariant_under_scaling():
    domain = Domain.half_space(1, 1.5, 4096)
    f = gns_extremizer(domain, 2.0)
    assert gns_quotient(f * 3.0, 2.0) == pytest.approx(gns_quotient(f, 2.0), rel=1e-12)
    p = 1.5
    narrow = Field.from_function(domain, lambda x: np.maximum(1.0 - (x / 0.7) ** 2, 0.0) ** p)
    assert gns_quotient(narrow, 2.0) == pytest.approx(gns_constant_closed_form(2.0, 1), rel=1e-4)


def test_boundary_translation_in_two_dimensions():
    domain = Domain.half_space(2, 1.5, 256)
    centered = gns_quotient(gns_extremizer(domain, 2.0), 2.0)
    shifted = gns_quotient(gns_extremizer(domain, 2.0, center=(0.3, 0.0)), 2.0)
    assert shifted == pytest.approx(centered, rel=1e-3)
    assert centered == pytest.approx(gns_constant_closed_form(2.0, 2), rel=1e-3)
    with pytest.raises(ParameterOutOfRange):
        gns_extremizer(domain, 2.0, center=(0.0, 0.2))


@pytest.mark.parametrize("index", range(5))
def test_random_fields_satisfy_the_inequality(index):
    domain = Domain.half_space(1, 1.5, 2048)
    report = verify_gns(random_bumps(domain, sample_rng(4, index)), 2.0)
    assert report.passed()
    assert report.quotient < report.C
    assert report.theta == pytest.approx(3.0 / 8.0)


def test_equality_case_has_vanishing_deficit():
    domain = Domain.half_space(1, 1.5, 4096)
    report = verify_gns(gns_extremizer(domain, 2.0), 2.0)
    assert abs(report.deficit) <= 1e-5 * (1.0 + abs(report.rhs))


def test_argument_checks():
    domain = Domain.half_space(1, 1.5, 64)
    with pytest.raises(ParameterOutOfRange):
        gns_extremizer(domain, 1.0)
    with pytest.raises(ParameterOutOfRange):
        gns_constant(2.0, 2, domain)
    with pytest.raises(ZeroFieldError):
        gns_quotient(Field.constant(domain, 0.0), 2.0)


@pytest.mark.parametrize(("r_power", "a"), [(0, 2.0), (2, 1.0), (0, 2.5), (2, 0.5)])
def test_half_ball_moments_against_gauss_legendre(r_power, a):
    x, w = np.polynomial.legendre.leggauss(400)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    expected = float(np.sum(w * x**r_power * (1.0 - x**2) ** a))
    assert _half_ball_moment(1, r_power, a) == pytest.approx(expected, rel=1e-6)


def test_half_disk_moment():
    assert _half_ball_moment(2, 0, 3.0) == pytest.approx(np.pi / 8.0)
