import math

import numpy as np
import pytest
from scipy import special

from entroflow.errors import ParameterOutOfRange, SupportEscapesBox
from entroflow.grid import Domain, integrate
from entroflow.nonlinearity import Family, make_nonlinearity
from entroflow.potential import (
    check_hypothesis_V,
    extremal_profile,
    gaussian_box_length,
    gaussian_halfspace_mass,
    make_custom_potential,
    make_shifted_quadratic,
)


def _boltzmann_beta(h, d):
    return -math.log((2.0 * math.pi) ** (d / 2.0) * special.ndtr(-h))


@pytest.mark.parametrize("h", [0.0, 0.5, -0.5])
def test_boltzmann_normalizer_matches_closed_form(h):
    domain = Domain.half_space(1, 10.0, 4096)
    nl = make_nonlinearity(Family.BOLTZMANN, d=1)
    profile = extremal_profile(nl, make_shifted_quadratic(0.0, h, 0.5, 1), domain)
    assert profile.beta == pytest.approx(_boltzmann_beta(h, 1), abs=1e-6)
    assert profile.mass == pytest.approx(1.0, rel=1e-10)
    assert profile.domain is domain


def test_boltzmann_normalizer_in_two_dimensions():
    domain = Domain.half_space(2, 8.0, 128)
    nl = make_nonlinearity(Family.BOLTZMANN, d=2)
    profile = extremal_profile(nl, make_shifted_quadratic(0.0, 0.0, 0.5, 2), domain)
    assert profile.beta == pytest.approx(_boltzmann_beta(0.0, 2), abs=1e-6)


def test_power_convex_profile_has_compact_support():
    domain = Domain.half_space(1, 3.0, 4096)
    nl = make_nonlinearity(Family.POWER_CONVEX, 2.0, 1)
    profile = extremal_profile(nl, make_shifted_quadratic(0.0, 0.0, 1.0, 1), domain)
    # v = (beta - x^2)_+ with mass 2/3 beta^{3/2}
    assert profile.beta == pytest.approx(1.5 ** (2.0 / 3.0), rel=1e-5)
    x = domain.axes()[0]
    assert np.all(profile.field.values[x > math.sqrt(profile.beta) + 1e-3] == 0.0)
    assert integrate(profile.field) == pytest.approx(1.0, rel=1e-10)


def test_profile_reaching_a_truncation_face_is_rejected():
    domain = Domain.half_space(1, 0.5, 256)
    nl = make_nonlinearity(Family.POWER_CONVEX, 2.0, 1)
    with pytest.raises(SupportEscapesBox):
        extremal_profile(nl, make_shifted_quadratic(0.0, 0.0, 1.0, 1), domain)


def test_extremal_profile_argument_checks():
    domain = Domain.half_space(1, 5.0, 64)
    nl = make_nonlinearity(Family.BOLTZMANN, d=1)
    with pytest.raises(ParameterOutOfRange):
        extremal_profile(nl, make_shifted_quadratic(0.0, 0.0, 0.5, 1), domain, target_mass=0.0)
    with pytest.raises(ParameterOutOfRange):
        extremal_profile(nl, make_shifted_quadratic(0.0, 0.0, 0.5, 2), domain)
    with pytest.raises(ParameterOutOfRange):
        make_shifted_quadratic(0.0, 0.0, -1.0, 1)


def test_shifted_quadratic_describes_itself():
    pot = make_shifted_quadratic(1.0, 0.5, 1.0, 2)
    assert pot.describe() == {"a": 1.0, "h": 0.5, "scale": 1.0, "C": 2.0}
    assert float(pot(np.array([0.0, 0.0]))) == pytest.approx(1.25)
    np.testing.assert_allclose(pot.gradient(np.array([1.0, 0.0])), [2.0, 1.0])
    assert float(pot.normal_derivative(np.array([1.0, 0.0]), [0.0, -1.0])) == pytest.approx(-1.0)


def test_hypothesis_V_for_gaussian_setting():
    domain = Domain.half_space(1, 6.0, 64)
    nl = make_nonlinearity(Family.BOLTZMANN, d=1)
    report = check_hypothesis_V(nl, make_shifted_quadratic(0.0, 0.0, 0.5, 1), domain)
    assert report.satisfied


def test_hypothesis_V_detects_saturated_inverse():
    domain = Domain.half_space(1, 6.0, 64)
    nl = make_nonlinearity(Family.POWER_CONCAVE, 0.8, 1)
    pot = make_shifted_quadratic(0.0, 0.0, 0.5, 1)
    assert check_hypothesis_V(nl, pot, domain, beta=-0.1).satisfied
    report = check_hypothesis_V(nl, pot, domain, beta=1.0)
    assert not report.satisfied
    assert report.worst_value < 0


def test_hypothesis_V_detects_overstated_convexity():
    domain = Domain.box([-1.0], [1.0], 32)
    pot = make_custom_potential(1, lambda x: np.sum(x**2, axis=-1), lambda x: 2.0 * x, 5.0)
    report = check_hypothesis_V(make_nonlinearity(Family.BOLTZMANN), pot, domain)
    assert not report.satisfied
    assert report.worst_value == pytest.approx(-3.0, abs=1e-6)


def test_gaussian_helpers():
    assert gaussian_halfspace_mass(0.0) == pytest.approx(0.5)
    assert gaussian_halfspace_mass(1.0) == pytest.approx(0.841344746, abs=1e-9)
    length = gaussian_box_length(0.0, 1e-12)
    assert 7.0 < length < 8.0
    assert gaussian_box_length(-2.0, 1e-12) > length
