import math

import numpy as np
import pytest
from scipy import special

from entroflow.errors import ConsistencyError, ParameterOutOfRange
from entroflow.nonlinearity import (
    Family,
    check_hypothesis_U,
    generalized_inverse,
    make_custom_nonlinearity,
    make_nonlinearity,
    validate_bundle,
)

BUILT_IN = [
    (Family.BOLTZMANN, None, 1),
    (Family.BOLTZMANN, None, 3),
    (Family.POWER_CONVEX, 2.0, 1),
    (Family.POWER_CONVEX, 1.5, 2),
    (Family.POWER_CONCAVE, 0.8, 2),
    (Family.POWER_CONCAVE, 0.9, 3),
    (Family.SOBOLEV, None, 3),
]


@pytest.mark.parametrize(("family", "alpha", "d"), BUILT_IN)
def test_built_in_bundles_are_consistent(family, alpha, d):
    nl = make_nonlinearity(family, alpha, d)
    validate_bundle(nl)


@pytest.mark.parametrize(("family", "alpha", "d"), BUILT_IN)
def test_built_in_bundles_satisfy_hypothesis(family, alpha, d):
    report = check_hypothesis_U(make_nonlinearity(family, alpha, d))
    assert report.satisfied
    assert report.worst_value >= -1e-12


def test_sobolev_hypothesis_is_exactly_tight():
    nl = make_nonlinearity(Family.SOBOLEV, d=3)
    x = np.logspace(-6, 6, 200)
    np.testing.assert_array_equal(nl.U2(x) + nl.U(x) / 3, np.zeros_like(x))


def test_power_concave_below_window_violates_hypothesis():
    nl = make_nonlinearity(Family.POWER_CONCAVE, 0.3, 2, strict=False)
    report = check_hypothesis_U(nl)
    assert not report.satisfied
    assert report.worst_value < 0


def test_hypothesis_check_rejects_short_grids():
    nl = make_nonlinearity(Family.BOLTZMANN)
    with pytest.raises(ParameterOutOfRange):
        check_hypothesis_U(nl, np.linspace(1.0, 2.0, 200))
    with pytest.raises(ParameterOutOfRange):
        check_hypothesis_U(nl, np.logspace(-3, 3, 50))


@pytest.mark.parametrize(
    ("family", "alpha", "d"),
    [
        (Family.POWER_CONVEX, 0.5, 1),
        (Family.POWER_CONVEX, None, 1),
        (Family.POWER_CONCAVE, 1.2, 1),
        (Family.POWER_CONCAVE, 0.4, 2),
        (Family.SOBOLEV, None, 2),
        (Family.BOLTZMANN, None, 0),
    ],
)
def test_parameters_outside_window_are_rejected(family, alpha, d):
    with pytest.raises(ParameterOutOfRange):
        make_nonlinearity(family, alpha, d)


def test_family_accepts_string_tags():
    nl = make_nonlinearity("power-convex", 2.0, 1)
    assert nl.family == Family.POWER_CONVEX
    assert nl.describe() == {"family": "power-convex", "alpha": 2.0, "d": 1}


def test_generalized_inverse_boltzmann():
    nl = make_nonlinearity(Family.BOLTZMANN)
    t = np.array([-5.0, 0.0, 2.0])
    np.testing.assert_allclose(generalized_inverse(nl, t), np.exp(t))
    assert generalized_inverse(nl, 0.0) == pytest.approx(1.0)


def test_generalized_inverse_power_convex_is_zero_below_psi_of_zero():
    nl = make_nonlinearity(Family.POWER_CONVEX, 2.0, 1)
    out = generalized_inverse(nl, np.array([-1.0, 0.0, 0.5, 3.0]))
    np.testing.assert_allclose(out, [0.0, 0.0, 0.5, 3.0])


def test_generalized_inverse_power_concave_saturates():
    nl = make_nonlinearity(Family.POWER_CONCAVE, 0.8, 2)
    out = generalized_inverse(nl, np.array([-1.0, 0.0, 1.0]))
    assert out[0] == pytest.approx(1.0)
    assert math.isinf(out[1])
    assert math.isinf(out[2])


def _custom_boltzmann(**overrides):
    kwargs = {
        "H": lambda x: special.xlogy(x, x) - x,
        "psi": np.log,
        "dpsi": lambda x: 1.0 / x,
        "U": lambda x: x,
        "dU": np.ones_like,
        "U2": np.zeros_like,
        "psi_at_zero": -math.inf,
        "psi_at_inf": math.inf,
        "d": 1,
    }
    kwargs.update(overrides)
    return make_custom_nonlinearity(**kwargs)


def test_custom_nonlinearity_inverts_by_bisection():
    nl = _custom_boltzmann()
    assert nl.family == Family.CUSTOM
    assert not nl.has_closed_form_inverse()
    t = np.array([-20.0, -1.0, 0.0, 3.0, 15.0])
    np.testing.assert_allclose(generalized_inverse(nl, t), np.exp(t), rtol=1e-12)
    with pytest.raises(NotImplementedError):
        nl.psi_inverse(t)


def test_custom_nonlinearity_with_wrong_U_is_rejected():
    with pytest.raises(ConsistencyError, match="U = x psi - H"):
        _custom_boltzmann(U=lambda x: 2.0 * x)


@pytest.mark.parametrize(
    ("family", "alpha", "d"),
    [
        (Family.BOLTZMANN, None, 1),
        (Family.POWER_CONVEX, 2.0, 1),
        (Family.POWER_CONVEX, 1.5, 2),
        (Family.POWER_CONCAVE, 0.8, 2),
    ],
)
def test_generalized_inverse_undoes_psi(family, alpha, d):
    nl = make_nonlinearity(family, alpha, d)
    x = np.logspace(-6.0, 6.0, 241)
    np.testing.assert_allclose(generalized_inverse(nl, nl.psi(x)), x, rtol=1e-10)


def test_closed_form_values():
    boltzmann = make_nonlinearity(Family.BOLTZMANN)
    assert boltzmann.U(2.0) == pytest.approx(2.0)
    assert boltzmann.U2(2.0) == 0.0
    assert make_nonlinearity(Family.POWER_CONVEX, 2.0, 1).U(3.0) == pytest.approx(4.5)
    # off the hypothesis window on purpose
    sobolev = make_nonlinearity(Family.SOBOLEV, d=2, strict=False)
    assert sobolev.U(4.0) == pytest.approx(1.0)
    assert sobolev.U2(4.0) == pytest.approx(-0.5)
    assert sobolev.U2(4.0) + sobolev.U(4.0) / 2 == pytest.approx(0.0, abs=1e-15)
    assert generalized_inverse(sobolev, -0.5) == pytest.approx(1.0)
