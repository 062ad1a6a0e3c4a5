import numpy as np
import pytest

from entroflow.errors import CflViolation, MassMismatch, NegativeCellError, ParameterOutOfRange
from entroflow.flow import (
    FlowConfig,
    FlowObserver,
    FlowStepper,
    MobilityRule,
    choose_epsilon,
    desingularize,
    positive_profile,
    read_trace_csv,
    run_flow,
    stationarity_residual,
    write_trace_csv,
)
from entroflow.flow.scheme import psi_of_target
from entroflow.functionals import relative_entropy
from entroflow.grid import Domain, Field, integrate
from entroflow.inequalities import random_bumps, sample_rng
from entroflow.nonlinearity import Family, make_nonlinearity
from entroflow.potential import extremal_profile, make_shifted_quadratic, normalize_mass


@pytest.fixture(scope="module")
def boltzmann():
    domain = Domain.half_space(1, 6.0, 128)
    nl = make_nonlinearity(Family.BOLTZMANN, d=1)
    profile = extremal_profile(nl, make_shifted_quadratic(0.0, 0.0, 0.5, 1), domain)
    u0 = normalize_mass(profile.field * 0.5 + random_bumps(domain, sample_rng(5, 0)) * 0.5)
    return desingularize(nl, 0.1), profile, u0


@pytest.fixture(scope="module")
def boltzmann_trace(boltzmann):
    dnl, profile, u0 = boltzmann
    return run_flow(dnl, profile, u0, FlowConfig(end_time=1.0, snapshot_every=0.02))


def test_flow_conserves_mass(boltzmann_trace):
    assert boltzmann_trace.stats["mass_drift"] <= 1e-12
    np.testing.assert_allclose(boltzmann_trace.mass, 1.0, rtol=1e-12)


def test_flow_dissipates_entropy(boltzmann_trace):
    assert np.all(np.diff(boltzmann_trace.entropy) <= 1e-12)
    assert boltzmann_trace.stats["max_entropy_increase"] <= 1e-12
    assert np.all(boltzmann_trace.production >= 0)
    assert boltzmann_trace.production[-1] < boltzmann_trace.production[0]


class _RelativeEntropyRecorder(FlowObserver):
    def __init__(self, profile):
        self.profile = profile
        self.gaps = []

    def on_record(self, stepper):
        p = self.profile
        self.gaps.append(relative_entropy(p.nonlinearity, p.potential, p, stepper.field()))


def test_relative_entropy_decays_to_the_profile(boltzmann):
    dnl, profile, u0 = boltzmann
    recorder = _RelativeEntropyRecorder(profile)
    run_flow(dnl, profile, u0, FlowConfig(end_time=2.0, snapshot_every=0.5), observer=recorder)
    gaps = np.asarray(recorder.gaps)
    assert len(gaps) == 5
    assert np.all(np.diff(gaps) < 0)
    assert gaps[-1] < 0.1 * gaps[0]


def test_flow_lands_on_record_times(boltzmann_trace):
    assert boltzmann_trace.times[0] == 0.0
    assert boltzmann_trace.times[-1] == 1.0
    np.testing.assert_allclose(np.diff(boltzmann_trace.times), 0.02, rtol=1e-9)
    assert boltzmann_trace.stats["steps"] > 0
    assert boltzmann_trace.stats["dt"] > 0


def test_trace_csv_is_exact(boltzmann_trace, tmp_path):
    path = tmp_path / "trace.csv"
    write_trace_csv(boltzmann_trace, path)
    assert path.read_text().splitlines()[0] == "t,mass,entropy,production"
    back = read_trace_csv(path)
    np.testing.assert_array_equal(back.entropy, boltzmann_trace.entropy)
    np.testing.assert_array_equal(back.times, boltzmann_trace.times)
    other = tmp_path / "again.csv"
    boltzmann_trace.to_csv(other)
    assert other.read_text() == path.read_text()


def test_field_access_needs_kept_fields(boltzmann, boltzmann_trace):
    with pytest.raises(ValueError, match="keep_fields"):
        boltzmann_trace.field_at(0.5)
    dnl, profile, u0 = boltzmann
    trace = run_flow(dnl, profile, u0, FlowConfig(end_time=0.1, snapshot_times=[0.05], keep_fields=True))
    assert integrate(trace.field_at(0.05)) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(KeyError):
        trace.field_at(0.07)


@pytest.mark.parametrize("alpha", [0.0, 0.5, -1.0])
def test_stationary_family_does_not_move(boltzmann, alpha):
    dnl, profile, _ = boltzmann
    residual = stationarity_residual(dnl, profile, alpha, FlowConfig(end_time=0.2, snapshot_every=0.1))
    assert residual <= 1e-10


def test_power_convex_positive_profile_is_stationary():
    domain = Domain.half_space(1, 1.5, 96)
    nl = make_nonlinearity(Family.POWER_CONVEX, 2.0, 1)
    profile = extremal_profile(nl, make_shifted_quadratic(0.0, 0.0, 1.0, 1), domain)
    dnl = desingularize(nl, 0.1)
    v_eps = positive_profile(dnl, profile)
    assert v_eps.is_positive()
    # v_eps and v differ in mass, so v_eps is its own target
    trace = run_flow(dnl, v_eps, v_eps, FlowConfig(end_time=0.02, keep_fields=True))
    drift = np.max(np.abs(trace.snapshots[-1].values - v_eps.values))
    assert drift <= 1e-8 * v_eps.max()


def test_entropic_mobility_also_dissipates(boltzmann):
    dnl, profile, u0 = boltzmann
    assert FlowConfig().mobility is MobilityRule.ARITHMETIC
    trace = run_flow(
        dnl, profile, u0, FlowConfig(end_time=0.2, snapshot_every=0.05, mobility=MobilityRule.ENTROPIC)
    )
    assert trace.stats["mass_drift"] <= 1e-12
    assert np.all(np.diff(trace.entropy) <= 1e-12)


def test_flow_towards_potential_and_positive_field_agree(boltzmann):
    dnl, profile, u0 = boltzmann
    cfg = FlowConfig(end_time=0.05)
    by_potential = run_flow(dnl, profile.potential, u0, cfg)
    by_field = run_flow(dnl, profile.field, u0, cfg)
    np.testing.assert_allclose(by_potential.entropy, by_field.entropy, rtol=1e-9, atol=1e-12)


def test_psi_of_target_requires_positive_field(boltzmann):
    dnl, profile, _ = boltzmann
    zero = Field.constant(profile.domain, 0.0)
    with pytest.raises(ValueError, match="positive"):
        psi_of_target(dnl, zero, profile.domain, 1.0)


def test_time_step_floor(boltzmann):
    dnl, profile, u0 = boltzmann
    with pytest.raises(CflViolation):
        run_flow(dnl, profile, u0, FlowConfig(end_time=0.1, dt_floor=1.0))


def test_oversized_step_is_caught(boltzmann):
    dnl, profile, u0 = boltzmann
    stepper = FlowStepper(dnl, profile.beta - profile.potential(u0.domain.points()), u0)
    with pytest.raises(NegativeCellError):
        stepper.step(1e6)


def test_flow_config_validation():
    with pytest.raises(ParameterOutOfRange):
        FlowConfig(safety=0.0)
    with pytest.raises(ParameterOutOfRange):
        FlowConfig(end_time=-1.0)
    cfg = FlowConfig(end_time=1.0, snapshot_every=0.25, snapshot_times=[0.1, 2.0])
    assert cfg.record_times() == [0.0, 0.1, 0.25, 0.5, 0.75, 1.0]


def test_choose_epsilon():
    domain = Domain.box([0.0], [1.0], 8)
    u0 = Field.from_function(domain, lambda x: 0.2 + x)
    v = Field.from_function(domain, lambda x: np.where(x > 0.5, 4.0, 0.0))
    # candidates: 0.1, 0.5 * min u0, 0.5 / max u0, 0.5 * 4, 0.5 / 4
    expected = 0.5 * min(0.1, 0.5 * u0.min(), 0.5 / u0.max(), 2.0, 0.125)
    assert choose_epsilon(u0, v) == pytest.approx(expected)
    assert choose_epsilon(u0) == pytest.approx(0.05)


def test_initial_mass_must_match_the_target(boltzmann):
    dnl, profile, u0 = boltzmann
    heavy = u0 * 1.1
    with pytest.raises(MassMismatch):
        run_flow(dnl, profile, heavy, FlowConfig(end_time=0.01))
    with pytest.raises(MassMismatch):
        run_flow(dnl, profile.field, heavy, FlowConfig(end_time=0.01))
    # a bare potential takes its mass from u0
    trace = run_flow(dnl, profile.potential, heavy, FlowConfig(end_time=0.01))
    assert trace.mass[0] == pytest.approx(1.1, rel=1e-12)


@pytest.fixture(scope="module")
def drift_dominated():
    # most cells sit on the linear lower tail of U_eps, where the drift wins
    domain = Domain.half_space(1, 8.0, 256)
    nl = make_nonlinearity(Family.POWER_CONVEX, 2.0, 1)
    profile = extremal_profile(nl, make_shifted_quadratic(0.0, 0.0, 0.5, 1), domain)
    u0 = normalize_mass(profile.field * 0.5 + random_bumps(domain, sample_rng(0, 0)) * 0.5)
    dnl = desingularize(nl, 0.05)
    return FlowStepper(dnl, psi_of_target(dnl, profile, domain, integrate(u0)), u0)


def test_stable_step_keeps_cells_positive(drift_dominated):
    stepper = drift_dominated
    for _ in range(200):
        before = stepper.u.copy()
        stepper.step(stepper.stable_dt(0.4))
        assert np.all(stepper.u >= 0.6 * before * (1.0 - 1e-12))
    assert stepper.time > 0


def test_stable_step_respects_every_bound(drift_dominated):
    stepper = drift_dominated
    h = float(stepper.domain.spacing[0])
    dt = stepper.stable_dt(0.4)
    slope = stepper.dnl.max_slope(float(stepper.u.min()), float(stepper.u.max()))
    assert slope <= stepper.dnl.M_eps
    assert dt <= 0.4 * h**2 / (2.0 * slope)
    out = stepper.outflow()
    assert np.all(out >= 0)
    assert np.all(dt * out <= 0.4 * stepper.u * (1.0 + 1e-12))
    assert np.all(stepper.rate() >= -out * (1.0 + 1e-12))
