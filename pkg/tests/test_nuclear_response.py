import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

import oracles
from nucent.errors import DomainError
from nucent.nuclear_response import (
    FieldSchedule,
    SampleParams,
    TimeGrid,
    Wavepacket,
    accumulated_phase,
    bessel_j1,
    envelope,
    phase_jump,
    scattered_wavepacket,
    scheduled_wavepacket,
    switched_pair,
)


# --- bessel_j1 -------------------------------------------------------------

def test_j1_zero():
    assert bessel_j1(0.0) == 0.0


def test_j1_at_one_matches_series_oracle():
    assert bessel_j1(1.0) == pytest.approx(oracles.J1_AT_1, abs=1e-14)


def test_j1_first_root():
    assert abs(bessel_j1(3.8317059702)) < 1e-8
    assert abs(bessel_j1(oracles.J1_FIRST_ROOT)) < 1e-13


def test_j1_root_oracle_is_frozen_correctly():
    root = oracles.bisect_root(oracles.j1_series, oracles.mpf(3), oracles.mpf(4))
    assert float(root) == pytest.approx(oracles.J1_FIRST_ROOT, abs=1e-15)


@pytest.mark.parametrize("x", [0.01, 0.5, 2.0, 5.5, 11.9, 12.0, 12.01, 13.7, 25.0, 60.3, 117.0, 199.99, 200.0])
def test_j1_against_high_precision_series(x):
    assert bessel_j1(x) == pytest.approx(float(oracles.j1_series(x)), abs=1e-10)


def test_j1_dense_against_scipy():
    x = np.linspace(0, 200, 20001)
    assert np.max(np.abs(bessel_j1(x) - special.j1(x))) < 1e-10


def test_j1_preserves_shape():
    x = np.linspace(0, 30, 12).reshape(3, 4)
    assert bessel_j1(x).shape == (3, 4)


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf, -1.0])
def test_j1_domain(bad):
    with pytest.raises(DomainError):
        bessel_j1(bad)


# --- envelope --------------------------------------------------------------

def test_envelope_limit_at_zero(fig1e):
    assert envelope(fig1e, 0.0) == 1.0


def test_envelope_at_one_lifetime(fig1e):
    assert envelope(fig1e, 141.0) == pytest.approx(oracles.ENVELOPE_AT_LIFETIME, rel=1e-12)
    # the same value from its two factors
    assert oracles.ENVELOPE_AT_LIFETIME == pytest.approx(oracles.J1_AT_2 * math.exp(-0.5), rel=1e-15)


def test_envelope_limit_scales_with_alpha():
    s = SampleParams(alpha=4.0)
    assert envelope(s, 0.0) == 4.0
    assert envelope(s, 1e-9) == pytest.approx(4.0, rel=1e-9)


@pytest.mark.parametrize("alpha,t", [(1.0, 3.0), (1.0, 900.0), (7.5, 60.0), (40.0, 1000.0), (250.0, 140.0)])
def test_envelope_matches_closed_form(alpha, t):
    s = SampleParams(alpha=alpha)
    assert envelope(s, t) == pytest.approx(oracles.envelope_direct(alpha, s.gamma, t), rel=1e-9, abs=1e-13)


def test_envelope_negative_time(fig1e):
    with pytest.raises(DomainError):
        envelope(fig1e, -1e-3)


def test_envelope_continuity(fig1e):
    # no spikes at the Bessel roots: increments bounded by a local slope estimate
    dt = 0.01
    t = np.arange(0, 20 / fig1e.gamma, dt)
    a = envelope(fig1e, t)
    assert np.all(np.isfinite(a))
    steps = np.abs(np.diff(a))
    slope = np.max(steps) / dt
    assert np.all(steps <= slope * dt)
    # second differences stay small relative to the first ones
    assert np.max(np.abs(np.diff(a, 2))) < 10 * dt * np.max(steps)


def test_envelope_continuity_thick_sample():
    s = SampleParams(alpha=30.0)
    t = np.arange(0, 700, 0.01)
    a = envelope(s, t)
    d1 = np.abs(np.diff(a))
    d2 = np.abs(np.diff(a, 2))
    assert np.all(np.isfinite(a))
    assert np.max(d2) < 0.05 * np.max(d1)


# --- scattered_wavepacket ---------------------------------------------------

def test_wavepacket_first_node(fig1e):
    t_node = math.pi / (2 * fig1e.delta_b)
    assert t_node == pytest.approx(oracles.FIRST_BEAT_NODE, abs=1e-12)
    grid = TimeGrid(t_node, t_node + 1.0, 0.01)
    wp = scattered_wavepacket(fig1e, grid)
    assert abs(wp.amplitude[0]) <= 1e-10 * envelope(fig1e, t_node)


def test_wavepacket_without_splitting_is_envelope(grid):
    s = SampleParams(delta_b=0.0)
    wp = scattered_wavepacket(s, grid)
    np.testing.assert_array_equal(wp.amplitude, envelope(s, grid.times))


def test_wavepacket_starts_at_one(fig1e, grid):
    wp = scattered_wavepacket(fig1e, grid)
    assert wp.amplitude[0] == 1.0
    assert len(wp.amplitude) == grid.n == 141001


def test_beat_nodes_within_one_step(fig1e, grid):
    wp = scattered_wavepacket(fig1e, grid)
    t = grid.times
    sign_change = np.flatnonzero(np.sign(wp.amplitude[:-1]) != np.sign(wp.amplitude[1:]))
    # drop sign changes from Bessel-envelope roots (none within 150 ns at alpha=1)
    crossings = t[sign_change][:11]
    expected = (2 * np.arange(11) + 1) * math.pi / (2 * fig1e.delta_b)
    assert np.all(np.abs(crossings - expected) <= grid.dt)


def test_grid_must_resolve_beat(fig1e):
    with pytest.raises(DomainError):
        scattered_wavepacket(fig1e, TimeGrid(0, 100, 1.0))


def test_grid_invariants():
    with pytest.raises(DomainError):
        TimeGrid(-1.0, 10.0, 0.1)
    with pytest.raises(DomainError):
        TimeGrid(5.0, 5.0, 0.1)
    with pytest.raises(DomainError):
        TimeGrid(0.0, 5.0, 0.0)
    assert TimeGrid(0.0, 1.0, 0.1).n == 11


def test_sample_params_invariants():
    with pytest.raises(DomainError):
        SampleParams(alpha=0.0)
    with pytest.raises(DomainError):
        SampleParams(gamma=-1.0)
    with pytest.raises(DomainError):
        SampleParams(delta_b=-0.1)
    s = SampleParams.from_gamma_multiple(multiple=30.0)
    assert s.delta_b_over_gamma == pytest.approx(30.0)
    assert s == SampleParams()


def test_wavepacket_rejects_nonfinite():
    g = TimeGrid(0, 1, 0.5)
    with pytest.raises(DomainError):
        Wavepacket(g, [0.0, np.nan, 1.0])


# --- accumulated_phase --------------------------------------------------------

def test_constant_schedule_phase(fig1e):
    sched = FieldSchedule.constant("left")
    assert accumulated_phase(sched, fig1e, 50.0) == pytest.approx(30 * fig1e.gamma * 50.0, rel=1e-15)


def test_inverted_schedule_returns_to_zero(fig1e):
    t_phi = 11.0
    sched = FieldSchedule.inverted_at(t_phi)
    assert accumulated_phase(sched, fig1e, 2 * t_phi) == pytest.approx(0.0, abs=1e-15)
    assert accumulated_phase(sched, fig1e, t_phi) == pytest.approx(fig1e.delta_b * t_phi, rel=1e-15)


@given(
    st.floats(0.0, 500.0),
    st.floats(0.0, 500.0),
    st.lists(st.floats(0.5, 100.0), min_size=0, max_size=5),
)
def test_phase_additivity(tau1, tau2, gaps):
    s = SampleParams()
    tau1, tau2 = sorted((tau1, tau2))
    starts = np.cumsum([0.0] + gaps)
    signs = [1 if i % 2 == 0 else -1 for i in range(len(starts))]
    sched = FieldSchedule(tuple(zip(starts, signs)))
    between = s.delta_b * (sched.signed_time(tau2) - sched.signed_time(tau1))
    total = accumulated_phase(sched, s, tau2)
    assert accumulated_phase(sched, s, tau1) + between == pytest.approx(total, abs=1e-12 * max(1.0, abs(total)))
    # brute-force midpoint integral of the sign
    n = 4000
    if tau2 > 0:
        mid = (np.arange(n) + 0.5) * tau2 / n
        brute = s.delta_b * np.sum(np.where(sched.signed_time(mid + 1e-12) > sched.signed_time(mid), 1, -1)) * tau2 / n
        assert total == pytest.approx(brute, abs=s.delta_b * 2 * (len(starts) + 1) * tau2 / n)


def test_schedule_invariants():
    with pytest.raises(DomainError):
        FieldSchedule(((1.0, 1),))
    with pytest.raises(DomainError):
        FieldSchedule(((0.0, 1), (5.0, -1), (5.0, 1)))
    with pytest.raises(DomainError):
        FieldSchedule(((0.0, 2),))
    with pytest.raises(DomainError):
        FieldSchedule(((0.0, 1),), arm="middle")


def test_phase_jump(fig1e):
    assert phase_jump(fig1e, 3.0) == pytest.approx(-2 * fig1e.delta_b * 3.0)


# --- switched_pair -------------------------------------------------------------

def test_switched_pair_identical_without_inversion(fig1e):
    grid = TimeGrid(0, 300, 0.01)
    r, l = switched_pair(fig1e, 0.0, grid)
    np.testing.assert_array_equal(r.amplitude, l.amplitude)


def test_switched_pair_at_quarter_beat(fig1e):
    t_phi = math.pi / (2 * fig1e.delta_b)
    r, l = switched_pair(fig1e, t_phi, TimeGrid(0, 50, 0.01))
    assert r.amplitude[0] == pytest.approx(0.0, abs=1e-15)
    assert l.amplitude[0] == pytest.approx(0.0, abs=1e-15)


def test_switched_pair_finite_at_quotient_poles(fig1e):
    # cos(delta_b (t_phi + t)) = 0 lands exactly on grid points
    dt = 0.01
    t_phi = math.pi / (2 * fig1e.delta_b) - 100 * dt
    r, l = switched_pair(fig1e, t_phi, TimeGrid(0, 30, dt))
    assert np.all(np.isfinite(r.amplitude))
    assert abs(l.amplitude[100]) < 1e-12
    assert abs(r.amplitude[100]) > 0.1


@settings(max_examples=50, deadline=None)
@given(
    st.floats(0.1, 20.0),
    st.floats(1e-3, 0.1),
    st.floats(1.0, 60.0),
    st.floats(0.0, 200.0),
)
def test_sum_and_difference_identities(alpha, gamma, multiple, t_phi):
    s = SampleParams(alpha, gamma, multiple * gamma)
    dt = min(0.05, math.pi / (20 * s.delta_b))
    grid = TimeGrid(0.0, 200.0, dt)
    r, l = switched_pair(s, t_phi, grid)
    t = grid.times
    a = envelope(s, t_phi + t)
    diff = 2 * a * np.sin(s.delta_b * t_phi) * np.sin(s.delta_b * t)
    summ = 2 * a * np.cos(s.delta_b * t_phi) * np.cos(s.delta_b * t)
    scale = np.max(np.abs(a)) + 1e-300
    assert np.max(np.abs((r.amplitude - l.amplitude) - diff)) <= 1e-12 * scale
    assert np.max(np.abs((r.amplitude + l.amplitude) - summ)) <= 1e-12 * scale


def test_switched_pair_agrees_with_schedules(fig1e):
    t_phi = 9.3
    grid = TimeGrid(0, 200, 0.01)
    r, l = switched_pair(fig1e, t_phi, grid)
    absolute = TimeGrid(t_phi, t_phi + 200, 0.01)
    right = scheduled_wavepacket(fig1e, FieldSchedule.inverted_at(t_phi, "right"), absolute)
    left = scheduled_wavepacket(fig1e, FieldSchedule.constant("left"), absolute)
    n = min(grid.n, absolute.n)
    np.testing.assert_allclose(r.amplitude[:n], right.amplitude[:n], atol=1e-12)
    np.testing.assert_allclose(l.amplitude[:n], left.amplitude[:n], atol=1e-12)


def test_switched_pair_rejects_negative_t_phi(fig1e):
    with pytest.raises(DomainError):
        switched_pair(fig1e, -1.0, TimeGrid(0, 10, 0.01))
