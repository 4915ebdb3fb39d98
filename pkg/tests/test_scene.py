import math

import pytest
from hypothesis import given, settings, strategies as st

from twradar.antenna import get_antenna
from twradar.constants import C
from twradar.errors import InvalidParameterError, SingularityError
from twradar.scene import (BACK_AND_FORTH, MEASUREMENT_CABLE, WALL_PRESETS, CableRun, NoiseSpec,
                           Reflector, Scene, Trajectory, Wall, effective_cable_length, position_at,
                           received_power, round_trip_delay, wall_loss_db)


def _walk(traj, t, dt=1e-4):
    """Step the walker forward, reversing at the ends."""
    d = traj.d_near if traj.start_at == "near" else traj.d_far
    v = traj.speed if traj.start_at == "near" else -traj.speed
    for _ in range(int(round(t / dt))):
        d += v * dt
        if d >= traj.d_far:
            d, v = 2 * traj.d_far - d, -v
        elif d <= traj.d_near:
            d, v = 2 * traj.d_near - d, -v
    return d


def test_position_worked_value():
    w = Trajectory(BACK_AND_FORTH, 1.0, 7.0, 1.0)
    assert position_at(w, 9.0) == pytest.approx(4.0)
    assert position_at(w, 6.0) == pytest.approx(7.0)
    assert position_at(w, 12.0) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(near=st.floats(0.5, 5.0), span=st.floats(0.5, 6.0), speed=st.floats(0.2, 2.0),
       t=st.floats(0.0, 30.0), start=st.sampled_from(["near", "far"]))
def test_position_matches_stepwise_walk(near, span, speed, t, start):
    w = Trajectory(BACK_AND_FORTH, near, near + span, speed, start)
    assert position_at(w, t) == pytest.approx(_walk(w, t), abs=1e-3)


def test_trajectory_validation():
    with pytest.raises(InvalidParameterError):
        Trajectory(BACK_AND_FORTH, 5.0, 1.0, 1.0)
    with pytest.raises(InvalidParameterError):
        Trajectory(BACK_AND_FORTH, 1.0, 5.0, 0.0)
    with pytest.raises(InvalidParameterError):
        position_at(Trajectory.fixed(3.0), -1.0)
    assert position_at(Trajectory.fixed(3.0), 100.0) == 3.0


def test_cable_conventions():
    c = CableRun(40.0, 2.1, 7.45, 2.1, "sqrt-eps")
    assert effective_cable_length(c) == pytest.approx(68.76, abs=0.01)
    assert effective_cable_length(CableRun(40.0, 2.1, 7.45, 2.1, "paper-eps")) == pytest.approx(99.645)
    assert effective_cable_length(MEASUREMENT_CABLE) == 55.97
    with pytest.raises(InvalidParameterError):
        CableRun(convention="bogus")


def test_round_trip_delay_wall():
    assert round_trip_delay(10.32, MEASUREMENT_CABLE) == pytest.approx(255.6e-9, abs=0.1e-9)


def _radar_equation_watts(p_t, g_t, g_r, lam, sigma, r):
    """Power density at target, re-radiated, captured by the receive aperture."""
    density = p_t * g_t / (4 * math.pi * r ** 2)
    back = density * sigma / (4 * math.pi * r ** 2)
    aperture = g_r * lam ** 2 / (4 * math.pi)
    return back * aperture


def test_received_power_against_radar_equation():
    horn = get_antenna("horn")
    r = Reflector("plate", 1.0, Trajectory.fixed(10.0))
    got = received_power(0.0, horn, horn, 2.4e9, r, 10.0)
    p = _radar_equation_watts(1e-3, 10 ** 1.5, 10 ** 1.5, C / 2.4e9, 1.0, 10.0)
    assert got == pytest.approx(10 * math.log10(p) + 30, abs=1e-9)
    assert got == pytest.approx(-61.04, abs=0.01)


def test_received_power_fourth_power_law():
    horn = get_antenna("horn")
    r = Reflector("plate", 1.0, Trajectory.fixed(5.0))
    p5 = received_power(0.0, horn, horn, 2.4e9, r, 5.0)
    p10 = received_power(0.0, horn, horn, 2.4e9, r, 10.0)
    assert p5 - p10 == pytest.approx(40 * math.log10(2))
    with pytest.raises(SingularityError):
        received_power(0.0, horn, horn, 2.4e9, r, 0.0)


def test_wall_loss_two_way():
    walls = (Wall("brick", **WALL_PRESETS["brick-40cm"]),)
    r = Reflector("x", 1.0, Trajectory.fixed(2.0), walls_crossed=("brick",))
    assert wall_loss_db(r, walls) == pytest.approx(26.0)
    horn = get_antenna("horn")
    free = Reflector("y", 1.0, Trajectory.fixed(2.0))
    assert (received_power(0, horn, horn, 2.4e9, free, 2.0, walls)
            - received_power(0, horn, horn, 2.4e9, r, 2.0, walls)) == pytest.approx(26.0)


def test_scene_rejects_unknown_wall():
    with pytest.raises(InvalidParameterError):
        Scene((Reflector("x", 1.0, Trajectory.fixed(2.0), walls_crossed=("door",)),))


def test_union_and_echoes(chirp):
    ant = get_antenna("horn")
    a = Scene((Reflector("a", 1.0, Trajectory.fixed(3.0)),), antenna=ant)
    b = Scene((Reflector("b", 1.0, Trajectory.fixed(6.0)),), antenna=ant)
    u = a.union(b)
    es = u.echoes(chirp, 0.0)
    assert [e.path_label for e in es] == ["a", "b"]
    assert es[1].tau == pytest.approx(12.0 / C)
    with pytest.raises(InvalidParameterError):
        Scene((Reflector("a", 1.0, Trajectory.fixed(3.0)),)).echoes(chirp, 0.0)


def test_noise_spec_default_off():
    assert NoiseSpec().noise_density_dbm_per_hz is None
