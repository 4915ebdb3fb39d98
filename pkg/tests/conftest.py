import pytest

from twradar.antenna import get_antenna
from twradar.chirp import radar_preset
from twradar.scene import NO_CABLE, NoiseSpec, Reflector, Scene, Trajectory
from twradar.synth import default_receiver


@pytest.fixture
def chirp():
    return radar_preset("roc-operational")


@pytest.fixture
def rx(chirp):
    return default_receiver(chirp)


def static_scene(*targets, cable=NO_CABLE, noise=None, antenna="horn", walls=()):
    """Scene of static reflectors given as ``(distance, rcs)`` pairs."""
    refl = tuple(Reflector(f"t{i}", rcs, Trajectory.fixed(d)) for i, (d, rcs) in enumerate(targets))
    return Scene(refl, tuple(walls), cable, NoiseSpec(noise, 0), get_antenna(antenna))


_ACCEPTANCE = []


@pytest.fixture
def verdict(capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        with capsys.disabled():
            print("\n" + line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
