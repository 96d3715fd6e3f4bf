import numpy as np
import pytest

from mdaudit.mocap import MoCapSequence, RadarConfig, default_weights, resample
from mdaudit.simulator import DEFAULT_RADAR_POS, WalkerParams, synth_walker

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def cfg():
    return RadarConfig(carrier_hz=5.8e9, fs_hz=256.0, radar_pos=DEFAULT_RADAR_POS)


@pytest.fixture(scope="session")
def short_walker(cfg):
    """10 s walker at the radar rate; enough for 73 frames."""
    params = WalkerParams(duration_s=10.0, pass_distance_m=2.0)
    return resample(synth_walker(params, 250.0, cfg.radar_pos), cfg.fs_hz)


@pytest.fixture(scope="session")
def walker_weights(short_walker):
    return default_weights(short_walker.markers)


def ray_marker(speed, r0=5.0, duration=4.0, rate=256.0, direction=(1.0, 0.0, 0.0),
               origin=(0.0, 0.0, 0.0), name="TORSO"):
    """One marker moving along a ray from ``origin`` at constant radial speed."""
    t = np.arange(int(duration * rate) + 1) / rate
    u = np.asarray(direction, float) / np.linalg.norm(direction)
    pos = np.asarray(origin, float) + np.outer(r0 + speed * t, u)
    return MoCapSequence(rate, (name,), pos[:, None, :])
