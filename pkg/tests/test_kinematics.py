import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mdaudit.errors import DegenerateGeometryError, InsufficientDataError, InterventionInfeasibleError
from mdaudit.kinematics import (ScalarSeries, doppler_frequency, marker_ranges, radial_velocity,
                                range_series, scale_velocity)
from mdaudit.mocap import MoCapSequence

from conftest import ray_marker

C = 299_792_458.0
LAMBDA = C / 5.8e9


def test_range_345():
    seq = MoCapSequence(10.0, ("A",), np.tile([3.0, 4.0, 0.0], (4, 1))[:, None, :])
    np.testing.assert_allclose(range_series(seq, 0, (0, 0, 0)).values, 5.0)


def test_range_degenerate():
    seq = MoCapSequence(10.0, ("A",), np.ones((3, 1, 3)))
    with pytest.raises(DegenerateGeometryError):
        range_series(seq, 0, (1, 1, 1))


def test_range_collinear():
    t = np.arange(3.0)
    through = MoCapSequence(1.0, ("A",), np.stack([t, 0 * t, 0 * t], 1)[:, None, :])
    with pytest.raises(DegenerateGeometryError):
        range_series(through, 0, (0, 0, 0))
    shifted = through.with_positions(through.positions + [1, 0, 0])
    np.testing.assert_allclose(range_series(shifted, 0, (0, 0, 0)).values, [1, 2, 3])


def test_velocity_affine_and_constant():
    dt = 1 / 256
    r = ScalarSeries(256.0, 1 + 0.5 * np.arange(20) * dt)
    np.testing.assert_allclose(radial_velocity(r).values[1:-1], 0.5, rtol=1e-12)
    np.testing.assert_array_equal(radial_velocity(ScalarSeries(256.0, np.full(5, 3.0))).values, 0.0)


def test_velocity_stencil_by_hand():
    # interior: (4-0)/2 = 2, (9-1)/2 = 4; ends: 1-0 = 1, 9-4 = 5
    v = radial_velocity(ScalarSeries(1.0, [0.0, 1.0, 4.0, 9.0])).values
    np.testing.assert_array_equal(v, [1.0, 2.0, 4.0, 5.0])


def test_velocity_needs_three():
    with pytest.raises(InsufficientDataError):
        radial_velocity(ScalarSeries(1.0, [0.0, 1.0]))


def test_doppler_values():
    assert abs(LAMBDA - 0.051688) < 1e-6
    f = doppler_frequency(ScalarSeries(256.0, np.ones(4)), LAMBDA).values
    np.testing.assert_allclose(f, 2 / LAMBDA)
    assert abs(f[0] - 38.693) < 1e-3
    np.testing.assert_allclose(doppler_frequency(ScalarSeries(256.0, -np.ones(4)), LAMBDA).values,
                               -f)
    np.testing.assert_array_equal(doppler_frequency(ScalarSeries(256.0, np.zeros(4)), LAMBDA).values,
                                  0.0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=30), st.floats(-5, 5))
def test_doppler_linear(v, a):
    v = np.array(v)
    lhs = doppler_frequency(ScalarSeries(1.0, a * v), LAMBDA).values
    rhs = a * doppler_frequency(ScalarSeries(1.0, v), LAMBDA).values
    # equal up to one rounding of each product
    np.testing.assert_allclose(lhs, rhs, rtol=1e-15, atol=1e-300)


def random_smooth(seed, n_markers=4, n=600, rate=256.0):
    """Markers wandering smoothly 3-8 m from the origin."""
    rng = np.random.default_rng(seed)
    t = np.arange(n) / rate
    pos = np.empty((n, n_markers, 3))
    for m in range(n_markers):
        base = rng.uniform(-1, 1, 3)
        base = base / np.linalg.norm(base) * rng.uniform(3, 8)
        for c in range(3):
            amp, freq, ph = rng.uniform(0.05, 0.4), rng.uniform(0.2, 2.0), rng.uniform(0, 6.3)
            pos[:, m, c] = base[c] + amp * np.sin(2 * np.pi * freq * t + ph) + rng.uniform(-.3, .3) * t
    return MoCapSequence(rate, tuple(f"M{m}" for m in range(n_markers)), pos)


def velocities(seq, radar):
    r = marker_ranges(seq, radar)
    return np.stack([radial_velocity(ScalarSeries(seq.rate_hz, r[:, m])).values
                     for m in range(seq.n_markers)], 1)


def test_scale_identity_and_freeze():
    seq = random_smooth(0)
    radar = np.zeros(3)
    assert np.max(np.abs(scale_velocity(seq, radar, 1.0).positions - seq.positions)) <= 1e-12
    frozen = scale_velocity(seq, radar, 0.0)
    r = marker_ranges(frozen, radar)
    np.testing.assert_allclose(r, np.broadcast_to(r[0], r.shape), atol=1e-12)
    assert np.max(np.abs(velocities(frozen, radar))) < 1e-9


def test_scale_receding_ray():
    seq = ray_marker(1.0, r0=2.0, duration=3.0, rate=10.0)
    out = scale_velocity(seq, (0, 0, 0), 0.5)
    t = np.arange(seq.n_samples) / 10.0
    np.testing.assert_allclose(marker_ranges(out, (0, 0, 0))[:, 0], 2 + 0.5 * t, atol=1e-12)
    ratio = velocities(out, (0, 0, 0)) / velocities(seq, (0, 0, 0))
    np.testing.assert_allclose(ratio, 0.5, atol=1e-9)


def test_scale_infeasible_reports_marker():
    seq = ray_marker(1.0, r0=1.0, duration=3.0, rate=10.0, name="LANK")
    with pytest.raises(InterventionInfeasibleError) as exc:
        scale_velocity(seq, (0, 0, 0), -1.0)
    assert exc.value.marker == "LANK"
    assert exc.value.sample == 10  # scaled range 1 - t hits 0 at t = 1 s


def test_scale_fixed_markers_untouched():
    seq = random_smooth(3)
    out = scale_velocity(seq, np.zeros(3), 0.3, fixed=["M1"])
    np.testing.assert_array_equal(out.positions[:, 1], seq.positions[:, 1])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([round(0.1 * k, 1) for k in range(1, 11)]))
def test_scaling_law(seed, alpha):
    seq = random_smooth(seed)
    radar = np.zeros(3)
    v = velocities(seq, radar)
    vs = velocities(scale_velocity(seq, radar, alpha), radar)
    err = np.abs(vs - alpha * v)[1:-1]
    assert np.all(err <= 1e-6 * np.maximum(np.abs(alpha * v[1:-1]), 1e-6))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 1.0), st.floats(0.1, 1.0))
def test_composition(seed, a, b):
    seq = random_smooth(seed)
    radar = np.zeros(3)
    twice = scale_velocity(scale_velocity(seq, radar, a), radar, b)
    once = scale_velocity(seq, radar, a * b)
    assert np.max(np.abs(marker_ranges(twice, radar) - marker_ranges(once, radar))) < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(-1.0, 1.0))
def test_bearing_preserved(seed, alpha):
    seq = random_smooth(seed)
    radar = np.array([0.5, -0.2, 0.1])
    try:
        out = scale_velocity(seq, radar, alpha)
    except InterventionInfeasibleError:
        return
    u0 = seq.positions - radar
    u1 = out.positions - radar
    u0 /= np.linalg.norm(u0, axis=2, keepdims=True)
    u1 /= np.linalg.norm(u1, axis=2, keepdims=True)
    assert np.max(np.abs(u0 - u1)) < 1e-12
