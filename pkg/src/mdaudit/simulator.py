"""Synthetic walker, coherent point-scatterer radar oracle, and negative controls.

Phase convention: each scatterer contributes ``exp(+j 4 pi r / wavelength)``,
so a receding marker (dr/dt > 0) shows up at a *positive* Doppler frequency
``2 (dr/dt) / wavelength``. Most radar texts use the opposite sign; this one
matches the reference centroid, which is what the metrics compare against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .kinematics import _check_ranges, marker_ranges
from .mocap import MoCapSequence, RadarConfig, WeightTable
from .spectral import Spectrogram

WALKER_MARKERS = ("HEAD", "CLAV", "STRN", "C7", "T10", "SACR", "LWRA", "RWRA", "LANK", "RANK")
DEFAULT_RADAR_POS = (0.0, 0.0, 1.0)

# body-frame offsets: (along heading, to the left, up) relative to the torso center
_OFFSETS = {
    "HEAD": (0.0, 0.0, 0.65),
    "CLAV": (0.10, 0.0, 0.40),
    "STRN": (0.12, 0.0, 0.20),
    "C7": (-0.10, 0.0, 0.50),
    "T10": (-0.12, 0.0, 0.20),
    "SACR": (-0.10, 0.0, -0.05),
    "LWRA": (0.0, 0.22, -0.20),
    "RWRA": (0.0, -0.22, -0.20),
    "LANK": (0.0, 0.10, -0.90),
    "RANK": (0.0, -0.10, -0.90),
}
# gait phase of each swinging limb: arms opposite to legs, left opposite to right
_LIMB_PHASE = {"LANK": 0.0, "RANK": math.pi, "LWRA": math.pi, "RWRA": 0.0}


@dataclass(frozen=True)
class WalkerParams:
    speed_mps: float = 1.2
    heading_rad: float = 0.0
    stride_hz: float = 1.8
    duration_s: float = 60.0
    seed: int = 42
    limb_amp_m: float = 0.15
    pass_distance_m: float = 3.0
    torso_height_m: float = 1.0

    def __post_init__(self):
        if not self.duration_s > 0:
            raise ConfigError(f"duration must be positive, got {self.duration_s}")
        if not self.stride_hz > 0:
            raise ConfigError(f"stride frequency must be positive, got {self.stride_hz}")
        if not self.limb_amp_m >= 0:
            raise ConfigError(f"limb amplitude must be >= 0, got {self.limb_amp_m}")


@dataclass(frozen=True)
class NoiseParams:
    snr_db: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.snr_db is not None and not math.isfinite(self.snr_db):
            raise ConfigError(f"snr_db must be finite, got {self.snr_db}")


def synth_walker(params: WalkerParams, rate_hz: float = 250.0,
                 radar_pos=DEFAULT_RADAR_POS) -> MoCapSequence:
    """Walker crossing in front of the radar along a straight line.

    The path passes ``pass_distance_m`` to the left of the radar (in the
    horizontal plane) halfway through the trial, so the bulk radial velocity
    sweeps from approaching to receding. The seed only sets the gait phase.
    """
    if not rate_hz > 0:
        raise ConfigError(f"rate must be positive, got {rate_hz}")
    n = int(math.floor(params.duration_s * rate_hz + 1e-9)) + 1
    t = np.arange(n) / rate_hz
    heading = np.array([math.cos(params.heading_rad), math.sin(params.heading_rad), 0.0])
    left = np.array([-heading[1], heading[0], 0.0])
    up = np.array([0.0, 0.0, 1.0])
    radar = np.asarray(radar_pos, dtype=float)

    start = np.array([radar[0], radar[1], 0.0]) + params.pass_distance_m * left
    center = (start + params.torso_height_m * up
              + np.outer(params.speed_mps * (t - params.duration_s / 2.0), heading))

    phase0 = np.random.default_rng(params.seed).uniform(0.0, 2.0 * math.pi)
    positions = np.empty((n, len(WALKER_MARKERS), 3))
    for j, name in enumerate(WALKER_MARKERS):
        a, l, u = _OFFSETS[name]
        along = np.full(n, a)
        if name in _LIMB_PHASE:
            along = along + params.limb_amp_m * np.sin(
                2.0 * math.pi * params.stride_hz * t + phase0 + _LIMB_PHASE[name])
        positions[:, j] = center + np.outer(along, heading) + l * left + u * up
    return MoCapSequence(float(rate_hz), WALKER_MARKERS, positions)


def simulate_iq(seq: MoCapSequence, cfg: RadarConfig, weights: WeightTable,
                noise: NoiseParams | None = None) -> np.ndarray:
    """Coherent sum of point scatterers, one per weighted marker."""
    w = weights.vector(seq.markers)
    keep = np.flatnonzero(w > 0)
    if keep.size == 0:
        raise ConfigError("all markers in the sequence have zero weight")
    w = w[keep] / w[keep].sum()
    r = marker_ranges(seq, cfg.resolve_radar_pos(seq))[:, keep]
    _check_ranges(r, [seq.markers[i] for i in keep])
    phase = (4.0 * math.pi / cfg.wavelength_m) * r
    iq = np.exp(1j * phase) @ w
    if noise is not None and noise.snr_db is not None:
        iq = iq + complex_noise(len(iq), float(np.mean(np.abs(iq) ** 2)), noise)
    return iq


def complex_noise(n: int, signal_power: float, noise: NoiseParams) -> np.ndarray:
    """Circular white Gaussian noise at ``noise.snr_db`` below ``signal_power``.

    Philox is counter-based, so a given seed yields the same stream no matter
    how the caller schedules work.
    """
    power = signal_power / 10.0 ** (noise.snr_db / 10.0)
    rng = np.random.Generator(np.random.Philox(key=noise.seed))
    z = rng.standard_normal((n, 2))
    return math.sqrt(power / 2.0) * (z[:, 0] + 1j * z[:, 1])


CONTROL_KINDS = ("constant", "shuffle", "flip")


def control_model(kind: str, truth: Spectrogram, seed: int = 0) -> Spectrogram:
    """Physics-violating stand-ins built from a ground-truth spectrogram.

    constant: every frame is the per-bin mean of ``truth``.
    shuffle: frames permuted with a seeded permutation.
    flip: frequency axis reversed within each frame.
    """
    frames = truth.frames
    if kind == "constant":
        mean = frames.mean(axis=0)
        out = np.broadcast_to(mean, frames.shape)
    elif kind == "shuffle":
        out = frames[np.random.default_rng(seed).permutation(frames.shape[0])]
    elif kind == "flip":
        out = frames[:, ::-1]
    else:
        raise ConfigError(f"unknown control kind {kind!r}; expected one of {CONTROL_KINDS}")
    return truth.replace_frames(out)
