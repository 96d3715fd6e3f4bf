"""Per-marker range, radial velocity and Doppler frequency; velocity interventions.

Sign convention: radial velocity is d(range)/dt, positive when the marker
recedes from the radar, and the Doppler frequency is ``2 v / wavelength``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (ConfigError, DegenerateGeometryError, InsufficientDataError,
                     InterventionInfeasibleError)
from .mocap import MoCapSequence

# ranges below this are treated as "marker sits on the radar"
MIN_RANGE_M = 1e-12


@dataclass(frozen=True)
class ScalarSeries:
    rate_hz: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise ValueError(f"values must be 1-D, got shape {vals.shape}")
        if not self.rate_hz > 0:
            raise ValueError(f"rate_hz must be positive, got {self.rate_hz}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("series contains NaN or Inf")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    @property
    def dt(self) -> float:
        return 1.0 / self.rate_hz


def marker_ranges(seq: MoCapSequence, radar_pos) -> np.ndarray:
    """T x M matrix of marker-to-radar distances."""
    radar_pos = np.asarray(radar_pos, dtype=float).reshape(1, 1, 3)
    return np.linalg.norm(seq.positions - radar_pos, axis=2)


def _check_ranges(r: np.ndarray, markers) -> None:
    bad = np.argwhere(r <= MIN_RANGE_M)
    if bad.size:
        t, m = bad[0]
        raise DegenerateGeometryError(
            f"marker {markers[m]!r} coincides with the radar at sample {t}")


def range_series(seq: MoCapSequence, marker: int, radar_pos) -> ScalarSeries:
    if not -seq.n_markers <= marker < seq.n_markers:
        raise IndexError(f"marker index {marker} out of range for {seq.n_markers} markers")
    r = marker_ranges(seq, radar_pos)[:, marker]
    _check_ranges(r[:, None], [seq.markers[marker]])
    return ScalarSeries(seq.rate_hz, r)


def central_difference(values: np.ndarray, dt: float) -> np.ndarray:
    """Central differences along axis 0, one-sided at the two ends."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] < 3:
        raise InsufficientDataError(f"differencing needs at least 3 samples, got {values.shape[0]}")
    out = np.empty_like(values)
    out[1:-1] = (values[2:] - values[:-2]) / (2.0 * dt)
    out[0] = (values[1] - values[0]) / dt
    out[-1] = (values[-1] - values[-2]) / dt
    return out


def radial_velocity(r: ScalarSeries) -> ScalarSeries:
    return ScalarSeries(r.rate_hz, central_difference(r.values, r.dt))


def doppler_frequency(v: ScalarSeries, wavelength_m: float) -> ScalarSeries:
    if not wavelength_m > 0:
        raise ConfigError(f"wavelength must be positive, got {wavelength_m}")
    return ScalarSeries(v.rate_hz, 2.0 * v.values / wavelength_m)


def scale_velocity(seq: MoCapSequence, radar_pos, alpha: float, *, fixed=()) -> MoCapSequence:
    """Scale every marker's radial velocity by ``alpha``, keeping its bearing.

    Each marker is moved along its own line of sight so that its range
    becomes ``r(0) + alpha * (r(t) - r(0))``. Tangential motion is untouched,
    so the angular position seen from the radar is preserved. Markers named
    in ``fixed`` (e.g. the radar housing markers) are copied unchanged.
    """
    radar_pos = np.asarray(radar_pos, dtype=float)
    moving = np.array([m not in fixed for m in seq.markers])
    offsets = seq.positions[:, moving] - radar_pos
    names = [m for m in seq.markers if m not in fixed]
    r = np.linalg.norm(offsets, axis=2)
    _check_ranges(r, names)
    if alpha == 1.0:
        return seq
    r_new = r[0] + alpha * (r - r[0])
    bad = np.argwhere(r_new <= MIN_RANGE_M)
    if bad.size:
        t, m = bad[0]
        raise InterventionInfeasibleError(
            f"alpha={alpha:g} drives marker {names[m]!r} through the radar "
            f"at sample {t} (scaled range {r_new[t, m]:.4g} m)", marker=names[m], sample=int(t))
    positions = seq.positions.copy()
    positions[:, moving] = radar_pos + offsets * (r_new / r)[:, :, None]
    return seq.with_positions(positions)
