"""Physics reference: BSA-weighted Doppler centroid computed from MoCap alone."""

from __future__ import annotations

import csv
import io
from dataclasses import replace

import numpy as np

from .errors import ConfigError, ParseError
from .kinematics import (ScalarSeries, _check_ranges, central_difference, marker_ranges,
                         scale_velocity)
from .mocap import MoCapSequence, RadarConfig, WeightTable
from .spectral import CentroidSeries, frame_average


def weighted_doppler(seq: MoCapSequence, cfg: RadarConfig, weights: WeightTable) -> ScalarSeries:
    """Per-sample weighted mean of the marker Doppler frequencies."""
    w = weights.vector(seq.markers)
    keep = np.flatnonzero(w > 0)
    if keep.size == 0:
        raise ConfigError("all markers in the sequence have zero weight")
    w = w[keep] / w[keep].sum()
    r = marker_ranges(seq, cfg.resolve_radar_pos(seq))[:, keep]
    _check_ranges(r, [seq.markers[i] for i in keep])
    v = central_difference(r, 1.0 / seq.rate_hz)
    f = 2.0 * v / cfg.wavelength_m
    return ScalarSeries(seq.rate_hz, f @ w)


def reference_centroid(seq: MoCapSequence, cfg: RadarConfig, weights: WeightTable,
                       win_len: int = 256, hop: int = 32) -> CentroidSeries:
    """Frame-synchronized reference Doppler centroid.

    ``seq`` must already be sampled at ``cfg.fs_hz``. Aggregation over markers
    happens per sample, before averaging over each STFT window.
    """
    if abs(seq.rate_hz - cfg.fs_hz) > 1e-9 * cfg.fs_hz:
        raise ConfigError(f"sequence rate {seq.rate_hz} Hz differs from radar rate "
                          f"{cfg.fs_hz} Hz; resample first")
    return frame_average(weighted_doppler(seq, cfg, weights), win_len, hop)


def reversed_reference(seq: MoCapSequence, cfg: RadarConfig, weights: WeightTable,
                       win_len: int = 256, hop: int = 32, *, via: str = "intervention") -> CentroidSeries:
    """Reference centroid for the velocity-reversed sequence.

    ``via="intervention"`` recomputes the reference on the alpha=-1 sequence;
    ``via="negation"`` negates the baseline reference. The two agree to
    rounding error whenever the intervention is feasible.
    """
    if via == "negation":
        return -reference_centroid(seq, cfg, weights, win_len, hop)
    if via != "intervention":
        raise ValueError(f"via must be 'intervention' or 'negation', got {via!r}")
    radar_pos = cfg.resolve_radar_pos(seq)
    w = weights.vector(seq.markers)
    fixed = [m for m, wm in zip(seq.markers, w) if wm == 0]
    flipped = scale_velocity(seq, radar_pos, -1.0, fixed=fixed)
    pinned = replace(cfg, radar_pos=tuple(radar_pos))
    return reference_centroid(flipped, pinned, weights, win_len, hop)


def write_centroid_csv(series: CentroidSeries, stream=None, t0: float = 0.0) -> str | None:
    """``frame,time_s,centroid_hz`` with one row per STFT frame."""
    out = io.StringIO() if stream is None else stream
    out.write("frame,time_s,centroid_hz\n")
    for n, (t, v) in enumerate(zip(series.frame_times(t0), series.values)):
        out.write(f"{n},{float(t)!r},{float(v)!r}\n")
    if stream is None:
        return out.getvalue()
    return None


def read_centroid_csv(text) -> np.ndarray:
    """Centroid values (Hz) from a ``frame,time_s,centroid_hz`` file."""
    if isinstance(text, str):
        text = io.StringIO(text)
    reader = csv.reader(text)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["frame", "time_s", "centroid_hz"]:
        raise ParseError("expected header 'frame,time_s,centroid_hz'", 1)
    values = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", lineno)
        try:
            frame, value = int(row[0]), float(row[2])
        except ValueError:
            raise ParseError("non-numeric value", lineno) from None
        if frame != len(values):
            raise ParseError(f"frame index {frame} out of sequence", lineno)
        values.append(value)
    return np.array(values)
