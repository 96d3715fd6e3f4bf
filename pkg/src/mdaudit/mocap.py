"""Motion-capture sequences: parsing, resampling, radar position, BSA weights.

MOCAP-CSV v1 layout::

    #MOCAP v1,rate=250,units=m
    t,HEAD_x,HEAD_y,HEAD_z,...
    0.000,0.12,3.0,1.65,...

Positions are in meters, times in seconds.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, InsufficientDataError, ParseError

SPEED_OF_LIGHT = 299_792_458.0
RADAR_PREFIX = "RADAR"


@dataclass(frozen=True)
class MoCapSequence:
    """T x M x 3 marker trajectories sampled at ``rate_hz``."""

    rate_hz: float
    markers: tuple[str, ...]
    positions: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        markers = tuple(self.markers)
        if not (self.rate_hz > 0 and math.isfinite(self.rate_hz)):
            raise ParseError(f"rate must be positive, got {self.rate_hz}")
        if pos.ndim != 3 or pos.shape[2] != 3:
            raise ParseError(f"positions must be T x M x 3, got shape {pos.shape}")
        if pos.shape[1] != len(markers):
            raise ParseError(f"{len(markers)} marker names for {pos.shape[1]} markers")
        if len(set(markers)) != len(markers):
            dup = sorted({m for m in markers if markers.count(m) > 1})
            raise ParseError(f"duplicate marker name(s): {', '.join(dup)}")
        if not np.all(np.isfinite(pos)):
            raise ParseError("positions contain NaN or Inf")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "markers", markers)
        object.__setattr__(self, "rate_hz", float(self.rate_hz))
        object.__setattr__(self, "t0", float(self.t0))

    @property
    def n_samples(self) -> int:
        return self.positions.shape[0]

    @property
    def n_markers(self) -> int:
        return self.positions.shape[1]

    @property
    def duration(self) -> float:
        return (self.n_samples - 1) / self.rate_hz

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.n_samples) / self.rate_hz

    def index(self, name: str) -> int:
        try:
            return self.markers.index(name)
        except ValueError:
            raise KeyError(f"no marker named {name!r}") from None

    def select(self, names: Iterable[str]) -> MoCapSequence:
        idx = [self.index(n) for n in names]
        return MoCapSequence(self.rate_hz, tuple(self.markers[i] for i in idx),
                             self.positions[:, idx, :], self.t0)

    def with_positions(self, positions) -> MoCapSequence:
        return MoCapSequence(self.rate_hz, self.markers, positions, self.t0)


@dataclass(frozen=True)
class RadarConfig:
    carrier_hz: float = 5.8e9
    fs_hz: float = 256.0
    radar_pos: tuple[float, float, float] | None = None

    def __post_init__(self):
        if not self.carrier_hz > 0:
            raise ConfigError(f"carrier_hz must be positive, got {self.carrier_hz}")
        if not self.fs_hz > 0:
            raise ConfigError(f"fs_hz must be positive, got {self.fs_hz}")
        if self.radar_pos is not None:
            pos = tuple(float(v) for v in self.radar_pos)
            if len(pos) != 3 or not all(math.isfinite(v) for v in pos):
                raise ConfigError(f"radar_pos must be three finite floats, got {self.radar_pos}")
            object.__setattr__(self, "radar_pos", pos)

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    def resolve_radar_pos(self, seq: MoCapSequence, prefix: str = RADAR_PREFIX) -> np.ndarray:
        """Explicit ``radar_pos`` if set, otherwise the mean of the radar markers."""
        if self.radar_pos is not None:
            return np.array(self.radar_pos)
        return radar_position(seq, prefix)

    def to_dict(self) -> dict:
        out = {"carrier_hz": self.carrier_hz, "fs_hz": self.fs_hz}
        if self.radar_pos is not None:
            out["radar_pos"] = list(self.radar_pos)
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> RadarConfig:
        unknown = set(d) - {"carrier_hz", "fs_hz", "radar_pos"}
        if unknown:
            raise ConfigError(f"unknown radar config key(s): {', '.join(sorted(unknown))}")
        try:
            return cls(carrier_hz=float(d.get("carrier_hz", 5.8e9)),
                       fs_hz=float(d.get("fs_hz", 256.0)),
                       radar_pos=d.get("radar_pos"))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad radar config: {exc}") from exc


@dataclass(frozen=True)
class WeightTable:
    """Per-marker nonnegative scattering weights (BSA percentages)."""

    entries: Mapping[str, float]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        entries = {str(k): float(v) for k, v in self.entries.items()}
        for name, w in entries.items():
            if not (w >= 0 and math.isfinite(w)):
                raise ConfigError(f"weight for {name!r} must be finite and >= 0, got {w}")
        if not any(w > 0 for w in entries.values()):
            raise ConfigError("weight table needs at least one positive weight")
        object.__setattr__(self, "entries", entries)

    def normalized(self) -> dict[str, float]:
        total = math.fsum(self.entries.values())
        return {k: v / total for k, v in self.entries.items()}

    def vector(self, markers: Sequence[str]) -> np.ndarray:
        """Raw weights in marker order; markers missing from the table get 0."""
        return np.array([self.entries.get(m, 0.0) for m in markers], dtype=float)

    @classmethod
    def uniform(cls, markers: Sequence[str]) -> WeightTable:
        return cls({m: 1.0 for m in markers})


def _parse_header(line: str, lineno: int) -> dict[str, str]:
    parts = [p.strip() for p in line.split(",")]
    if parts[0] != "#MOCAP v1":
        raise ParseError(f"expected '#MOCAP v1' header, got {parts[0]!r}", lineno)
    meta = {}
    for p in parts[1:]:
        key, sep, value = p.partition("=")
        if not sep:
            raise ParseError(f"malformed header field {p!r}", lineno)
        meta[key.strip()] = value.strip()
    return meta


def parse_mocap(text) -> MoCapSequence:
    """Parse MOCAP-CSV v1 from a string or text stream."""
    if isinstance(text, str):
        text = io.StringIO(text)
    lines = iter(enumerate(text, start=1))

    def next_line():
        for lineno, raw in lines:
            s = raw.strip()
            if s:
                return lineno, s
        return None, None

    lineno, first = next_line()
    if first is None:
        raise ParseError("empty input", 1)
    meta = _parse_header(first, lineno)
    if "rate" not in meta:
        raise ParseError("header lacks rate=", lineno)
    try:
        rate = float(meta["rate"])
    except ValueError:
        raise ParseError(f"rate {meta['rate']!r} is not a number", lineno) from None
    if not (rate > 0 and math.isfinite(rate)):
        raise ParseError(f"rate must be positive, got {rate}", lineno)
    units = meta.get("units")
    if units != "m":
        raise ParseError(f"units must be 'm', got {units!r}", lineno)

    lineno, header = next_line()
    if header is None:
        raise ParseError("missing column header", (lineno or 1) + 1)
    cols = [c.strip() for c in header.split(",")]
    if cols[0] != "t" or (len(cols) - 1) % 3 != 0 or len(cols) < 4:
        raise ParseError("column header must be 't' followed by x,y,z triplets", lineno)
    markers = []
    for i in range(1, len(cols), 3):
        trip = cols[i:i + 3]
        name = trip[0][:-2]
        if not name or [c[-2:] for c in trip] != ["_x", "_y", "_z"] or any(c[:-2] != name for c in trip):
            raise ParseError(f"malformed marker columns {trip}", lineno)
        if name in markers:
            raise ParseError(f"duplicate marker name {name!r}", lineno)
        markers.append(name)
    if "markers" in meta:
        try:
            declared = int(meta["markers"])
        except ValueError:
            raise ParseError(f"markers={meta['markers']!r} is not an integer", 1) from None
        if declared != len(markers):
            raise ParseError(f"header declares {declared} markers, columns give {len(markers)}", lineno)

    times, rows = [], []
    for lineno, raw in lines:
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        cells = s.split(",")
        if len(cells) != len(cols):
            raise ParseError(f"expected {len(cols)} fields, got {len(cells)}", lineno)
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            bad = next(c for c in cells if not _is_float(c))
            raise ParseError(f"non-numeric value {bad.strip()!r}", lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError("NaN or infinite value", lineno)
        times.append(vals[0])
        rows.append(vals[1:])
    if not rows:
        raise ParseError("no data rows", lineno)

    positions = np.array(rows).reshape(len(rows), len(markers), 3)
    return MoCapSequence(rate, tuple(markers), positions, t0=times[0])


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def write_mocap(seq: MoCapSequence, stream=None) -> str | None:
    """Serialize to MOCAP-CSV v1. Returns the text when ``stream`` is None."""
    out = io.StringIO() if stream is None else stream
    out.write(f"#MOCAP v1,rate={seq.rate_hz!r},units=m\n")
    cols = ["t"] + [f"{m}_{c}" for m in seq.markers for c in "xyz"]
    out.write(",".join(cols) + "\n")
    flat = seq.positions.reshape(seq.n_samples, -1)
    for t, row in zip(seq.times, flat):
        out.write(repr(float(t)) + "," + ",".join(repr(float(v)) for v in row) + "\n")
    if stream is None:
        return out.getvalue()
    return None


def resample(seq: MoCapSequence, target_hz: float) -> MoCapSequence:
    """Linearly interpolate every coordinate onto a ``target_hz`` grid.

    The output starts at ``seq.t0`` and has ``floor(duration * target_hz) + 1``
    samples, so it never extrapolates past the last input sample.
    """
    if seq.n_samples < 2:
        raise InsufficientDataError(f"resampling needs at least 2 samples, got {seq.n_samples}")
    if not target_hz > 0:
        raise ConfigError(f"target rate must be positive, got {target_hz}")
    if target_hz == seq.rate_hz:
        return seq
    # tolerance absorbs durations like 0.99999999 s that should count as 1 s
    n_out = int(math.floor(seq.duration * target_hz + 1e-9)) + 1
    src_t = np.arange(seq.n_samples) / seq.rate_hz
    dst_t = np.minimum(np.arange(n_out) / target_hz, src_t[-1])
    flat = seq.positions.reshape(seq.n_samples, -1)
    out = np.empty((n_out, flat.shape[1]))
    for j in range(flat.shape[1]):
        out[:, j] = np.interp(dst_t, src_t, flat[:, j])
    return MoCapSequence(float(target_hz), seq.markers, out.reshape(n_out, seq.n_markers, 3), seq.t0)


def radar_position(seq: MoCapSequence, prefix: str = RADAR_PREFIX) -> np.ndarray:
    """Mean over time and over every marker whose name starts with ``prefix``."""
    idx = [i for i, m in enumerate(seq.markers) if m.startswith(prefix)]
    if not idx:
        raise ConfigError(f"no marker name starts with {prefix!r}; supply radar_pos explicitly")
    return seq.positions[:, idx, :].reshape(-1, 3).mean(axis=0)


def load_weights(text, markers: Sequence[str]) -> WeightTable:
    """Build per-marker weights from a segment/marker config.

    Each segment's percentage is split evenly over the markers of ``markers``
    mapped to it. Markers not mapped in the file get weight 0 and are listed
    in ``WeightTable.warnings``.
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    segments: dict[str, float] = {}
    assignment: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text, start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        parts = [p.strip() for p in s.split(",")]
        if len(parts) != 3:
            raise ConfigError(f"line {lineno}: expected 3 fields, got {len(parts)}")
        kind, name, value = parts
        if kind == "segment":
            try:
                pct = float(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: percentage {value!r} is not a number") from None
            if not (pct >= 0 and math.isfinite(pct)):
                raise ConfigError(f"line {lineno}: segment {name!r} has invalid percentage {pct}")
            if name in segments:
                raise ConfigError(f"line {lineno}: segment {name!r} defined twice")
            segments[name] = pct
        elif kind == "marker":
            if name in assignment:
                raise ConfigError(f"line {lineno}: marker {name!r} assigned twice")
            assignment[name] = (value, lineno)
        else:
            raise ConfigError(f"line {lineno}: unknown directive {kind!r}")

    for name, (seg, lineno) in assignment.items():
        if seg not in segments:
            raise ConfigError(f"line {lineno}: marker {name!r} references unknown segment {seg!r}")

    present = [m for m in markers if m in assignment]
    counts: dict[str, int] = {}
    for m in present:
        counts[assignment[m][0]] = counts.get(assignment[m][0], 0) + 1
    entries = {}
    warnings = []
    for m in markers:
        if m in assignment:
            seg = assignment[m][0]
            entries[m] = segments[seg] / counts[seg]
        else:
            entries[m] = 0.0
            warnings.append(f"marker {m!r} has no weight entry; using 0")
    return WeightTable(entries, tuple(warnings))


def default_weights_text() -> str:
    """Rule-of-nines table for the synthetic walker's markers."""
    return resources.files("mdaudit").joinpath("data/walker_bsa.cfg").read_text()


def default_weights(markers: Sequence[str]) -> WeightTable:
    return load_weights(default_weights_text(), markers)
