"""STFT spectrograms, Doppler frequency axis, centroids and frame averaging.

Spectrogram values are power in dB, ``10*log10(max(|X|^2, 1e-12))``, with
bin 0 at ``-fs/2`` (zero frequency centered at bin ``F/2``).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, InsufficientDataError, ParseError

POWER_FLOOR = 1e-12
FLOOR_DB = -120.0


def n_frames(n_samples: int, win_len: int, hop: int) -> int:
    if n_samples < win_len:
        raise InsufficientDataError(
            f"{n_samples} samples is shorter than one window of {win_len} "
            f"(need T >= L; frames = floor((T - L)/H) + 1)")
    return (n_samples - win_len) // hop + 1


def _check_framing(win_len, hop, fft_size=None):
    if win_len <= 0 or hop <= 0:
        raise ConfigError(f"window and hop must be positive, got L={win_len}, H={hop}")
    if fft_size is not None and fft_size < win_len:
        raise ConfigError(f"FFT size {fft_size} is smaller than window {win_len}")


@dataclass(frozen=True)
class Spectrogram:
    """N x F power-dB matrix plus the framing that produced it."""

    frames: np.ndarray
    fs_hz: float
    fft_size: int
    win_len: int
    hop: int

    def __post_init__(self):
        frames = np.array(self.frames, dtype=float)
        if frames.ndim != 2 or frames.shape[1] != self.fft_size:
            raise DataError(f"frames must be N x {self.fft_size}, got shape {frames.shape}")
        if not np.all(np.isfinite(frames)):
            raise DataError("spectrogram contains NaN or Inf")
        if not self.fs_hz > 0:
            raise ConfigError(f"fs must be positive, got {self.fs_hz}")
        _check_framing(self.win_len, self.hop)
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "fs_hz", float(self.fs_hz))
        for name in ("fft_size", "win_len", "hop"):
            object.__setattr__(self, name, int(getattr(self, name)))

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def framing(self) -> tuple:
        return (self.fs_hz, self.fft_size, self.win_len, self.hop)

    @property
    def freqs(self) -> np.ndarray:
        return frequency_axis(self.fft_size, self.fs_hz)

    def replace_frames(self, frames) -> Spectrogram:
        return Spectrogram(frames, self.fs_hz, self.fft_size, self.win_len, self.hop)


@dataclass(frozen=True)
class CentroidSeries:
    """Per-frame Doppler centroid (Hz) with the STFT framing it lives on."""

    values: np.ndarray
    fs_hz: float
    win_len: int
    hop: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise DataError(f"centroid series must be 1-D, got shape {vals.shape}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "fs_hz", float(self.fs_hz))

    def __len__(self):
        return len(self.values)

    def __neg__(self):
        return CentroidSeries(-self.values, self.fs_hz, self.win_len, self.hop)

    @property
    def framing(self) -> tuple:
        return (self.fs_hz, self.win_len, self.hop)

    def frame_times(self, t0: float = 0.0) -> np.ndarray:
        """Center time of each frame's window."""
        n = np.arange(len(self.values))
        return t0 + (n * self.hop + self.win_len / 2.0) / self.fs_hz


def frequency_axis(fft_size: int, fs: float) -> np.ndarray:
    """``f_k = (k - F/2) * fs / F`` for k = 0..F-1."""
    if fft_size <= 0 or fft_size % 2:
        raise ConfigError(f"FFT size must be a positive even number, got {fft_size}")
    if not fs > 0:
        raise ConfigError(f"fs must be positive, got {fs}")
    return (np.arange(fft_size) - fft_size // 2) * (fs / fft_size)


def hann(win_len: int) -> np.ndarray:
    """Periodic Hann window."""
    n = np.arange(win_len)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / win_len)


def stft_spectrogram(iq, fs: float, win_len: int = 256, hop: int = 32,
                     fft_size: int = 256) -> Spectrogram:
    """Power-dB spectrogram of a complex baseband signal.

    Each window has its complex mean subtracted before the Hann taper, and
    is zero-padded to ``fft_size`` when that exceeds ``win_len``.
    """
    iq = np.asarray(iq, dtype=complex)
    if iq.ndim != 1:
        raise DataError(f"I/Q signal must be 1-D, got shape {iq.shape}")
    _check_framing(win_len, hop, fft_size)
    frequency_axis(fft_size, fs)
    n = n_frames(len(iq), win_len, hop)
    starts = np.arange(n) * hop
    windows = iq[starts[:, None] + np.arange(win_len)]
    windows = windows - windows.mean(axis=1, keepdims=True)
    windows *= hann(win_len)
    spec = np.fft.fftshift(np.fft.fft(windows, n=fft_size, axis=1), axes=1)
    power = spec.real ** 2 + spec.imag ** 2
    return Spectrogram(10.0 * np.log10(np.maximum(power, POWER_FLOOR)), fs, fft_size, win_len, hop)


def centroid_trajectory(spec: Spectrogram) -> CentroidSeries:
    """Power-weighted mean frequency of every frame."""
    f = spec.freqs
    # shifting each row by its max leaves the ratio unchanged and avoids overflow
    s = spec.frames - spec.frames.max(axis=1, keepdims=True)
    p = 10.0 ** (s / 10.0)
    total = p.sum(axis=1)
    if np.any(total <= 0):
        raise DataError("frame with zero total power")
    return CentroidSeries(p @ f / total, spec.fs_hz, spec.win_len, spec.hop)


def frame_average(series, win_len: int, hop: int, fs: float | None = None) -> CentroidSeries:
    """Mean of ``series`` over each STFT window.

    ``series`` may be a ScalarSeries (its rate is used) or a plain array, in
    which case ``fs`` is recorded as the framing rate.
    """
    values = np.asarray(getattr(series, "values", series), dtype=float)
    rate = getattr(series, "rate_hz", fs)
    _check_framing(win_len, hop)
    n = n_frames(len(values), win_len, hop)
    starts = np.arange(n) * hop
    out = values[starts[:, None] + np.arange(win_len)].sum(axis=1) / win_len
    return CentroidSeries(out, rate if rate is not None else float("nan"), win_len, hop)


def mae_db(a: Spectrogram, b: Spectrogram) -> float:
    """Mean absolute dB difference between two spectrograms on the same framing."""
    if a.frames.shape != b.frames.shape:
        raise DataError(f"spectrogram shapes differ: {a.frames.shape} vs {b.frames.shape}")
    if a.framing != b.framing:
        raise DataError(f"spectrogram framing differs: {a.framing} vs {b.framing}")
    return float(np.mean(np.abs(a.frames - b.frames)))


# SPECTRO-CSV v1

def write_spectrogram(spec: Spectrogram, stream=None) -> str | None:
    """Serialize to SPECTRO-CSV v1 using shortest round-trip decimals."""
    out = io.StringIO() if stream is None else stream
    out.write(f"#SPECTRO v1,frames={spec.n_frames},bins={spec.fft_size},fs={spec.fs_hz!r},"
              f"win={spec.win_len},hop={spec.hop},scale=power_db,floor_db={FLOOR_DB:g}\n")
    for row in spec.frames:
        out.write(",".join(repr(float(v)) for v in row) + "\n")
    if stream is None:
        return out.getvalue()
    return None


_SPECTRO_KEYS = ("frames", "bins", "fs", "win", "hop", "scale", "floor_db")


def parse_spectrogram(text) -> Spectrogram:
    if isinstance(text, str):
        text = io.StringIO(text)
    rows = []
    meta = None
    for lineno, raw in enumerate(text, start=1):
        s = raw.strip()
        if not s:
            continue
        if meta is None:
            parts = [p.strip() for p in s.split(",")]
            if parts[0] != "#SPECTRO v1":
                raise ParseError(f"expected '#SPECTRO v1' header, got {parts[0]!r}", lineno)
            meta = {}
            for p in parts[1:]:
                key, sep, value = p.partition("=")
                if not sep:
                    raise ParseError(f"malformed header field {p!r}", lineno)
                meta[key] = value
            missing = [k for k in _SPECTRO_KEYS if k not in meta]
            if missing:
                raise ParseError(f"header lacks {', '.join(missing)}", lineno)
            if meta["scale"] != "power_db":
                raise ParseError(f"unsupported scale {meta['scale']!r}", lineno)
            try:
                n, f = int(meta["frames"]), int(meta["bins"])
                fs, win, hop = float(meta["fs"]), int(meta["win"]), int(meta["hop"])
            except ValueError as exc:
                raise ParseError(f"bad header value: {exc}", lineno) from None
            continue
        cells = s.split(",")
        if len(cells) != f:
            raise ParseError(f"expected {f} values, got {len(cells)}", lineno)
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            raise ParseError("non-numeric value", lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError("NaN or infinite value", lineno)
        rows.append(vals)
    if meta is None:
        raise ParseError("empty input", 1)
    if len(rows) != n:
        raise ParseError(f"header declares {n} frames, found {len(rows)}")
    return Spectrogram(np.array(rows, dtype=float).reshape(n, f), fs, f, win, hop)
