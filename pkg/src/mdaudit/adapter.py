"""Uniform prediction interface over built-in and external models.

External models are plain executables. For each call the adapter writes the
MoCap input to ``{input}`` (MOCAP-CSV v1) inside a fresh temporary
directory, runs the command template, and expects a SPECTRO-CSV v1 file at
``{output}``. Exit status 0 means success.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from typing import NamedTuple

from .errors import AuditError, ConfigError, ModelInvocationError
from .mocap import MoCapSequence, RadarConfig, WeightTable, default_weights, write_mocap
from .simulator import CONTROL_KINDS, NoiseParams, control_model, simulate_iq
from .spectral import Spectrogram, n_frames, parse_spectrogram, stft_spectrogram

MODEL_KINDS = ("oracle",) + CONTROL_KINDS + ("external",)
STDERR_TAIL = 2000


class Framing(NamedTuple):
    win_len: int = 256
    hop: int = 32
    fft_size: int = 256


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    command_template: str | None = None
    timeout_s: float = 300.0
    noise: NoiseParams | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}; expected one of {MODEL_KINDS}")
        if self.kind == "external":
            tpl = self.command_template or ""
            missing = [p for p in ("{input}", "{output}") if p not in tpl]
            if missing:
                raise ConfigError(f"external command template lacks {' and '.join(missing)}")
        if not self.timeout_s > 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout_s}")

    def describe(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "external":
            d["command_template"] = self.command_template
            d["timeout_s"] = self.timeout_s
        if self.kind == "shuffle":
            d["seed"] = self.seed
        if self.noise is not None and self.noise.snr_db is not None:
            d["snr_db"] = self.noise.snr_db
            d["noise_seed"] = self.noise.seed
        return d


def oracle_spectrogram(seq, cfg, weights, framing: Framing, noise=None) -> Spectrogram:
    iq = simulate_iq(seq, cfg, weights, noise)
    return stft_spectrogram(iq, cfg.fs_hz, framing.win_len, framing.hop, framing.fft_size)


def predict(model: ModelSpec, seq: MoCapSequence, cfg: RadarConfig,
            framing: Framing = Framing(), *, weights: WeightTable | None = None,
            baseline: MoCapSequence | None = None, diagnostics: list | None = None) -> Spectrogram:
    """Predicted spectrogram for ``seq`` (already at ``cfg.fs_hz``).

    The controls are deliberately input-blind: they transform the oracle
    spectrogram of ``baseline`` (default: ``seq`` itself) and so ignore any
    intervention applied to ``seq``. ``weights`` set the oracle's scatterer
    amplitudes; ``diagnostics`` collects external stdout/stderr if given.
    """
    framing = Framing(*framing)
    if abs(seq.rate_hz - cfg.fs_hz) > 1e-9 * cfg.fs_hz:
        raise ConfigError(f"sequence rate {seq.rate_hz} Hz differs from radar rate {cfg.fs_hz} Hz")
    if model.kind == "external":
        return _run_external(model, seq, cfg, framing, diagnostics)
    if weights is None:
        weights = default_weights(seq.markers)
    if model.kind == "oracle":
        return oracle_spectrogram(seq, cfg, weights, framing, model.noise)
    truth = oracle_spectrogram(baseline if baseline is not None else seq,
                               cfg, weights, framing, model.noise)
    return control_model(model.kind, truth, model.seed)


def _substitute(template: str, input_path: str, output_path: str) -> list[str]:
    return [tok.replace("{input}", input_path).replace("{output}", output_path)
            for tok in shlex.split(template)]


def _tail(text: str) -> str:
    return text[-STDERR_TAIL:]


def _run_external(model, seq, cfg, framing, diagnostics):
    with tempfile.TemporaryDirectory(prefix="mdaudit-") as work:
        in_path = os.path.join(work, "input.mocap.csv")
        out_path = os.path.join(work, "output.spectro.csv")
        with open(in_path, "w") as fh:
            write_mocap(seq, fh)
        args = _substitute(model.command_template, in_path, out_path)
        try:
            proc = subprocess.run(args, capture_output=True, text=True,
                                  timeout=model.timeout_s, cwd=work)
        except subprocess.TimeoutExpired as exc:
            raise ModelInvocationError(
                f"model timed out after {model.timeout_s:g} s: {args[0]}",
                _decode(exc.stdout), _decode(exc.stderr)) from None
        except OSError as exc:
            raise ModelInvocationError(f"cannot run model command {args[0]!r}: {exc}") from None
        if diagnostics is not None:
            diagnostics.append({"command": args, "returncode": proc.returncode,
                                "stdout": _tail(proc.stdout), "stderr": _tail(proc.stderr)})
        if proc.returncode != 0:
            raise ModelInvocationError(
                f"model exited with status {proc.returncode}; stderr tail:\n{_tail(proc.stderr)}",
                proc.stdout, proc.stderr)
        if not os.path.exists(out_path):
            raise ModelInvocationError("model did not create its output file",
                                       proc.stdout, proc.stderr)
        try:
            with open(out_path) as fh:
                spec = parse_spectrogram(fh)
        except AuditError as exc:
            raise ModelInvocationError(f"malformed model output: {exc}",
                                       proc.stdout, proc.stderr) from None

    expected = (cfg.fs_hz, framing.fft_size, framing.win_len, framing.hop)
    if spec.framing != expected:
        raise ModelInvocationError(
            f"model output framing (fs, bins, win, hop) = {spec.framing}, expected {expected}")
    n = n_frames(seq.n_samples, framing.win_len, framing.hop)
    if spec.n_frames != n:
        raise ModelInvocationError(f"model output has {spec.n_frames} frames, expected {n}")
    return spec


def _decode(data) -> str:
    if data is None:
        return ""
    if isinstance(data, bytes):
        return data.decode(errors="replace")
    return data
