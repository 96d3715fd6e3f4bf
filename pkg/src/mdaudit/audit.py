"""Audit orchestration, four-way interpretation, JSON reports and spectrogram images."""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .adapter import Framing, ModelSpec, predict
from .errors import ConfigError, DataError, DegenerateFitError, InterventionInfeasibleError
from .kinematics import scale_velocity
from .metrics import DEFAULT_ALPHAS, DcsResult, dcs_sign, fit_alpha, fva
from .mocap import MoCapSequence, RadarConfig, WeightTable, resample
from .reference import reference_centroid
from .spectral import CentroidSeries, Spectrogram, centroid_trajectory, mae_db, n_frames

ACCURATE_CONSISTENT = "Accurate and physically consistent"
ACCURATE_UNGROUNDED = "Accurate but lacks physical grounding"
CONSISTENT_INACCURATE = "Physically consistent but inaccurate"
NEITHER = "Neither accurate nor physically grounded"
CONSISTENT_ONLY = "Physically consistent (accuracy not assessed)"
UNGROUNDED_ONLY = "Lacks physical grounding (accuracy not assessed)"


@dataclass(frozen=True)
class Thresholds:
    fva_high: float = 0.8
    dcs_high: float = 0.8
    mae_low_db: float = 6.0

    def __post_init__(self):
        for name in ("fva_high", "dcs_high"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ConfigError(f"{name} must lie in (0, 1), got {v}")
        if not self.mae_low_db > 0:
            raise ConfigError(f"mae_low_db must be positive, got {self.mae_low_db}")

    @classmethod
    def from_dict(cls, d) -> Thresholds:
        unknown = set(d) - {"fva_high", "dcs_high", "mae_low_db"}
        if unknown:
            raise ConfigError(f"unknown threshold key(s): {', '.join(sorted(unknown))}")
        return cls(**{k: float(v) for k, v in d.items()})


def interpret(mae, fva_value, dcs_value, th: Thresholds = Thresholds()) -> str:
    """Map (MAE, FVA, DCS) onto the four-way accuracy/physics classification.

    Physics counts as high only when both FVA and DCS clear their thresholds;
    NaN (an unavailable score) never clears a threshold.
    """
    physical = fva_value >= th.fva_high and dcs_value >= th.dcs_high
    if mae is None or (isinstance(mae, float) and math.isnan(mae)):
        return CONSISTENT_ONLY if physical else UNGROUNDED_ONLY
    accurate = mae <= th.mae_low_db
    if accurate:
        return ACCURATE_CONSISTENT if physical else ACCURATE_UNGROUNDED
    return CONSISTENT_INACCURATE if physical else NEITHER


def weights_digest(weights: WeightTable, markers) -> str:
    norm = weights.normalized()
    text = ";".join(f"{m}={norm.get(m, 0.0)!r}" for m in markers)
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class AuditReport:
    model: dict
    config: dict
    inputs: dict
    fva: float
    fva_degenerate: bool
    fva_rev: float | None
    fva_rev_degenerate: bool | None
    dcs: DcsResult | None
    dcs_sign: float | None
    mae_db: float | None
    label: str
    flags: dict
    warnings: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    # traces for CSV export; not part of the JSON report
    reference: CentroidSeries | None = None
    predicted: CentroidSeries | None = None
    reference_rev: CentroidSeries | None = None
    predicted_rev: CentroidSeries | None = None
    baseline_prediction: Spectrogram | None = None

    def to_dict(self) -> dict:
        metrics = {
            "mae_db": self.mae_db,
            "fva": self.fva,
            "dcs": None if self.dcs is None else self.dcs.score,
            "fva_rev": self.fva_rev,
            "dcs_sign": self.dcs_sign,
        }
        fits = [] if self.dcs is None else [
            {"alpha": a, "alpha_pred": p} for a, p in zip(self.dcs.alphas, self.dcs.alpha_preds)]
        return {
            "tool": {"name": "mdaudit", "version": __version__},
            "model": self.model,
            "config": self.config,
            "inputs": self.inputs,
            "metrics": metrics,
            "alpha_fits": fits,
            "flags": self.flags,
            "interpretation": self.label,
            "warnings": list(self.warnings),
            "diagnostics": list(self.diagnostics),
        }

    def to_json(self) -> str:
        return json.dumps(_clean(self.to_dict()), indent=2, allow_nan=False) + "\n"


def _clean(obj):
    """Fixed 12-significant-digit floats and JSON-safe values, recursively."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return None
        return float(f"{v:.12g}")
    return obj


def run_audit(model: ModelSpec, seq: MoCapSequence, cfg: RadarConfig, weights: WeightTable,
              alphas=DEFAULT_ALPHAS, framing=Framing(), truth: Spectrogram | None = None,
              thresholds: Thresholds = Thresholds(), max_workers: int = 1) -> AuditReport:
    """Score one model on one trial.

    Computes the baseline prediction and FVA against the physics reference,
    the alpha = -1 reversal (FVA-rev and DCS-sign), the alpha-grid fits for
    DCS, and MAE against ``truth`` when given. Alphas whose intervention is
    geometrically infeasible are dropped with a warning.
    """
    framing = Framing(*framing)
    warnings: list[str] = []
    flags: dict = {}
    inputs = {"markers": seq.n_markers, "samples_in": seq.n_samples, "rate_in_hz": seq.rate_hz}
    if abs(seq.rate_hz - cfg.fs_hz) > 1e-9 * cfg.fs_hz:
        seq = resample(seq, cfg.fs_hz)
    n_expected = n_frames(seq.n_samples, framing.win_len, framing.hop)
    inputs.update(samples=seq.n_samples, frames=n_expected, duration_s=seq.duration)

    radar_pos = cfg.resolve_radar_pos(seq)
    cfg = replace(cfg, radar_pos=tuple(float(v) for v in radar_pos))
    w = weights.vector(seq.markers)
    fixed = [m for m, wm in zip(seq.markers, w) if wm == 0]
    if fixed:
        warnings.append(f"zero-weight markers left unchanged by interventions: {', '.join(fixed)}")
    warnings.extend(weights.warnings)
    diagnostics: list = []

    def run(s: MoCapSequence, tag: str) -> CentroidSeries:
        log: list = []
        spec = predict(model, s, cfg, framing, weights=weights, baseline=seq, diagnostics=log)
        for entry in log:
            entry["call"] = tag
        diagnostics.extend(log)
        return spec

    ref = reference_centroid(seq, cfg, weights, framing.win_len, framing.hop)
    base_spec = run(seq, "baseline")
    base = centroid_trajectory(base_spec)
    fva_base = fva(base, ref)
    flags["fva_degenerate"] = fva_base.degenerate

    jobs = [("reverse", -1.0)] + [(f"alpha={a:g}", float(a)) for a in alphas]

    def job(item):
        tag, a = item
        try:
            s = scale_velocity(seq, radar_pos, a, fixed=fixed)
        except InterventionInfeasibleError as exc:
            return tag, a, None, None, str(exc)
        return tag, a, s, centroid_trajectory(run(s, tag)), None

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(job, jobs))
    else:
        results = [job(j) for j in jobs]
    # keep diagnostics in job order whatever the schedule
    order = {tag: i for i, (tag, _) in enumerate([("baseline", 0.0)] + jobs)}
    diagnostics.sort(key=lambda d: order.get(d["call"], len(order)))

    # velocity reversal
    _, _, rev_seq, rev_pred, rev_err = results[0]
    ref_rev = None
    if rev_err is not None:
        warnings.append(f"velocity reversal infeasible: {rev_err}")
        fva_rev = None
        sign_score = None
        flags["reversal_available"] = False
    else:
        ref_rev = reference_centroid(rev_seq, cfg, weights, framing.win_len, framing.hop)
        gap = float(np.max(np.abs(ref_rev.values + ref.values))) if len(ref) else 0.0
        flags["reversal_available"] = True
        flags["reversed_reference_max_gap_hz"] = gap
        fva_rev = fva(rev_pred, ref_rev)
        flags["fva_rev_degenerate"] = fva_rev.degenerate
        sign_score = dcs_sign(base, rev_pred)

    # alpha grid
    applied, fitted, dropped = [], [], []
    for tag, a, _, pred_c, err in results[1:]:
        if err is not None:
            warnings.append(f"dropped {tag}: {err}")
            dropped.append(a)
            continue
        try:
            fitted.append(fit_alpha(base, pred_c))
        except DegenerateFitError as exc:
            warnings.append(f"alpha fit impossible: {exc}")
            applied, fitted = [], []
            flags["alpha_fit_degenerate"] = True
            break
        applied.append(a)
    dcs_result = None
    if len(set(applied)) >= 2:
        dcs_result = DcsResult.from_fits(applied, fitted, sign_score)
    else:
        warnings.append("fewer than 2 usable scaling factors; DCS unavailable")
    flags["dcs_available"] = dcs_result is not None
    flags["dropped_alphas"] = dropped

    mae = None
    if truth is not None:
        if truth.frames.shape != base_spec.frames.shape or truth.framing != base_spec.framing:
            raise DataError(f"truth spectrogram {truth.frames.shape} with framing {truth.framing} "
                            f"does not match prediction {base_spec.frames.shape} / {base_spec.framing}")
        mae = mae_db(base_spec, truth)

    dcs_value = dcs_result.score if dcs_result is not None else float("nan")
    label = interpret(mae, fva_base.value, dcs_value, thresholds)

    config = {
        "carrier_hz": cfg.carrier_hz,
        "wavelength_m": cfg.wavelength_m,
        "fs_hz": cfg.fs_hz,
        "radar_pos": list(cfg.radar_pos),
        "win_len": framing.win_len,
        "hop": framing.hop,
        "fft_size": framing.fft_size,
        "alphas": [float(a) for a in alphas],
        "weights_sha256": weights_digest(weights, seq.markers),
        "thresholds": {"fva_high": thresholds.fva_high, "dcs_high": thresholds.dcs_high,
                       "mae_low_db": thresholds.mae_low_db,
                       "note": "threshold values are configurable decisions, not measured constants"},
    }
    return AuditReport(
        model=model.describe(), config=config, inputs=inputs,
        fva=fva_base.value, fva_degenerate=fva_base.degenerate,
        fva_rev=None if fva_rev is None else fva_rev.value,
        fva_rev_degenerate=None if fva_rev is None else fva_rev.degenerate,
        dcs=dcs_result, dcs_sign=sign_score, mae_db=mae, label=label, flags=flags,
        warnings=warnings, diagnostics=diagnostics,
        reference=ref, predicted=base, reference_rev=ref_rev, predicted_rev=rev_pred,
        baseline_prediction=base_spec)


def render_spectrogram(spec: Spectrogram, range_db) -> bytes:
    """8-bit binary PGM: one column per frame, highest frequency bin on top."""
    lo, hi = (float(v) for v in range_db)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ConfigError(f"invalid dB range {range_db!r}; need min < max")
    scaled = (spec.frames.T[::-1] - lo) / (hi - lo)
    gray = np.clip(np.rint(scaled * 255.0), 0, 255).astype(np.uint8)
    height, width = gray.shape
    return f"P5\n{width} {height}\n255\n".encode() + gray.tobytes()
