"""Command-line entry point: ``mdaudit simulate|reference|audit|metrics``.

Exit status: 0 success, 2 usage error, 3 data error, 4 model-invocation error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys

from .adapter import MODEL_KINDS, Framing, ModelSpec
from .audit import Thresholds, render_spectrogram, run_audit
from .errors import ConfigError, DataError, ModelInvocationError
from .metrics import DEFAULT_ALPHAS, fva
from .mocap import (RadarConfig, default_weights_text, load_weights, parse_mocap, resample,
                    write_mocap)
from .reference import read_centroid_csv, reference_centroid, write_centroid_csv
from .simulator import DEFAULT_RADAR_POS, NoiseParams, WalkerParams, simulate_iq, synth_walker
from .spectral import (CentroidSeries, centroid_trajectory, mae_db, parse_spectrogram,
                       stft_spectrogram, write_spectrogram)

log = logging.getLogger("mdaudit")

EXIT_USAGE, EXIT_DATA, EXIT_MODEL = 2, 3, 4


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _load_json(path: str) -> dict:
    try:
        data = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return data


def _radar_config(path: str | None) -> RadarConfig:
    return RadarConfig() if path is None else RadarConfig.from_dict(_load_json(path))


def _weights(path: str | None, markers):
    text = default_weights_text() if path is None else _read(path)
    table = load_weights(text, markers)
    for w in table.warnings:
        log.warning(w)
    return table


def _alphas(text: str):
    try:
        return tuple(float(a) for a in text.split(",") if a.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha list {text!r}") from None


def _write(path: str, content, mode="w"):
    with open(path, mode) as fh:
        fh.write(content)


def cmd_simulate(args) -> int:
    params = WalkerParams(speed_mps=args.speed, heading_rad=args.heading, stride_hz=args.stride,
                          duration_s=args.duration, seed=args.seed, limb_amp_m=args.limb_amp)
    cfg = RadarConfig(carrier_hz=args.carrier, fs_hz=args.fs, radar_pos=DEFAULT_RADAR_POS)
    mocap = synth_walker(params, args.mocap_rate, cfg.radar_pos)
    at_fs = resample(mocap, cfg.fs_hz)
    weights = load_weights(default_weights_text(), at_fs.markers)
    noise = NoiseParams(args.snr_db, args.seed) if args.snr_db is not None else None
    iq = simulate_iq(at_fs, cfg, weights, noise)
    truth = stft_spectrogram(iq, cfg.fs_hz, args.win, args.hop, args.fft)

    os.makedirs(args.out_dir, exist_ok=True)
    with open(os.path.join(args.out_dir, "mocap.csv"), "w") as fh:
        write_mocap(mocap, fh)
    with open(os.path.join(args.out_dir, "iq.csv"), "w") as fh:
        fh.write("t,i,q\n")
        for t, z in zip(at_fs.times, iq):
            fh.write(f"{float(t)!r},{float(z.real)!r},{float(z.imag)!r}\n")
    with open(os.path.join(args.out_dir, "truth.spectro.csv"), "w") as fh:
        write_spectrogram(truth, fh)
    _write(os.path.join(args.out_dir, "radar.json"), json.dumps(cfg.to_dict(), indent=2) + "\n")
    print(f"wrote {mocap.n_samples} MoCap samples, {len(iq)} I/Q samples and "
          f"{truth.n_frames} spectrogram frames to {args.out_dir}")
    return 0


def cmd_reference(args) -> int:
    cfg = _radar_config(args.radar_config)
    seq = resample(parse_mocap(_read(args.mocap)), cfg.fs_hz)
    ref = reference_centroid(seq, cfg, _weights(args.weights, seq.markers), args.win, args.hop)
    text = write_centroid_csv(ref, t0=seq.t0)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        _write(args.out, text)
    return 0


def cmd_audit(args) -> int:
    cfg = _radar_config(args.radar_config)
    mocap_text = _read(args.mocap)
    seq = parse_mocap(mocap_text)
    weights = _weights(args.weights, seq.markers)
    thresholds = Thresholds() if args.thresholds is None else Thresholds.from_dict(
        _load_json(args.thresholds))
    truth = parse_spectrogram(_read(args.truth)) if args.truth else None
    noise = NoiseParams(args.snr_db, args.seed) if args.snr_db is not None else None
    model = ModelSpec(args.model, args.cmd, args.timeout, noise, args.seed)
    framing = Framing(args.win, args.hop, args.fft)

    report = run_audit(model, seq, cfg, weights, args.alphas, framing, truth, thresholds,
                       max_workers=args.workers)
    report.inputs["mocap_file"] = os.path.basename(args.mocap)
    report.inputs["mocap_sha256"] = hashlib.sha256(mocap_text.encode()).hexdigest()
    if args.truth:
        report.inputs["truth_file"] = os.path.basename(args.truth)

    os.makedirs(args.out_dir, exist_ok=True)
    _write(os.path.join(args.out_dir, "report.json"), report.to_json())
    traces = {"reference_centroid.csv": report.reference,
              "predicted_centroid.csv": report.predicted,
              "reference_rev_centroid.csv": report.reference_rev,
              "predicted_rev_centroid.csv": report.predicted_rev}
    for name, series in traces.items():
        if series is not None:
            _write(os.path.join(args.out_dir, name), write_centroid_csv(series, t0=seq.t0))
    if args.images:
        pred = report.baseline_prediction
        top = float(pred.frames.max())
        _write(os.path.join(args.out_dir, "prediction.pgm"),
               render_spectrogram(pred, (top - args.dynamic_range, top)), "wb")
        if truth is not None:
            top = float(truth.frames.max())
            _write(os.path.join(args.out_dir, "truth.pgm"),
                   render_spectrogram(truth, (top - args.dynamic_range, top)), "wb")

    d = report.to_dict()["metrics"]
    fmt = lambda v: "n/a" if v is None else f"{v:.4f}"
    print(f"MAE_dB={fmt(d['mae_db'])} FVA={fmt(d['fva'])} DCS={fmt(d['dcs'])} "
          f"FVA_rev={fmt(d['fva_rev'])} DCS_sign={fmt(d['dcs_sign'])}")
    print(report.label)
    return 0


def cmd_metrics(args) -> int:
    pred = parse_spectrogram(_read(args.pred))
    pred_c = centroid_trajectory(pred)
    ref = read_centroid_csv(_read(args.ref_centroid))
    if len(ref) != len(pred_c):
        raise DataError(f"reference has {len(ref)} frames, prediction has {len(pred_c)}")
    result = fva(pred_c, CentroidSeries(ref, pred.fs_hz, pred.win_len, pred.hop))
    out = {"frames": len(ref), "fva": result.value, "fva_degenerate": result.degenerate}
    if args.truth:
        out["mae_db"] = mae_db(pred, parse_spectrogram(_read(args.truth)))
    print(json.dumps(out, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mdaudit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def framing(sp, fft=True):
        sp.add_argument("--win", type=int, default=256, help="STFT window length L")
        sp.add_argument("--hop", type=int, default=32, help="STFT hop H")
        if fft:
            sp.add_argument("--fft", type=int, default=256, help="FFT size F")

    s = sub.add_parser("simulate", help="synthetic walker MoCap, oracle I/Q and truth spectrogram")
    s.add_argument("--speed", type=float, default=1.2, help="walking speed, m/s")
    s.add_argument("--heading", type=float, default=0.0, help="walking direction, radians")
    s.add_argument("--stride", type=float, default=1.8, help="gait frequency, Hz")
    s.add_argument("--duration", type=float, default=60.0, help="trial length, s")
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--snr-db", type=float, default=None, help="add white noise at this SNR")
    s.add_argument("--limb-amp", type=float, default=0.15, help="limb swing amplitude, m")
    s.add_argument("--mocap-rate", type=float, default=250.0, help="MoCap sample rate, Hz")
    s.add_argument("--carrier", type=float, default=5.8e9, help="carrier frequency, Hz")
    s.add_argument("--fs", type=float, default=256.0, help="radar sample rate, Hz")
    s.add_argument("--out-dir", required=True)
    framing(s)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reference", help="physics reference centroid trace from MoCap")
    r.add_argument("--mocap", required=True)
    r.add_argument("--radar-config")
    r.add_argument("--weights", help="BSA weight config (default: bundled rule of nines)")
    r.add_argument("--out", help="output CSV (default stdout)")
    framing(r, fft=False)
    r.set_defaults(func=cmd_reference)

    a = sub.add_parser("audit", help="score a model with FVA, DCS and their variants")
    a.add_argument("--mocap", required=True)
    a.add_argument("--model", choices=MODEL_KINDS, default="oracle")
    a.add_argument("--cmd", help="external command template with {input} and {output}")
    a.add_argument("--timeout", type=float, default=300.0, help="seconds per external call")
    a.add_argument("--alphas", type=_alphas, default=DEFAULT_ALPHAS,
                   help="comma-separated scaling factors (default 0.1..1.0)")
    a.add_argument("--radar-config")
    a.add_argument("--weights")
    a.add_argument("--truth", help="ground-truth SPECTRO-CSV for MAE_dB")
    a.add_argument("--thresholds", help="JSON with fva_high, dcs_high, mae_low_db")
    a.add_argument("--seed", type=int, default=0, help="seed for shuffle control and noise")
    a.add_argument("--snr-db", type=float, default=None, help="oracle noise level")
    a.add_argument("--workers", type=int, default=1, help="concurrent model calls")
    a.add_argument("--out-dir", required=True)
    a.add_argument("--images", action="store_true", help="also write PGM spectrogram images")
    a.add_argument("--dynamic-range", type=float, default=80.0, help="image dB range")
    framing(a)
    a.set_defaults(func=cmd_audit)

    m = sub.add_parser("metrics", help="FVA (and MAE) for precomputed artifacts")
    m.add_argument("--pred", required=True, help="predicted SPECTRO-CSV")
    m.add_argument("--ref-centroid", required=True, help="reference centroid CSV")
    m.add_argument("--truth", help="ground-truth SPECTRO-CSV for MAE_dB")
    m.set_defaults(func=cmd_metrics)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "model", None) == "external" and not args.cmd:
        parser.error("--model external requires --cmd")
    try:
        return args.func(args)
    except ModelInvocationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
