"""A stand-in for a trained model, runnable as an external command.

Usage: python toy_external_model.py INPUT.mocap.csv OUTPUT.spectro.csv

It reads MOCAP-CSV, treats every marker as an equal-strength scatterer (no
body-surface weighting) and writes a SPECTRO-CSV with the default framing.
"""

import sys

from mdaudit.mocap import RadarConfig, WeightTable, parse_mocap
from mdaudit.simulator import simulate_iq
from mdaudit.spectral import stft_spectrogram, write_spectrogram

src, dst = sys.argv[1:3]
with open(src) as fh:
    seq = parse_mocap(fh.read())
cfg = RadarConfig(fs_hz=seq.rate_hz, radar_pos=(0.0, 0.0, 1.0))
iq = simulate_iq(seq, cfg, WeightTable.uniform(seq.markers))
spec = stft_spectrogram(iq, cfg.fs_hz, 256, 32, 256)
with open(dst, "w") as fh:
    write_spectrogram(spec, fh)
print(f"toy model: {spec.n_frames} frames", file=sys.stderr)
