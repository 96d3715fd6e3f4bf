"""Negative controls: plausible-looking spectrograms that ignore the physics.

Each control starts from the true spectrogram of the unmodified walk. It
therefore has realistic texture, yet it cannot follow an intervention on
the input motion. The scores should expose each one.
"""

from mdaudit.adapter import Framing, ModelSpec, oracle_spectrogram
from mdaudit.audit import run_audit
from mdaudit.mocap import RadarConfig, default_weights, resample
from mdaudit.simulator import WalkerParams, synth_walker

cfg = RadarConfig(carrier_hz=5.8e9, fs_hz=256.0, radar_pos=(0.0, 0.0, 1.0))
seq = resample(synth_walker(WalkerParams(duration_s=60.0), 250.0, cfg.radar_pos), cfg.fs_hz)
weights = default_weights(seq.markers)
truth = oracle_spectrogram(seq, cfg, weights, Framing())

print(f"{'model':9s} {'MAE_dB':>7s} {'FVA':>7s} {'DCS':>8s} {'DCS_sign':>8s}  label")
for kind in ("oracle", "constant", "shuffle", "flip"):
    r = run_audit(ModelSpec(kind, seed=3), seq, cfg, weights, truth=truth)
    sign = "n/a" if r.dcs_sign is None else f"{r.dcs_sign:.3f}"
    flag = "*" if r.fva_degenerate else " "
    print(f"{kind:9s} {r.mae_db:7.2f} {r.fva:7.3f}{flag}{r.dcs.score:8.3f} {sign:>8s}  {r.label}")
print("* FVA undefined for a constant trajectory; reported as 0")

# a constant predictor fits alpha = 1 everywhere, so its DCS is fixed by the grid:
# 1 - sum((a - 1)^2) / sum((a - mean a)^2) over a = 0.1..1.0
