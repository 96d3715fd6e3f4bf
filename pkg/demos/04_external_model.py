"""Auditing a model that lives in another process.

Any executable that reads a MOCAP-CSV file and writes a SPECTRO-CSV file can
be audited. Here the "model" is toy_external_model.py, called once for the
baseline, once for the velocity reversal and once per scaling factor.
"""

import os
import shlex
import sys

from mdaudit.adapter import ModelSpec
from mdaudit.audit import run_audit
from mdaudit.mocap import RadarConfig, default_weights
from mdaudit.simulator import WalkerParams, synth_walker

here = os.path.dirname(os.path.abspath(__file__))
template = f"{shlex.quote(sys.executable)} {shlex.quote(os.path.join(here, 'toy_external_model.py'))} {{input}} {{output}}"

cfg = RadarConfig(carrier_hz=5.8e9, fs_hz=256.0, radar_pos=(0.0, 0.0, 1.0))
mocap = synth_walker(WalkerParams(duration_s=20.0), 250.0, cfg.radar_pos)
model = ModelSpec("external", template, timeout_s=60)

report = run_audit(model, mocap, cfg, default_weights(mocap.markers),
                   alphas=(0.25, 0.5, 0.75, 1.0), max_workers=4)
print(f"{len(report.diagnostics)} model calls:", [d["call"] for d in report.diagnostics])
print(f"FVA {report.fva:.4f}  DCS {report.dcs.score:.4f}  DCS_sign {report.dcs_sign:.4f}")
print(report.label)
print("\nfirst lines of the JSON report:")
print("\n".join(report.to_json().splitlines()[:12]))
