"""
DRR targeting and decay-time check
==================================

The tail scale is solved so the measured DRR hits its target exactly. The
decay time is a byproduct; here both are measured over a batch of random
scenes.
"""

import numpy as np

from hybridrir import SamplerConfig, SynthConfig, generate_dataset
from hybridrir.analysis import estimate_t60, measure_drr, schroeder_edc

cfg = SynthConfig()
records = list(generate_dataset(SamplerConfig(rooms=50, constellations_per_room=2, seed=3), cfg))

# DRR: relative error between measurement and target, every RIR.
rel = [abs(measure_drr(r.samples, r.n_d, cfg.drr_window) - r.target_drr) / r.target_drr
       for rec in records for r in rec.rirs]
print(f"DRR: max relative error over {len(rel)} RIRs = {max(rel):.2e}")

# T60: Schroeder integration, line fit between -5 and -35 dB.
t60_err = []
for rec in records:
    r = rec.rirs[0]
    est = estimate_t60(schroeder_edc(r.samples, r.fs))
    t60_err.append((est - rec.scene.room.t60) / rec.scene.room.t60)
t60_err = np.array(t60_err)
print(f"T60: median |error| {np.median(np.abs(t60_err)):.1%}, "
      f"within 10% for {np.mean(np.abs(t60_err) <= 0.1):.0%} of scenes")

# The misses are overestimates for strong direct paths: the image-source part
# adds energy to the top of the decay curve while the tail is still fading in.
eta = np.array([rec.rirs[0].target_drr for rec in records])
miss = np.abs(t60_err) > 0.1
if miss.any():
    print(f"median target DRR, misses: {np.median(eta[miss]):.2f}  hits: {np.median(eta[~miss]):.2f}")
