"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also collected in the "acceptance criteria" section of the summary.
"""

import json
import math
import time

import numpy as np
import pytest

from conftest import mirror_images
from hybridrir.analysis import estimate_t60, measure_drr, schroeder_edc
from hybridrir.cli import main
from hybridrir.core import Room, SynthConfig
from hybridrir.errors import InfeasibleDrrError
from hybridrir.ism import enumerate_images, render_early
from hybridrir.sampler import SamplerConfig, generate_dataset, sample_constellation, sample_room
from hybridrir.signals import AudioClip, render_mics, stft_features
from hybridrir.synth import drr_augment, synthesize, synthesize_ism_only
from hybridrir.tail import critical_distance, decay_rate, fade_window

CFG = SynthConfig()


@pytest.fixture(scope="module")
def records_1000():
    start = time.perf_counter()
    recs = list(generate_dataset(SamplerConfig(rooms=100, constellations_per_room=10, seed=101), CFG))
    return recs, time.perf_counter() - start


def test_c1_drr_targeting(records_1000, criterion):
    recs, elapsed = records_1000
    rel = np.array([abs(measure_drr(r.samples, r.n_d, CFG.drr_window) - r.target_drr) / r.target_drr
                    for rec in recs for r in rec.rirs])
    ok = len(recs) == 1000 and rel.max() < 1e-6 and elapsed < 120
    criterion(ok, "C1 DRR targeting",
              f"{len(recs)} scenes ({rel.size} RIRs), max rel err {rel.max():.2e} (< 1e-6), "
              f"{elapsed:.1f} s (< 120 s)")
    assert ok


def _t60_errors(recs):
    err = []
    for rec in recs:
        r = rec.rirs[0]
        est = estimate_t60(schroeder_edc(r.samples, r.fs))
        err.append(abs(est - rec.scene.room.t60) / rec.scene.room.t60)
    return np.array(err)


def test_c2_t60_fidelity(criterion):
    recs = list(generate_dataset(SamplerConfig(rooms=200, constellations_per_room=1, seed=202), CFG))
    err = _t60_errors(recs)
    share = float(np.mean(err <= 0.10))
    ok = len(recs) == 200 and share >= 0.90
    criterion(ok, "C2 T60 fidelity",
              f"{share:.1%} of {len(recs)} scenes within +-10% (need >= 90%), "
              f"median err {np.median(err):.1%}")
    assert ok


def test_t60_median_error_invariant(records_1000):
    # batch-level invariant, separate from C2: median Schroeder-T30 error stays under 10 %
    err = _t60_errors(records_1000[0])
    assert np.median(err) < 0.10


def test_c3_critical_distance(criterion):
    d_c = critical_distance(Room(6, 6, 2.4, 0.6), alpha=3.0, beta=1.0)
    rel = abs(d_c - 1.17259) / 1.17259
    ok = rel < 1e-4
    criterion(ok, "C3 critical distance", f"d_c = {d_c:.6f} m, rel err {rel:.1e} (< 1e-4)")
    assert ok


def test_c4_image_count_oracle(criterion):
    rng = np.random.default_rng(404)
    mismatches = 0
    for _ in range(100):
        room = sample_room(rng)
        src = sample_constellation(room, rng).source
        for order in range(5):
            images = enumerate_images(room, src, order)
            got = {tuple(np.round(i.position, 9)): i.order for i in images}
            counts = np.bincount([i.order for i in images], minlength=order + 1)
            expected = [1] + [4 * o * o + 2 for o in range(1, order + 1)]
            if (len(got) != len(images) or got != mirror_images(room.dims, src.position, order)
                    or counts.tolist() != expected):
                mismatches += 1
    ok = mismatches == 0
    criterion(ok, "C4 image count oracle", f"{mismatches} mismatches over 100 rooms x K=0..4")
    assert ok


def test_c5_direct_path_delay(criterion):
    rng = np.random.default_rng(505)
    direct_cfg = SynthConfig(image_order=0)
    bad = 0
    for _ in range(1000):
        scene = sample_constellation(sample_room(rng), rng)
        for m in range(2):
            expected = round(scene.mic_distance(m) * CFG.fs / CFG.speed_of_sound)
            early = render_early(scene.room, scene, m, direct_cfg)
            if early.n_d != expected or int(np.argmax(np.abs(early.samples))) != expected:
                bad += 1
    ok = bad == 0
    criterion(ok, "C5 direct-path delay", f"{bad} of 2000 mic paths off round(d fs / c)")
    assert ok


def test_c6_fade_window_boundaries(criterion):
    worst = 0.0
    for t60 in (0.2, 0.45, 0.7):
        for kappa in (0.5, 1.0, 2.0):
            delta = decay_rate(t60)
            n_d = 137
            span = CFG.fs / (kappa * delta)
            vals = fade_window(np.array([n_d, n_d + span, n_d + 2 * span]), n_d, delta, kappa, CFG.fs)
            worst = max(worst, float(np.max(np.abs(vals - [0.0, 0.5, 1.0]))))
    ok = worst <= 1e-12
    criterion(ok, "C6 fade window boundaries", f"max deviation {worst:.1e} (<= 1e-12)")
    assert ok


def _violations(scene, cfg):
    dims = scene.room.dims
    margin = np.array([cfg.wall_margin, cfg.wall_margin, cfg.vertical_margin]) - 1e-12
    out = []
    for name, p in [("source", scene.source.position), ("mic0", scene.mics.positions[0]),
                    ("mic1", scene.mics.positions[1])]:
        p = np.asarray(p)
        if np.any(p < margin) or np.any(p > dims - margin):
            out.append(f"{name} margin")
    if not cfg.d_min <= scene.d <= cfg.d_max:
        out.append("distance")
    if abs(scene.mics.spacing - cfg.mic_spacing) > 1e-9:
        out.append("spacing")
    r = scene.room
    if not (5 <= r.length <= 7 and 5 <= r.width <= 7 and 2.4 <= r.height <= 3.0 and 0.2 <= r.t60 <= 0.7):
        out.append("room")
    if not -15 - 1e-9 <= math.degrees(scene.source.look_elevation) <= 15 + 1e-9:
        out.append("look elevation")
    return out


def test_c7_sampler_constraint_audit(criterion):
    cfg = SamplerConfig()
    rng = np.random.default_rng(707)
    failures = []
    for _ in range(10_000):
        failures += _violations(sample_constellation(sample_room(rng, cfg), rng, cfg), cfg)
    ok = not failures
    criterion(ok, "C7 sampler constraint audit",
              f"{10_000 - len(failures)}/10000 scenes satisfy all constraints"
              + (f" (first: {failures[0]})" if failures else ""))
    assert ok


def test_c8_determinism(tmp_path, criterion):
    cfg = tmp_path / "c8.yaml"
    cfg.write_text("sampler:\n  rooms: 10\n  constellations_per_room: 10\n  seed: 808\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["generate", "--config", str(cfg), "--out", str(a), "--workers", "1"]) == 0
    assert main(["generate", "--manifest", str(a / "manifest.json"), "--out", str(b),
                 "--workers", "2"]) == 0
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    same_bytes = all((a / f).read_bytes() == (b / f).read_bytes() for f in ma["checksums"])
    ok = ma["records"] == 100 and ma["checksums"] == mb["checksums"] and same_bytes
    criterion(ok, "C8 determinism",
              f"{ma['records']} records, {len(ma['checksums'])} checksums identical across "
              f"workers=1 and workers=2: {ma['checksums'] == mb['checksums'] and same_bytes}")
    assert ok


def test_c9_feature_contract(records_1000, criterion):
    rng = np.random.default_rng(909)
    worst_unit, worst_ild = 0.0, 0.0
    for rec in records_1000[0][:20]:
        clip = AudioClip(rng.standard_normal(int(1.2 * CFG.fs)), CFG.fs)
        snr = float(rng.uniform(40, 60))
        seed = int(rng.integers(2**32))
        raw = render_mics(rec.rirs, clip, snr, 1.0, np.random.default_rng(seed), normalize=False)
        norm = render_mics(rec.rirs, clip, snr, 1.0, np.random.default_rng(seed), normalize=True)
        ratio_raw = np.sum(raw[0].samples ** 2) / np.sum(raw[1].samples ** 2)
        ratio_norm = np.sum(norm[0].samples ** 2) / np.sum(norm[1].samples ** 2)
        worst_ild = max(worst_ild, abs(ratio_norm - ratio_raw) / ratio_raw)
        assert max(np.max(np.abs(c.samples)) for c in norm) == pytest.approx(1.0)
        feats = stft_features(norm).values
        for ch in range(2):
            mag, s, c = feats[3 * ch:3 * ch + 3]
            nz = mag > 0
            worst_unit = max(worst_unit, float(np.max(np.abs(s[nz] ** 2 + c[nz] ** 2 - 1))))
    ok = worst_unit <= 1e-6 and worst_ild <= 1e-9
    criterion(ok, "C9 feature contract",
              f"max |sin^2+cos^2-1| {worst_unit:.1e} (<= 1e-6), "
              f"ILD power-ratio rel change {worst_ild:.1e} (<= 1e-9)")
    assert ok


def test_c10_baseline_parity(criterion):
    rng = np.random.default_rng(1010)
    worst = 0.0
    for _ in range(200):
        scene = sample_constellation(sample_room(rng), rng)
        for order in (3, 10):
            base = synthesize_ism_only(scene, CFG, max_order=order, mic_index=0)
            aug = drr_augment(base, scene, "target_eq4", rng, CFG)
            measured = measure_drr(aug.samples, aug.n_d, CFG.drr_window)
            worst = max(worst, abs(measured - aug.target_drr) / aug.target_drr)
    ok = worst <= 1e-9
    criterion(ok, "C10 baseline parity", f"max rel DRR error {worst:.1e} over 400 RIRs (<= 1e-9)")
    assert ok


def test_c11_throughput(criterion):
    rng = np.random.default_rng(1111)
    scenes = [sample_constellation(sample_room(rng), rng) for _ in range(300)]
    synthesize(scenes[0], CFG, np.random.default_rng(0))  # warm caches
    n, start = 0, time.perf_counter()
    for scene in scenes:
        try:
            synthesize(scene, CFG, rng)
        except InfeasibleDrrError:
            continue
        n += 2
    rate = n / (time.perf_counter() - start)
    ok = rate >= 50
    criterion(ok, "C11 throughput", f"{rate:.0f} proposed RIRs/s on one worker (target >= 50)")
    assert ok
