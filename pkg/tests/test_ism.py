import math

import numpy as np
import pytest

from conftest import mirror_images
from hybridrir.core import CARDIOID, OMNI, MicPair, Room, Scene, Source, SynthConfig
from hybridrir.errors import InfeasibleRoomError
from hybridrir.ism import (EarlyRir, enumerate_images, highpass, image_indices, render_early,
                           wall_reflection_coefficient)


def test_reflection_coefficient_sabine_example():
    # 0.161 * 86.4 / (129.6 * 0.6) = 0.178888..., sqrt(1 - that)
    assert wall_reflection_coefficient(Room(6, 6, 2.4, 0.6)) == pytest.approx(0.9061518146, rel=1e-9)


def test_reflection_coefficient_limits():
    assert wall_reflection_coefficient(Room(6, 6, 2.4, 1e9)) == pytest.approx(1.0, abs=1e-8)
    assert wall_reflection_coefficient(Room(1, 1, 1, 0.161 / 6)) == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(InfeasibleRoomError):
        wall_reflection_coefficient(Room(1, 1, 1, 0.01))


@pytest.mark.parametrize("K, count", [(0, 1), (1, 7), (2, 25), (3, 63), (4, 129)])
def test_image_counts(K, count):
    assert len(image_indices(K)) == count
    orders = np.abs(image_indices(K)).sum(axis=1)
    for o in range(1, K + 1):
        assert np.sum(orders == o) == 4 * o * o + 2


def test_order_zero_is_source(room):
    src = Source((1.0, 2.0, 1.0))
    (img,) = enumerate_images(room, src, 0)
    assert img.order == 0 and img.reflection_gain == 1.0
    assert img.position == pytest.approx(src.position)


def test_images_match_mirror_bruteforce(room):
    src = Source((1.3, 4.1, 0.7))
    images = enumerate_images(room, src, 3)
    got = {tuple(np.round(i.position, 9)): i.order for i in images}
    assert got == mirror_images(room.dims, src.position, 3)
    beta = wall_reflection_coefficient(room)
    for img in images:
        assert img.reflection_gain == pytest.approx(beta ** img.order)


def test_direct_peak_at_exact_time_of_flight(room):
    cfg = SynthConfig(fs=16000, speed_of_sound=343.0)
    src = Source((1.0, 3.0, 1.2), 0.0, 0.0)
    # 3.43 m along the look direction -> exactly 160 samples
    mics = MicPair.from_center((4.43, 3.0, 1.2), math.pi / 2, 1e-6)
    scene = Scene(room, src, mics)
    early = render_early(room, scene, 0, SynthConfig(image_order=0))
    assert early.n_d == 160
    assert np.argmax(np.abs(early.samples)) == 160


def test_free_field_amplitude_and_inverse_distance(room):
    cfg = SynthConfig(image_order=0)
    src = Source((0.5, 3.0, 1.2), 0.0, 0.0, OMNI)

    def peak(d):
        scene = Scene(room, src, MicPair.from_center((0.5 + d, 3.0, 1.2), math.pi / 2, 1e-9))
        return np.max(np.abs(render_early(room, scene, 0, cfg).samples))

    # 1.715 m and 3.43 m are 80 and 160 samples: the sinc peak sits on a sample
    assert peak(1.715) == pytest.approx(1 / (4 * math.pi * 1.715), rel=1e-6)
    assert peak(3.43) / peak(1.715) == pytest.approx(0.5, rel=0.01)
    # fractional delay: 1 m is 46.6472 samples, nearest tap 0.3528 samples off
    frac = 1.0 * 16000 / 343 - 47
    kernel_peak = np.sinc(frac) * 0.5 * (1 + np.cos(np.pi * frac / 41))
    assert peak(1.0) == pytest.approx(kernel_peak / (4 * math.pi), rel=1e-6)


def test_cardioid_null_kills_direct_path(room):
    src = Source((2.0, 3.0, 1.2), math.pi, 0.0, CARDIOID)
    scene = Scene(room, src, MicPair.from_center((4.0, 3.0, 1.2), math.pi / 2, 1e-6))
    h = render_early(room, scene, 0, SynthConfig(image_order=0)).samples
    assert np.max(np.abs(h)) < 1e-12


def test_omni_invariant_to_look_direction(room, cfg):
    mics = MicPair.from_center((4.0, 2.0, 1.4), 0.3)
    outs = [render_early(room, Scene(room, Source((1.5, 4.0, 1.1), az, el, OMNI), mics), 0, cfg).samples
            for az, el in [(0.0, 0.0), (2.0, 0.4), (-1.0, -0.2)]]
    assert np.array_equal(outs[0], outs[1]) and np.array_equal(outs[0], outs[2])


def test_silence_before_first_arrival(scene, room, cfg):
    early = render_early(room, scene, 0, cfg)
    pre = early.samples[: early.n_d - 41]
    assert np.max(np.abs(pre)) <= 1e-6 * np.max(np.abs(early.samples))


def test_truncation_is_recorded(room):
    cfg = SynthConfig(n_samples=200)
    scene = Scene(room, Source((1.0, 1.0, 1.0)), MicPair.from_center((5.0, 5.0, 1.5), 0.0))
    early = render_early(room, scene, 0, cfg)
    assert early.warnings and len(early.samples) == 200


def test_rigid_shift_delays_match_geometry(room, cfg):
    rng = np.random.default_rng(3)
    for _ in range(5):
        src = rng.uniform([0.8, 0.8, 0.6], [3.0, 3.0, 1.2])
        mic = src + rng.uniform([0.5, 0.5, 0.2], [2.0, 2.0, 0.8])
        shift = rng.uniform(-0.3, 0.3, 3)
        for offset in (np.zeros(3), shift):
            s, m = src + offset, mic + offset
            images = enumerate_images(room, Source(tuple(s)), 3, receiver=m)
            ref = mirror_images(room.dims, s, 3)
            got = sorted(np.linalg.norm(m - np.asarray(i.position)) / cfg.speed_of_sound for i in images)
            want = sorted(np.linalg.norm(m - np.asarray(p)) / cfg.speed_of_sound for p in ref)
            assert np.allclose(got, want, atol=1e-9)


def test_highpass_rejects_dc(cfg):
    x = np.ones(cfg.n_samples)
    y = highpass(EarlyRir(x, 0), cfg).samples
    tail = y[int(10 * cfg.fs / cfg.highpass_cutoff):]
    assert np.max(np.abs(tail)) < 1e-3


def test_highpass_zero_and_impulse(cfg):
    assert not np.any(highpass(EarlyRir(np.zeros(1000), 0), cfg).samples)
    imp = np.zeros(cfg.n_samples)
    imp[0] = 1.0
    taps = highpass(EarlyRir(imp, 0), cfg).samples
    assert abs(taps.sum()) < 1e-3 * np.abs(taps).sum()
    assert len(taps) == cfg.n_samples
