"""Shoebox image-source model for the early part of the RIR."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy import signal

from .core import Room, Scene, Source, SynthConfig, directivity_gain
from .errors import InfeasibleRoomError

SABINE = 0.161
KERNEL_HALF_WIDTH = 40  # 81-tap fractional-delay kernel


@dataclass(frozen=True)
class ImageSource:
    position: Tuple[float, float, float]
    order: int
    reflection_gain: float
    directivity_gain: float


@dataclass
class EarlyRir:
    samples: np.ndarray
    n_d: int
    warnings: List[str] = field(default_factory=list)


def wall_reflection_coefficient(room: Room) -> float:
    """Uniform pressure reflection coefficient from Sabine's formula.

    Raises
    ------
    InfeasibleRoomError
        If the room would need an absorption coefficient of one or more.
    """
    absorption = SABINE * room.volume / (room.surface * room.t60)
    # tolerance admits the exact full-absorption case
    if absorption > 1.0 + 1e-12:
        raise InfeasibleRoomError(
            f"T60={room.t60} s needs absorption {absorption:.4f} > 1 in this room")
    return math.sqrt(max(0.0, 1.0 - absorption))


@functools.lru_cache(maxsize=16)
def image_indices(order: int) -> np.ndarray:
    """Lattice indices (i, j, k) with |i| + |j| + |k| <= order, sorted by order.

    Index ``i`` along an axis is the 1-D image number: ``|i|`` reflections,
    mirrored when ``i`` is odd.
    """
    r = np.arange(-order, order + 1)
    grid = np.stack(np.meshgrid(r, r, r, indexing="ij"), axis=-1).reshape(-1, 3)
    total = np.abs(grid).sum(axis=1)
    grid = grid[total <= order]
    grid = grid[np.argsort(np.abs(grid).sum(axis=1), kind="stable")]
    grid.setflags(write=False)
    return grid


def _image_geometry(room: Room, source: Source, order: int):
    idx = image_indices(order)
    dims = room.dims
    pos = np.asarray(source.position)
    odd = (idx % 2) != 0
    positions = idx * dims + np.where(odd, dims - pos, pos)
    looks = np.where(odd, -1.0, 1.0) * source.look
    orders = np.abs(idx).sum(axis=1)
    return positions, looks, orders


def _image_weights(room, source, order, receiver):
    positions, looks, orders = _image_geometry(room, source, order)
    beta = wall_reflection_coefficient(room)
    vec = np.asarray(receiver, dtype=float) - positions
    dist = np.linalg.norm(vec, axis=1)
    cos_theta = np.einsum("ij,ij->i", looks, vec) / dist
    gains = directivity_gain(source.pattern, np.arccos(np.clip(cos_theta, -1.0, 1.0)))
    return positions, orders, beta ** orders, gains, dist


def enumerate_images(room: Room, source: Source, K: int, receiver=None) -> List[ImageSource]:
    """All mirror images with at most ``K`` wall reflections.

    The directivity gain of each image is evaluated toward ``receiver``;
    when no receiver is given it is left at 1.
    """
    if receiver is None:
        positions, looks, orders = _image_geometry(room, source, K)
        beta = wall_reflection_coefficient(room)
        refl, gains = beta ** orders, np.ones(len(orders))
    else:
        positions, orders, refl, gains, _ = _image_weights(room, source, K, receiver)
    return [ImageSource(tuple(p), int(o), float(r), float(g))
            for p, o, r, g in zip(positions, orders, refl, gains)]


def fractional_delay_kernel(delays: np.ndarray, half_width: int = KERNEL_HALF_WIDTH):
    """Hann-windowed sinc taps centered on each (fractional) delay.

    Returns
    -------
    start : ndarray of int, shape (M,)
        Buffer index of the first tap.
    taps : ndarray, shape (M, 2 * half_width + 1)
    """
    delays = np.asarray(delays, dtype=float)
    center = np.round(delays).astype(np.int64)
    offsets = np.arange(-half_width, half_width + 1)
    x = (center[:, None] + offsets[None, :]) - delays[:, None]
    window = 0.5 * (1.0 + np.cos(np.pi * x / (half_width + 1)))
    return center - half_width, np.sinc(x) * window


def _render(room, source, receiver, order, cfg, warnings):
    _, _, refl, gains, dist = _image_weights(room, source, order, receiver)
    amplitude = refl * gains / (4.0 * np.pi * dist)
    delays = dist * cfg.fs / cfg.speed_of_sound
    start, taps = fractional_delay_kernel(delays)
    n = cfg.n_samples
    index = start[:, None] + np.arange(taps.shape[1])[None, :]
    late = delays >= n
    if np.any(late):
        warnings.append(f"{int(late.sum())} image arrival(s) beyond {n} samples truncated")
    keep = (index >= 0) & (index < n)
    out = np.zeros(n)
    np.add.at(out, index[keep], (amplitude[:, None] * taps)[keep])
    return out, int(round(dist[0] * cfg.fs / cfg.speed_of_sound))


def render_early(room: Room, scene: Scene, mic_index: int, cfg: SynthConfig,
                 order: int | None = None) -> EarlyRir:
    """Sum of band-limited image impulses at one microphone.

    Each image contributes ``beta**order * D(theta) / (4 pi d)`` at delay
    ``d * fs / c``. ``order`` defaults to ``cfg.image_order``.
    """
    order = cfg.image_order if order is None else order
    warnings: List[str] = []
    receiver = scene.mics.positions[mic_index]
    samples, n_d = _render(room, scene.source, receiver, order, cfg, warnings)
    return EarlyRir(samples, n_d, warnings)


def highpass_coefficients(cutoff: float, fs: float):
    """Allen-Berkley DC-blocking filter: zeros at 1 and R, poles at R e^{+-jW}."""
    w = 2.0 * np.pi * cutoff / fs
    r = math.exp(-w)
    b = np.array([1.0, -(1.0 + r), r])
    a = np.array([1.0, -2.0 * r * math.cos(w), r * r])
    return b, a


def highpass(rir: EarlyRir, cfg: SynthConfig) -> EarlyRir:
    b, a = highpass_coefficients(cfg.highpass_cutoff, cfg.fs)
    out = signal.lfilter(b, a, rir.samples)
    return EarlyRir(out, rir.n_d, list(rir.warnings))
