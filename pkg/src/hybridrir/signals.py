"""Microphone-signal rendering, STFT features, and audio/feature file I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import signal
from scipy.io import wavfile

from .errors import SignalError

PLANES = ("magnitude", "sin_phase", "cos_phase")


@dataclass
class AudioClip:
    samples: np.ndarray
    fs: float


@dataclass
class FeatureTensor:
    """STFT planes, shape ``(3 * channels, frames, bins)``.

    Per channel the planes are magnitude, sin(phase), cos(phase).
    """

    values: np.ndarray
    fs: float
    win: int
    hop: int

    @property
    def layout(self):
        n_ch = self.values.shape[0] // len(PLANES)
        return [f"ch{c}_{p}" for c in range(n_ch) for p in PLANES]


def _samples(rir):
    return np.asarray(getattr(rir, "samples", rir), dtype=float)


def render_mics(rirs: Sequence, clip: AudioClip, snr_db: float | None, duration: float,
                rng=None, normalize: bool = True, offset: int = 0) -> Tuple[AudioClip, AudioClip]:
    """Convolve a dry clip with both RIRs, add sensor noise, normalize jointly.

    Parameters
    ----------
    rirs : pair of Rir or arrays
    clip : AudioClip
        Anechoic source signal at the RIR sample rate.
    snr_db : float or None
        Per-channel SNR relative to that channel's convolved power. None
        disables noise.
    duration : float
        Output length in seconds.
    rng : numpy.random.Generator
        Required when noise is added.
    normalize : bool
        Scale both channels by one gain so the pair peaks at 1.
    offset : int
        First sample of ``clip`` to use.
    """
    fs = clip.fs
    for r in rirs:
        r_fs = getattr(r, "fs", fs)
        if r_fs != fs:
            raise SignalError(f"RIR rate {r_fs} Hz does not match clip rate {fs} Hz")
    n = int(round(duration * fs))
    dry = np.asarray(clip.samples, dtype=float)[offset:offset + n]
    if len(dry) < n:
        raise SignalError(f"clip has {len(dry)} samples from offset {offset}, need {n}")
    if not np.any(dry):
        raise SignalError("silent clip: SNR is undefined")
    out = []
    for r in rirs:
        wet = signal.fftconvolve(dry, _samples(r))[:n]
        if snr_db is not None:
            power = np.mean(wet * wet)
            if power == 0:
                raise SignalError("convolved signal is silent: SNR is undefined")
            noise_power = power * 10.0 ** (-snr_db / 10.0)
            wet = wet + np.sqrt(noise_power) * rng.standard_normal(n)
        out.append(wet)
    if normalize:
        peak = max(np.max(np.abs(x)) for x in out)
        if peak > 0:
            out = [x / peak for x in out]
    return AudioClip(out[0], fs), AudioClip(out[1], fs)


def stft(x: np.ndarray, win: int, hop: int, window: str = "blackman") -> np.ndarray:
    """Complex STFT without padding, shape ``(frames, win // 2 + 1)``."""
    if len(x) < win:
        raise SignalError(f"signal of {len(x)} samples shorter than one window ({win})")
    frames = sliding_window_view(x, win)[::hop]
    return np.fft.rfft(frames * signal.get_window(window, win), axis=-1)


def stft_features(pair: Sequence[AudioClip], win_ms: float = 25.0, hop_ms: float = 10.0,
                  window: str = "blackman") -> FeatureTensor:
    fs = pair[0].fs
    lengths = {len(c.samples) for c in pair}
    if len(lengths) != 1:
        raise SignalError(f"clips differ in length: {sorted(lengths)}")
    if any(c.fs != fs for c in pair):
        raise SignalError("clips differ in sample rate")
    win = int(round(win_ms * 1e-3 * fs))
    hop = int(round(hop_ms * 1e-3 * fs))
    planes = []
    for c in pair:
        spec = stft(np.asarray(c.samples, dtype=float), win, hop, window)
        mag = np.abs(spec)
        nz = mag > 0
        safe = np.where(nz, mag, 1.0)
        # phase of empty bins is taken as 0
        planes += [mag, np.where(nz, spec.imag / safe, 0.0), np.where(nz, spec.real / safe, 1.0)]
    return FeatureTensor(np.stack(planes), fs, win, hop)


def read_wav(path) -> Tuple[np.ndarray, int]:
    """Samples as float64 ``(n,)`` or ``(n, channels)``; integer PCM is scaled to [-1, 1)."""
    fs, data = wavfile.read(str(path))
    if np.issubdtype(data.dtype, np.integer):
        data = data.astype(np.float64) / float(np.iinfo(data.dtype).max + 1)
    return data.astype(np.float64), fs


def write_wav(path, samples, fs) -> None:
    """Write float32 (IEEE) WAV; ``samples`` is ``(n,)`` or ``(n, channels)``."""
    wavfile.write(str(path), int(round(fs)), np.asarray(samples, dtype="<f4"))


def write_features(path, features: FeatureTensor) -> Path:
    """Store as raw little-endian float32 plus a ``.json`` sidecar; returns the sidecar path."""
    path = Path(path)
    values = np.ascontiguousarray(features.values, dtype="<f4")
    path.write_bytes(values.tobytes())
    sidecar = path.with_suffix(".json")
    sidecar.write_text(json.dumps({
        "dtype": "float32",
        "byteorder": "little",
        "shape": list(values.shape),
        "axes": ["plane", "frame", "bin"],
        "planes": features.layout,
        "fs": features.fs,
        "win": features.win,
        "hop": features.hop,
    }, indent=2))
    return sidecar


def read_features(path) -> FeatureTensor:
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    values = np.fromfile(path, dtype="<f4").reshape(meta["shape"])
    return FeatureTensor(values, meta["fs"], meta["win"], meta["hop"])
