"""Stochastic late reverberation and the DRR-matching tail scale."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DirectivityPattern, Room, Scene, SynthConfig, angle_between, directivity_gain
from .errors import DegenerateGeometryError, InfeasibleDrrError, InvalidParameterError


@dataclass
class StochasticTail:
    """Unit-variance tail realization, already enveloped and faded in."""

    samples: np.ndarray
    n_d: int
    delta: float
    rng_seed: Optional[int] = None
    envelope: Optional[np.ndarray] = None


@dataclass(frozen=True)
class DrrTarget:
    eta: float
    d_c: float
    alpha: float
    beta: float
    directional_response: float


def decay_rate(t60: float) -> float:
    """Amplitude decay constant (1/s) for a reverberation time in seconds."""
    if not t60 > 0:
        raise InvalidParameterError(f"t60 must be > 0, got {t60}")
    return 3.0 * math.log(10.0) / t60


def fade_window(n, n_d, delta, kappa, fs):
    """Raised-cosine fade-in of the tail, 0 up to ``n_d`` and 1 after ``2 fs / (kappa delta)`` samples.

    Vectorized over ``n``.
    """
    if not kappa > 0:
        raise InvalidParameterError(f"kappa must be > 0, got {kappa}")
    n = np.asarray(n, dtype=float)
    length = 2.0 * fs / (kappa * delta)
    rel = n - n_d
    ramp = 0.5 * (1.0 - np.cos(np.pi * rel / length))
    psi = np.where(rel <= 0, 0.0, np.where(rel <= length, ramp, 1.0))
    return psi if psi.ndim else float(psi)


def tail_envelope(n_d: int, delta: float, cfg: SynthConfig) -> np.ndarray:
    """Deterministic amplitude envelope psi(n) * exp(-delta (n - n_d) / fs)."""
    n = np.arange(cfg.n_samples)
    psi = fade_window(n, n_d, delta, cfg.kappa, cfg.fs)
    decay = np.exp(-delta * np.maximum(n - n_d, 0) / cfg.fs)
    return psi * decay


def generate_tail(n_d: int, delta: float, cfg: SynthConfig, rng,
                  seed: Optional[int] = None) -> StochasticTail:
    """Draw one faded, exponentially decaying Gaussian tail.

    ``rng`` is a ``numpy.random.Generator``; exactly ``cfg.n_samples``
    normal variates are consumed regardless of ``n_d``.
    """
    if not 0 <= n_d < cfg.n_samples:
        raise InvalidParameterError(f"n_d={n_d} outside buffer of {cfg.n_samples}")
    noise = rng.standard_normal(cfg.n_samples)
    env = tail_envelope(n_d, delta, cfg)
    return StochasticTail(noise * env, n_d, delta, seed, env)


def critical_distance(room: Room, alpha: float, beta: float = 1.0) -> float:
    if not (alpha > 0 and beta > 0):
        raise InvalidParameterError("directivity factors must be > 0")
    return 0.1 * math.sqrt(alpha * beta) * math.sqrt(room.volume / (math.pi * room.t60))


def target_drr(scene: Scene, alpha: float, beta: float = 1.0,
               mic_index: Optional[int] = None,
               pattern: Optional[DirectivityPattern] = None) -> DrrTarget:
    """Desired DRR from the critical distance and the source directivity.

    Parameters
    ----------
    scene : Scene
    alpha, beta : float
        Directivity factors of source and microphone.
    mic_index : int, optional
        Evaluate for one microphone of the pair. By default the pair center
        and ``scene.d`` are used.
    pattern : DirectivityPattern, optional
        Pattern for the direct-path response; defaults to the source's own.
    """
    if mic_index is None:
        point, d = scene.mics.center, scene.d
    else:
        point, d = scene.mics.positions[mic_index], scene.mic_distance(mic_index)
    if not d > 0:
        raise DegenerateGeometryError("source-microphone distance is zero")
    pattern = scene.source.pattern if pattern is None else pattern
    _, _, theta = angle_between(scene.source, point)
    D = float(directivity_gain(pattern, theta))
    d_c = critical_distance(scene.room, alpha, beta)
    return DrrTarget(D * D * d_c * d_c / (d * d), d_c, alpha, beta, D)


def direct_window(n_d: int, w: int, n: int) -> slice:
    return slice(max(n_d - w, 0), min(n_d + w + 1, n))


def _smallest_nonnegative_root(a: float, b: float, c: float) -> Optional[float]:
    """Smallest x >= 0 with a x^2 + 2 b x + c = 0, or None."""
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0:
        return 0.0
    a, b, c = a / scale, b / scale, c / scale
    if c == 0:
        return 0.0
    if abs(a) < 1e-15:
        if b == 0:
            return None
        x = -c / (2.0 * b)
        return x if x >= 0 else None
    disc = b * b - a * c
    if disc < 0:
        return None
    # numerically stable pair of roots
    q = -(b + math.copysign(math.sqrt(disc), b))
    roots = [q / a]
    if q != 0:
        roots.append(c / q)
    roots = [r for r in roots if r >= 0]
    return min(roots) if roots else None


def _polish(x, a, b, c):
    # one Newton step on the unscaled quadratic
    f = (a * x + 2.0 * b) * x + c
    df = 2.0 * (a * x + b)
    if df != 0:
        step = f / df
        if x - step >= 0:
            return x - step
    return x


def _drr_range(nn, nd):
    """Range (min, max) of N(x)/D(x) over x >= 0; quadratics as (x^2, x/2, 1) coefficients."""
    (a, b, c), (e, f, g) = nn, nd

    def ratio(x):
        den = (e * x + 2 * f) * x + g
        return ((a * x + 2 * b) * x + c) / den if den > 0 else math.inf

    candidates = [ratio(0.0), a / e if e > 0 else math.inf]
    # stationary points: (a f - b e) x^2 + (a g - c e) x + (b g - c f) = 0
    roots = np.roots([a * f - b * e, a * g - c * e, b * g - c * f]) if any(
        (a * f - b * e, a * g - c * e)) else []
    candidates += [ratio(float(r.real)) for r in roots if abs(r.imag) < 1e-12 and r.real >= 0]
    return min(candidates), max(candidates)


def solve_tail_scale(early, tail, eta: float, w: int, mode: str = "realization") -> float:
    """Scale for the tail so that ``early + sigma * tail`` has DRR ``eta``.

    Writes the windowed DRR as a ratio of two quadratics in sigma and solves
    ``N(sigma) = eta * D(sigma)`` for the realization at hand, cross terms
    included. In ``"expectation"`` mode the tail energies are replaced by
    their expected values and cross terms dropped.

    Raises
    ------
    InfeasibleDrrError
        When no non-negative sigma reaches ``eta``.
    """
    h = np.asarray(getattr(early, "samples", early), dtype=float)
    t = np.asarray(getattr(tail, "samples", tail), dtype=float)
    n_d = early.n_d if hasattr(early, "n_d") else tail.n_d
    if not eta > 0:
        raise InfeasibleDrrError(eta, 0.0, f"target DRR must be > 0, got {eta}")
    win = direct_window(n_d, w, len(h))
    late = slice(win.stop, len(h))
    if mode == "expectation":
        env = tail.envelope
        tt_in, tt_out = float(env[win] @ env[win]), float(env[late] @ env[late])
        ht_in = ht_out = 0.0
    elif mode == "realization":
        tt_in, tt_out = float(t[win] @ t[win]), float(t[late] @ t[late])
        ht_in, ht_out = float(h[win] @ t[win]), float(h[late] @ t[late])
    else:
        raise InvalidParameterError(f"unknown solve mode {mode!r}")
    hh_in, hh_out = float(h[win] @ h[win]), float(h[late] @ h[late])
    if tt_out == 0:
        raise InfeasibleDrrError(eta, hh_in / hh_out if hh_out else math.inf,
                                 "tail has no energy outside the direct window")

    a = tt_in - eta * tt_out
    b = ht_in - eta * ht_out
    c = hh_in - eta * hh_out
    sigma = _smallest_nonnegative_root(a, b, c)
    if sigma is None:
        lo, hi = _drr_range((tt_in, ht_in, hh_in), (tt_out, ht_out, hh_out))
        bound = hi if eta > hi else lo
        raise InfeasibleDrrError(eta, bound, f"target DRR {eta:.6g} outside the attainable "
                                 f"range [{lo:.6g}, {hi:.6g}]")
    return _polish(sigma, a, b, c)

