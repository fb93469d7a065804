"""DRR measurement, Schroeder decay analysis, and distance metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AnechoicInputError, EstimationError, InvalidParameterError

CLASS_GRANULARITY = 0.1


@dataclass
class EnergyDecayCurve:
    values: np.ndarray  # dB, 0 at the first sample
    fs: float


def measure_drr(h, n_d: int | None = None, w: int = 40) -> float:
    """Energy in ``[n_d - w, n_d + w]`` over the energy after it.

    ``h`` may be a sample array or any object with ``samples`` and ``n_d``
    attributes (e.g. :class:`hybridrir.synth.Rir`).
    """
    if n_d is None:
        n_d = h.n_d
    x = np.asarray(getattr(h, "samples", h), dtype=float)
    if w < 0:
        raise InvalidParameterError(f"window must be >= 0, got {w}")
    if not 0 <= n_d < len(x):
        raise InvalidParameterError(f"n_d={n_d} outside signal of length {len(x)}")
    lo, hi = max(n_d - w, 0), n_d + w + 1
    direct = x[lo:hi] @ x[lo:hi]
    late = x[hi:] @ x[hi:]
    if late == 0:
        raise AnechoicInputError("no energy after the direct-path window")
    return float(direct / late)


def schroeder_edc(h, fs: float, floor_db: float = -300.0) -> EnergyDecayCurve:
    """Backward-integrated energy decay curve in dB, clamped at ``floor_db``."""
    x = np.asarray(h, dtype=float)
    energy = np.cumsum((x * x)[::-1])[::-1]
    total = energy[0]
    if total == 0:
        raise InvalidParameterError("EDC of an all-zero signal is undefined")
    with np.errstate(divide="ignore"):
        values = 10.0 * np.log10(energy / total)
    return EnergyDecayCurve(np.maximum(values, floor_db), fs)


def estimate_t60(edc: EnergyDecayCurve, upper_db: float = -5.0, lower_db: float = -35.0,
                 end_guard: float = 0.1) -> float:
    """Reverberation time from a straight-line fit to the EDC between two levels.

    The fit covers the samples from the first crossing of ``upper_db`` to the
    first crossing of ``lower_db`` and is extrapolated to a 60 dB decay.

    Parameters
    ----------
    edc : EnergyDecayCurve
    upper_db, lower_db : float
        Evaluation range; the defaults give T30.
    end_guard : float
        Fraction of the curve at its end that may not be used. Every
        backward integral falls to -inf at the last sample, so a crossing
        there says nothing about decay.

    Raises
    ------
    EstimationError
        If the curve does not reach ``lower_db`` outside the guarded end.
    """
    v = edc.values
    usable = v[: max(1, int(len(v) * (1.0 - end_guard)))]
    below = np.nonzero(usable <= lower_db)[0]
    if below.size == 0:
        raise EstimationError(
            f"EDC reaches only {usable.min():.1f} dB, need {lower_db} dB")
    stop = int(below[0])
    start = int(np.nonzero(v <= upper_db)[0][0])
    if stop - start < 2:
        raise EstimationError("evaluation range spans fewer than three samples")
    t = np.arange(start, stop + 1) / edc.fs
    slope, _ = np.polyfit(t, v[start:stop + 1], 1)
    if slope >= 0:
        raise EstimationError("non-decaying energy curve")
    return float(-60.0 / slope)


def mae(estimates, truths) -> float:
    est = np.asarray(estimates, dtype=float)
    ref = np.asarray(truths, dtype=float)
    if est.shape != ref.shape:
        raise InvalidParameterError(f"length mismatch: {est.shape} vs {ref.shape}")
    if est.size == 0:
        raise InvalidParameterError("mae of empty lists")
    return float(np.mean(np.abs(ref - est)))


def distance_to_class(d: float, granularity: float = CLASS_GRANULARITY) -> int:
    """Nearest class index, ties rounded up."""
    if d < 0:
        raise InvalidParameterError(f"negative distance {d}")
    # rounding the quotient first keeps 0.15 / 0.1 from landing just below 1.5
    return int(math.floor(round(d / granularity, 9) + 0.5))


def class_to_distance(k: int, granularity: float = CLASS_GRANULARITY) -> float:
    return round(k * granularity, 10)
