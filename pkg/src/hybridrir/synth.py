"""End-to-end RIR synthesis: image sources + high-pass + scaled stochastic tail.

Also provides the two baselines the hybrid model is compared against: a pure
image-source RIR and direct-path DRR augmentation of such an RIR.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from . import ism, tail as tail_mod
from .analysis import measure_drr
from .core import CARDIOID, DirectivityPattern, Scene, SynthConfig
from .errors import AnechoicInputError, InfeasibleDrrError, InvalidParameterError


class Method(str, enum.Enum):
    PROPOSED = "proposed"
    ISM_ONLY = "ism_only"
    DRR_AUGMENTED = "drr_augmented"


@dataclass
class Rir:
    samples: np.ndarray
    fs: float
    n_d: int
    target_drr: Optional[float]
    measured_drr: Optional[float]
    scene_ref: Scene
    seed: Optional[int]
    method: Method
    mic_index: int = 0
    alpha: Optional[float] = None
    sigma: Optional[float] = None
    warnings: List[str] = field(default_factory=list)

    def metadata(self) -> dict:
        return {
            "mic_index": self.mic_index,
            "method": Method(self.method).value,
            "fs": self.fs,
            "n_d": self.n_d,
            "mic_distance": self.scene_ref.mic_distance(self.mic_index),
            "target_drr": self.target_drr,
            "measured_drr": self.measured_drr,
            "alpha": self.alpha,
            "sigma": self.sigma,
            "seed": self.seed,
            "warnings": list(self.warnings),
        }


def draw_alpha(cfg: SynthConfig, rng) -> float:
    lo, hi = cfg.alpha_range
    return float(rng.uniform(lo, hi))


def synthesize(scene: Scene, cfg: SynthConfig, rng, alpha: Optional[float] = None,
               seed: Optional[int] = None) -> Tuple[Rir, Rir]:
    """Hybrid RIRs for both microphones of the pair.

    The source directivity factor is drawn once per scene (unless given) and
    shared by the two microphones; each microphone gets its own tail draw.
    Random numbers are consumed in the order alpha, tail mic0, tail mic1.

    Raises
    ------
    InfeasibleDrrError
        If the geometric part alone already falls below the target DRR for
        either microphone, or the target is zero (source null toward a mic).
    """
    if alpha is None:
        alpha = draw_alpha(cfg, rng)
    delta = tail_mod.decay_rate(scene.room.t60)
    w = cfg.drr_window
    out = []
    for m in range(2):
        early = ism.highpass(ism.render_early(scene.room, scene, m, cfg), cfg)
        stoch = tail_mod.generate_tail(early.n_d, delta, cfg, rng, seed)
        target = tail_mod.target_drr(scene, alpha, cfg.beta, mic_index=m)
        sigma = tail_mod.solve_tail_scale(early, stoch, target.eta, w, cfg.solve_mode)
        h = early.samples + sigma * stoch.samples
        out.append(Rir(h, cfg.fs, early.n_d, target.eta, measure_drr(h, early.n_d, w),
                       scene, seed, Method.PROPOSED, m, alpha, sigma, early.warnings))
    return out[0], out[1]


def synthesize_ism_only(scene: Scene, cfg: SynthConfig, max_order: int,
                        mic_index: int = 0, highpass: bool = True) -> Rir:
    early = ism.render_early(scene.room, scene, mic_index, cfg, order=max_order)
    if highpass:
        early = ism.highpass(early, cfg)
    try:
        drr = measure_drr(early.samples, early.n_d, cfg.drr_window)
    except AnechoicInputError:
        drr = None
    return Rir(early.samples, cfg.fs, early.n_d, None, drr, scene, None,
               Method.ISM_ONLY, mic_index, warnings=early.warnings)


def drr_augment(rir: Rir, scene: Scene, mode: str, rng=None, cfg: Optional[SynthConfig] = None,
                alpha: Optional[float] = None, factor: Optional[float] = None,
                pattern: DirectivityPattern = CARDIOID, factor_range=(1.0, 3.0)) -> Rir:
    """Rescale the direct-path window of an RIR.

    Parameters
    ----------
    rir : Rir
        Usually an image-source-only RIR.
    scene : Scene
    mode : {"random_scale", "target_eq4"}
        ``random_scale`` multiplies the window by ``factor`` (drawn from
        ``factor_range`` when not given). ``target_eq4`` picks the factor so
        that the resulting DRR equals the critical-distance target.
    rng : numpy.random.Generator, optional
        Needed when ``factor`` or ``alpha`` must be drawn.
    cfg : SynthConfig, optional
        Supplies the DRR window, alpha range and beta.
    alpha : float, optional
        Source directivity factor for the target; drawn when omitted.
    pattern : DirectivityPattern
        Pattern used for the direct-path response in the target. Defaults to
        cardioid even for omnidirectional image-source RIRs.
    """
    cfg = cfg or SynthConfig(fs=rir.fs, n_samples=len(rir.samples))
    w = cfg.drr_window
    h = np.array(rir.samples, dtype=float)
    win = tail_mod.direct_window(rir.n_d, w, len(h))
    target = None
    if mode == "random_scale":
        if factor is None:
            factor = float(rng.uniform(*factor_range))
    elif mode == "target_eq4":
        if alpha is None:
            alpha = draw_alpha(cfg, rng)
        target = tail_mod.target_drr(scene, alpha, cfg.beta, rir.mic_index, pattern).eta
        e_in = h[win] @ h[win]
        e_out = h[win.stop:] @ h[win.stop:]
        if not (target > 0 and e_in > 0 and e_out > 0):
            raise InfeasibleDrrError(target, e_in / e_out if e_out else np.inf)
        factor = float(np.sqrt(target * e_out / e_in))
    else:
        raise InvalidParameterError(f"unknown augmentation mode {mode!r}")
    h[win] *= factor
    try:
        measured = measure_drr(h, rir.n_d, w)
    except AnechoicInputError:
        measured = None
    return replace(rir, samples=h, target_drr=target, measured_drr=measured,
                   method=Method.DRR_AUGMENTED, alpha=alpha, sigma=factor,
                   warnings=list(rir.warnings))
