"""Hybrid room impulse response synthesis.

Early reflections come from a shoebox image-source model with a directional
source; the late part is an exponentially decaying Gaussian process whose
power is solved so that the RIR meets a critical-distance based DRR.
"""

__version__ = "0.1.0"

from .core import (CARDIOID, OMNI, DirectivityPattern, MicPair, PatternKind, Room, Scene,
                   Source, SynthConfig, angle_between, directivity_gain)
from .synth import Method, Rir, drr_augment, synthesize, synthesize_ism_only
from .sampler import DatasetRecord, SamplerConfig, generate_dataset

__all__ = [
    "CARDIOID", "OMNI", "DirectivityPattern", "MicPair", "PatternKind", "Room", "Scene",
    "Source", "SynthConfig", "angle_between", "directivity_gain",
    "Method", "Rir", "drr_augment", "synthesize", "synthesize_ism_only",
    "DatasetRecord", "SamplerConfig", "generate_dataset",
]
