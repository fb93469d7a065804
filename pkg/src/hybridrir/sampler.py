"""Random rooms and source/microphone-pair constellations for training data.

Every scene draws from its own generator seeded by (master seed, room index,
constellation index, attempt), so serial and parallel runs emit identical
records.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Iterator, Optional, Tuple

import numpy as np

from .analysis import distance_to_class
from .core import CARDIOID, DirectivityPattern, MicPair, Room, Scene, Source, SynthConfig
from .errors import ConfigError, InfeasibleDrrError, InfeasibleRoomError, SamplerError
from .synth import Rir, synthesize

log = logging.getLogger(__name__)

Interval = Tuple[float, float]


@dataclass(frozen=True)
class SamplerConfig:
    """Scene sampling parameters. Lengths in meters, times in seconds, angles in degrees."""

    rooms: int = 10_000
    constellations_per_room: int = 10
    room_length: Interval = (5.0, 7.0)
    room_width: Interval = (5.0, 7.0)
    ceiling: Interval = (2.4, 3.0)
    t60: Interval = (0.2, 0.7)
    mic_spacing: float = 0.08
    d_min: float = 0.3
    d_max: float = 5.0
    wall_margin: float = 0.5
    vertical_margin: float = 1.0
    look_azimuth: Interval = (-90.0, 90.0)
    look_elevation: Interval = (-15.0, 15.0)
    doa_step: float = 1.0
    pattern: str = "cardioid"
    seed: int = 0
    max_retries: int = 100

    def __post_init__(self):
        for f in fields(self):
            if f.type == "Interval":
                value = getattr(self, f.name)
                try:
                    lo, hi = (float(v) for v in value)
                except (TypeError, ValueError):
                    raise ConfigError(f"sampler.{f.name}", f"expected [min, max], got {value!r}")
                if lo > hi:
                    raise ConfigError(f"sampler.{f.name}", f"min {lo} > max {hi}")
                object.__setattr__(self, f.name, (lo, hi))
        positive = ("rooms", "constellations_per_room", "mic_spacing", "d_max", "doa_step",
                    "max_retries")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"sampler.{name}", f"must be > 0, got {getattr(self, name)}")
        for name in ("d_min", "wall_margin", "vertical_margin"):
            if getattr(self, name) < 0:
                raise ConfigError(f"sampler.{name}", "must be >= 0")
        if self.d_min >= self.d_max:
            raise ConfigError("sampler.d_min", f"d_min {self.d_min} >= d_max {self.d_max}")
        if min(self.room_length[0], self.room_width[0]) <= 2 * self.wall_margin + self.mic_spacing:
            raise ConfigError("sampler.wall_margin", "no room left for the microphone pair")
        if self.ceiling[0] <= 2 * self.vertical_margin:
            raise ConfigError("sampler.vertical_margin", "margins exceed the lowest ceiling")
        if self.t60[0] <= 0:
            raise ConfigError("sampler.t60", "must be > 0")
        try:
            DirectivityPattern.named(self.pattern)
        except ValueError:
            raise ConfigError("sampler.pattern", f"unknown pattern {self.pattern!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "SamplerConfig":
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(f"sampler.{key}", "unknown field")
        return cls(**data)

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


@dataclass
class DatasetRecord:
    room_idx: int
    constellation_idx: int
    scene: Scene
    rirs: Tuple[Rir, Rir]
    distance: float
    label: int
    seed: int
    attempts: int = 1

    def metadata(self) -> dict:
        return {
            "room_idx": self.room_idx,
            "constellation_idx": self.constellation_idx,
            "seed": self.seed,
            "attempts": self.attempts,
            "scene": self.scene.to_dict(),
            "distance": self.distance,
            "class": self.label,
            "t60": self.scene.room.t60,
            "alpha": self.rirs[0].alpha,
            "mics": [r.metadata() for r in self.rirs],
        }


def derive_seed(*keys: int) -> int:
    """Stable 32-bit seed from a tuple of non-negative integers."""
    return int(np.random.SeedSequence(list(keys)).generate_state(1)[0])


def sample_room(rng, cfg: SamplerConfig = SamplerConfig()) -> Room:
    return Room(
        float(rng.uniform(*cfg.room_length)),
        float(rng.uniform(*cfg.room_width)),
        float(rng.uniform(*cfg.ceiling)),
        float(rng.uniform(*cfg.t60)),
    )


def _bounds(room: Room, cfg: SamplerConfig):
    m = np.array([cfg.wall_margin, cfg.wall_margin, cfg.vertical_margin])
    return m, room.dims - m


def _inside(p, lo, hi) -> bool:
    return bool(np.all(p >= lo) and np.all(p <= hi))


def max_source_distance(room: Room, center, cfg: SamplerConfig) -> float:
    """Largest horizontal distance from ``center`` to the source placement area."""
    lo, hi = _bounds(room, cfg)
    dx = max(center[0] - lo[0], hi[0] - center[0])
    dy = max(center[1] - lo[1], hi[1] - center[1])
    return math.hypot(dx, dy)


def place_source(room: Room, center, orientation: float, distance: float, doa: float,
                 cfg: SamplerConfig):
    """Put the source at ``distance`` from ``center``, increasing the DoA until it fits.

    The source is placed in the horizontal plane of the pair center. The DoA
    (radians, relative to the array axis) is stepped by ``cfg.doa_step``
    degrees for at most one full turn.

    Returns
    -------
    position : ndarray or None
        None if no direction fits.
    doa : float
        Accepted DoA in radians.
    steps : int
        Number of increments applied.
    """
    lo, hi = _bounds(room, cfg)
    step = math.radians(cfg.doa_step)
    center = np.asarray(center, dtype=float)
    for k in range(int(math.ceil(360.0 / cfg.doa_step))):
        angle = doa + k * step
        az = orientation + angle
        p = center + distance * np.array([math.cos(az), math.sin(az), 0.0])
        if _inside(p, lo, hi):
            return p, angle, k
    return None, doa, -1


def sample_constellation(room: Room, rng, cfg: SamplerConfig = SamplerConfig()) -> Scene:
    """Random microphone pair, then a source at a random distance and DoA.

    Raises
    ------
    SamplerError
        If no feasible source position is found within ``cfg.max_retries``
        distance draws.
    """
    lo, hi = _bounds(room, cfg)
    half = 0.5 * cfg.mic_spacing
    pad = np.array([half, half, 0.0])
    center = rng.uniform(lo + pad, hi - pad)
    orientation = float(rng.uniform(-math.pi, math.pi))
    mics = MicPair.from_center(center, orientation, cfg.mic_spacing)
    d_hi = min(cfg.d_max, max_source_distance(room, center, cfg))
    if d_hi < cfg.d_min:
        raise SamplerError(f"largest feasible distance {d_hi:.3f} m below d_min")
    for _ in range(cfg.max_retries):
        distance = float(rng.uniform(cfg.d_min, d_hi))
        doa = float(rng.uniform(-math.pi, math.pi))
        pos, _, steps = place_source(room, center, orientation, distance, doa, cfg)
        if pos is not None:
            break
    else:
        raise SamplerError("no feasible source direction found")
    to_array = center - pos
    los = math.atan2(to_array[1], to_array[0])
    look_az = los + math.radians(rng.uniform(*cfg.look_azimuth))
    look_el = math.radians(rng.uniform(*cfg.look_elevation))
    source = Source(tuple(pos), look_az, look_el, DirectivityPattern.named(cfg.pattern))
    return Scene(room, source, mics)


def _record(args) -> DatasetRecord:
    cfg, synth_cfg, room_idx, const_idx = args
    room = sample_room(np.random.default_rng(derive_seed(cfg.seed, room_idx)), cfg)
    last_error = None
    for attempt in range(cfg.max_retries):
        seed = derive_seed(cfg.seed, room_idx, const_idx, attempt)
        rng = np.random.default_rng(seed)
        try:
            scene = sample_constellation(room, rng, cfg)
            rirs = synthesize(scene, synth_cfg, rng, seed=seed)
        except (InfeasibleDrrError, SamplerError) as exc:
            log.info("room %d constellation %d attempt %d redrawn: %s",
                     room_idx, const_idx, attempt, exc)
            last_error = exc
            continue
        return DatasetRecord(room_idx, const_idx, scene, rirs, scene.d,
                             distance_to_class(scene.d), seed, attempt + 1)
    raise SamplerError(f"room {room_idx} constellation {const_idx}: "
                       f"gave up after {cfg.max_retries} attempts ({last_error})")


def record_indices(cfg: SamplerConfig, start: int = 0):
    n = cfg.constellations_per_room
    return [(i // n, i % n) for i in range(start, cfg.rooms * n)]


def generate_dataset(cfg: SamplerConfig, synth_cfg: SynthConfig = SynthConfig(),
                     sink: Optional[Callable[[DatasetRecord], None]] = None,
                     workers: int = 1, start: int = 0) -> Iterator[DatasetRecord]:
    """Yield ``rooms * constellations_per_room`` records in index order.

    Parameters
    ----------
    cfg, synth_cfg : SamplerConfig, SynthConfig
    sink : callable, optional
        Called with every record before it is yielded.
    workers : int
        Number of worker processes; output does not depend on it.
    start : int
        Flat index of the first record, for resuming interrupted runs.
    """
    jobs = [(cfg, synth_cfg, r, c) for r, c in record_indices(cfg, start)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            for rec in pool.map(_record, jobs, chunksize=8):
                if sink is not None:
                    sink(rec)
                yield rec
    else:
        for job in jobs:
            rec = _record(job)
            if sink is not None:
                sink(rec)
            yield rec
