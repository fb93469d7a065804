"""Domain types and geometric primitives.

All types are frozen dataclasses holding plain floats/tuples, so they can be
shared between worker processes without copying concerns. Angles are radians
everywhere in the library; degrees only appear in serialized dictionaries.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Optional, Tuple

import numpy as np

from .errors import DegenerateGeometryError, InvalidParameterError

Vec3 = Tuple[float, float, float]


def _vec3(value) -> Vec3:
    arr = np.asarray(value, dtype=float).reshape(-1)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"expected a finite 3-vector, got {value!r}")
    return (float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class Room:
    """Shoebox room with a target reverberation time.

    Parameters
    ----------
    length, width, height : float
        Dimensions along x, y and z in meters.
    t60 : float
        Reverberation time in seconds.
    """

    length: float
    width: float
    height: float
    t60: float

    def __post_init__(self):
        for name in ("length", "width", "height", "t60"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(f"room {name} must be > 0, got {value}")

    @property
    def dims(self) -> np.ndarray:
        return np.array([self.length, self.width, self.height])

    @property
    def volume(self) -> float:
        return self.length * self.width * self.height

    @property
    def surface(self) -> float:
        l, w, h = self.length, self.width, self.height
        return 2.0 * (l * w + l * h + w * h)

    def contains(self, point, margin=(0.0, 0.0, 0.0)) -> bool:
        """True if ``point`` lies strictly inside the room shrunk by ``margin``."""
        p = np.asarray(point, dtype=float)
        m = np.broadcast_to(np.asarray(margin, dtype=float), (3,))
        return bool(np.all(p > m) and np.all(p < self.dims - m))


class PatternKind(str, enum.Enum):
    OMNIDIRECTIONAL = "omnidirectional"
    SUBCARDIOID = "subcardioid"
    CARDIOID = "cardioid"
    SUPERCARDIOID = "supercardioid"
    HYPERCARDIOID = "hypercardioid"


# first-order coefficient a in gain = a + (1 - a) cos(theta)
PATTERN_COEFFICIENTS = {
    PatternKind.OMNIDIRECTIONAL: 1.0,
    PatternKind.SUBCARDIOID: 0.7,
    PatternKind.CARDIOID: 0.5,
    PatternKind.SUPERCARDIOID: 0.37,
    PatternKind.HYPERCARDIOID: 0.25,
}


@dataclass(frozen=True)
class DirectivityPattern:
    """First-order directivity ``a + (1 - a) cos(theta)``."""

    kind: PatternKind
    a: float

    def __post_init__(self):
        kind = PatternKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if not 0.0 <= self.a <= 1.0:
            raise InvalidParameterError(f"pattern coefficient must be in [0, 1], got {self.a}")
        if not math.isclose(self.a, PATTERN_COEFFICIENTS[kind]):
            raise InvalidParameterError(
                f"{kind.value} requires a={PATTERN_COEFFICIENTS[kind]}, got {self.a}")

    @classmethod
    def named(cls, kind) -> "DirectivityPattern":
        kind = PatternKind(kind)
        return cls(kind, PATTERN_COEFFICIENTS[kind])

    def gain(self, theta):
        return directivity_gain(self, theta)


OMNI = DirectivityPattern.named(PatternKind.OMNIDIRECTIONAL)
CARDIOID = DirectivityPattern.named(PatternKind.CARDIOID)


def look_vector(azimuth: float, elevation: float) -> np.ndarray:
    """Unit vector for a look direction given in radians."""
    ce = math.cos(elevation)
    return np.array([ce * math.cos(azimuth), ce * math.sin(azimuth), math.sin(elevation)])


@dataclass(frozen=True)
class Source:
    position: Vec3
    look_azimuth: float = 0.0
    look_elevation: float = 0.0
    pattern: DirectivityPattern = CARDIOID

    def __post_init__(self):
        object.__setattr__(self, "position", _vec3(self.position))

    @property
    def look(self) -> np.ndarray:
        return look_vector(self.look_azimuth, self.look_elevation)


@dataclass(frozen=True)
class MicPair:
    """Two microphones; ``orientation`` is the azimuth of the mic0 -> mic1 axis."""

    positions: Tuple[Vec3, Vec3]
    orientation: float = 0.0

    def __post_init__(self):
        p0, p1 = self.positions
        object.__setattr__(self, "positions", (_vec3(p0), _vec3(p1)))
        if self.spacing == 0:
            raise DegenerateGeometryError("microphones coincide")

    @classmethod
    def from_center(cls, center, orientation: float, spacing: float = 0.08) -> "MicPair":
        c = np.asarray(center, dtype=float)
        half = 0.5 * spacing * np.array([math.cos(orientation), math.sin(orientation), 0.0])
        return cls((tuple(c - half), tuple(c + half)), orientation)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.positions[0]) + np.asarray(self.positions[1]))

    @property
    def spacing(self) -> float:
        return float(np.linalg.norm(np.subtract(self.positions[1], self.positions[0])))


@dataclass(frozen=True)
class Scene:
    """Source and microphone pair in a room.

    ``d`` is the distance from the source to the pair center. It is computed
    when omitted and checked against the geometry otherwise.
    """

    room: Room
    source: Source
    mics: MicPair
    d: Optional[float] = None

    def __post_init__(self):
        if not self.room.contains(self.source.position):
            raise DegenerateGeometryError(f"source {self.source.position} outside room")
        for i, p in enumerate(self.mics.positions):
            if not self.room.contains(p):
                raise DegenerateGeometryError(f"mic{i} {p} outside room")
        d = float(np.linalg.norm(self.mics.center - np.asarray(self.source.position)))
        if self.d is None:
            object.__setattr__(self, "d", d)
        elif abs(self.d - d) > 1e-9:
            raise DegenerateGeometryError(f"stated distance {self.d} != geometric {d}")

    def mic_distance(self, mic_index: int) -> float:
        return float(np.linalg.norm(
            np.asarray(self.mics.positions[mic_index]) - np.asarray(self.source.position)))

    def to_dict(self) -> dict:
        s = self.source
        return {
            "room": asdict(self.room),
            "source": {
                "position": list(s.position),
                "look_azimuth_deg": math.degrees(s.look_azimuth),
                "look_elevation_deg": math.degrees(s.look_elevation),
                "pattern": s.pattern.kind.value,
            },
            "mics": {
                "positions": [list(p) for p in self.mics.positions],
                "orientation_deg": math.degrees(self.mics.orientation),
            },
            "distance": self.d,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scene":
        src = data["source"]
        source = Source(
            src["position"],
            math.radians(src.get("look_azimuth_deg", 0.0)),
            math.radians(src.get("look_elevation_deg", 0.0)),
            DirectivityPattern.named(src.get("pattern", "cardioid")),
        )
        mics = MicPair(tuple(data["mics"]["positions"]),
                       math.radians(data["mics"].get("orientation_deg", 0.0)))
        return cls(Room(**data["room"]), source, mics)


@dataclass(frozen=True)
class SynthConfig:
    """Global synthesis parameters.

    ``solve_mode`` selects how the tail scale is found: ``"realization"``
    matches the DRR of the drawn realization exactly, ``"expectation"``
    matches it on average (cross terms dropped).
    """

    fs: float = 16000.0
    n_samples: int = 16384
    image_order: int = 3
    kappa: float = 1.0
    drr_window: int = 40
    speed_of_sound: float = 343.0
    highpass_cutoff: float = 100.0
    alpha_range: Tuple[float, float] = (2.5, 5.5)
    beta: float = 1.0
    solve_mode: str = "realization"

    def __post_init__(self):
        object.__setattr__(self, "alpha_range", tuple(float(v) for v in self.alpha_range))
        checks = [
            ("fs", self.fs > 0),
            ("n_samples", self.n_samples > 0),
            ("image_order", self.image_order >= 0),
            ("kappa", self.kappa > 0),
            ("drr_window", self.drr_window >= 0),
            ("speed_of_sound", self.speed_of_sound > 0),
            ("highpass_cutoff", 0 < self.highpass_cutoff < self.fs / 2),
            ("alpha_range", len(self.alpha_range) == 2
             and 0 < self.alpha_range[0] <= self.alpha_range[1]),
            ("beta", self.beta > 0),
            ("solve_mode", self.solve_mode in ("realization", "expectation")),
        ]
        for name, ok in checks:
            if not ok:
                raise InvalidParameterError(f"invalid {name}: {getattr(self, name)!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alpha_range"] = list(self.alpha_range)
        return d

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


def angle_between(source: Source, target_point) -> Tuple[float, float, float]:
    """Direction of ``target_point`` seen from the source, relative to its look direction.

    Parameters
    ----------
    source : Source
    target_point : array_like, shape (3,)

    Returns
    -------
    azimuth, elevation : float
        Direction in the source's local frame (x along the look direction,
        z in the vertical plane containing it), radians.
    theta : float
        Polar angle between look direction and target direction, so that
        ``cos(theta) == cos(elevation) * cos(azimuth)``.
    """
    v = np.asarray(target_point, dtype=float) - np.asarray(source.position)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise DegenerateGeometryError("target coincides with source position")
    v = v / norm
    az, el = source.look_azimuth, source.look_elevation
    # rotate by -az about z, then by +el about y
    ca, sa = math.cos(az), math.sin(az)
    x1, y1, z1 = ca * v[0] + sa * v[1], -sa * v[0] + ca * v[1], v[2]
    ce, se = math.cos(el), math.sin(el)
    x2, z2 = ce * x1 + se * z1, -se * x1 + ce * z1
    rel_az = math.atan2(y1, x2)
    rel_el = math.atan2(z2, math.hypot(x2, y1))
    theta = math.atan2(math.hypot(y1, z2), x2)
    return rel_az, rel_el, theta


def directivity_gain(pattern: DirectivityPattern, theta):
    return pattern.a + (1.0 - pattern.a) * np.cos(theta)
