"""Core time-series types, windowing and the synthetic movement generator.

A :class:`Segment` stores its samples column-wise (``t`` plus an ``(n, 6)``
array in channel order ``ax, ay, az, gx, gy, gz``); :class:`SensorSample`
is the row view for callers that want one reading at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, SegmentTooShortError

CHANNELS = ("ax", "ay", "az", "gx", "gy", "gz")
AXES = ("x", "y", "z")
N_CLASSES = 28
DORSIFLEXION_CLASSES = range(1, 11)
GRAVITY = 9.81
DEFAULT_SAMPLE_RATE = 50.0

# lever arm from wrist to phone centre; couples angular acceleration into the accelerometer
_LEVER_M = 0.1
# accelerometer gain (m/s^2 per rad/s) for the linear component of a shake
_SHAKE_ACCEL_GAIN = 3.0


@dataclass(frozen=True)
class SensorSample:
    t: float
    ax: float
    ay: float
    az: float
    gx: float
    gy: float
    gz: float

    def __post_init__(self):
        if not math.isfinite(self.t) or self.t < 0:
            raise DataError(f"sample time must be finite and >= 0, got {self.t}")
        if not all(math.isfinite(v) for v in self.values()):
            raise DataError(f"non-finite channel value at t={self.t}")

    def values(self) -> tuple[float, ...]:
        return (self.ax, self.ay, self.az, self.gx, self.gy, self.gz)


def is_dorsiflexion_class(movement_class: int) -> bool:
    return movement_class in DORSIFLEXION_CLASSES


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Segment:
    """A contiguous run of samples, optionally labeled.

    ``label`` is True for dorsiflexion. When ``movement_class`` is given the
    label is derived from it (classes 1-10 are dorsiflexion) and a conflicting
    explicit label is rejected. Unlabeled segments (live windows) carry
    ``label=None``.
    """

    t: np.ndarray
    data: np.ndarray
    subject_id: str | None = None
    movement_class: int | None = None
    label: bool | None = None
    sample_rate_hz: float | None = None

    def __post_init__(self):
        t = _frozen(self.t)
        data = _frozen(self.data)
        if t.ndim != 1 or data.shape != (t.size, len(CHANNELS)):
            raise DataError(f"expected t of shape (n,) and data of shape (n, 6), got {t.shape} and {data.shape}")
        if t.size < 2:
            raise SegmentTooShortError(f"segment needs at least 2 samples, got {t.size}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(data))):
            raise DataError("segment contains non-finite values")
        if t[0] < 0:
            raise DataError("sample times must be >= 0")
        if np.any(np.diff(t) <= 0):
            raise DataError("segment timestamps must be strictly increasing")

        label = self.label
        if self.movement_class is not None:
            mc = int(self.movement_class)
            if not 1 <= mc <= N_CLASSES:
                raise DataError(f"movement_class must be in 1..{N_CLASSES}, got {mc}")
            derived = is_dorsiflexion_class(mc)
            if label is not None and bool(label) != derived:
                raise DataError(f"label {label} contradicts movement class {mc}")
            object.__setattr__(self, "movement_class", mc)
            label = derived
        if label is not None:
            label = bool(label)

        rate = self.sample_rate_hz
        if rate is None:
            rate = 1.0 / float(np.median(np.diff(t)))
        if not rate > 0:
            raise DataError("sample rate must be positive")

        object.__setattr__(self, "t", t)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "sample_rate_hz", float(rate))
        if self.subject_id is not None:
            object.__setattr__(self, "subject_id", str(self.subject_id))

    @classmethod
    def from_samples(cls, samples: Sequence[SensorSample], **meta) -> "Segment":
        t = [s.t for s in samples]
        data = [s.values() for s in samples]
        return cls(np.asarray(t, dtype=float), np.asarray(data, dtype=float).reshape(-1, 6), **meta)

    @property
    def samples(self) -> list[SensorSample]:
        return [SensorSample(float(ti), *map(float, row)) for ti, row in zip(self.t, self.data)]

    def __len__(self):
        return self.t.size

    def channel(self, name: str) -> np.ndarray:
        return self.data[:, CHANNELS.index(name)]

    @property
    def duration_s(self) -> float:
        """Time covered by the samples, counting one sample period for the last one."""
        return float(self.t[-1] - self.t[0]) + 1.0 / self.sample_rate_hz

    def slice(self, start: int, stop: int) -> "Segment":
        return Segment(
            self.t[start:stop],
            self.data[start:stop],
            subject_id=self.subject_id,
            movement_class=self.movement_class,
            label=self.label,
            sample_rate_hz=self.sample_rate_hz,
        )

    def shifted(self, dt: float) -> "Segment":
        return Segment(self.t + dt, self.data, self.subject_id, self.movement_class, self.label, self.sample_rate_hz)

    def equals(self, other: "Segment") -> bool:
        return (
            np.array_equal(self.t, other.t)
            and np.array_equal(self.data, other.data)
            and self.subject_id == other.subject_id
            and self.movement_class == other.movement_class
            and self.label == other.label
            and self.sample_rate_hz == other.sample_rate_hz
        )


KINDS = ("dorsiflexion", "rotation", "shake", "still")
_DEFAULT_AXIS = {"dorsiflexion": "x", "rotation": "z", "shake": "y", "still": "x"}


@dataclass(frozen=True)
class SynthesisParams:
    kind: str
    amplitude: float = 0.0
    frequency_hz: float = 1.0
    duration_s: float = 1.0
    noise_std: float = 0.0
    dominant_axis: str | None = None
    seed: int = 0
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE
    gravity: tuple[float, float, float] = (0.0, 0.0, GRAVITY)
    phase: float = 0.0
    subject_id: str | None = None
    movement_class: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.amplitude >= 0:
            raise ValueError("amplitude must be >= 0")
        if not self.frequency_hz > 0:
            raise ValueError("frequency_hz must be > 0")
        if not self.duration_s > 0:
            raise ValueError("duration_s must be > 0")
        if not self.noise_std >= 0:
            raise ValueError("noise_std must be >= 0")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be > 0")
        if len(self.gravity) != 3:
            raise ValueError("gravity must have three components")
        axis = self.dominant_axis or _DEFAULT_AXIS[self.kind]
        if axis not in AXES:
            raise ValueError(f"dominant_axis must be one of {AXES}")
        if self.kind == "dorsiflexion" and axis != "x":
            raise ValueError("dorsiflexion oscillates about the x axis")
        if self.kind in ("rotation", "shake") and axis == "x":
            raise ValueError(f"{self.kind} must oscillate about y or z")
        object.__setattr__(self, "dominant_axis", axis)
        object.__setattr__(self, "gravity", tuple(float(g) for g in self.gravity))

    @property
    def n_samples(self) -> int:
        return max(2, int(round(self.duration_s * self.sample_rate_hz)))


def _tangential_axis(rot_axis: int, gravity: np.ndarray) -> int:
    """Accelerometer axis that picks up angular acceleration about ``rot_axis``."""
    g = gravity / (np.linalg.norm(gravity) or 1.0)
    e = np.zeros(3)
    e[rot_axis] = 1.0
    tangent = np.cross(e, g)
    if np.linalg.norm(tangent) < 1e-9:
        return (rot_axis + 1) % 3
    return int(np.argmax(np.abs(tangent)))


def synthesize(params: SynthesisParams) -> Segment:
    """Generate one movement segment, deterministic in ``params`` (seed included).

    ``dorsiflexion`` oscillates on gx, ``rotation`` and ``shake`` on the
    dominant gyro axis (shakes add a linear accelerometer component), and
    ``still`` is noise only. Non-still kinds carry a constant gravity offset.
    """
    n = params.n_samples
    fs = params.sample_rate_hz
    t = np.arange(n) / fs
    data = np.zeros((n, 6))

    if params.kind != "still":
        w = 2.0 * math.pi * params.frequency_hz
        arg = w * t + params.phase
        axis = AXES.index(params.dominant_axis)
        gravity = np.asarray(params.gravity)
        data[:, 3 + axis] = params.amplitude * np.sin(arg)
        data[:, :3] += gravity
        tangential = _tangential_axis(axis, gravity)
        data[:, tangential] += _LEVER_M * params.amplitude * w * np.cos(arg)
        if params.kind == "shake":
            data[:, axis] += _SHAKE_ACCEL_GAIN * params.amplitude * np.cos(arg)

    if params.noise_std > 0:
        rng = np.random.default_rng(params.seed)
        data += rng.normal(0.0, params.noise_std, size=data.shape)

    label = params.kind == "dorsiflexion"
    return Segment(
        t,
        data,
        subject_id=params.subject_id,
        movement_class=params.movement_class,
        label=label,
        sample_rate_hz=fs,
    )


def window(source: Segment | Iterable[SensorSample], length_s: float, stride_s: float) -> list[Segment]:
    """Cut ``source`` into windows ``[k*stride, k*stride + length)`` from its first sample.

    The input is taken to span ``[t0, t_last + 1/rate]``; windows that would
    run past that end are dropped.
    """
    if not length_s > 0 or not stride_s > 0:
        raise ValueError("length_s and stride_s must be > 0")
    if not isinstance(source, Segment):
        samples = list(source)
        if len(samples) < 2:
            return []
        source = Segment.from_samples(samples)

    t = source.t
    eps = 1e-9 * max(1.0, float(t[-1]))
    span_end = t[-1] + 1.0 / source.sample_rate_hz
    out = []
    k = 0
    while True:
        start = t[0] + k * stride_s
        end = start + length_s
        if end > span_end + eps:
            break
        lo = int(np.searchsorted(t, start - eps, side="left"))
        hi = int(np.searchsorted(t, end - eps, side="left"))
        if hi - lo >= 2:
            out.append(source.slice(lo, hi))
        k += 1
    return out
