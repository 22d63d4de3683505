"""Synthetic 28-class movement corpus.

Classes 1-10 are dorsiflexion from different starting orientations; 11-28 are
rotations about the other two axes, shakes, and the phone lying still.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signals import GRAVITY, Segment, SynthesisParams, synthesize

_S = GRAVITY / np.sqrt(2.0)

# starting orientation of the phone, expressed as the gravity vector it reads
_ORIENTATIONS = [
    (0.0, 0.0, GRAVITY),
    (0.0, 0.0, -GRAVITY),
    (0.0, GRAVITY, 0.0),
    (0.0, -GRAVITY, 0.0),
    (GRAVITY, 0.0, 0.0),
    (-GRAVITY, 0.0, 0.0),
    (0.0, _S, _S),
    (0.0, -_S, _S),
    (_S, 0.0, _S),
    (0.0, _S, -_S),
]


@dataclass(frozen=True)
class MovementClass:
    number: int
    kind: str
    axis: str | None
    gravity: tuple[float, float, float]
    amplitude: tuple[float, float]
    frequency_hz: tuple[float, float]
    duration_s: tuple[float, float]


def _build_classes() -> dict[int, MovementClass]:
    classes = {}
    for i in range(10):
        classes[i + 1] = MovementClass(i + 1, "dorsiflexion", "x", _ORIENTATIONS[i], (1.0, 4.0), (0.8, 3.0), (1.5, 3.0))
    number = 11
    for axis in ("y", "z"):
        for g in _ORIENTATIONS[:5]:
            classes[number] = MovementClass(number, "rotation", axis, g, (1.0, 4.0), (0.5, 2.5), (1.5, 3.0))
            number += 1
    for axis, g in [("y", _ORIENTATIONS[0]), ("z", _ORIENTATIONS[0]), ("y", _ORIENTATIONS[2]),
                    ("z", _ORIENTATIONS[4]), ("y", _ORIENTATIONS[6])]:
        classes[number] = MovementClass(number, "shake", axis, g, (2.0, 6.0), (3.0, 7.0), (1.0, 2.0))
        number += 1
    while number <= 28:
        classes[number] = MovementClass(number, "still", None, (0.0, 0.0, 0.0), (0.0, 0.0), (1.0, 1.0), (1.0, 3.0))
        number += 1
    return classes


MOVEMENT_CLASSES = _build_classes()


def subject_ids(n_subjects: int) -> list[str]:
    return [f"S{i + 1:02d}" for i in range(n_subjects)]


def make_corpus(
    n_segments: int = 600,
    n_subjects: int = 20,
    noise_std: float = 0.3,
    dorsiflexion_fraction: float = 0.5,
    seed: int = 0,
    sample_rate_hz: float = 50.0,
) -> list[Segment]:
    """Seeded corpus of labeled segments spread round-robin over subjects.

    Each subject gets a personal amplitude and tempo scale so that a
    subject-wise split actually tests generalisation across people.
    """
    if n_segments < 0 or n_subjects < 1:
        raise ValueError("n_segments must be >= 0 and n_subjects >= 1")
    rng = np.random.default_rng(seed)
    subjects = subject_ids(n_subjects)
    amp_scale = rng.uniform(0.8, 1.25, size=n_subjects)
    tempo_scale = rng.uniform(0.85, 1.15, size=n_subjects)

    n_pos = int(round(n_segments * dorsiflexion_fraction))
    positives = [1 + i % 10 for i in range(n_pos)]
    negatives = [11 + i % 18 for i in range(n_segments - n_pos)]
    order = positives + negatives

    segments = []
    for i, number in enumerate(order):
        cls = MOVEMENT_CLASSES[number]
        s = i % n_subjects
        params = SynthesisParams(
            kind=cls.kind,
            amplitude=rng.uniform(*cls.amplitude) * amp_scale[s],
            frequency_hz=rng.uniform(*cls.frequency_hz) * tempo_scale[s],
            duration_s=rng.uniform(*cls.duration_s),
            noise_std=noise_std,
            dominant_axis=cls.axis,
            seed=int(rng.integers(2**32)),
            sample_rate_hz=sample_rate_hz,
            gravity=cls.gravity,
            phase=rng.uniform(0.0, 2.0 * np.pi),
            subject_id=subjects[s],
            movement_class=number,
        )
        segments.append(synthesize(params))
    return segments
