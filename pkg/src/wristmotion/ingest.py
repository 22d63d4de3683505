"""Sensor/annotation CSV files, dataset manifests and subject-wise splits.

Sensor CSV: header ``t,ax,ay,az,gx,gy,gz``, one row per sample.
Annotation CSV: header ``start_s,end_s,label`` with label ``dorsiflexion`` or
``other``; an optional fourth column ``movement_class`` is read when present.
Manifest: one ``sensor_file<TAB>annotation_file<TAB>subject_id`` line per
recording, paths relative to the manifest; blank lines and ``#`` comments
are skipped.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import AnnotationRangeError, DataError, ParseError, SegmentTooShortError
from .signals import CHANNELS, Segment

SENSOR_HEADER = ("t",) + CHANNELS
ANNOTATION_HEADER = ("start_s", "end_s", "label")
LABELS = {"dorsiflexion": True, "other": False}


@dataclass(frozen=True)
class Annotation:
    start_s: float
    end_s: float
    label: bool
    movement_class: int | None = None

    def __post_init__(self):
        if not (0 <= self.start_s < self.end_s):
            raise DataError(f"annotation needs 0 <= start < end, got ({self.start_s}, {self.end_s})")


def _float(text: str, path, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(path, line, f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(path, line, f"non-finite value: {text!r}")
    return value


def read_sensor_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(t, data)`` with data in channel order ax..gz."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != SENSOR_HEADER:
            raise ParseError(path, 1, f"expected header {','.join(SENSOR_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(SENSOR_HEADER):
                raise ParseError(path, lineno, f"expected {len(SENSOR_HEADER)} fields, got {len(row)}")
            rows.append([_float(v, path, lineno) for v in row])
            if len(rows) > 1 and rows[-1][0] < rows[-2][0]:
                raise ParseError(path, lineno, "time stamps go backwards")
    a = np.asarray(rows, dtype=float).reshape(-1, len(SENSOR_HEADER))
    return a[:, 0], a[:, 1:]


def write_sensor_csv(path, t, data) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SENSOR_HEADER)
        for ti, row in zip(np.asarray(t, dtype=float), np.asarray(data, dtype=float)):
            w.writerow([repr(float(ti))] + [repr(float(v)) for v in row])


def read_annotations(path) -> list[Annotation]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return out
        header = tuple(h.strip() for h in header)
        with_class = header == ANNOTATION_HEADER + ("movement_class",)
        if header != ANNOTATION_HEADER and not with_class:
            raise ParseError(path, 1, f"expected header {','.join(ANNOTATION_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(path, lineno, f"expected {len(header)} fields, got {len(row)}")
            start, end = _float(row[0], path, lineno), _float(row[1], path, lineno)
            label = row[2].strip()
            if label not in LABELS:
                raise ParseError(path, lineno, f"label must be one of {sorted(LABELS)}, got {label!r}")
            mc = None
            if with_class and row[3].strip():
                try:
                    mc = int(row[3])
                except ValueError:
                    raise ParseError(path, lineno, f"bad movement class {row[3]!r}") from None
            try:
                out.append(Annotation(start, end, LABELS[label], mc))
            except DataError as exc:
                raise ParseError(path, lineno, str(exc)) from None
    return out


def write_annotations(path, annotations: Iterable[Annotation]) -> None:
    annotations = list(annotations)
    with_class = any(a.movement_class is not None for a in annotations)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ANNOTATION_HEADER + (("movement_class",) if with_class else ()))
        for a in annotations:
            row = [repr(float(a.start_s)), repr(float(a.end_s)), "dorsiflexion" if a.label else "other"]
            if with_class:
                row.append("" if a.movement_class is None else str(a.movement_class))
            w.writerow(row)


def _rate(t: np.ndarray) -> float:
    return 1.0 / float(np.median(np.diff(t)))


def read_recording(sensor_file, annotation_file, subject_id) -> list[Segment]:
    """One labeled segment per annotation, holding the samples with start <= t <= end.

    The recording spans ``[t0, t_last + 1/rate]``; annotations reaching
    outside it raise :class:`AnnotationRangeError`.
    """
    t, data = read_sensor_csv(sensor_file)
    annotations = read_annotations(annotation_file)
    if not annotations:
        return []
    if t.size < 2:
        raise DataError(f"{sensor_file}: recording has fewer than 2 samples")
    rate = _rate(t)
    span = (t[0], t[-1] + 1.0 / rate)
    eps = 1e-9 * max(1.0, abs(span[1]))
    segments = []
    for a in annotations:
        if a.start_s < span[0] - eps or a.end_s > span[1] + eps:
            raise AnnotationRangeError(
                f"{annotation_file}: annotation ({a.start_s}, {a.end_s}) outside recording "
                f"[{span[0]}, {span[1]}]"
            )
        lo = int(np.searchsorted(t, a.start_s, side="left"))
        hi = int(np.searchsorted(t, a.end_s, side="right"))
        if hi - lo < 2:
            raise SegmentTooShortError(
                f"{annotation_file}: annotation ({a.start_s}, {a.end_s}) covers {hi - lo} sample(s)"
            )
        segments.append(
            Segment(t[lo:hi], data[lo:hi], subject_id=subject_id, movement_class=a.movement_class,
                    label=a.label, sample_rate_hz=rate)
        )
    return segments


def write_recording(sensor_file, annotation_file, segments: Sequence[Segment], gap_s: float = 0.5,
                    rest_noise_std: float = 0.0, seed: int = 0) -> None:
    """Lay ``segments`` out on one timeline with rests between them and write both files.

    Rest periods are zeros plus optional Gaussian noise. Samples are written
    with round-trip float text, so reading back returns them exactly.
    """
    if not segments:
        write_sensor_csv(sensor_file, np.empty(0), np.empty((0, 6)))
        write_annotations(annotation_file, [])
        return
    rng = np.random.default_rng(seed)
    rate = segments[0].sample_rate_hz
    ts, blocks, annotations = [], [], []
    cursor = 0.0
    for seg in segments:
        n_gap = int(round(gap_s * rate))
        if n_gap:
            ts.append(cursor + np.arange(n_gap) / rate)
            blocks.append(rng.normal(0.0, rest_noise_std, (n_gap, 6)) if rest_noise_std > 0 else np.zeros((n_gap, 6)))
            cursor += n_gap / rate
        local = seg.t - seg.t[0]
        seg_t = cursor + local
        ts.append(seg_t)
        blocks.append(seg.data)
        annotations.append(Annotation(float(seg_t[0]), float(seg_t[-1]), bool(seg.label), seg.movement_class))
        cursor = float(seg_t[-1]) + 1.0 / rate
    write_sensor_csv(sensor_file, np.concatenate(ts), np.concatenate(blocks))
    write_annotations(annotation_file, annotations)


@dataclass(frozen=True)
class ManifestEntry:
    sensor_file: Path
    annotation_file: Path
    subject_id: str


def read_manifest(path) -> list[ManifestEntry]:
    path = Path(path)
    base = path.parent
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or not all(p.strip() for p in parts):
                raise ParseError(path, lineno, "expected sensor_file<TAB>annotation_file<TAB>subject_id")
            entries.append(ManifestEntry(base / parts[0].strip(), base / parts[1].strip(), parts[2].strip()))
    return entries


def write_manifest(path, entries: Iterable[tuple[str, str, str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sensor, annotation, subject in entries:
            fh.write(f"{sensor}\t{annotation}\t{subject}\n")


@dataclass(frozen=True)
class Dataset:
    segments: tuple[Segment, ...]
    train: tuple[Segment, ...] | None = None
    test: tuple[Segment, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if (self.train is None) != (self.test is None):
            raise DataError("a split needs both partitions")
        if self.train is not None:
            object.__setattr__(self, "train", tuple(self.train))
            object.__setattr__(self, "test", tuple(self.test))
            shared = self.subjects(self.train) & self.subjects(self.test)
            if shared:
                raise DataError(f"subjects in both partitions: {sorted(shared)}")

    @staticmethod
    def subjects(segments: Iterable[Segment]) -> set[str]:
        return {s.subject_id for s in segments}

    @property
    def subject_ids(self) -> list[str]:
        return sorted(self.subjects(self.segments))


def load_dataset(manifest_path) -> Dataset:
    segments = []
    for entry in read_manifest(manifest_path):
        segments.extend(read_recording(entry.sensor_file, entry.annotation_file, entry.subject_id))
    return Dataset(tuple(segments))


def split_by_subject(dataset: Dataset, test_subjects: Iterable[str]) -> Dataset:
    """Route every segment to test if its subject is listed, otherwise to train."""
    test_subjects = {str(s) for s in test_subjects}
    if not test_subjects:
        raise DataError("test_subjects must not be empty")
    known = dataset.subjects(dataset.segments)
    unknown = test_subjects - known
    if unknown:
        raise DataError(f"unknown subjects: {sorted(unknown)}")
    train = tuple(s for s in dataset.segments if s.subject_id not in test_subjects)
    test = tuple(s for s in dataset.segments if s.subject_id in test_subjects)
    if not train:
        raise DataError("split leaves the training set empty")
    return Dataset(dataset.segments, train, test)
