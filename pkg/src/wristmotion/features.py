"""Per-segment statistical descriptors, min-max normalization and live indicators."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, SegmentTooShortError
from .signals import CHANNELS, Segment

STATS = ("mean", "min", "max", "std", "var", "skew", "kurtosis")
FEATURE_NAMES = tuple(f"{ch}.{st}" for ch in CHANNELS for st in STATS)
N_FEATURES = len(FEATURE_NAMES)
META_COLUMNS = ("label", "subject_id", "movement_class")


def channel_stats(x: np.ndarray) -> np.ndarray:
    """Mean, min, max, std, var, skew, excess kurtosis for each column of ``x``.

    Moments are population moments. A column with zero variance gets skew and
    kurtosis 0.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return channel_stats(x[:, None])[0]
    if x.shape[0] < 2:
        raise SegmentTooShortError("statistics need at least 2 samples")
    mean = x.mean(axis=0)
    d = x - mean
    m2 = np.mean(d**2, axis=0)
    # variance below the rounding noise of the mean counts as zero
    degenerate = m2 <= (np.finfo(float).resolution * np.abs(mean)) ** 2
    # standardize first so tiny variances cannot underflow in m2**2
    z = d / np.sqrt(np.where(degenerate, 1.0, m2))
    skew = np.where(degenerate, 0.0, np.mean(z**3, axis=0))
    kurt = np.where(degenerate, 0.0, np.mean(z**4, axis=0) - 3.0)
    var = np.where(degenerate, 0.0, m2)
    return np.stack([mean, x.min(axis=0), x.max(axis=0), np.sqrt(var), var, skew, kurt], axis=1)


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (N_FEATURES,):
            raise DataError(f"feature vector must have {N_FEATURES} values, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __getitem__(self, name: str) -> float:
        return float(self.values[self.names.index(name)])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values.tolist()))


def extract(segment: Segment) -> FeatureVector:
    return FeatureVector(channel_stats(segment.data).reshape(-1))


def extract_matrix(segments: Sequence[Segment]) -> np.ndarray:
    if not segments:
        return np.empty((0, N_FEATURES))
    return np.stack([extract(s).values for s in segments])


@dataclass(frozen=True, eq=False)
class Normalizer:
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        mins = np.array(self.mins, dtype=float)
        maxs = np.array(self.maxs, dtype=float)
        if mins.shape != maxs.shape or mins.ndim != 1:
            raise DataError("normalizer bounds must be 1-d arrays of equal length")
        if np.any(mins > maxs):
            raise DataError("normalizer has min > max")
        mins.setflags(write=False)
        maxs.setflags(write=False)
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    def apply(self, v) -> np.ndarray:
        """Scale to [0, 1] by the training range, clamping values outside it.

        Features that were constant during fitting map to 0.
        """
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.mins.size:
            raise DataError(f"expected {self.mins.size} features, got {v.shape[-1]}")
        span = self.maxs - self.mins
        constant = span == 0
        # a subnormal span can overflow to inf; the clip below maps it to 1
        with np.errstate(over="ignore"):
            out = (v - self.mins) / np.where(constant, 1.0, span)
        out = np.where(constant, 0.0, out)
        return np.clip(out, 0.0, 1.0)


def fit_normalizer(feature_vectors) -> Normalizer:
    X = np.asarray([getattr(v, "values", v) for v in feature_vectors], dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError("need at least one feature vector to fit a normalizer")
    return Normalizer(X.min(axis=0), X.max(axis=0))


def rom_indicator(segment: Segment) -> float:
    """Range-of-motion proxy: population standard deviation of gx."""
    if len(segment) < 2:
        raise SegmentTooShortError("rom indicator needs at least 2 samples")
    return float(np.std(segment.channel("gx")))


def zero_crossings(signal) -> int:
    """Sign changes between consecutive samples.

    An exact zero takes the sign of the last nonzero sample before it; leading
    zeros count as no sign at all.
    """
    s = np.sign(np.asarray(signal, dtype=float))
    if s.size < 2:
        return 0
    idx = np.where(s != 0, np.arange(s.size), 0)
    np.maximum.accumulate(idx, out=idx)
    s = s[idx]
    return int(np.count_nonzero(s[:-1] * s[1:] < 0))


def crossing_rate(segment: Segment, channel: str = "gx") -> float:
    """Zero crossings of ``channel`` per second of segment duration."""
    return zero_crossings(segment.channel(channel)) / segment.duration_s


def dominant_frequency(signal, sample_rate: float) -> float:
    """Frequency of the strongest nonzero DFT bin of the mean-removed signal.

    Returns 0.0 when the signal has no energy away from DC.
    """
    x = np.asarray(signal, dtype=float)
    if x.size < 4:
        raise SegmentTooShortError("dominant frequency needs at least 4 samples")
    if not sample_rate > 0:
        raise ValueError("sample_rate must be > 0")
    mags = np.abs(np.fft.rfft(x - x.mean()))[1:]
    scale = np.abs(x).max() * x.size
    if scale == 0 or mags.max() <= 1e-12 * scale:
        return 0.0
    freqs = np.fft.rfftfreq(x.size, d=1.0 / sample_rate)[1:]
    return float(freqs[int(np.argmax(mags))])


def write_feature_csv(path, segments: Sequence[Segment], X: np.ndarray | None = None) -> None:
    """Export one row per segment: the 42 named features then label, subject, class."""
    if X is None:
        X = extract_matrix(segments)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(FEATURE_NAMES + META_COLUMNS)
        for seg, row in zip(segments, X):
            label = "" if seg.label is None else ("dorsiflexion" if seg.label else "other")
            w.writerow([repr(float(v)) for v in row] + [label, seg.subject_id or "", seg.movement_class or ""])


def read_feature_csv(path) -> tuple[np.ndarray, list[dict]]:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != FEATURE_NAMES + META_COLUMNS:
            raise DataError(f"{path}: unexpected feature CSV header")
        rows, meta = [], []
        for row in reader:
            rows.append([float(v) for v in row[:N_FEATURES]])
            label, subject, mc = row[N_FEATURES:]
            meta.append({
                "label": None if label == "" else label == "dorsiflexion",
                "subject_id": subject or None,
                "movement_class": int(mc) if mc else None,
            })
    return np.asarray(rows, dtype=float).reshape(-1, N_FEATURES), meta
