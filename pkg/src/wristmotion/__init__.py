"""Wrist dorsiflexion recognition from phone accelerometer/gyroscope data.

Pipeline: segments -> 42 statistical descriptors -> min-max normalization ->
mRMR selection -> classifier (1-NN, linear SVM, MLP) or a 1-D CNN on raw
windows; plus calibration and rule-based difficulty adjustment driven by a
range-of-motion and a speed indicator.
"""

from .errors import (
    AnnotationRangeError,
    DataError,
    ModelFormatError,
    NotCalibratedError,
    ParseError,
    SegmentTooShortError,
)
from .signals import CHANNELS, Segment, SensorSample, SynthesisParams, synthesize, window

__version__ = "0.1.0"

__all__ = [
    "AnnotationRangeError",
    "CHANNELS",
    "DataError",
    "ModelFormatError",
    "NotCalibratedError",
    "ParseError",
    "Segment",
    "SegmentTooShortError",
    "SensorSample",
    "SynthesisParams",
    "synthesize",
    "window",
]
