"""Calibration and rule-based difficulty adjustment for the shake exercise.

Two thresholds are tracked independently: range of motion (std of gx, rad/s)
and speed (gx zero crossings per second). Every registered shake records
whether each indicator reached its threshold. After 10 shakes the epoch
closes: a success rate of at least 0.9 raises that threshold by
``step_fraction``, a rate below 0.6 lowers it, anything in between holds,
and the outcome window is cleared.

All transitions are pure: they take a :class:`DifficultyState` and return a
new one.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import DataError, NotCalibratedError
from .features import crossing_rate, rom_indicator
from .signals import Segment, window

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

EPOCH_LENGTH = 10
CALIBRATION_SHAKES = 5
CALIBRATION_FACTOR = 0.9
RAISE_AT = 0.9
LOWER_BELOW = 0.6
DEFAULT_STEP = 0.1
DEFAULT_ROM_BOUNDS = (0.1, 10.0)
DEFAULT_SPEED_BOUNDS = (0.5, 10.0)
DEFAULT_SPEED_CUTS = (2.0, 5.0)
SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class ShakeEvent:
    rom_value: float
    speed_value: float
    dorsiflexion: bool = True
    t: float = 0.0

    def __post_init__(self):
        for name in ("rom_value", "speed_value"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise DataError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class EpochRecord:
    """What one closed epoch did to the thresholds."""

    rom_success_rate: float
    speed_success_rate: float
    rom_decision: str
    speed_decision: str
    rom_threshold: float
    speed_threshold: float


@dataclass(frozen=True)
class DifficultyState:
    rom_threshold: float
    speed_threshold: float
    step_fraction: float = DEFAULT_STEP
    rom_bounds: tuple[float, float] = DEFAULT_ROM_BOUNDS
    speed_bounds: tuple[float, float] = DEFAULT_SPEED_BOUNDS
    rom_history: tuple[bool, ...] = ()
    speed_history: tuple[bool, ...] = ()
    calibrated: bool = False
    epochs: tuple[EpochRecord, ...] = ()

    def __post_init__(self):
        if not 0 < self.step_fraction < 1:
            raise DataError("step_fraction must be in (0, 1)")
        for name in ("rom", "speed"):
            lo, hi = getattr(self, f"{name}_bounds")
            if not 0 < lo <= hi:
                raise DataError(f"{name} bounds must satisfy 0 < floor <= ceiling")
            value = getattr(self, f"{name}_threshold")
            if not lo <= value <= hi:
                raise DataError(f"{name} threshold {value} outside bounds [{lo}, {hi}]")
            if len(getattr(self, f"{name}_history")) >= EPOCH_LENGTH:
                raise DataError("outcome window holds at most 9 pending shakes")
        object.__setattr__(self, "rom_bounds", tuple(map(float, self.rom_bounds)))
        object.__setattr__(self, "speed_bounds", tuple(map(float, self.speed_bounds)))

    @property
    def history_capacity(self) -> int:
        return EPOCH_LENGTH


def _clamp(value: float, bounds: tuple[float, float]) -> float:
    return min(max(value, bounds[0]), bounds[1])


def calibrate(first_five: Sequence[ShakeEvent], step_fraction: float = DEFAULT_STEP,
              rom_bounds=DEFAULT_ROM_BOUNDS, speed_bounds=DEFAULT_SPEED_BOUNDS) -> DifficultyState:
    """Initial thresholds at 0.9 x the median of five dorsiflexion shakes."""
    events = list(first_five)
    if len(events) < CALIBRATION_SHAKES:
        raise NotCalibratedError(f"calibration needs {CALIBRATION_SHAKES} shakes, got {len(events)}")
    if len(events) > CALIBRATION_SHAKES:
        raise DataError(f"calibration takes exactly {CALIBRATION_SHAKES} shakes, got {len(events)}")
    if not all(e.dorsiflexion for e in events):
        raise DataError("calibration shakes must all be recognised dorsiflexion")
    rom = CALIBRATION_FACTOR * float(np.median([e.rom_value for e in events]))
    speed = CALIBRATION_FACTOR * float(np.median([e.speed_value for e in events]))
    return DifficultyState(
        rom_threshold=_clamp(rom, rom_bounds),
        speed_threshold=_clamp(speed, speed_bounds),
        step_fraction=step_fraction,
        rom_bounds=rom_bounds,
        speed_bounds=speed_bounds,
        calibrated=True,
    )


def decide(success_rate: float) -> str:
    """'raise', 'lower' or 'hold' for one closed epoch."""
    if success_rate >= RAISE_AT:
        return "raise"
    if success_rate < LOWER_BELOW:
        return "lower"
    return "hold"


def _adjust(threshold: float, decision: str, step: float, bounds) -> float:
    if decision == "raise":
        threshold *= 1.0 + step
    elif decision == "lower":
        threshold *= 1.0 - step
    return _clamp(threshold, bounds)


def record_shake(state: DifficultyState, event: ShakeEvent) -> tuple[DifficultyState, EpochRecord | None]:
    """Register one dorsiflexion shake; returns the new state and the epoch record if one closed."""
    if not state.calibrated:
        raise NotCalibratedError("record_shake needs a calibrated state")
    if not event.dorsiflexion:
        raise DataError("only recognised dorsiflexion shakes are registered")
    rom_hist = state.rom_history + (event.rom_value >= state.rom_threshold,)
    speed_hist = state.speed_history + (event.speed_value >= state.speed_threshold,)
    if len(rom_hist) < EPOCH_LENGTH:
        return replace(state, rom_history=rom_hist, speed_history=speed_hist), None

    rom_rate = sum(rom_hist) / EPOCH_LENGTH
    speed_rate = sum(speed_hist) / EPOCH_LENGTH
    rom_decision, speed_decision = decide(rom_rate), decide(speed_rate)
    rom_t = _adjust(state.rom_threshold, rom_decision, state.step_fraction, state.rom_bounds)
    speed_t = _adjust(state.speed_threshold, speed_decision, state.step_fraction, state.speed_bounds)
    record = EpochRecord(rom_rate, speed_rate, rom_decision, speed_decision, rom_t, speed_t)
    new = replace(state, rom_threshold=rom_t, speed_threshold=speed_t, rom_history=(),
                  speed_history=(), epochs=state.epochs + (record,))
    return new, record


def speed_level(rate: float, cuts: tuple[float, float] = DEFAULT_SPEED_CUTS) -> str:
    if rate < 0:
        raise DataError("crossing rate must be >= 0")
    slow_below, fast_from = cuts
    if rate < slow_below:
        return "slow"
    if rate < fast_from:
        return "medium"
    return "fast"


def rom_regression_fit(indicator_values, ordinal_targets) -> tuple[float, float]:
    """Least-squares line ``target ~ slope * indicator + intercept``."""
    x = np.asarray(indicator_values, dtype=float)
    y = np.asarray(ordinal_targets, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError("indicator values and targets must be 1-d and of equal length")
    if np.unique(x).size < 2:
        raise DataError("regression needs at least two distinct indicator values")
    xm, ym = x.mean(), y.mean()
    slope = float(np.dot(x - xm, y - ym) / np.dot(x - xm, x - xm))
    return slope, float(ym - slope * xm)


def rom_regression_rmse(fit: tuple[float, float], indicator_values, ordinal_targets) -> float:
    slope, intercept = fit
    x = np.asarray(indicator_values, dtype=float)
    y = np.asarray(ordinal_targets, dtype=float)
    return float(np.sqrt(np.mean((slope * x + intercept - y) ** 2)))


def rom_regression_loocv_rmse(indicator_values, ordinal_targets) -> float:
    """RMSE over held-out predictions, each from a line fitted to the other points."""
    x = np.asarray(indicator_values, dtype=float)
    y = np.asarray(ordinal_targets, dtype=float)
    errors = []
    for i in range(x.size):
        keep = np.arange(x.size) != i
        slope, intercept = rom_regression_fit(x[keep], y[keep])
        errors.append(slope * x[i] + intercept - y[i])
    return float(np.sqrt(np.mean(np.square(errors))))


@dataclass(frozen=True)
class PlayerModel:
    rom_capability: float
    speed_capability: float
    noise_std: float = 0.0
    compliance: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not (self.rom_capability > 0 and self.speed_capability > 0):
            raise DataError("capabilities must be > 0")
        if not 0 <= self.compliance <= 1:
            raise DataError("compliance must be in [0, 1]")
        if self.noise_std < 0:
            raise DataError("noise_std must be >= 0")


@dataclass(frozen=True)
class SessionStep:
    t: float
    event: ShakeEvent | None
    rom_threshold: float
    speed_threshold: float
    epoch: EpochRecord | None = None


@dataclass(frozen=True)
class Session:
    steps: tuple[SessionStep, ...]
    final_state: DifficultyState

    @property
    def events(self) -> list[ShakeEvent]:
        return [s.event for s in self.steps if s.event is not None]

    @property
    def rom_thresholds(self) -> list[float]:
        return [s.rom_threshold for s in self.steps]

    @property
    def epoch_records(self) -> list[EpochRecord]:
        return [s.epoch for s in self.steps if s.epoch is not None]


def _prompts(player: PlayerModel, n_prompts: int, capability_schedule=None):
    """Yield ``(t, event_or_None)`` for one-second prompts."""
    rng = np.random.default_rng(player.seed)
    for i in range(n_prompts):
        t = float(i)
        if rng.random() >= player.compliance:
            yield t, None
            continue
        rom_c, speed_c = (capability_schedule(i) if capability_schedule
                          else (player.rom_capability, player.speed_capability))
        rom = max(0.0, rom_c + player.noise_std * rng.standard_normal())
        speed = max(0.0, speed_c + player.noise_std * rng.standard_normal())
        yield t, ShakeEvent(rom, speed, True, t)


def calibration_shakes(player: PlayerModel, max_prompts: int = 100) -> list[ShakeEvent]:
    """The player's first five shakes, as the calibration phase would see them."""
    events = [e for _, e in _prompts(player, max_prompts) if e is not None]
    return events[:CALIBRATION_SHAKES]


def simulate_session(player: PlayerModel, state: DifficultyState, n_shakes: int,
                     capability_schedule: Callable[[int], tuple[float, float]] | None = None) -> Session:
    """Run ``n_shakes`` one-second prompts against ``state``.

    At each prompt the player attempts a shake with probability
    ``compliance``; indicator values are capability plus Gaussian noise,
    floored at 0. ``capability_schedule(i)`` may override the capabilities
    per prompt. Thresholds in each step are those in force after the prompt.
    """
    if n_shakes < EPOCH_LENGTH:
        raise DataError(f"a session needs at least {EPOCH_LENGTH} prompts")
    steps = []
    for t, event in _prompts(player, n_shakes, capability_schedule):
        record = None
        if event is not None:
            state, record = record_shake(state, event)
        steps.append(SessionStep(t, event, state.rom_threshold, state.speed_threshold, record))
    return Session(tuple(steps), state)


def detect_shakes(recording: Segment, classify: Callable[[list[Segment]], Sequence[bool]],
                  length_s: float = 2.0, stride_s: float = 1.0) -> list[ShakeEvent]:
    """Classify sliding windows once per ``stride_s`` and turn positives into shake events."""
    windows = window(recording, length_s, stride_s)
    if not windows:
        return []
    verdicts = classify(windows)
    events = []
    for w, is_dorsi in zip(windows, verdicts):
        if is_dorsi:
            events.append(ShakeEvent(rom_indicator(w), crossing_rate(w, "gx"), True, float(w.t[-1])))
    return events


def save_snapshot(state: DifficultyState, path) -> None:
    """Write the state as editable TOML (thresholds may be adjusted by hand)."""
    doc = {
        "format_version": SNAPSHOT_VERSION,
        "calibrated": state.calibrated,
        "step_fraction": state.step_fraction,
        "rom": {
            "threshold": state.rom_threshold,
            "bounds": list(state.rom_bounds),
            "pending": [bool(b) for b in state.rom_history],
        },
        "speed": {
            "threshold": state.speed_threshold,
            "bounds": list(state.speed_bounds),
            "pending": [bool(b) for b in state.speed_history],
        },
        "epochs": [
            {
                "rom_success_rate": e.rom_success_rate,
                "speed_success_rate": e.speed_success_rate,
                "rom_decision": e.rom_decision,
                "speed_decision": e.speed_decision,
                "rom_threshold": e.rom_threshold,
                "speed_threshold": e.speed_threshold,
            }
            for e in state.epochs
        ],
    }
    Path(path).write_text(tomli_w.dumps(doc), encoding="utf-8")


def load_snapshot(path) -> DifficultyState:
    try:
        doc = tomllib.loads(Path(path).read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise DataError(f"{path}: not a valid snapshot ({exc})") from exc
    version = doc.get("format_version")
    if version != SNAPSHOT_VERSION:
        raise DataError(f"{path}: unsupported snapshot version {version!r}")
    try:
        return DifficultyState(
            rom_threshold=float(doc["rom"]["threshold"]),
            speed_threshold=float(doc["speed"]["threshold"]),
            step_fraction=float(doc["step_fraction"]),
            rom_bounds=tuple(doc["rom"]["bounds"]),
            speed_bounds=tuple(doc["speed"]["bounds"]),
            rom_history=tuple(bool(b) for b in doc["rom"].get("pending", [])),
            speed_history=tuple(bool(b) for b in doc["speed"].get("pending", [])),
            calibrated=bool(doc["calibrated"]),
            epochs=tuple(EpochRecord(**e) for e in doc.get("epochs", [])),
        )
    except (KeyError, TypeError) as exc:
        raise DataError(f"{path}: incomplete snapshot ({exc})") from exc


SESSION_LOG_HEADER = ("t", "rom_value", "speed_value", "dorsiflexion", "rom_threshold", "speed_threshold")


def write_session_log(path, session: Session) -> None:
    """One row per registered shake, with the thresholds in force after it."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SESSION_LOG_HEADER)
        for step in session.steps:
            if step.event is None:
                continue
            e = step.event
            w.writerow([repr(e.t), repr(e.rom_value), repr(e.speed_value), int(e.dorsiflexion),
                        repr(step.rom_threshold), repr(step.speed_threshold)])


def read_events(path) -> list[ShakeEvent]:
    """Read shake events from a CSV with at least ``t,rom_value,speed_value,dorsiflexion``."""
    events = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"t", "rom_value", "speed_value", "dorsiflexion"} - set(reader.fieldnames or ())
        if missing:
            raise DataError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                events.append(ShakeEvent(float(row["rom_value"]), float(row["speed_value"]),
                                         row["dorsiflexion"].strip().lower() in ("1", "true", "yes"),
                                         float(row["t"])))
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    return events
