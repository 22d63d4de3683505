"""Declarative run configuration (TOML) for the command line.

Relative paths written in a config file are resolved against the file's
directory, and relative paths given as flags against the working directory.
Paths left at their defaults (other than ``out``) live under the output
directory.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from .errors import DataError


@dataclass
class Paths:
    manifest: str = "manifest.tsv"
    model: str = "model.wmdl"
    out: str = "out"
    events: str = ""
    state: str = ""


@dataclass
class CorpusOptions:
    n_segments: int = 600
    n_subjects: int = 20
    noise_std: float = 0.3
    dorsiflexion_fraction: float = 0.5
    sample_rate_hz: float = 50.0
    segments_per_session: int = 15


@dataclass
class PipelineOptions:
    model: str = "cnn"
    k: int | str = 21
    scheme: str = "quotient"
    n_test_subjects: int = 5
    test_subjects: list = field(default_factory=list)
    max_epochs: int = 100
    batch_size: int = 32
    svm_lambda: float = 1e-3
    svm_epochs: int = 200
    knn_k: int = 1
    dropout: float = 0.5


@dataclass
class AdaptiveOptions:
    step_fraction: float = 0.1
    rom_bounds: list = field(default_factory=lambda: [0.1, 10.0])
    speed_bounds: list = field(default_factory=lambda: [0.5, 10.0])
    speed_cuts: list = field(default_factory=lambda: [2.0, 5.0])
    rom_capability: float = 3.0
    speed_capability: float = 4.0
    player_noise_std: float = 0.0
    compliance: float = 1.0
    n_shakes: int = 200


@dataclass
class RunConfig:
    seed: int = 0
    paths: Paths = field(default_factory=Paths)
    corpus: CorpusOptions = field(default_factory=CorpusOptions)
    pipeline: PipelineOptions = field(default_factory=PipelineOptions)
    adaptive: AdaptiveOptions = field(default_factory=AdaptiveOptions)

    def to_toml(self) -> str:
        return tomli_w.dumps(asdict(self))


def _merge(obj, values: dict, where: str):
    known = {f.name: f for f in fields(obj)}
    for key, value in values.items():
        if key not in known:
            raise DataError(f"unknown config key {where}{key}")
        current = getattr(obj, key)
        if is_dataclass(current):
            if not isinstance(value, dict):
                raise DataError(f"config key {where}{key} must be a table")
            _merge(current, value, f"{where}{key}.")
        else:
            setattr(obj, key, value)


def load_config(path: str | Path | None = None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise DataError(f"{path}: {exc}") from exc
    _merge(cfg, doc, "")
    for name, value in doc.get("paths", {}).items():
        if value and not Path(value).is_absolute():
            setattr(cfg.paths, name, str((path.parent / value).resolve()))
    return cfg


def dump_config(cfg: RunConfig, path) -> None:
    Path(path).write_text(cfg.to_toml(), encoding="utf-8")


def set_path(cfg: RunConfig, name: str, value: Any) -> None:
    """Override a path from the command line; relative values resolve against the working directory."""
    if value is not None:
        setattr(cfg.paths, name, str(Path(value).resolve()))
