"""Command line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import adaptive, evaluation, ingest
from .config import RunConfig, dump_config, load_config, set_path
from .corpus import make_corpus, subject_ids
from .errors import DataError, NotCalibratedError
from .features import extract_matrix, fit_normalizer
from .models import load as load_model
from .models import save as save_model
from .pipeline import train_model
from .selection import choose_k, mrmr_select

log = logging.getLogger("wristmotion")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _require(path: str, what: str) -> Path:
    p = Path(path)
    if not path or not p.exists():
        raise UsageError(f"{what} not found: {path or '(unset)'}")
    return p


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.paths.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _under_out(cfg: RunConfig, value: str) -> Path:
    """Absolute paths are used as given; relative ones (defaults) live under the output directory."""
    p = Path(value)
    return p if p.is_absolute() else _out_dir(cfg) / p


def _model_path(cfg: RunConfig) -> Path:
    return _under_out(cfg, cfg.paths.model)


def _test_subjects(cfg: RunConfig, dataset: ingest.Dataset) -> list[str]:
    if cfg.pipeline.test_subjects:
        return [str(s) for s in cfg.pipeline.test_subjects]
    subjects = dataset.subject_ids
    n = cfg.pipeline.n_test_subjects
    if not 0 < n < len(subjects):
        raise DataError(f"cannot hold out {n} of {len(subjects)} subjects")
    return subjects[-n:]


def _hyper(cfg: RunConfig, kind: str) -> dict:
    p = cfg.pipeline
    if kind == "knn":
        return {"k": p.knn_k}
    if kind == "svm":
        return {"lam": p.svm_lambda, "epochs": p.svm_epochs}
    if kind == "mlp":
        return {"max_epochs": p.max_epochs, "batch_size": p.batch_size, "dropout": p.dropout}
    if kind == "cnn":
        return {"max_epochs": p.max_epochs, "batch_size": p.batch_size}
    raise UsageError(f"unknown model kind {kind!r}")


def cmd_generate(cfg: RunConfig) -> None:
    out = _out_dir(cfg)
    c = cfg.corpus
    segments = make_corpus(c.n_segments, c.n_subjects, c.noise_std, c.dorsiflexion_fraction, cfg.seed, c.sample_rate_hz)
    if not segments:
        log.warning("corpus is empty; writing an empty manifest")
    data_dir = out / "data"
    data_dir.mkdir(exist_ok=True)
    entries = []
    for subject in subject_ids(c.n_subjects):
        own = [s for s in segments if s.subject_id == subject]
        per = max(1, c.segments_per_session)
        for n, start in enumerate(range(0, len(own), per), start=1):
            stem = f"{subject}_session{n}"
            ingest.write_recording(data_dir / f"{stem}.sensor.csv", data_dir / f"{stem}.annotations.csv",
                                   own[start : start + per], rest_noise_std=c.noise_std, seed=cfg.seed + n)
            entries.append((f"data/{stem}.sensor.csv", f"data/{stem}.annotations.csv", subject))
    ingest.write_manifest(out / "manifest.tsv", entries)
    print(f"wrote {len(segments)} segments in {len(entries)} recordings to {out / 'manifest.tsv'}")


def _load(cfg: RunConfig) -> ingest.Dataset:
    return ingest.load_dataset(_require(str(_under_out(cfg, cfg.paths.manifest)), "manifest"))


def cmd_select(cfg: RunConfig) -> None:
    dataset = _load(cfg)
    split = ingest.split_by_subject(dataset, _test_subjects(cfg, dataset))
    train = split.train
    X = extract_matrix(train)
    X = fit_normalizer(X).apply(X)
    y = [int(s.label) for s in train]
    k = cfg.pipeline.k
    if k == "auto":
        from .models import KNearestNeighbors

        k = choose_k(X, y, lambda: KNearestNeighbors(cfg.pipeline.knn_k), scheme=cfg.pipeline.scheme)
    result = mrmr_select(X, y, int(k), scheme=cfg.pipeline.scheme)
    out = _out_dir(cfg)
    (out / "selection.txt").write_text(result.to_text(), encoding="utf-8")
    print(f"selected {result.k} features -> {out / 'selection.txt'}")


def cmd_train(cfg: RunConfig) -> None:
    dataset = _load(cfg)
    split = ingest.split_by_subject(dataset, _test_subjects(cfg, dataset))
    kind = cfg.pipeline.model
    k = None if kind == "cnn" else int(cfg.pipeline.k)
    artifact = train_model(kind, split.train, n_features=k, seed=cfg.seed, scheme=cfg.pipeline.scheme, **_hyper(cfg, kind))
    target = _model_path(cfg)
    save_model(artifact, target)
    print(f"trained {kind} on {len(split.train)} segments -> {target}")


def cmd_eval(cfg: RunConfig) -> None:
    artifact = load_model(_require(str(_model_path(cfg)), "model artifact"))
    dataset = _load(cfg)
    test = [s for s in dataset.segments if s.subject_id not in artifact.train_subjects]
    if not test:
        raise DataError("no segments from subjects outside the training set")
    cm, report = evaluation.evaluate_split(artifact, test)
    out = _out_dir(cfg)
    (out / "report.txt").write_text(evaluation.format_report(cm, artifact.kind.upper()), encoding="utf-8")
    (out / "report.csv").write_text(evaluation.report_csv({artifact.kind.upper(): report}), encoding="utf-8")
    print(f"accuracy {evaluation.round_half_up(report.accuracy)} on {len(test)} segments -> {out / 'report.txt'}")


def _state_from_config(cfg: RunConfig, player: adaptive.PlayerModel) -> adaptive.DifficultyState:
    a = cfg.adaptive
    if cfg.paths.state:
        return adaptive.load_snapshot(_require(cfg.paths.state, "state snapshot"))
    return adaptive.calibrate(adaptive.calibration_shakes(player), a.step_fraction,
                              tuple(a.rom_bounds), tuple(a.speed_bounds))


def cmd_simulate(cfg: RunConfig) -> None:
    a = cfg.adaptive
    player = adaptive.PlayerModel(a.rom_capability, a.speed_capability, a.player_noise_std, a.compliance, cfg.seed)
    state = _state_from_config(cfg, player)
    session = adaptive.simulate_session(player, state, a.n_shakes)
    out = _out_dir(cfg)
    adaptive.write_session_log(out / "session_log.csv", session)
    adaptive.save_snapshot(session.final_state, out / "state.toml")
    with open(out / "trajectory.csv", "w", encoding="utf-8") as fh:
        fh.write("epoch,rom_success_rate,rom_decision,rom_threshold,speed_success_rate,speed_decision,speed_threshold\n")
        for i, e in enumerate(session.epoch_records, start=1):
            fh.write(f"{i},{e.rom_success_rate!r},{e.rom_decision},{e.rom_threshold!r},"
                     f"{e.speed_success_rate!r},{e.speed_decision},{e.speed_threshold!r}\n")
    print(f"simulated {a.n_shakes} prompts; final rom threshold {session.final_state.rom_threshold:.3f}")


def cmd_calibrate(cfg: RunConfig) -> None:
    a = cfg.adaptive
    events = adaptive.read_events(_require(cfg.paths.events, "events file"))
    first = [e for e in events if e.dorsiflexion][: adaptive.CALIBRATION_SHAKES]
    state = adaptive.calibrate(first, a.step_fraction, tuple(a.rom_bounds), tuple(a.speed_bounds))
    out = _out_dir(cfg)
    adaptive.save_snapshot(state, out / "state.toml")
    print(f"calibrated: rom {state.rom_threshold:.3f} rad/s, speed {state.speed_threshold:.3f} crossings/s")


COMMANDS = {
    "generate": cmd_generate,
    "select": cmd_select,
    "train": cmd_train,
    "eval": cmd_eval,
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wristmotion", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="TOML run configuration")
        p.add_argument("--seed", type=int, help="override the configured seed")
        p.add_argument("--out", help="output directory")
        if name in ("select", "train", "eval"):
            p.add_argument("--manifest", help="dataset manifest")
        if name in ("train", "eval"):
            p.add_argument("--model", help="model artifact path")
        if name in ("select", "train"):
            p.add_argument("--k", help="number of mRMR features, or 'auto'")
        if name == "train":
            p.add_argument("--kind", choices=["knn", "svm", "mlp", "cnn"])
        if name == "generate":
            p.add_argument("--count", type=int, help="number of segments")
        if name == "calibrate":
            p.add_argument("--events", help="CSV of shake events")
        if name == "simulate":
            p.add_argument("--state", help="state snapshot to start from")
    return parser


def _effective_paths(cfg: RunConfig) -> None:
    """Make every path absolute so the echoed config reruns the stage from anywhere."""
    cfg.paths.out = str(Path(cfg.paths.out).resolve())
    for name in ("manifest", "model"):
        setattr(cfg.paths, name, str(_under_out(cfg, getattr(cfg.paths, name))))
    for name in ("events", "state"):
        value = getattr(cfg.paths, name)
        if value:
            setattr(cfg.paths, name, str(Path(value).resolve()))


def _apply_flags(cfg: RunConfig, args) -> None:
    if args.seed is not None:
        cfg.seed = args.seed
    set_path(cfg, "out", args.out)
    for name in ("manifest", "model", "events", "state"):
        set_path(cfg, name, getattr(args, name, None))
    if getattr(args, "k", None) is not None:
        cfg.pipeline.k = args.k if args.k == "auto" else int(args.k)
    if getattr(args, "kind", None):
        cfg.pipeline.model = args.kind
    if getattr(args, "count", None) is not None:
        cfg.corpus.n_segments = args.count


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    stage = args.command
    try:
        if args.config:
            _require(args.config, "config file")
        cfg = load_config(args.config)
        _apply_flags(cfg, args)
        _effective_paths(cfg)
        COMMANDS[stage](cfg)
        dump_config(cfg, _out_dir(cfg) / f"{stage}.config.toml")
    except UsageError as exc:
        print(f"wristmotion {stage}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, NotCalibratedError, OSError) as exc:
        print(f"wristmotion {stage}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"wristmotion {stage}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
