"""Confusion matrices, per-class and macro-averaged metrics, LOOCV and split evaluation.

Metrics are kept as exact fractions of counts and only rounded (half-up, three
decimals) for display.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, localcontext
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DataError

CLASS_NAMES = ("dorsiflexion", "non-dorsiflexion")
ROW_LAYOUT = (
    ("Overall", "Accuracy", "accuracy"),
    ("Overall", "Precision", "precision"),
    ("Overall", "Recall", "recall"),
    ("Overall", "F-score", "f_score"),
    ("Dorsiflexion", "Precision", "dorsiflexion.precision"),
    ("Dorsiflexion", "Recall", "dorsiflexion.recall"),
    ("Dorsiflexion", "F-score", "dorsiflexion.f_score"),
    ("Non-dorsiflexion", "Precision", "non_dorsiflexion.precision"),
    ("Non-dorsiflexion", "Recall", "non_dorsiflexion.recall"),
    ("Non-dorsiflexion", "F-score", "non_dorsiflexion.f_score"),
)


def exact(x) -> Fraction:
    """Exact value of ``x``; floats are read through their shortest decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def round_half_up(x, places: int = 3) -> Decimal:
    q = exact(x)
    with localcontext() as ctx:
        ctx.prec = 60
        d = Decimal(q.numerator) / Decimal(q.denominator)
        return d.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)


def _ratio(num, den) -> Fraction:
    return Fraction(0) if den == 0 else Fraction(num, den)


def f_score(precision, recall) -> Fraction:
    """Harmonic mean of precision and recall, 0 when both are 0."""
    p, r = exact(precision), exact(recall)
    return Fraction(0) if p + r == 0 else 2 * p * r / (p + r)


def macro_average(*values) -> Fraction:
    return sum((exact(v) for v in values), Fraction(0)) / len(values)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with dorsiflexion as the positive class."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        counts = (self.tp, self.fp, self.fn, self.tn)
        if any(int(c) != c or c < 0 for c in counts):
            raise DataError("confusion counts must be non-negative integers")
        if sum(counts) < 1:
            raise DataError("confusion matrix is empty")

    @classmethod
    def from_predictions(cls, y_true, y_pred) -> "ConfusionMatrix":
        t = np.asarray(y_true).astype(bool)
        p = np.asarray(y_pred).astype(bool)
        if t.shape != p.shape:
            raise DataError("label and prediction arrays differ in shape")
        return cls(
            int(np.sum(t & p)),
            int(np.sum(~t & p)),
            int(np.sum(t & ~p)),
            int(np.sum(~t & ~p)),
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def swapped(self) -> "ConfusionMatrix":
        """The same matrix seen with the other class as positive."""
        return ConfusionMatrix(self.tn, self.fn, self.fp, self.tp)


@dataclass(frozen=True)
class ClassMetrics:
    precision: Fraction
    recall: Fraction
    f_score: Fraction


@dataclass(frozen=True)
class MetricsReport:
    accuracy: Fraction
    dorsiflexion: ClassMetrics
    non_dorsiflexion: ClassMetrics

    @property
    def precision(self) -> Fraction:
        return macro_average(self.dorsiflexion.precision, self.non_dorsiflexion.precision)

    @property
    def recall(self) -> Fraction:
        return macro_average(self.dorsiflexion.recall, self.non_dorsiflexion.recall)

    @property
    def f_score(self) -> Fraction:
        return macro_average(self.dorsiflexion.f_score, self.non_dorsiflexion.f_score)

    def value(self, key: str) -> Fraction:
        obj = self
        for part in key.split("."):
            obj = getattr(obj, part)
        return obj

    def as_dict(self) -> dict[str, float]:
        return {key: float(self.value(key)) for _, _, key in ROW_LAYOUT}


def _class_metrics(tp, fp, fn) -> ClassMetrics:
    p = _ratio(tp, tp + fp)
    r = _ratio(tp, tp + fn)
    return ClassMetrics(p, r, f_score(p, r))


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    return MetricsReport(
        accuracy=Fraction(cm.tp + cm.tn, cm.total),
        dorsiflexion=_class_metrics(cm.tp, cm.fp, cm.fn),
        non_dorsiflexion=_class_metrics(cm.tn, cm.fn, cm.fp),
    )


# figures printed alongside a confusion matrix that do not follow from its counts;
# a report built from one of these matrices carries a warning
KNOWN_PRINTED_FIGURES = {
    (252, 10, 35, 931): {"accuracy": 0.948, "precision": 0.929, "recall": 0.846, "f_score": 0.885},
}


def printed_discrepancies(cm: ConfusionMatrix, printed: Mapping[str, float] | None = None) -> list[str]:
    """Compare dorsiflexion-class figures computed from ``cm`` with printed ones.

    ``printed`` defaults to the entry of :data:`KNOWN_PRINTED_FIGURES` for this
    matrix, if any. Returns one message per figure that differs at three decimals.
    """
    if printed is None:
        printed = KNOWN_PRINTED_FIGURES.get((cm.tp, cm.fp, cm.fn, cm.tn))
        if printed is None:
            return []
    rep = metrics(cm)
    computed = {
        "accuracy": rep.accuracy,
        "precision": rep.dorsiflexion.precision,
        "recall": rep.dorsiflexion.recall,
        "f_score": rep.dorsiflexion.f_score,
    }
    out = []
    for key, value in printed.items():
        got = round_half_up(computed[key])
        want = round_half_up(value)
        if got != want:
            out.append(f"{key}: computed {got} from counts, printed {want}")
    return out


def format_table(reports: Mapping[str, MetricsReport]) -> str:
    """Aligned plain-text table, one column per model, rows as in ROW_LAYOUT."""
    names = list(reports)
    header = ["", ""] + names
    rows = [header]
    last_group = None
    for group, metric, key in ROW_LAYOUT:
        label = group if group != last_group else ""
        last_group = group
        rows.append([label, metric] + [str(round_half_up(reports[n].value(key))) for n in names])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines) + "\n"


def report_csv(reports: Mapping[str, MetricsReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = list(reports)
    w.writerow(["group", "metric"] + names)
    for group, metric, key in ROW_LAYOUT:
        w.writerow([group, metric] + [repr(float(reports[n].value(key))) for n in names])
    return buf.getvalue()


def format_report(cm: ConfusionMatrix, name: str = "model", printed: Mapping[str, float] | None = None) -> str:
    lines = [
        "Confusion matrix (rows: predicted, columns: annotated)",
        "             positive  negative",
        f"  positive   {cm.tp:>8}  {cm.fp:>8}",
        f"  negative   {cm.fn:>8}  {cm.tn:>8}",
        "",
        format_table({name: metrics(cm)}),
    ]
    issues = printed_discrepancies(cm, printed)
    if issues:
        lines.append("WARNING: printed figures do not match the counts")
        lines.extend("  " + msg for msg in issues)
        lines.append("")
    return "\n".join(lines)


def loocv(X, y, trainer: Callable) -> float:
    """Leave-one-out accuracy.

    ``trainer(X_train, y_train)`` must return an object with ``predict``.
    """
    X = np.asarray(X)
    y = np.asarray(y)
    n = len(y)
    if n < 2 or len(X) != n:
        raise DataError("LOOCV needs at least 2 rows and one label per row")
    mask = np.ones(n, dtype=bool)
    correct = 0
    for i in range(n):
        mask[i] = False
        model = trainer(X[mask], y[mask])
        mask[i] = True
        correct += int(np.asarray(model.predict(X[i : i + 1]))[0] == y[i])
    return correct / n


def evaluate_split(artifact, test_segments: Sequence) -> tuple[ConfusionMatrix, MetricsReport]:
    """Score a trained artifact on held-out segments from unseen subjects."""
    overlap = sorted({s.subject_id for s in test_segments} & set(artifact.train_subjects))
    if overlap:
        raise DataError(f"test subjects also used for training: {overlap}")
    if any(s.label is None for s in test_segments):
        raise DataError("test segments must be labeled")
    y_true = np.array([s.label for s in test_segments], dtype=bool)
    y_pred, _ = artifact.predict(test_segments)
    cm = ConfusionMatrix.from_predictions(y_true, y_pred)
    return cm, metrics(cm)
