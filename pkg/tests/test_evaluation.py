from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wristmotion import DataError
from wristmotion.corpus import make_corpus
from wristmotion.evaluation import (
    ClassMetrics,
    ConfusionMatrix,
    MetricsReport,
    evaluate_split,
    exact,
    f_score,
    format_report,
    format_table,
    loocv,
    macro_average,
    metrics,
    printed_discrepancies,
    report_csv,
    round_half_up,
)
from wristmotion.models import KNearestNeighbors
from wristmotion.pipeline import train_model

TABLE2 = ConfusionMatrix(tp=252, fp=10, fn=35, tn=931)


def test_round_half_up():
    assert round_half_up(0.9625) == Decimal("0.963")
    assert round_half_up(Fraction(9665, 10000)) == Decimal("0.967")
    assert round_half_up(0.9624999) == Decimal("0.962")
    # binary float 0.0005 sits just above 5e-4 but reads back as "0.0005"
    assert round_half_up(0.0005) == Decimal("0.001")


def test_exact_reads_floats_by_repr():
    assert exact(0.1) == Fraction(1, 10)


def test_macro_average_of_printed_cnn_column():
    assert round_half_up(macro_average(0.938, 0.987)) == Decimal("0.963")
    assert round_half_up(macro_average(0.974, 0.968)) == Decimal("0.971")


def test_f_score():
    assert f_score(1, 1) == 1
    assert f_score(0, 0) == 0
    assert f_score(Fraction(1, 2), 1) == Fraction(2, 3)


def test_table2_counts():
    rep = metrics(TABLE2)
    assert rep.accuracy == Fraction(1183, 1228)
    assert rep.dorsiflexion.precision == Fraction(252, 262)
    assert rep.dorsiflexion.recall == Fraction(252, 287)
    assert [str(round_half_up(v)) for v in (rep.accuracy, rep.dorsiflexion.precision, rep.dorsiflexion.recall)] == [
        "0.963", "0.962", "0.878"]


def test_table2_discrepancy_is_reported():
    issues = printed_discrepancies(TABLE2)
    assert len(issues) == 4
    assert any("0.948" in m for m in issues)
    text = format_report(TABLE2, "CNN")
    assert "WARNING" in text and "0.929" in text and "0.846" in text


def test_consistent_matrix_has_no_warning():
    cm = ConfusionMatrix(10, 2, 3, 20)
    assert printed_discrepancies(cm) == []
    assert "WARNING" not in format_report(cm)


def test_perfect_classifier():
    rep = metrics(ConfusionMatrix.from_predictions([1, 0, 1, 0], [1, 0, 1, 0]))
    assert rep.accuracy == 1
    assert all(v == 1 for v in rep.as_dict().values())


def test_all_positive_classifier_on_balanced_set():
    rep = metrics(ConfusionMatrix.from_predictions([1, 1, 0, 0], [1, 1, 1, 1]))
    assert rep.dorsiflexion.recall == 1
    assert rep.dorsiflexion.precision == Fraction(1, 2)
    assert rep.non_dorsiflexion.precision == 0 and rep.non_dorsiflexion.f_score == 0


def test_confusion_validation():
    with pytest.raises(DataError):
        ConfusionMatrix(0, 0, 0, 0)
    with pytest.raises(DataError):
        ConfusionMatrix(-1, 0, 0, 3)
    with pytest.raises(DataError):
        ConfusionMatrix.from_predictions([1, 0], [1])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 200), st.integers(0, 200), st.integers(0, 200), st.integers(0, 200))
def test_swapping_positive_class_swaps_per_class_metrics(tp, fp, fn, tn):
    if tp + fp + fn + tn == 0:
        return
    cm = ConfusionMatrix(tp, fp, fn, tn)
    a, b = metrics(cm), metrics(cm.swapped())
    assert a.dorsiflexion == b.non_dorsiflexion
    assert a.non_dorsiflexion == b.dorsiflexion
    assert a.accuracy == b.accuracy
    assert (a.precision, a.recall, a.f_score) == (b.precision, b.recall, b.f_score)
    assert all(0 <= v <= 1 for v in a.as_dict().values())


def test_table_and_csv_layout():
    rep = metrics(TABLE2)
    table = format_table({"CNN": rep, "KNN": rep})
    lines = table.splitlines()
    assert lines[0].split() == ["CNN", "KNN"]
    assert lines[1].split() == ["Overall", "Accuracy", "0.963", "0.963"]
    assert len(lines) == 11
    rows = report_csv({"CNN": rep}).splitlines()
    assert rows[0] == "group,metric,CNN"
    assert rows[1].startswith("Overall,Accuracy,0.963")


class _Majority:
    def fit(self, X, y):
        vals, counts = np.unique(y, return_counts=True)
        self.label = vals[np.argmax(counts)]
        return self

    def predict(self, X):
        return np.full(len(X), self.label)


def test_loocv_examples():
    X = np.arange(10.0)[:, None]
    assert loocv(X, np.ones(10, dtype=int), lambda a, b: _Majority().fit(a, b)) == 1.0
    assert loocv([[0.0], [1.0]], [0, 1], lambda a, b: KNearestNeighbors().fit(a, b)) == 0.0
    y = np.repeat([0, 1], 10)
    X = np.column_stack([y * 10.0 + np.random.default_rng(0).normal(size=20)])
    assert loocv(X, y, lambda a, b: KNearestNeighbors().fit(a, b)) == 1.0


def test_loocv_needs_two_rows():
    with pytest.raises(DataError):
        loocv([[0.0]], [1], lambda a, b: None)


def test_evaluate_split_rejects_leaked_subjects():
    corpus = make_corpus(60, 6, seed=3)
    train = [s for s in corpus if s.subject_id not in ("S05", "S06")]
    test = [s for s in corpus if s.subject_id in ("S05", "S06")]
    art = train_model("knn", train, n_features=5)
    cm, rep = evaluate_split(art, test)
    assert cm.total == len(test)
    assert rep.accuracy >= Fraction(8, 10)
    with pytest.raises(DataError):
        evaluate_split(art, train[:3])


def test_report_dict_keys():
    rep = MetricsReport(Fraction(1, 2), ClassMetrics(1, 0, 0), ClassMetrics(0, 1, 0))
    assert rep.as_dict()["precision"] == 0.5
