import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import brute_force_mrmr, random_mrmr_dataset

from wristmotion import DataError
from wristmotion.features import FEATURE_NAMES
from wristmotion.models import KNearestNeighbors
from wristmotion.selection import (
    F_MAX,
    SelectionResult,
    choose_k,
    f_statistic,
    mrmr_select,
    pearson,
    selection_curve,
)

AB = np.array(["A", "A", "B", "B"])


def test_hand_anova():
    # SSB = 4, SSW = 1, df = (1, 2)
    assert f_statistic([1.0, 2.0, 3.0, 4.0], AB) == pytest.approx(8.0, abs=1e-12)


def test_perfect_separation_is_capped():
    assert f_statistic([0.0, 0.0, 1.0, 1.0], AB) == F_MAX


def test_constant_feature_has_zero_f():
    assert f_statistic([0.3, 0.3, 0.3, 0.3], AB) == 0.0
    assert f_statistic(np.full(4, 0.1) * 3, AB) == 0.0


def test_f_needs_two_classes():
    with pytest.raises(DataError):
        f_statistic([1.0, 2.0, 3.0, 4.0], ["A"] * 4)


def test_pearson_examples():
    x = np.array([1.0, 4.0, 2.0, 8.0])
    assert pearson(x, x) == pytest.approx(1.0)
    assert pearson([1.0, 2.0, 3.0], [3.0, 2.0, 1.0]) == pytest.approx(-1.0)
    assert pearson(x, np.full(4, 7.0)) == 0.0


def _copy_dataset():
    rng = np.random.default_rng(0)
    y = np.repeat([0, 1], 20)
    f1 = y + rng.normal(0, 0.05, 40)
    raw = 0.5 * y + rng.normal(0, 1, 40)
    c1 = f1 - f1.mean()
    # remove the f1 direction so f3 is uncorrelated with f1 in-sample
    f3 = raw - (raw @ c1) / (c1 @ c1) * c1
    return np.column_stack([f1, f1.copy(), f3]), y


def test_copy_goes_last_when_third_feature_is_uncorrelated():
    X, y = _copy_dataset()
    assert f_statistic(X[:, 2], y) > 0
    assert mrmr_select(X, y, 3).ranked_indices == (0, 2, 1)
    assert brute_force_mrmr(X, y, 3) == [0, 2, 1]


def test_merely_independent_third_feature_loses_to_copy():
    rng = np.random.default_rng(0)
    y = np.repeat([0, 1], 20)
    f1 = y + rng.normal(0, 0.05, 40)
    X = np.column_stack([f1, f1.copy(), 0.3 * y + rng.normal(0, 1, 40)])
    for scheme in ("quotient", "difference"):
        assert mrmr_select(X, y, 3, scheme).ranked_indices == (0, 1, 2)
        assert brute_force_mrmr(X, y, 3, scheme) == [0, 1, 2]


def test_k1_is_max_f():
    rng = np.random.default_rng(1)
    y = np.repeat([0, 1], 10)
    X = rng.normal(size=(20, 5)) + np.outer(y, [0.1, 0.5, 2.0, 0.2, 0.0])
    f = [f_statistic(X[:, j], y) for j in range(5)]
    assert mrmr_select(X, y, 1).ranked_indices == (int(np.argmax(f)),)


def test_identical_features_keep_index_order():
    rng = np.random.default_rng(2)
    y = np.repeat([0, 1], 6)
    col = rng.normal(size=12) + y
    X = np.column_stack([col] * 5)
    assert mrmr_select(X, y, 5).ranked_indices == (0, 1, 2, 3, 4)


def test_select_errors():
    X = np.zeros((6, 3))
    y = [0, 1] * 3
    with pytest.raises(DataError):
        mrmr_select(X, y, 0)
    with pytest.raises(DataError):
        mrmr_select(X, y, 4)
    with pytest.raises(ValueError):
        mrmr_select(X, y, 2, scheme="ratio")


@pytest.mark.parametrize("scheme", ["quotient", "difference"])
def test_matches_brute_force(scheme):
    rng = np.random.default_rng(777)
    for _ in range(100):
        X, y = random_mrmr_dataset(rng)
        p = X.shape[1]
        assert list(mrmr_select(X, y, p, scheme).ranked_indices) == brute_force_mrmr(X, y, p, scheme)


def test_prefix_property():
    rng = np.random.default_rng(3)
    X, y = random_mrmr_dataset(rng)
    full = mrmr_select(X, y, X.shape[1]).ranked_indices
    for k in range(1, X.shape[1] + 1):
        assert mrmr_select(X, y, k).ranked_indices == full[:k]


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_row_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    X, y = random_mrmr_dataset(rng)
    perm = rng.permutation(len(y))
    p = X.shape[1]
    assert mrmr_select(X, y, p).ranked_indices == mrmr_select(X[perm], y[perm], p).ranked_indices


def test_result_text_round_trip():
    res = SelectionResult((5, 0, 41), (3.0, 2.0, 1.0))
    text = res.to_text()
    assert text.splitlines() == [FEATURE_NAMES[5], FEATURE_NAMES[0], FEATURE_NAMES[41]]
    assert SelectionResult.indices_from_text(text) == [5, 0, 41]
    with pytest.raises(DataError):
        SelectionResult.indices_from_text("nope.mean\n")


def test_choose_k_on_separable_set():
    rng = np.random.default_rng(4)
    y = np.repeat([0, 1], 15)
    X = np.column_stack([y * 5.0 + rng.normal(0, 0.1, 30), rng.normal(size=(30, 3))])
    assert choose_k(X, y, KNearestNeighbors) == 1


def test_choose_k_on_random_labels():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(40, 4))
    y = rng.integers(0, 2, 40)
    curve = selection_curve(X, y, KNearestNeighbors)
    assert set(curve) == {1, 2, 3, 4}
    assert all(0.2 <= acc <= 0.8 for acc in curve.values())
    best = max(curve.values())
    assert choose_k(X, y, KNearestNeighbors) == min(k for k, a in curve.items() if a == best)
