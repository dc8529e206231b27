import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fashsent.metrics import aggregate_runs, compute_metrics


def expand(confusion):
    preds, golds = [], []
    for g, row in enumerate(confusion):
        for p, count in enumerate(row):
            preds += [p] * count
            golds += [g] * count
    return preds, golds


def test_perfect_predictions():
    r = compute_metrics([0, 1, 2, 2], [0, 1, 2, 2])
    assert (r.accuracy, r.macro_precision, r.macro_recall, r.macro_f1) == (1.0, 1.0, 1.0, 1.0)
    assert r.per_class_accuracy == [1.0, 1.0, 1.0]


def test_all_class_zero_on_balanced_set():
    r = compute_metrics([0] * 9, [0, 1, 2] * 3)
    assert r.accuracy == pytest.approx(1 / 3, abs=1e-15)
    assert r.macro_recall == pytest.approx(1 / 3, abs=1e-15)
    assert r.macro_precision == pytest.approx(1 / 9, abs=1e-15)
    assert r.macro_f1 == pytest.approx(1 / 6, abs=1e-15)


def test_confusion_fixture():
    cm = [[5, 0, 0], [0, 3, 2], [0, 1, 4]]
    r = compute_metrics(*expand(cm))
    assert r.confusion == cm and r.n == 15
    assert r.accuracy == pytest.approx(12 / 15, abs=1e-15)
    assert r.per_class_accuracy == pytest.approx([1.0, 0.6, 0.8], abs=1e-15)
    # precision column-wise: 5/5, 3/4, 4/6
    assert r.macro_precision == pytest.approx((1 + 0.75 + 4 / 6) / 3, abs=1e-15)


def test_errors():
    with pytest.raises(ValueError):
        compute_metrics([0, 1], [0])
    with pytest.raises(ValueError):
        compute_metrics([], [])
    with pytest.raises(ValueError):
        compute_metrics([3], [0])


labels = st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=60)


@given(labels)
def test_metric_invariants(pairs):
    preds, golds = zip(*pairs)
    r = compute_metrics(preds, golds)
    cm = np.array(r.confusion)
    assert cm.sum() == r.n == len(pairs)
    assert r.accuracy == np.trace(cm) / r.n
    assert r.macro_recall == pytest.approx(np.mean(r.per_class_accuracy), abs=1e-15)
    for v in (r.accuracy, r.macro_precision, r.macro_recall, r.macro_f1, *r.per_class_accuracy):
        assert 0.0 <= v <= 1.0


@given(labels, st.randoms())
def test_metrics_ignore_sample_order(pairs, rnd):
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    assert compute_metrics(*zip(*pairs)) == compute_metrics(*zip(*shuffled))


def report_with_accuracy(acc):
    # 10 samples, all gold 0, acc*10 correct
    k = round(acc * 10)
    return compute_metrics([0] * k + [1] * (10 - k), [0] * 10)


def test_aggregate_examples():
    agg = aggregate_runs([report_with_accuracy(0.6), report_with_accuracy(0.8)])
    assert agg.formatted()["accuracy"] == "0.70±0.10"
    same = aggregate_runs([report_with_accuracy(0.5)] * 3)
    assert same.std["accuracy"] == 0.0
    five = aggregate_runs([report_with_accuracy(a) for a in (0.5, 0.6, 0.7, 0.6, 0.5)])
    assert len(five.lines()) == len(five.mean)
    assert all(": " in line and "±" in line for line in five.lines())


def test_aggregate_needs_two_runs():
    with pytest.raises(ValueError):
        aggregate_runs([report_with_accuracy(0.5)])


def test_report_outputs():
    r = compute_metrics(*expand([[5, 0, 0], [0, 3, 2], [0, 1, 4]]))
    assert "accuracy" in r.table() and "0.8000" in r.table()
    assert '"accuracy": 0.8' in r.to_json()
