import numpy as np
import pytest

from latin_polarity import evaluation
from latin_polarity.corpus import Label, LABEL_ORDER
from latin_polarity.evaluation import (ConfusionMatrix, confusion_matrix,
                                       disagreement_report, evaluate, macro_f1,
                                       micro_f1, per_class_prf, render_report)

P, N, U, M = Label.POSITIVE, Label.NEGATIVE, Label.NEUTRAL, Label.MIXED


def test_confusion_all_correct():
    cm = confusion_matrix([P, P, P], [P, P, P])
    assert cm.counts[0, 0] == 3
    assert cm.counts.sum() == 3


def test_confusion_anti_diagonal():
    cm = confusion_matrix([P, N], [N, P])
    assert cm.counts[0, 1] == 1
    assert cm.counts[1, 0] == 1
    assert cm.counts[0, 0] == 0


def test_confusion_empty():
    cm = confusion_matrix([], [])
    assert cm.counts.sum() == 0


def test_confusion_length_mismatch():
    with pytest.raises(ValueError):
        confusion_matrix([P], [P, N])


def test_confusion_marginals_random():
    rng = np.random.default_rng(5)
    labels = list(LABEL_ORDER)
    for _ in range(50):
        n = int(rng.integers(1, 60))
        golds = [labels[i] for i in rng.integers(0, 4, size=n)]
        preds = [labels[i] for i in rng.integers(0, 4, size=n)]
        cm = confusion_matrix(golds, preds)
        for i, label in enumerate(LABEL_ORDER):
            assert cm.counts[i, :].sum() == sum(1 for g in golds if g is label)
            assert cm.counts[:, i].sum() == sum(1 for p in preds if p is label)


def test_worked_example_prf():
    golds = [P, P, N, U]
    preds = [P, N, N, U]
    metrics = per_class_prf(confusion_matrix(golds, preds))
    by_label = {m.label: m for m in metrics}
    assert by_label[P].f1 == pytest.approx(2 / 3, abs=1e-12)
    assert by_label[N].f1 == pytest.approx(2 / 3, abs=1e-12)
    assert by_label[U].f1 == pytest.approx(1.0, abs=1e-12)
    assert by_label[M].f1 == 0.0


def test_worked_example_micro_macro():
    cm = confusion_matrix([P, P, N, U], [P, N, N, U])
    assert micro_f1(cm) == pytest.approx(0.75, abs=1e-12)
    assert macro_f1(cm) == pytest.approx((2 / 3 + 2 / 3 + 1.0 + 0.0) / 4, abs=1e-12)


def test_perfect_predictions():
    golds = [P, N, U, M]
    report = evaluate(golds, golds)
    assert report.micro_f1 == 1.0
    assert report.macro_f1 == 1.0


def test_absent_class_f1_zero():
    metrics = per_class_prf(confusion_matrix([P], [P]))
    by_label = {m.label: m for m in metrics}
    assert by_label[M].f1 == 0.0
    assert by_label[N].precision == 0.0


def test_micro_undefined_for_empty():
    with pytest.raises(ValueError):
        micro_f1(confusion_matrix([], []))


def brute_force_macro(golds, preds):
    total = 0.0
    for label in LABEL_ORDER:
        tp = sum(1 for g, p in zip(golds, preds) if g is label and p is label)
        fp = sum(1 for g, p in zip(golds, preds) if g is not label and p is label)
        fn = sum(1 for g, p in zip(golds, preds) if g is label and p is not label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        total += f1
    return total / 4


def test_micro_equals_accuracy_1000_random():
    rng = np.random.default_rng(11)
    labels = list(LABEL_ORDER)
    for _ in range(1000):
        n = int(rng.integers(1, 40))
        golds = [labels[i] for i in rng.integers(0, 4, size=n)]
        preds = [labels[i] for i in rng.integers(0, 4, size=n)]
        accuracy = sum(1 for g, p in zip(golds, preds) if g is p) / n
        assert micro_f1(confusion_matrix(golds, preds)) == accuracy


def test_macro_matches_brute_force_random():
    rng = np.random.default_rng(13)
    labels = list(LABEL_ORDER)
    for _ in range(300):
        n = int(rng.integers(1, 40))
        golds = [labels[i] for i in rng.integers(0, 4, size=n)]
        preds = [labels[i] for i in rng.integers(0, 4, size=n)]
        assert macro_f1(confusion_matrix(golds, preds)) == \
            pytest.approx(brute_force_macro(golds, preds), abs=1e-12)


def test_permutation_invariance():
    rng = np.random.default_rng(17)
    labels = list(LABEL_ORDER)
    golds = [labels[i] for i in rng.integers(0, 4, size=30)]
    preds = [labels[i] for i in rng.integers(0, 4, size=30)]
    base = evaluate(golds, preds)
    perm = rng.permutation(30)
    shuffled = evaluate([golds[i] for i in perm], [preds[i] for i in perm])
    assert shuffled == base


def test_disagreement_identical_predictions():
    golds = [P, N, U]
    preds = [P, N, M]
    report = disagreement_report(preds, preds, golds)
    assert report.n_disagree == 0
    assert report.n_agree == 3
    assert report.agree_correct == 2


def test_disagreement_hand_example():
    golds = [P, N, U]
    a = [P, N, M]
    b = [P, U, U]
    report = disagreement_report(a, b, golds)
    assert report.n_agree == 1
    assert report.agree_correct == 1
    assert report.n_disagree == 2
    assert report.a_correct_in_disagree == 1
    assert report.b_correct_in_disagree == 1
    assert report.n_disagree + report.n_agree == report.n_total


def test_disagreement_bounds_random():
    rng = np.random.default_rng(19)
    labels = list(LABEL_ORDER)
    for _ in range(200):
        n = int(rng.integers(1, 50))
        golds = [labels[i] for i in rng.integers(0, 4, size=n)]
        a = [labels[i] for i in rng.integers(0, 4, size=n)]
        b = [labels[i] for i in rng.integers(0, 4, size=n)]
        report = disagreement_report(a, b, golds)
        assert report.n_disagree + report.n_agree == report.n_total == n
        assert 0 <= report.a_correct_in_disagree <= report.n_disagree
        assert 0 <= report.b_correct_in_disagree <= report.n_disagree
        assert 0 <= report.agree_correct <= report.n_agree


def test_disagreement_length_mismatch():
    with pytest.raises(ValueError):
        disagreement_report([P], [P, N], [P, N])


def test_render_zero_matrix_text():
    text = render_report(ConfusionMatrix(counts=np.zeros((4, 4), dtype=np.int64)))
    assert "positive" in text and "mixed" in text
    assert text.count("0") == 16


def test_render_report_csv_contains_micro():
    report = evaluate([P, P, N, U], [P, N, N, U])
    csv = render_report(report, "csv")
    assert "micro_f1,0.7500" in csv
    assert "macro_f1,0.5833" in csv


def test_render_deterministic():
    report = evaluate([P, N], [P, N])
    assert render_report(report, "csv") == render_report(report, "csv")
    assert render_report(report, "text") == render_report(report, "text")


def test_render_rejects_unknown_format():
    with pytest.raises(ValueError):
        render_report(evaluate([P], [P]), "yaml")
