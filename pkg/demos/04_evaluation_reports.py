"""Evaluation toolkit tour: confusion matrix, F1 variants, disagreement,
and the dual-probability decoder.

Micro F1 pools counts over all classes (it equals accuracy for
single-label multiclass); macro F1 averages the four per-class F1 values
unweighted, so rare classes count as much as common ones.
"""

from latin_polarity import evaluation, model
from latin_polarity.corpus import Label

P, N, U, M = Label.POSITIVE, Label.NEGATIVE, Label.NEUTRAL, Label.MIXED


def main():
    golds = [P, P, N, U, M, M, N, P, U, N]
    model_a = [P, N, N, U, M, U, N, P, U, N]   # trained on heuristic labels
    model_b = [P, P, N, M, M, M, U, N, U, N]   # trained on LLM labels

    print("=== model A vs gold ===")
    report = evaluation.evaluate(golds, model_a)
    print(evaluation.render_report(report, "text"))
    print(evaluation.render_report(evaluation.confusion_matrix(golds, model_a),
                                   "text"))

    print("same report as CSV:")
    print(evaluation.render_report(report, "csv"))

    # where do two models disagree, and who is right when they do?
    print("=== disagreement analysis ===")
    disagreement = evaluation.disagreement_report(model_a, model_b, golds)
    print(evaluation.render_report(disagreement, "text"))

    # the dual decoder turns independent positive/negative probabilities
    # into one of the four labels
    print("=== dual-probability decoder (threshold 0.5) ===")
    for p_pos, p_neg in [(0.9, 0.9), (0.1, 0.1), (0.9, 0.2), (0.2, 0.9),
                         (0.5, 0.4)]:
        label = model.decode_dual(p_pos, p_neg, 0.5)
        print(f"  p_pos={p_pos:.1f} p_neg={p_neg:.1f} -> {label.value}")


if __name__ == "__main__":
    main()
