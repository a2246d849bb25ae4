"""LLM annotation without the network: prompts, replay backend, budget.

The batch annotator talks to anything with a send(payload) -> text method.
Here the replay backend serves recorded responses, which makes the whole
protocol reproducible: prompt construction, invalid-label rejection,
retry-after-throttle, and the spending cap.
"""

from latin_polarity import llm
from latin_polarity.corpus import Label

FEW_SHOTS = [
    ("Gaudium magnum in urbe est", Label.POSITIVE),
    ("Dolor malus in urbe est", Label.NEGATIVE),
    ("Rex in templo stat", Label.NEUTRAL),
    ("Mentior?", Label.MIXED),
]

RECORDED = [
    {"target": "Laetitia vincit omnia.",
     "response": "label: positive\nexplanation: laetitia aperta"},
    {"target": "Bellum et pestis simul.",
     "response": "label: negative\nexplanation: duo mala"},
    {"target": "Consul dixit.",
     "response": "label: neutral\nexplanation: factum sine affectu"},
    # an answer outside the label set is rejected, not raised
    {"target": "Fortuna caeca est.",
     "response": "label: tragic\nexplanation: not a valid class"},
    # one throttle failure first, then the recorded response (retry path)
    {"target": "Victoria cum luctu.",
     "response": "label: mixed\nexplanation: victoria sed luctus",
     "errors_before": 1},
]


def main():
    payload = llm.build_prompt("Victoria cum luctu.", FEW_SHOTS)
    print("=== serialized prompt ===")
    print(llm.render_prompt(payload))
    print("=========================\n")

    budget = llm.Budget(cap=1.0, price_per_1k_input_tokens=0.01,
                        price_per_1k_output_tokens=0.03)
    config = llm.ClientConfig(max_in_flight=2, max_retries=3, backoff_base=0.0,
                              max_response_tokens=64)
    backend = llm.ReplayBackend(RECORDED)
    targets = [record["target"] for record in RECORDED]

    result = llm.annotate_batch(targets, FEW_SHOTS, backend, budget, config)
    print(f"annotated {len(result.examples)}, rejected {result.rejected}, "
          f"skipped {result.skipped_for_budget}")
    print(f"spent {result.budget.spent:.5f} of cap {result.budget.cap}\n")
    for example in result.examples:
        print(f"  {example.text:<26} -> {example.label.value:<9} "
              f"({example.explanation})")

    # a cap below the first request's worst case stops before any dispatch
    tiny = llm.Budget(cap=1e-6, price_per_1k_input_tokens=0.01,
                      price_per_1k_output_tokens=0.03)
    stopped = llm.annotate_batch(targets, FEW_SHOTS, llm.ReplayBackend(RECORDED),
                                 tiny, config)
    print(f"\nwith a {tiny.cap} cap: {len(stopped.examples)} annotated, "
          f"{stopped.skipped_for_budget} skipped, spent {stopped.budget.spent}")


if __name__ == "__main__":
    main()
