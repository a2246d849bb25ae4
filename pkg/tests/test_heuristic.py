import numpy as np
import pytest

from latin_polarity import corpus, heuristic, lexicon
from latin_polarity.corpus import Label
from latin_polarity.heuristic import HeuristicConfig, LabelStats
from latin_polarity.lexicon import PolarityLexicon

from conftest import make_sentence


def test_passes_filter_adj_match(toy_lexicon):
    sent = make_sentence([("bonus", "ADJ"), ("sum", "AUX")])
    assert heuristic.passes_filter(sent, toy_lexicon)


def test_filter_rejects_verb_only_match(toy_lexicon):
    # "amo" is in the lexicon but only on a VERB token
    sent = make_sentence([("amo", "VERB"), ("puella", "NOUN")])
    assert not heuristic.passes_filter(sent, toy_lexicon)


def test_filter_needs_both_pos_and_lexicon(toy_lexicon):
    sent = make_sentence([("puella", "NOUN")])
    assert not heuristic.passes_filter(sent, toy_lexicon)


def test_mean_polarity():
    def matches(*scores):
        return [lexicon.LexiconMatch(token_index=i + 1, lemma="x", upos="NOUN",
                                     score=s) for i, s in enumerate(scores)]
    assert heuristic.mean_polarity(matches(0.5, -0.4)) == pytest.approx(0.05)
    assert heuristic.mean_polarity(matches(1.0, 0.5)) == pytest.approx(0.75)
    assert heuristic.mean_polarity(matches(0.0, 0.0)) == 0.0
    with pytest.raises(ValueError):
        heuristic.mean_polarity([])


def test_rule1_precedence_over_band(toy_lexicon):
    # all matched scores exactly zero: neutral even though mean 0 is in band
    sent = make_sentence([("rex", "NOUN"), ("deus", "NOUN")])
    assert heuristic.label_sentence(sent, toy_lexicon) == (Label.NEUTRAL, 0.0)


def test_rule2_band(toy_lexicon):
    lex = PolarityLexicon(entries={"gaudium": 0.5, "ira": -0.4})
    sent = make_sentence([("gaudium", "NOUN"), ("ira", "NOUN")])
    label, mean = heuristic.label_sentence(sent, lex)
    assert label is Label.MIXED
    assert mean == pytest.approx(0.05)


def test_rules3_and_4(toy_lexicon):
    positive = make_sentence([("bonus", "ADJ"), ("gaudium", "NOUN")])
    label, mean = heuristic.label_sentence(positive, toy_lexicon)
    assert label is Label.POSITIVE and mean == pytest.approx(0.75)
    negative = make_sentence([("malus", "ADJ")])
    assert heuristic.label_sentence(negative, toy_lexicon) == (Label.NEGATIVE, -1.0)


def test_band_boundaries_inclusive(toy_lexicon):
    upper = make_sentence([("vita", "NOUN")])       # score exactly +0.1
    lower = make_sentence([("ira", "NOUN")])        # score exactly -0.1
    assert heuristic.label_sentence(upper, toy_lexicon) == (Label.MIXED, 0.1)
    assert heuristic.label_sentence(lower, toy_lexicon) == (Label.MIXED, -0.1)


def test_filtered_out_returns_none(toy_lexicon):
    sent = make_sentence([("venio", "VERB")])
    assert heuristic.label_sentence(sent, toy_lexicon) is None


def test_mean_includes_non_filter_pos_matches(toy_lexicon):
    # filter passes via NOUN "gaudium"; VERB "amo" still enters the mean
    sent = make_sentence([("amo", "VERB"), ("gaudium", "NOUN")])
    label, mean = heuristic.label_sentence(sent, toy_lexicon)
    assert label is Label.POSITIVE
    assert mean == pytest.approx(0.65)


def test_config_validation():
    with pytest.raises(ValueError):
        HeuristicConfig(mixed_low=0.2, mixed_high=0.1)
    with pytest.raises(ValueError):
        HeuristicConfig(mixed_low=-1.0, mixed_high=0.1)


def test_annotate_corpus_empty(toy_lexicon):
    examples, stats = heuristic.annotate_corpus([], toy_lexicon)
    assert examples == []
    assert stats.total == 0
    assert all(stats.counts[label] == 0 for label in Label)


def test_annotate_corpus_golden_fixture(treebank_sentences, toy_lexicon, data_dir,
                                        tmp_path):
    examples, stats = heuristic.annotate_corpus(treebank_sentences, toy_lexicon)
    out = tmp_path / "annotated.jsonl"
    corpus.write_dataset(examples, out)
    golden = (data_dir / "golden_heuristic.jsonl").read_bytes()
    assert out.read_bytes() == golden
    assert stats == LabelStats(counts={Label.POSITIVE: 4, Label.NEGATIVE: 2,
                                       Label.NEUTRAL: 1, Label.MIXED: 3},
                               total=10)


def test_stats_total_matches_examples(treebank_sentences, toy_lexicon):
    examples, stats = heuristic.annotate_corpus(treebank_sentences, toy_lexicon)
    assert stats.total == len(examples)
    assert sum(stats.counts.values()) == stats.total


# --- randomized agreement with an independent straight-line re-implementation


def reference_label(sentence, lex: PolarityLexicon, config: HeuristicConfig):
    """Straight-line restatement of the four rules, kept deliberately naive."""
    filter_hit = False
    for token in sentence.tokens:
        if token.upos in config.filter_pos and token.lemma.lower() != "_" \
                and token.lemma.lower() in lex.entries:
            filter_hit = True
    if not filter_hit:
        return None
    scores = [lex.entries[t.lemma.lower()] for t in sentence.tokens
              if t.lemma.lower() != "_" and t.lemma.lower() in lex.entries]
    if all(s == 0.0 for s in scores):
        return (Label.NEUTRAL, 0.0)
    mean = sum(scores) / len(scores)
    if config.mixed_low <= mean <= config.mixed_high:
        return (Label.MIXED, mean)
    if mean > config.mixed_high:
        return (Label.POSITIVE, mean)
    return (Label.NEGATIVE, mean)


def random_case(rng: np.random.Generator):
    vocabulary = [f"w{i}" for i in range(12)]
    pos_tags = ["NOUN", "ADJ", "VERB", "ADV", "AUX"]
    lex_lemmas = list(rng.choice(vocabulary, size=6, replace=False))
    score_pool = [-1.0, -0.5, -0.2, -0.1, 0.0, 0.1, 0.2, 0.5, 1.0]
    entries = {lemma: float(rng.choice(score_pool)) for lemma in lex_lemmas}
    # force interesting structure in a slice of the cases
    special = rng.integers(4)
    if special == 1:
        entries = {lemma: 0.0 for lemma in lex_lemmas}          # rule-1 shape
    elif special == 2:
        entries = {lemma: 0.1 for lemma in lex_lemmas}          # +0.1 boundary
    elif special == 3:
        entries = {lemma: -0.1 for lemma in lex_lemmas}         # -0.1 boundary
    n_tokens = int(rng.integers(1, 8))
    pairs = [(str(rng.choice(vocabulary)), str(rng.choice(pos_tags)))
             for _ in range(n_tokens)]
    return make_sentence(pairs), PolarityLexicon(entries=entries)


def test_oracle_agreement_1000_random_cases():
    rng = np.random.default_rng(2024)
    config = HeuristicConfig()
    for _ in range(1000):
        sent, lex = random_case(rng)
        assert heuristic.label_sentence(sent, lex, config) == \
            reference_label(sent, lex, config)


def test_monotonicity_under_score_shift():
    # raising every matched score never moves the label toward negative
    order = {Label.NEGATIVE: 0, Label.MIXED: 1, Label.POSITIVE: 2}
    rng = np.random.default_rng(7)
    config = HeuristicConfig()
    checked = 0
    while checked < 300:
        sent, lex = random_case(rng)
        delta = float(rng.uniform(0.01, 0.4))
        shifted = PolarityLexicon(entries={
            k: min(v + delta, 1.0) for k, v in lex.entries.items()})
        base = heuristic.label_sentence(sent, lex, config)
        moved = heuristic.label_sentence(sent, shifted, config)
        if base is None or moved is None:
            continue
        if base[0] is Label.NEUTRAL or moved[0] is Label.NEUTRAL:
            continue  # rule 1 fired on one side
        assert order[moved[0]] >= order[base[0]]
        checked += 1
