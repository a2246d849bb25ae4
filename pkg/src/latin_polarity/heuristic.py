"""Lexicon-driven weak labeling: the filter-and-threshold annotator.

A sentence is kept only if it contains at least one noun or adjective that
is in the lexicon. Kept sentences are labeled from the lexicon scores of
all matched tokens, in strict rule order:

  1. every matched score is exactly 0      -> neutral
  2. mean score within the mixed band      -> mixed
  3. mean score above the band             -> positive
  4. otherwise (mean below the band)       -> negative

The mean is over all lexicon-matched tokens regardless of POS; the POS set
only gates the sentence filter. The mixed band is closed at both ends, so
a mean of exactly +/-0.1 is mixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .corpus import AnnotatedExample, Label, LABEL_ORDER, Provenance, Sentence
from .lexicon import LexiconMatch, PolarityLexicon, match_sentence


@dataclass(frozen=True)
class HeuristicConfig:
    mixed_low: float = -0.1
    mixed_high: float = 0.1
    filter_pos: frozenset[str] = frozenset({"NOUN", "ADJ"})

    def __post_init__(self):
        if not self.mixed_low < self.mixed_high:
            raise ValueError("mixed_low must be below mixed_high")
        for bound in (self.mixed_low, self.mixed_high):
            if not (-1.0 < bound < 1.0):
                raise ValueError(f"band bound {bound} must lie in (-1, 1)")


@dataclass(frozen=True)
class LabelStats:
    """Label counts over an annotated dataset."""

    counts: dict[Label, int]
    total: int

    @classmethod
    def from_labels(cls, labels: Iterable[Label]) -> "LabelStats":
        counts = {label: 0 for label in LABEL_ORDER}
        total = 0
        for label in labels:
            counts[label] += 1
            total += 1
        return cls(counts=counts, total=total)


def passes_filter(sentence: Sentence, lexicon: PolarityLexicon,
                  config: HeuristicConfig = HeuristicConfig()) -> bool:
    """True iff some token has a filtered POS *and* its lemma is in the lexicon."""
    for token in sentence.tokens:
        if token.upos not in config.filter_pos:
            continue
        lemma = token.lemma.lower()
        if lemma != "_" and lemma in lexicon.entries:
            return True
    return False


def mean_polarity(matches: Sequence[LexiconMatch]) -> float:
    """Arithmetic mean of match scores; matches must be non-empty."""
    if not matches:
        raise ValueError("mean_polarity requires at least one match")
    return sum(m.score for m in matches) / len(matches)


def label_sentence(sentence: Sentence, lexicon: PolarityLexicon,
                   config: HeuristicConfig = HeuristicConfig()
                   ) -> Optional[tuple[Label, float]]:
    """Apply the four labeling rules; None when the sentence is filtered out."""
    if not passes_filter(sentence, lexicon, config):
        return None
    matches = match_sentence(sentence, lexicon)
    if all(m.score == 0.0 for m in matches):
        return Label.NEUTRAL, 0.0
    mean = mean_polarity(matches)
    if config.mixed_low <= mean <= config.mixed_high:
        return Label.MIXED, mean
    if mean > config.mixed_high:
        return Label.POSITIVE, mean
    return Label.NEGATIVE, mean


def annotate_corpus(sentences: Iterable[Sentence], lexicon: PolarityLexicon,
                    config: HeuristicConfig = HeuristicConfig()
                    ) -> tuple[list[AnnotatedExample], LabelStats]:
    """Label every sentence that passes the filter, in input order."""
    examples: list[AnnotatedExample] = []
    for sentence in sentences:
        decision = label_sentence(sentence, lexicon, config)
        if decision is None:
            continue
        label, mean = decision
        examples.append(AnnotatedExample(text=sentence.text, label=label,
                                         provenance=Provenance.HEURISTIC,
                                         mean_score=mean))
    stats = LabelStats.from_labels(e.label for e in examples)
    return examples, stats
