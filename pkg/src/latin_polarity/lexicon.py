"""Polarity lexicon loading and per-token matching."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .corpus import Sentence
from .errors import DataError, ParseError


@dataclass(frozen=True)
class PolarityLexicon:
    """Lemma -> prior polarity score, every score finite in [-1, +1].

    Lemmas are lowercased once at load time; lookups are case-sensitive
    against that canonical form.
    """

    entries: dict[str, float]

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.entries

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class LexiconMatch:
    token_index: int
    lemma: str
    upos: str
    score: float


def load_lexicon(path) -> PolarityLexicon:
    """Load a `lemma<TAB>score` TSV.

    An optional `lemma<TAB>score` header is skipped. Duplicate lemmas are
    merged by the arithmetic mean of their scores.
    """
    file = Path(path)
    if not file.is_file():
        raise DataError(f"lexicon not found: {file}")
    scores_by_lemma: dict[str, list[float]] = {}
    lines = file.read_text(encoding="utf-8").split("\n")
    for line_no, line in enumerate(lines, start=1):
        if line == "":
            continue
        if line_no == 1 and line == "lemma\tscore":
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(f"expected 2 tab-separated columns, got {len(fields)}",
                             path=str(file), line=line_no)
        lemma, raw_score = fields[0].lower(), fields[1]
        try:
            score = float(raw_score)
        except ValueError as exc:
            raise ParseError(f"unparseable score {raw_score!r}",
                             path=str(file), line=line_no) from exc
        if not (-1.0 <= score <= 1.0):
            raise ParseError(f"score {score} outside [-1, 1]",
                             path=str(file), line=line_no)
        scores_by_lemma.setdefault(lemma, []).append(score)
    entries = {lemma: sum(values) / len(values)
               for lemma, values in scores_by_lemma.items()}
    return PolarityLexicon(entries=entries)


def match_sentence(sentence: Sentence, lexicon: PolarityLexicon) -> list[LexiconMatch]:
    """One match per token whose lowercased lemma is in the lexicon.

    Matches come back in token order; the placeholder lemma "_" never
    matches. UPOS is carried through but plays no role in matching.
    """
    matches: list[LexiconMatch] = []
    for token in sentence.tokens:
        lemma = token.lemma.lower()
        if lemma == "_" or lemma not in lexicon.entries:
            continue
        matches.append(LexiconMatch(token_index=token.index, lemma=lemma,
                                    upos=token.upos, score=lexicon.entries[lemma]))
    return matches
