"""Corpus ingestion and dataset serialization.

Reads CoNLL-U treebanks, labeled TSV files, and the JSON-lines dataset
format used to persist annotated examples. All parsed values are immutable
after construction.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

from .errors import DataError, ParseError


class Label(str, enum.Enum):
    """The four polarity classes, canonical lowercase spelling."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    MIXED = "mixed"


# Canonical class order used by every report, matrix, and file format.
LABEL_ORDER = (Label.POSITIVE, Label.NEGATIVE, Label.NEUTRAL, Label.MIXED)

_LABEL_BY_VALUE = {label.value: label for label in Label}


def parse_label(text: str) -> Label:
    """Map a label string to a Label, raising DataError for unknown values."""
    key = text.strip().lower()
    if key not in _LABEL_BY_VALUE:
        raise DataError(f"unknown label {text!r}; expected one of "
                        + ", ".join(l.value for l in LABEL_ORDER))
    return _LABEL_BY_VALUE[key]


class Provenance(str, enum.Enum):
    """Where an annotated example's label came from."""

    HEURISTIC = "heuristic"
    LLM = "llm"
    GOLD = "gold"
    MODEL = "model"


@dataclass(frozen=True)
class Token:
    """One syntactic word from a CoNLL-U data line.

    `misc` keeps columns 5-10 (XPOS through MISC) verbatim, tab-joined, so
    nothing from the source line is lost.
    """

    index: int
    form: str
    lemma: str
    upos: str
    misc: str = ""


@dataclass(frozen=True)
class Sentence:
    sent_id: str
    text: str
    tokens: tuple[Token, ...]
    source: str = ""


@dataclass(frozen=True)
class AnnotatedExample:
    """A sentence with a polarity label and its provenance.

    `explanation` is only meaningful for LLM-produced labels; `mean_score`
    is recorded for every heuristic label (including 0.0) and never
    otherwise.
    """

    text: str
    label: Label
    provenance: Provenance
    explanation: Optional[str] = None
    mean_score: Optional[float] = None

    def __post_init__(self):
        if self.explanation is not None and self.provenance is not Provenance.LLM:
            raise ValueError("explanation is only allowed for llm provenance")
        if (self.mean_score is not None) != (self.provenance is Provenance.HEURISTIC):
            raise ValueError("mean_score is recorded iff provenance is heuristic")


_SIMPLE_ID_RE = re.compile(r"^\d+$")
_RANGE_ID_RE = re.compile(r"^\d+-\d+$")
_EMPTY_NODE_ID_RE = re.compile(r"^\d+\.\d+$")


def parse_conllu(raw_text: str, source: str = "") -> list[Sentence]:
    """Parse CoNLL-U text into sentences.

    Sentences are separated by blank lines. `# sent_id` and `# text`
    comments are honored; multiword-token range lines (`1-2`) and empty
    nodes (`1.1`) are skipped so only syntactic words appear as tokens.
    When `# text` is absent the sentence text is the space-join of forms.
    """
    sentences: list[Sentence] = []
    seen_ids: set[str] = set()
    sent_id: Optional[str] = None
    sent_text: Optional[str] = None
    tokens: list[Token] = []
    have_lines = False

    def flush(line_no: int):
        nonlocal sent_id, sent_text, tokens, have_lines
        if not have_lines:
            return
        if not tokens:
            raise ParseError("sentence has no tokens", line=line_no)
        sid = sent_id if sent_id is not None else str(len(sentences) + 1)
        if sid in seen_ids:
            raise ParseError(f"duplicate sent_id {sid!r}", line=line_no)
        seen_ids.add(sid)
        text = sent_text if sent_text is not None else " ".join(t.form for t in tokens)
        sentences.append(Sentence(sent_id=sid, text=text, tokens=tuple(tokens), source=source))
        sent_id = None
        sent_text = None
        tokens = []
        have_lines = False

    for line_no, line in enumerate(raw_text.split("\n"), start=1):
        line = line.rstrip("\r")
        if line == "":
            flush(line_no)
            continue
        have_lines = True
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("sent_id"):
                _, _, value = body.partition("=")
                sent_id = value.strip()
            elif body.startswith("text") and "=" in body:
                key, _, value = body.partition("=")
                if key.strip() == "text":
                    sent_text = value.strip()
            continue
        fields = line.split("\t")
        if len(fields) != 10:
            raise ParseError(f"expected 10 tab-separated columns, got {len(fields)}",
                             line=line_no)
        raw_id = fields[0]
        if _RANGE_ID_RE.match(raw_id) or _EMPTY_NODE_ID_RE.match(raw_id):
            continue
        if not _SIMPLE_ID_RE.match(raw_id):
            raise ParseError(f"token id {raw_id!r} is not an integer", line=line_no)
        index = int(raw_id)
        if index < 1:
            raise ParseError(f"token id must be >= 1, got {index}", line=line_no)
        if tokens and index <= tokens[-1].index:
            raise ParseError(f"token id {index} does not increase "
                             f"(previous was {tokens[-1].index})", line=line_no)
        form, lemma, upos = fields[1], fields[2], fields[3]
        if not form or not lemma:
            raise ParseError("empty form or lemma column", line=line_no)
        tokens.append(Token(index=index, form=form, lemma=lemma, upos=upos,
                            misc="\t".join(fields[4:10])))
    flush(len(raw_text.split("\n")))
    return sentences


def load_treebank_dir(path) -> list[Sentence]:
    """Load every `.conllu` file in a directory, concatenated.

    Files are taken in lexicographic filename order; each sentence's
    `source` is the file stem. Raises DataError when the directory has no
    `.conllu` files or a file cannot be read.
    """
    directory = Path(path)
    if not directory.is_dir():
        raise DataError(f"treebank directory not found: {directory}")
    files = sorted(directory.glob("*.conllu"), key=lambda p: p.name)
    if not files:
        raise DataError(f"no .conllu files in {directory}")
    sentences: list[Sentence] = []
    for file in files:
        try:
            raw = file.read_text(encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read treebank file {file}: {exc}") from exc
        try:
            sentences.extend(parse_conllu(raw, source=file.stem))
        except ParseError as exc:
            raise ParseError(str(exc), path=str(file)) from exc
    return sentences


def load_labeled_tsv(path) -> list[AnnotatedExample]:
    """Load a `text<TAB>label` file as gold-provenance examples.

    An optional literal header line `text<TAB>label` is skipped.
    """
    file = Path(path)
    if not file.is_file():
        raise DataError(f"labeled TSV not found: {file}")
    examples: list[AnnotatedExample] = []
    lines = file.read_text(encoding="utf-8").split("\n")
    for line_no, line in enumerate(lines, start=1):
        if line == "":
            continue
        if line_no == 1 and line == "text\tlabel":
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(f"expected 2 tab-separated columns, got {len(fields)}",
                             path=str(file), line=line_no)
        text, raw_label = fields
        try:
            label = parse_label(raw_label)
        except DataError as exc:
            raise ParseError(str(exc), path=str(file), line=line_no) from exc
        examples.append(AnnotatedExample(text=text, label=label, provenance=Provenance.GOLD))
    return examples


def example_to_dict(example: AnnotatedExample) -> dict:
    """Stable JSON-ready representation; optional keys omitted when None."""
    record = {
        "text": example.text,
        "label": example.label.value,
        "provenance": example.provenance.value,
    }
    if example.explanation is not None:
        record["explanation"] = example.explanation
    if example.mean_score is not None:
        record["mean_score"] = example.mean_score
    return record


def example_from_dict(record: dict) -> AnnotatedExample:
    return AnnotatedExample(
        text=record["text"],
        label=parse_label(record["label"]),
        provenance=Provenance(record["provenance"]),
        explanation=record.get("explanation"),
        mean_score=record.get("mean_score"),
    )


def write_dataset(examples: Sequence[AnnotatedExample], path) -> None:
    """Write examples as UTF-8 JSON lines (one object per example)."""
    file = Path(path)
    with file.open("w", encoding="utf-8") as handle:
        for example in examples:
            handle.write(json.dumps(example_to_dict(example), ensure_ascii=False))
            handle.write("\n")


def read_dataset(path) -> list[AnnotatedExample]:
    """Read a JSON-lines dataset written by write_dataset."""
    file = Path(path)
    if not file.is_file():
        raise DataError(f"dataset not found: {file}")
    examples: list[AnnotatedExample] = []
    with file.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if line == "":
                continue
            try:
                record = json.loads(line)
                examples.append(example_from_dict(record))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ParseError(f"invalid dataset record: {exc}",
                                 path=str(file), line=line_no) from exc
    return examples


def with_source(sentence: Sentence, source: str) -> Sentence:
    return replace(sentence, source=source)
