from pathlib import Path

import pytest

from latin_polarity import corpus, lexicon

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def treebank_sentences():
    return corpus.load_treebank_dir(DATA_DIR / "treebank")


@pytest.fixture(scope="session")
def toy_lexicon():
    return lexicon.load_lexicon(DATA_DIR / "lexicon.tsv")


@pytest.fixture(scope="session")
def overfit_examples():
    return corpus.load_labeled_tsv(DATA_DIR / "latin_overfit.tsv")


@pytest.fixture(scope="session")
def gold_examples():
    return corpus.load_labeled_tsv(DATA_DIR / "gold.tsv")


@pytest.fixture(scope="session")
def english_examples():
    return corpus.load_labeled_tsv(DATA_DIR / "english.tsv")


@pytest.fixture(scope="session")
def latin_corpus_lines():
    text = (DATA_DIR / "latin_corpus.txt").read_text(encoding="utf-8")
    return [line for line in text.split("\n") if line.strip()]


def make_sentence(lemma_upos_pairs, sent_id="s", text=None, source=""):
    """Build a Sentence from (lemma, upos) pairs, forms equal to lemmas."""
    tokens = tuple(corpus.Token(index=i + 1, form=lemma, lemma=lemma, upos=upos)
                   for i, (lemma, upos) in enumerate(lemma_upos_pairs))
    if text is None:
        text = " ".join(t.form for t in tokens)
    return corpus.Sentence(sent_id=sent_id, text=text, tokens=tokens, source=source)
