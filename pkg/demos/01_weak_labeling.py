"""Weak labeling walkthrough: from a CoNLL-U treebank to a labeled dataset.

The annotator keeps only sentences containing a noun or adjective that is
in the polarity lexicon, then labels each kept sentence from the mean
lexicon score of all matched words:

    all matched scores zero          -> neutral
    mean within [-0.1, +0.1]         -> mixed
    mean above +0.1                  -> positive
    mean below -0.1                  -> negative
"""

import tempfile
from pathlib import Path

from latin_polarity import corpus, evaluation, heuristic, lexicon

TREEBANK = """\
# sent_id = demo-1
# text = Bonus est rex.
1\tBonus\tbonus\tADJ\t_\t_\t0\troot\t_\t_
2\test\tsum\tAUX\t_\t_\t1\tcop\t_\t_
3\trex\trex\tNOUN\t_\t_\t1\tnsubj\t_\t_

# sent_id = demo-2
# text = Gaudium et dolor.
1\tGaudium\tgaudium\tNOUN\t_\t_\t0\troot\t_\t_
2\tet\tet\tCCONJ\t_\t_\t3\tcc\t_\t_
3\tdolor\tdolor\tNOUN\t_\t_\t1\tconj\t_\t_

# sent_id = demo-3
# text = Venit et videt.
1\tVenit\tvenio\tVERB\t_\t_\t0\troot\t_\t_
2\tet\tet\tCCONJ\t_\t_\t3\tcc\t_\t_
3\tvidet\tvideo\tVERB\t_\t_\t1\tconj\t_\t_

# sent_id = demo-4
# text = Malus dolor magnus.
1\tMalus\tmalus\tADJ\t_\t_\t2\tamod\t_\t_
2\tdolor\tdolor\tNOUN\t_\t_\t0\troot\t_\t_
3\tmagnus\tmagnus\tADJ\t_\t_\t2\tamod\t_\t_
"""

LEXICON = "bonus\t1.0\nmalus\t-1.0\ngaudium\t0.5\ndolor\t-0.5\nrex\t0.0\nmagnus\t0.2\n"


def main():
    workdir = Path(tempfile.mkdtemp(prefix="weak_labeling_"))
    (workdir / "lexicon.tsv").write_text(LEXICON, encoding="utf-8")

    sentences = corpus.parse_conllu(TREEBANK, source="demo")
    lex = lexicon.load_lexicon(workdir / "lexicon.tsv")
    print(f"parsed {len(sentences)} sentences, lexicon has {len(lex)} lemmas\n")

    # per-sentence view of the matching and the rule that fires
    for sent in sentences:
        matches = lexicon.match_sentence(sent, lex)
        decision = heuristic.label_sentence(sent, lex)
        scores = ", ".join(f"{m.lemma}={m.score:+.1f}" for m in matches) or "none"
        if decision is None:
            print(f"  {sent.text:<24} matches: {scores:<40} -> filtered out")
        else:
            label, mean = decision
            print(f"  {sent.text:<24} matches: {scores:<40} "
                  f"-> {label.value} (mean {mean:+.3f})")

    # the full corpus pass also reports label statistics
    examples, stats = heuristic.annotate_corpus(sentences, lex)
    print("\nlabel statistics:")
    print(evaluation.render_report(stats, "text"))

    out = workdir / "dataset.jsonl"
    corpus.write_dataset(examples, out)
    print(f"dataset written to {out}")
    print("round-trip identical:", corpus.read_dataset(out) == examples)


if __name__ == "__main__":
    main()
