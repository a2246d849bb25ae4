"""Command-line front end for the full annotation/training/evaluation pipeline.

One TOML config file drives every subcommand; individual flags override
config values. Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import corpus, evaluation, heuristic, lexicon, llm, model, train
from .errors import ConfigError, DataError


def _load_config(path) -> dict:
    if path is None:
        return {}
    file = Path(path)
    if not file.is_file():
        raise ConfigError(f"config file not found: {file}")
    try:
        return tomllib.loads(file.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid config file {file}: {exc}") from exc


def _require_path(cfg: dict, args, flag: str, key: str) -> Path:
    """Flag value wins over `[paths]` config; the path must exist."""
    value = getattr(args, flag.replace("-", "_"), None)
    if value is None:
        value = cfg.get("paths", {}).get(key)
    if value is None:
        raise ConfigError(f"no {key} given; pass --{flag} or set paths.{key} "
                          "in the config file")
    path = Path(value)
    if not path.exists():
        raise DataError(f"{key} path does not exist: {path}")
    return path


def _out_dir(cfg: dict, args) -> Path:
    value = getattr(args, "out", None) or cfg.get("paths", {}).get("output_dir", "out")
    path = Path(value)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _seed(cfg: dict, args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(cfg.get("seed", 0))


def _heuristic_config(cfg: dict) -> heuristic.HeuristicConfig:
    section = cfg.get("heuristic", {})
    return heuristic.HeuristicConfig(
        mixed_low=float(section.get("mixed_low", -0.1)),
        mixed_high=float(section.get("mixed_high", 0.1)),
        filter_pos=frozenset(section.get("filter_pos", ["NOUN", "ADJ"])))


def _model_config(cfg: dict, vocab_size: int, seed: int) -> model.ModelConfig:
    section = cfg.get("model", {})
    return model.ModelConfig(
        vocab_size=vocab_size,
        layers=int(section.get("layers", 2)),
        d_model=int(section.get("d_model", 32)),
        heads=int(section.get("heads", 4)),
        d_ff=int(section.get("d_ff", 64)),
        max_len=int(section.get("max_len", 64)),
        adapter_dim=int(section.get("adapter_dim", 8)),
        seed=seed)


def _stage_config(cfg: dict, stage: str, section_name: str, seed: int) -> train.StageConfig:
    section = cfg.get("train", {}).get(section_name, {})
    overrides = {}
    for key in ("epochs", "batch_size"):
        if key in section:
            overrides[key] = int(section[key])
    if "learning_rate" in section:
        overrides["learning_rate"] = float(section["learning_rate"])
    if "checkpoint_policy" in section:
        overrides["checkpoint_policy"] = section["checkpoint_policy"]
    return train.StageConfig.defaults(stage, seed=seed, **overrides)


def _client_config(cfg: dict) -> llm.ClientConfig:
    section = cfg.get("llm", {})
    return llm.ClientConfig(
        endpoint_url=section.get("endpoint_url", ""),
        api_key_env_var=section.get("api_key_env_var", "LLM_API_KEY"),
        model_name=section.get("model_name", "gpt-4"),
        max_in_flight=int(section.get("max_in_flight", 4)),
        max_retries=int(section.get("max_retries", 3)),
        backoff_base=float(section.get("backoff_base", 1.0)),
        max_response_tokens=int(section.get("max_response_tokens", 256)))


def _budget(cfg: dict) -> llm.Budget:
    section = cfg.get("llm", {})
    return llm.Budget(cap=float(section.get("cap", 15.0)),
                      price_per_1k_input_tokens=float(section.get("price_in", 0.01)),
                      price_per_1k_output_tokens=float(section.get("price_out", 0.03)))


def _load_texts(path: Path) -> list[str]:
    """One prediction input per line; a tab, if present, ends the text."""
    texts = []
    for line in path.read_text(encoding="utf-8").split("\n"):
        if line == "":
            continue
        texts.append(line.split("\t", 1)[0])
    return texts


def _read_prediction_tsv(path: Path) -> tuple[list[str], list[corpus.Label]]:
    examples = corpus.load_labeled_tsv(path)
    return [e.text for e in examples], [e.label for e in examples]


def _pipeline_inputs(cfg, args):
    latin_lines = [line for line in
                   _require_path(cfg, args, "latin-corpus", "latin_corpus")
                   .read_text(encoding="utf-8").split("\n") if line.strip()]
    english = corpus.load_labeled_tsv(_require_path(cfg, args, "english-tsv", "english_tsv"))
    gold = corpus.load_labeled_tsv(_require_path(cfg, args, "gold-tsv", "gold_tsv"))
    return latin_lines, english, gold


def cmd_annotate_heuristic(cfg, args) -> int:
    sentences = corpus.load_treebank_dir(_require_path(cfg, args, "treebank", "treebank_dir"))
    lex = lexicon.load_lexicon(_require_path(cfg, args, "lexicon", "lexicon"))
    examples, stats = heuristic.annotate_corpus(sentences, lex, _heuristic_config(cfg))
    out = _out_dir(cfg, args) / "heuristic_dataset.jsonl"
    corpus.write_dataset(examples, out)
    print(f"wrote {len(examples)} examples to {out}")
    print(evaluation.render_report(stats, "text"), end="")
    return 0


def cmd_annotate_llm(cfg, args) -> int:
    sentences = corpus.load_treebank_dir(_require_path(cfg, args, "treebank", "treebank_dir"))
    gold = corpus.load_labeled_tsv(_require_path(cfg, args, "gold-tsv", "gold_tsv"))
    shots = llm.few_shots_from_gold(gold)
    client_config = _client_config(cfg)
    if args.backend == "replay":
        fixture = _require_path(cfg, args, "replay-fixture", "replay_fixture")
        backend = llm.ReplayBackend.from_file(fixture)
    else:
        backend = llm.HttpBackend(client_config)

    texts = [s.text for s in sentences]
    sample_size = int(cfg.get("llm", {}).get("sample_size", 0))
    if sample_size and sample_size < len(texts):
        rng = np.random.default_rng(_seed(cfg, args))
        keep = sorted(rng.permutation(len(texts))[:sample_size].tolist())
        texts = [texts[i] for i in keep]

    result = llm.annotate_batch(texts, shots, backend, _budget(cfg), client_config)
    out = _out_dir(cfg, args) / "llm_dataset.jsonl"
    corpus.write_dataset(result.examples, out)
    stats = heuristic.LabelStats.from_labels(e.label for e in result.examples)
    print(f"wrote {len(result.examples)} examples to {out} "
          f"({result.rejected} rejected, {result.skipped_for_budget} skipped, "
          f"spent {result.budget.spent:.4f} of {result.budget.cap:.4f})")
    print(evaluation.render_report(stats, "text"), end="")
    return 0


def _write_stage_outputs(out: Path, name: str, ckpt: train.Checkpoint,
                         log: list[dict]):
    train.save_checkpoint(ckpt, out / name)
    (out / f"metrics_{name}.csv").write_text(train.metrics_to_csv(log),
                                             encoding="utf-8")


def cmd_train_lang(cfg, args) -> int:
    latin_lines, english, gold = _pipeline_inputs(cfg, args)
    dataset = corpus.read_dataset(_require_path(cfg, args, "dataset", "dataset"))
    seed = _seed(cfg, args)
    vocab = train.build_pipeline_vocab(latin_lines, english, dataset)
    config = _model_config(cfg, vocab.size, seed)
    store = model.init_params(config)
    stage_cfg = _stage_config(cfg, "language", "language", seed)
    data = train.encode_mlm_data(vocab, config, latin_lines)
    _, ckpt, log = train.train_stage(store, config, data, stage_cfg)
    out = _out_dir(cfg, args)
    _write_stage_outputs(out, "ckpt_language", ckpt, log)
    print(f"language stage done: final loss {log[-1]['loss']:.4f}, "
          f"checkpoint at {out / 'ckpt_language'}")
    return 0


def cmd_train_task(cfg, args) -> int:
    latin_lines, english, gold = _pipeline_inputs(cfg, args)
    dataset = corpus.read_dataset(_require_path(cfg, args, "dataset", "dataset"))
    seed = _seed(cfg, args)
    vocab = train.build_pipeline_vocab(latin_lines, english, dataset)
    config = _model_config(cfg, vocab.size, seed)
    if args.init is not None:
        store = train.load_checkpoint(args.init).store
    else:
        store = model.init_params(config)
    stage_cfg = _stage_config(cfg, "task_crosslingual", "task", seed)
    data = train.encode_classification_data(vocab, config, english)
    _, ckpt, log = train.train_stage(store, config, data, stage_cfg)
    out = _out_dir(cfg, args)
    _write_stage_outputs(out, "ckpt_task", ckpt, log)
    print(f"task stage done: final loss {log[-1]['loss']:.4f}, "
          f"checkpoint at {out / 'ckpt_task'}")
    return 0


def cmd_finetune(cfg, args) -> int:
    latin_lines, english, gold = _pipeline_inputs(cfg, args)
    dataset = corpus.read_dataset(_require_path(cfg, args, "dataset", "dataset"))
    seed = _seed(cfg, args)
    vocab = train.build_pipeline_vocab(latin_lines, english, dataset)
    config = _model_config(cfg, vocab.size, seed)
    if args.init is not None:
        store = train.load_checkpoint(args.init).store
    else:
        store = model.init_params(config)
    stage_cfg = _stage_config(cfg, "target_finetune", "finetune", seed)
    data = train.encode_classification_data(vocab, config, dataset)
    val = train.encode_classification_data(vocab, config, gold)
    _, ckpt, log = train.train_stage(store, config, data, stage_cfg, val_set=val)
    out = _out_dir(cfg, args)
    _write_stage_outputs(out, "ckpt_final", ckpt, log)
    _write_vocab(out, vocab)
    best = ckpt.manifest["epoch"]
    print(f"fine-tune done: selected epoch {best}, checkpoint at {out / 'ckpt_final'}")
    return 0


def _write_vocab(out: Path, vocab: model.Vocab):
    (out / "vocab.json").write_text(json.dumps(vocab.to_dict()), encoding="utf-8")


def _read_vocab(path: Path) -> model.Vocab:
    if not path.is_file():
        raise DataError(f"vocab file not found: {path}")
    return model.Vocab.from_dict(json.loads(path.read_text(encoding="utf-8")))


def cmd_pipeline(cfg, args) -> int:
    latin_lines, english, gold = _pipeline_inputs(cfg, args)
    dataset = corpus.read_dataset(_require_path(cfg, args, "dataset", "dataset"))
    seed = _seed(cfg, args)
    vocab = train.build_pipeline_vocab(latin_lines, english, dataset)
    config = _model_config(cfg, vocab.size, seed)
    stage_configs = {
        "language": _stage_config(cfg, "language", "language", seed),
        "task_crosslingual": _stage_config(cfg, "task_crosslingual", "task", seed),
        "target_finetune": _stage_config(cfg, "target_finetune", "finetune", seed),
    }
    result = train.run_pipeline(latin_lines, english, dataset, gold, config,
                                stage_configs=stage_configs, vocab=vocab)
    out = _out_dir(cfg, args)
    _write_stage_outputs(out, "ckpt_language", result.stage_checkpoints["language"],
                         [r for r in result.metric_log if r["stage"] == "language"])
    _write_stage_outputs(out, "ckpt_task", result.stage_checkpoints["task_crosslingual"],
                         [r for r in result.metric_log if r["stage"] == "task_crosslingual"])
    _write_stage_outputs(out, "ckpt_final", result.final,
                         [r for r in result.metric_log if r["stage"] == "target_finetune"])
    (out / "metrics.csv").write_text(train.metrics_to_csv(result.metric_log),
                                     encoding="utf-8")
    _write_vocab(out, result.vocab)
    print(f"pipeline done: final checkpoint at {out / 'ckpt_final'}")
    return 0


def cmd_predict(cfg, args) -> int:
    ckpt = train.load_checkpoint(Path(args.checkpoint))
    config = train.config_from_manifest(ckpt.manifest)
    vocab = _read_vocab(Path(args.vocab) if args.vocab
                        else Path(args.checkpoint).parent / "vocab.json")
    input_path = Path(args.input)
    if not input_path.is_file():
        raise DataError(f"input file not found: {input_path}")
    texts = _load_texts(input_path)
    stack = ckpt.manifest.get("stack", ["language", "task"])
    preds = train.predict_examples(ckpt.store, config, stack, vocab, texts)
    out_path = Path(args.output) if args.output else _out_dir(cfg, args) / "predictions.tsv"
    with out_path.open("w", encoding="utf-8") as handle:
        for text, label in zip(texts, preds):
            handle.write(f"{text}\t{label.value}\n")
    print(f"wrote {len(preds)} predictions to {out_path}")
    return 0


def cmd_evaluate(cfg, args) -> int:
    pred_texts, preds = _read_prediction_tsv(Path(args.pred))
    gold_texts, golds = _read_prediction_tsv(Path(args.gold))
    if len(preds) != len(golds):
        raise DataError(f"prediction file has {len(preds)} rows, gold has {len(golds)}")
    report = evaluation.evaluate(golds, preds)
    cm = evaluation.confusion_matrix(golds, preds)
    print(evaluation.render_report(report, "text"))
    print(evaluation.render_report(cm, "text"), end="")
    if args.csv:
        out = _out_dir(cfg, args)
        (out / "eval_report.csv").write_text(
            evaluation.render_report(report, "csv"), encoding="utf-8")
        (out / "confusion.csv").write_text(
            evaluation.render_report(cm, "csv"), encoding="utf-8")
        print(f"wrote CSV reports to {out}")
    return 0


def cmd_compare(cfg, args) -> int:
    _, preds_a = _read_prediction_tsv(Path(args.pred_a))
    _, preds_b = _read_prediction_tsv(Path(args.pred_b))
    _, golds = _read_prediction_tsv(Path(args.gold))
    report = evaluation.disagreement_report(preds_a, preds_b, golds)
    print(evaluation.render_report(report, "text"), end="")
    return 0


def cmd_ablate(cfg, args) -> int:
    latin_lines, english, gold = _pipeline_inputs(cfg, args)
    test_set = corpus.load_labeled_tsv(_require_path(cfg, args, "test-tsv", "test_tsv"))
    seed = _seed(cfg, args)
    out = _out_dir(cfg, args)
    for dataset_path in args.dataset:
        path = Path(dataset_path)
        if not path.exists():
            raise DataError(f"dataset path does not exist: {path}")
        dataset = corpus.read_dataset(path)
        config = _model_config(cfg, 4, seed)
        stage_configs = {
            "language": _stage_config(cfg, "language", "language", seed),
            "task_crosslingual": _stage_config(cfg, "task_crosslingual", "task", seed),
            "target_finetune": _stage_config(cfg, "target_finetune", "finetune", seed),
        }
        table = train.run_ablation(latin_lines, english, dataset, gold, test_set,
                                   config, stage_configs=stage_configs,
                                   label_source=path.stem)
        csv_path = out / f"ablation_{path.stem}.csv"
        csv_path.write_text(evaluation.render_report(table, "csv"), encoding="utf-8")
        print(f"label source: {table.label_source}")
        print(evaluation.render_report(table, "text"), end="")
        print(f"wrote {csv_path}")
    return 0


def cmd_stats(cfg, args) -> int:
    dataset = corpus.read_dataset(Path(args.dataset))
    stats = heuristic.LabelStats.from_labels(e.label for e in dataset)
    print(evaluation.render_report(stats, "text"), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    # shared flags are accepted both before and after the subcommand;
    # SUPPRESS keeps a post-subcommand absence from clobbering a value
    # parsed earlier
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", default=argparse.SUPPRESS,
                        help="TOML config file")
    shared.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="master seed (overrides config)")
    shared.add_argument("--out", default=argparse.SUPPRESS,
                        help="output directory (overrides config)")

    parser = argparse.ArgumentParser(
        prog="latin-polarity",
        description="Weakly-supervised emotion polarity pipeline for Latin",
        parents=[shared])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate-heuristic", parents=[shared],
                       help="label treebank sentences with the lexicon rules")
    p.add_argument("--treebank", help="directory of .conllu files")
    p.add_argument("--lexicon", help="lemma<TAB>score TSV")

    p = sub.add_parser("annotate-llm", parents=[shared],
                       help="label treebank sentences via an LLM")
    p.add_argument("--backend", choices=("replay", "http"), default="replay")
    p.add_argument("--treebank")
    p.add_argument("--gold-tsv")
    p.add_argument("--replay-fixture", help="JSONL of recorded responses")

    for name, extra in (("train-lang", ()), ("train-task", ("--init",)),
                        ("finetune", ("--init",)), ("pipeline", ())):
        p = sub.add_parser(name, parents=[shared])
        p.add_argument("--latin-corpus")
        p.add_argument("--english-tsv")
        p.add_argument("--gold-tsv")
        p.add_argument("--dataset", help="annotated dataset JSONL")
        for flag in extra:
            p.add_argument(flag, help="checkpoint directory to start from")

    p = sub.add_parser("predict", parents=[shared],
                       help="label a text file with a trained checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", help="vocab.json (default: next to the checkpoint)")
    p.add_argument("--input", required=True)
    p.add_argument("--output")

    p = sub.add_parser("evaluate", parents=[shared],
                       help="score a predictions TSV against gold")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--csv", action="store_true", help="also write CSV reports")

    p = sub.add_parser("compare", parents=[shared],
                       help="disagreement analysis of two prediction files")
    p.add_argument("--pred-a", required=True)
    p.add_argument("--pred-b", required=True)
    p.add_argument("--gold", required=True)

    p = sub.add_parser("ablate", parents=[shared],
                       help="run the four transfer conditions per dataset")
    p.add_argument("--dataset", nargs="+", required=True,
                   help="one annotated JSONL per label source")
    p.add_argument("--latin-corpus")
    p.add_argument("--english-tsv")
    p.add_argument("--gold-tsv")
    p.add_argument("--test-tsv")

    p = sub.add_parser("stats", parents=[shared],
                       help="label counts of a dataset JSONL")
    p.add_argument("--dataset", required=True)
    return parser


_COMMANDS = {
    "annotate-heuristic": cmd_annotate_heuristic,
    "annotate-llm": cmd_annotate_llm,
    "train-lang": cmd_train_lang,
    "train-task": cmd_train_task,
    "finetune": cmd_finetune,
    "pipeline": cmd_pipeline,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "ablate": cmd_ablate,
    "stats": cmd_stats,
}


def cli_dispatch(argv) -> int:
    """Parse argv and run a subcommand. 0 ok, 1 usage error, 2 data error."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        cfg = _load_config(getattr(args, "config", None))
        return _COMMANDS[args.command](cfg, args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
