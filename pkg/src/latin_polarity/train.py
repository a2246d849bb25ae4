"""Three-stage adapter training, checkpoint persistence, and ablations.

Stage 1 ("language") trains the language adapter and MLM head on plain
Latin text. Stage 2 ("task_crosslingual") trains the task adapter and the
four-way classification head on English binary sentiment, with the two
extra classes simply unused. Stage 3 ("target_finetune") continues
training the task adapter and head on annotated Latin, with the language
adapter stacked underneath and frozen. Everything outside the stage's
trainable mask stays bitwise untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import evaluation, model
from .corpus import AnnotatedExample, Label
from .errors import DataError
from .model import ModelConfig, ParamStore, Vocab

STAGES = ("language", "task_crosslingual", "target_finetune")

# Adapter stack used by each stage: the task adapter is stacked on top of
# the language adapter only in the final stage.
STAGE_STACKS = {
    "language": ("language",),
    "task_crosslingual": ("task",),
    "target_finetune": ("language", "task"),
}

_STAGE_DEFAULTS = {
    "language": dict(epochs=10, learning_rate=1e-4, checkpoint_policy="last"),
    "task_crosslingual": dict(epochs=5, learning_rate=5e-4, checkpoint_policy="last"),
    "target_finetune": dict(epochs=50, learning_rate=5e-4, checkpoint_policy="best_val"),
}

MASK_PROB = 0.15


@dataclass(frozen=True)
class StageConfig:
    stage: str
    epochs: int
    learning_rate: float
    batch_size: int = 8
    checkpoint_policy: str = "last"
    seed: int = 0

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.checkpoint_policy not in ("last", "best_val"):
            raise ValueError(f"unknown checkpoint policy {self.checkpoint_policy!r}")

    @classmethod
    def defaults(cls, stage: str, seed: int = 0, **overrides) -> "StageConfig":
        if stage not in _STAGE_DEFAULTS:
            raise ValueError(f"unknown stage {stage!r}")
        kwargs = dict(_STAGE_DEFAULTS[stage])
        kwargs.update(overrides)
        return cls(stage=stage, seed=seed, **kwargs)


def trainable_mask(stage: str, param_names: Sequence[str]) -> set[str]:
    """Which tensors train during a stage; everything else is frozen."""
    names = set(param_names)
    if stage == "language":
        selected = {n for n in names
                    if n.startswith("adapter.language.") or n.startswith("head.mlm.")}
    elif stage in ("task_crosslingual", "target_finetune"):
        selected = {n for n in names
                    if n.startswith("adapter.task.") or n.startswith("head.cls.")}
    else:
        raise ValueError(f"unknown stage {stage!r}")
    return selected


class AdamOptimizer:
    """Adam with bias correction (beta1 0.9, beta2 0.999, eps 1e-8)."""

    def __init__(self, learning_rate: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.lr = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.t = 0

    def step(self, store: ParamStore, grads: dict[str, np.ndarray]):
        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for name in sorted(grads):
            g = grads[name]
            if name not in self.m:
                self.m[name] = np.zeros_like(g)
                self.v[name] = np.zeros_like(g)
            self.m[name] = self.beta1 * self.m[name] + (1 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1 - self.beta2) * g * g
            m_hat = self.m[name] / correction1
            v_hat = self.v[name] / correction2
            store.tensors[name] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


@dataclass
class Checkpoint:
    """In-memory checkpoint: a parameter store plus its manifest."""

    store: ParamStore
    manifest: dict


def _epoch_rng(seed: int, epoch: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF, epoch]))


def _average_grads(grad_list: list[dict[str, np.ndarray]]) -> dict[str, np.ndarray]:
    if not grad_list:
        return {}
    total: dict[str, np.ndarray] = {}
    for grads in grad_list:
        for name, g in grads.items():
            if name in total:
                total[name] += g
            else:
                total[name] = g.copy()
    scale = 1.0 / len(grad_list)
    return {name: g * scale for name, g in total.items()}


def predict_examples(store: ParamStore, config: ModelConfig, stack: Sequence[str],
                     vocab: Vocab, texts: Sequence[str]) -> list[Label]:
    """Argmax labels for raw texts (ties resolved toward the first class)."""
    ids = [model.encode_for_classifier(vocab, text, config.max_len) for text in texts]
    return [model.predict_label(store, config, stack, seq) for seq in ids]


def _val_macro_micro(store, config, stack, encoded_val):
    golds = [gold for _, gold in encoded_val]
    preds = [model.predict_label(store, config, stack, ids) for ids, _ in encoded_val]
    cm = evaluation.confusion_matrix(golds, preds)
    return evaluation.micro_f1(cm), evaluation.macro_f1(cm)


def train_stage(store: ParamStore, config: ModelConfig, data,
                stage_config: StageConfig,
                val_set: Optional[Sequence[tuple[Sequence[int], Label]]] = None,
                stack: Optional[Sequence[str]] = None,
                mask_override: Optional[set[str]] = None,
                val_metric_fn: Optional[Callable[[ParamStore, int], float]] = None
                ) -> tuple[ParamStore, Checkpoint, list[dict]]:
    """Run one training stage and return (params, checkpoint, metric log).

    `data` is a list of token-id sequences for the language stage and a
    list of (token_ids, Label) pairs for the classification stages. The
    input store is left untouched; only tensors in the stage's trainable
    mask change in the returned store. With policy "best_val" the epoch
    with the highest validation score is kept (earliest epoch on ties),
    scored by macro F1 on `val_set` unless `val_metric_fn` overrides it.
    """
    if len(data) == 0:
        raise ValueError("training data must be non-empty")
    policy = stage_config.checkpoint_policy
    if policy == "best_val" and val_set is None and val_metric_fn is None:
        raise ValueError("best_val checkpoint policy requires a validation set")

    stage = stage_config.stage
    stack = tuple(STAGE_STACKS[stage] if stack is None else stack)
    mask = trainable_mask(stage, store.names) if mask_override is None else set(mask_override)
    trained = store.with_trainable(mask)
    optimizer = AdamOptimizer(stage_config.learning_rate)

    best_metric = -np.inf
    best_epoch = 0
    best_tensors: Optional[dict[str, np.ndarray]] = None
    log: list[dict] = []

    for epoch in range(1, stage_config.epochs + 1):
        order = _epoch_rng(stage_config.seed, epoch).permutation(len(data))
        mlm_rng = _epoch_rng(stage_config.seed, -epoch & 0xFFFFFFFF)
        epoch_loss = 0.0
        for start in range(0, len(order), stage_config.batch_size):
            batch_idx = order[start:start + stage_config.batch_size]
            losses = []
            grad_list = []
            for i in batch_idx:
                if stage == "language":
                    seq = data[i]
                    corrupted, positions, targets = model.make_mlm_example(
                        seq, MASK_PROB, mlm_rng, config.vocab_size)
                    loss, grads = model.mlm_loss_and_grads(
                        trained, config, stack, corrupted, positions, targets,
                        trainable=mask)
                else:
                    ids, gold = data[i]
                    loss, grads = model.classification_loss_and_grads(
                        trained, config, stack, ids, gold, trainable=mask)
                losses.append(loss)
                grad_list.append(grads)
            epoch_loss += sum(losses)
            if mask:
                optimizer.step(trained, _average_grads(grad_list))
        epoch_loss /= len(data)

        row = {"stage": stage, "epoch": epoch, "loss": epoch_loss,
               "val_micro_f1": None, "val_macro_f1": None}
        metric = None
        if val_metric_fn is not None:
            metric = float(val_metric_fn(trained, epoch))
            row["val_macro_f1"] = metric
        elif val_set is not None:
            micro, macro = _val_macro_micro(trained, config, stack, val_set)
            row["val_micro_f1"] = micro
            row["val_macro_f1"] = macro
            metric = macro
        log.append(row)

        if policy == "best_val" and metric is not None and metric > best_metric:
            best_metric = metric
            best_epoch = epoch
            best_tensors = {k: v.copy() for k, v in trained.tensors.items()}

    if policy == "best_val":
        final = ParamStore(tensors=best_tensors, trainable=set(mask))
        selected_epoch = best_epoch
    else:
        final = trained
        selected_epoch = stage_config.epochs

    manifest = build_manifest(final, config, stage=stage, epoch=selected_epoch,
                              stack=stack, metrics=log)
    return final, Checkpoint(store=final, manifest=manifest), log


def build_manifest(store: ParamStore, config: ModelConfig, stage: str,
                   epoch: int, stack: Sequence[str], metrics: list[dict]) -> dict:
    return {
        "config": {
            "vocab_size": config.vocab_size, "layers": config.layers,
            "d_model": config.d_model, "heads": config.heads,
            "d_ff": config.d_ff, "max_len": config.max_len,
            "adapter_dim": config.adapter_dim, "seed": config.seed,
        },
        "stage": stage,
        "epoch": epoch,
        "stack": list(stack),
        "dtype": "<f8",
        "tensors": [[name, list(store.tensors[name].shape)] for name in store.tensors],
        "trainable": sorted(store.trainable),
        "metrics": metrics,
    }


def save_checkpoint(checkpoint: Checkpoint, path) -> None:
    """Write manifest.json plus params.bin (little-endian float64).

    Tensors are packed in manifest order; the round trip is bitwise exact.
    """
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = checkpoint.manifest
    (directory / "manifest.json").write_text(
        json.dumps(manifest, indent=1, sort_keys=True), encoding="utf-8")
    with (directory / "params.bin").open("wb") as handle:
        for name, _shape in manifest["tensors"]:
            handle.write(np.ascontiguousarray(
                checkpoint.store.tensors[name], dtype="<f8").tobytes())


def load_checkpoint(path) -> Checkpoint:
    directory = Path(path)
    manifest_path = directory / "manifest.json"
    payload_path = directory / "params.bin"
    if not manifest_path.is_file() or not payload_path.is_file():
        raise DataError(f"checkpoint incomplete or missing at {directory}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    payload = payload_path.read_bytes()
    expected = sum(int(np.prod(shape)) * 8 for _, shape in manifest["tensors"])
    if len(payload) != expected:
        raise DataError(f"params.bin holds {len(payload)} bytes, "
                        f"manifest expects {expected}")
    tensors: dict[str, np.ndarray] = {}
    offset = 0
    for name, shape in manifest["tensors"]:
        count = int(np.prod(shape))
        arr = np.frombuffer(payload, dtype="<f8", count=count, offset=offset)
        tensors[name] = arr.reshape(shape).copy()
        offset += count * 8
    store = ParamStore(tensors=tensors, trainable=set(manifest.get("trainable", [])))
    return Checkpoint(store=store, manifest=manifest)


def config_from_manifest(manifest: dict) -> ModelConfig:
    return ModelConfig(**manifest["config"])


def encode_classification_data(vocab: Vocab, config: ModelConfig,
                               examples: Sequence[AnnotatedExample]
                               ) -> list[tuple[list[int], Label]]:
    return [(model.encode_for_classifier(vocab, ex.text, config.max_len), ex.label)
            for ex in examples]


def encode_mlm_data(vocab: Vocab, config: ModelConfig,
                    lines: Sequence[str]) -> list[list[int]]:
    encoded = [model.encode_for_mlm(vocab, line, config.max_len) for line in lines]
    return [seq for seq in encoded if seq]


@dataclass
class PipelineResult:
    final: Checkpoint
    stage_checkpoints: dict[str, Checkpoint]
    metric_log: list[dict]
    vocab: Vocab
    config: ModelConfig


def run_pipeline(latin_corpus_lines: Sequence[str],
                 english_examples: Sequence[AnnotatedExample],
                 latin_examples: Sequence[AnnotatedExample],
                 gold_val: Sequence[AnnotatedExample],
                 config: ModelConfig,
                 stage_configs: Optional[dict[str, StageConfig]] = None,
                 init_store: Optional[ParamStore] = None,
                 vocab: Optional[Vocab] = None,
                 skip_stages: frozenset[str] = frozenset()) -> PipelineResult:
    """Run the staged training sequence end to end.

    Stages listed in `skip_stages` are omitted (used by the ablations);
    the final fine-tune always runs. The final stage stacks the task
    adapter on top of the language adapter only when the language stage
    actually ran.
    """
    if vocab is None:
        vocab = build_pipeline_vocab(latin_corpus_lines, english_examples,
                                     latin_examples)
    if vocab.size != config.vocab_size:
        config = replace(config, vocab_size=vocab.size)
    stage_configs = stage_configs or {}
    store = init_store if init_store is not None else model.init_params(config)

    checkpoints: dict[str, Checkpoint] = {}
    log: list[dict] = []

    if "language" not in skip_stages:
        cfg = stage_configs.get("language", StageConfig.defaults("language", seed=config.seed))
        mlm_data = encode_mlm_data(vocab, config, latin_corpus_lines)
        store, ckpt, stage_log = train_stage(store, config, mlm_data, cfg)
        checkpoints["language"] = ckpt
        log.extend(stage_log)

    if "task_crosslingual" not in skip_stages:
        cfg = stage_configs.get("task_crosslingual",
                                StageConfig.defaults("task_crosslingual", seed=config.seed))
        task_data = encode_classification_data(vocab, config, english_examples)
        store, ckpt, stage_log = train_stage(store, config, task_data, cfg)
        checkpoints["task_crosslingual"] = ckpt
        log.extend(stage_log)

    cfg = stage_configs.get("target_finetune",
                            StageConfig.defaults("target_finetune", seed=config.seed))
    finetune_data = encode_classification_data(vocab, config, latin_examples)
    val_data = encode_classification_data(vocab, config, gold_val)
    final_stack = (STAGE_STACKS["target_finetune"] if "language" not in skip_stages
                   else ("task",))
    store, ckpt, stage_log = train_stage(store, config, finetune_data, cfg,
                                         val_set=val_data, stack=final_stack)
    checkpoints["target_finetune"] = ckpt
    log.extend(stage_log)

    return PipelineResult(final=ckpt, stage_checkpoints=checkpoints,
                          metric_log=log, vocab=vocab, config=config)


def build_pipeline_vocab(latin_corpus_lines: Sequence[str],
                         english_examples: Sequence[AnnotatedExample],
                         latin_examples: Sequence[AnnotatedExample],
                         min_count: int = 1) -> Vocab:
    """One vocabulary over every training text source, deterministic."""
    lines = list(latin_corpus_lines)
    lines.extend(ex.text for ex in english_examples)
    lines.extend(ex.text for ex in latin_examples)
    return model.build_vocab(lines, min_count=min_count)


ABLATION_CONDITIONS = (
    ("without knowledge transfer", frozenset({"language", "task_crosslingual"})),
    ("monolingual language transfer", frozenset({"task_crosslingual"})),
    ("cross-lingual task transfer", frozenset({"language"})),
    ("both", frozenset()),
)


@dataclass(frozen=True)
class AblationRow:
    condition: str
    micro_f1: float
    macro_f1: float
    val_f1: float


@dataclass(frozen=True)
class AblationTable:
    label_source: str
    rows: tuple[AblationRow, ...]

    def __post_init__(self):
        if len(self.rows) != 4:
            raise ValueError("ablation table must have exactly 4 rows")


def run_ablation(latin_corpus_lines: Sequence[str],
                 english_examples: Sequence[AnnotatedExample],
                 dataset: Sequence[AnnotatedExample],
                 gold_val: Sequence[AnnotatedExample],
                 test_set: Sequence[AnnotatedExample],
                 config: ModelConfig,
                 stage_configs: Optional[dict[str, StageConfig]] = None,
                 label_source: str = "dataset") -> AblationTable:
    """Train the four transfer conditions from identical seeds and score them.

    Each condition reports micro/macro F1 on the test set and macro F1 on
    the gold validation set.
    """
    vocab = build_pipeline_vocab(latin_corpus_lines, english_examples, dataset)
    rows = []
    for condition, skip in ABLATION_CONDITIONS:
        result = run_pipeline(latin_corpus_lines, english_examples, dataset,
                              gold_val, config, stage_configs=stage_configs,
                              vocab=vocab, skip_stages=skip)
        stack = result.final.manifest["stack"]
        store = result.final.store
        test_preds = predict_examples(store, result.config, stack, vocab,
                                      [ex.text for ex in test_set])
        test_golds = [ex.label for ex in test_set]
        cm = evaluation.confusion_matrix(test_golds, test_preds)
        val_preds = predict_examples(store, result.config, stack, vocab,
                                     [ex.text for ex in gold_val])
        val_cm = evaluation.confusion_matrix([ex.label for ex in gold_val], val_preds)
        rows.append(AblationRow(condition=condition,
                                micro_f1=evaluation.micro_f1(cm),
                                macro_f1=evaluation.macro_f1(cm),
                                val_f1=evaluation.macro_f1(val_cm)))
    return AblationTable(label_source=label_source, rows=tuple(rows))


def metrics_to_csv(log: Sequence[dict]) -> str:
    """Render a metric log as `stage,epoch,loss,val_micro_f1,val_macro_f1`."""
    lines = ["stage,epoch,loss,val_micro_f1,val_macro_f1"]
    for row in log:
        micro = "" if row["val_micro_f1"] is None else f"{row['val_micro_f1']:.6f}"
        macro = "" if row["val_macro_f1"] is None else f"{row['val_macro_f1']:.6f}"
        lines.append(f"{row['stage']},{row['epoch']},{row['loss']:.6f},{micro},{macro}")
    return "\n".join(lines) + "\n"
