"""Miniature transformer encoder with insertable bottleneck adapters.

The encoder is a small post-layer-norm BERT-style stack in float64 numpy:
token + learned positional embeddings, then per layer a self-attention
sublayer and a feed-forward sublayer, each followed by residual add and
layer norm. After each sublayer's norm the configured adapter stack is
applied in order, so there are two adapter insertion points per layer.

Adapters are bottleneck residuals y = x + relu(x @ W_down + b_down) @ W_up
+ b_up with zero-initialized up-projections, so a freshly initialized
adapter is the exact identity. Gradients for every named tensor are
computed by hand-written reverse-mode passes; finite differences are the
test-side oracle, never used here.

Everything is deterministic: initialization draws one seeded RNG stream
per tensor, and forward/backward are pure functions of (params, inputs).
"""

from __future__ import annotations

import math
import re
import zlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.special import erf

from .corpus import Label, LABEL_ORDER

PAD_ID, UNK_ID, CLS_ID, MASK_ID = 0, 1, 2, 3
SPECIAL_TOKENS = ("<pad>", "<unk>", "<cls>", "<mask>")

LN_EPS = 1e-5
_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)

_WORD_RE = re.compile(r"\w+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercased word pieces split on whitespace and punctuation."""
    return _WORD_RE.findall(text.lower())


@dataclass(frozen=True)
class Vocab:
    token_to_id: dict[str, int]
    id_to_token: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.id_to_token)

    def encode(self, text: str) -> list[int]:
        """Token ids for a text, UNK for out-of-vocabulary words. No CLS."""
        return [self.token_to_id.get(tok, UNK_ID) for tok in tokenize(text)]

    def to_dict(self) -> dict:
        return {"tokens": list(self.id_to_token)}

    @classmethod
    def from_dict(cls, record: dict) -> "Vocab":
        tokens = tuple(record["tokens"])
        return cls(token_to_id={tok: i for i, tok in enumerate(tokens)},
                   id_to_token=tokens)


def build_vocab(corpus_lines: Iterable[str], min_count: int = 1) -> Vocab:
    """Vocabulary of tokens with count >= min_count, most frequent first.

    Ids 0-3 are the fixed specials; remaining ids are assigned by
    (-count, token) order, so the mapping is deterministic.
    """
    counts = Counter()
    for line in corpus_lines:
        counts.update(tokenize(line))
    kept = sorted((tok for tok, c in counts.items() if c >= min_count),
                  key=lambda tok: (-counts[tok], tok))
    tokens = SPECIAL_TOKENS + tuple(kept)
    return Vocab(token_to_id={tok: i for i, tok in enumerate(tokens)},
                 id_to_token=tokens)


def encode_for_classifier(vocab: Vocab, text: str, max_len: int) -> list[int]:
    """CLS followed by the text's token ids, truncated to max_len."""
    return [CLS_ID] + vocab.encode(text)[: max_len - 1]


def encode_for_mlm(vocab: Vocab, text: str, max_len: int) -> list[int]:
    return vocab.encode(text)[:max_len]


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    layers: int = 2
    d_model: int = 32
    heads: int = 4
    d_ff: int = 64
    max_len: int = 64
    adapter_dim: int = 8
    seed: int = 0

    def __post_init__(self):
        for name in ("vocab_size", "layers", "d_model", "heads", "d_ff",
                     "max_len", "adapter_dim"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.d_model % self.heads != 0:
            raise ValueError("heads must divide d_model")
        if self.adapter_dim >= self.d_model:
            raise ValueError("adapter_dim must be below d_model")


@dataclass(frozen=True)
class AdapterParams:
    """Bottleneck adapter weights for one insertion point."""

    w_down: np.ndarray
    b_down: np.ndarray
    w_up: np.ndarray
    b_up: np.ndarray


ADAPTER_NAMES = ("language", "task")
_INSERTION_POINTS = ("attn", "ffn")
_ADAPTER_FIELDS = ("w_down", "b_down", "w_up", "b_up")


@dataclass
class ParamStore:
    """Named float64 tensors plus the set currently marked trainable."""

    tensors: dict[str, np.ndarray]
    trainable: set[str] = field(default_factory=set)

    @property
    def names(self) -> list[str]:
        return list(self.tensors)

    def copy(self) -> "ParamStore":
        return ParamStore(tensors={k: v.copy() for k, v in self.tensors.items()},
                          trainable=set(self.trainable))

    def with_trainable(self, mask: Iterable[str]) -> "ParamStore":
        mask = set(mask)
        unknown = mask - set(self.tensors)
        if unknown:
            raise ValueError(f"unknown tensors in trainable mask: {sorted(unknown)}")
        out = self.copy()
        out.trainable = mask
        return out


def _tensor_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([seed & 0xFFFFFFFF, zlib.crc32(name.encode("utf-8"))]))


def _uniform(seed: int, name: str, shape) -> np.ndarray:
    return _tensor_rng(seed, name).uniform(-0.05, 0.05, size=shape)


def _fan_scaled(seed: int, name: str, shape) -> np.ndarray:
    # Xavier-style bounds keep the frozen encoder's attention mixing at
    # unit gain; a flat 0.05 bound starves the CLS state of token signal.
    limit = math.sqrt(6.0 / (shape[0] + shape[1]))
    return _tensor_rng(seed, name).uniform(-limit, limit, size=shape)


def adapter_param_names(adapter: str, layer: int, point: str) -> list[str]:
    prefix = f"adapter.{adapter}.layer{layer}.{point}."
    return [prefix + f for f in _ADAPTER_FIELDS]


def init_adapter(config: ModelConfig, seed: int, name: str) -> AdapterParams:
    """Fresh adapter: seeded down-projection, exact-zero up-projection."""
    d, a = config.d_model, config.adapter_dim
    return AdapterParams(w_down=_uniform(seed, name + ".w_down", (d, a)),
                         b_down=np.zeros(a),
                         w_up=np.zeros((a, d)),
                         b_up=np.zeros(d))


def init_params(config: ModelConfig) -> ParamStore:
    """Build every tensor of the encoder, adapters, and heads.

    Each tensor draws from its own RNG stream named after the tensor, so
    the result is bit-reproducible. Projection weights use fan-scaled
    uniform bounds, embeddings uniform(-0.05, 0.05); biases and adapter
    up-projections start at zero, layer-norm gains at one.
    """
    seed = config.seed
    d, f, v = config.d_model, config.d_ff, config.vocab_size
    t: dict[str, np.ndarray] = {}
    t["embed.tok"] = _uniform(seed, "embed.tok", (v, d))
    t["embed.pos"] = _uniform(seed, "embed.pos", (config.max_len, d))
    for l in range(config.layers):
        p = f"layer{l}."
        for w in ("wq", "wk", "wv", "wo"):
            t[p + "attn." + w] = _fan_scaled(seed, p + "attn." + w, (d, d))
        for b in ("bq", "bk", "bv", "bo"):
            t[p + "attn." + b] = np.zeros(d)
        t[p + "attn.ln_g"] = np.ones(d)
        t[p + "attn.ln_b"] = np.zeros(d)
        t[p + "ffn.w1"] = _fan_scaled(seed, p + "ffn.w1", (d, f))
        t[p + "ffn.b1"] = np.zeros(f)
        t[p + "ffn.w2"] = _fan_scaled(seed, p + "ffn.w2", (f, d))
        t[p + "ffn.b2"] = np.zeros(d)
        t[p + "ffn.ln_g"] = np.ones(d)
        t[p + "ffn.ln_b"] = np.zeros(d)
    for adapter in ADAPTER_NAMES:
        for l in range(config.layers):
            for point in _INSERTION_POINTS:
                prefix = f"adapter.{adapter}.layer{l}.{point}"
                params = init_adapter(config, seed, prefix)
                t[prefix + ".w_down"] = params.w_down
                t[prefix + ".b_down"] = params.b_down
                t[prefix + ".w_up"] = params.w_up
                t[prefix + ".b_up"] = params.b_up
    t["head.mlm.w"] = _fan_scaled(seed, "head.mlm.w", (d, v))
    t["head.mlm.b"] = np.zeros(v)
    t["head.cls.w"] = _fan_scaled(seed, "head.cls.w", (d, 4))
    t["head.cls.b"] = np.zeros(4)
    return ParamStore(tensors=t)


def _softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = x - x.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def _gelu(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    cdf = 0.5 * (1.0 + erf(x * _INV_SQRT2))
    return x * cdf, cdf


def _gelu_grad(x: np.ndarray, cdf: np.ndarray) -> np.ndarray:
    return cdf + x * np.exp(-0.5 * x * x) * _INV_SQRT2PI


def adapter_forward(x: np.ndarray, params: AdapterParams) -> np.ndarray:
    """Bottleneck residual: x + relu(x @ W_down + b_down) @ W_up + b_up.

    Works on a single d_model vector or row-wise on a (T, d_model) matrix.
    """
    if x.shape[-1] != params.w_down.shape[0]:
        raise ValueError(f"input width {x.shape[-1]} does not match adapter "
                         f"down-projection {params.w_down.shape[0]}")
    hidden = np.maximum(x @ params.w_down + params.b_down, 0.0)
    return x + hidden @ params.w_up + params.b_up


def _check_stack(store: ParamStore, stack: Sequence[str]):
    for key in stack:
        probe = f"adapter.{key}.layer0.attn.w_down"
        if probe not in store.tensors:
            raise ValueError(f"adapter stack names unknown adapter group {key!r}")


def _encode_forward(store: ParamStore, config: ModelConfig, stack: Sequence[str],
                    token_ids: Sequence[int]):
    """Forward pass returning the hidden states and a tape for backward."""
    ids = np.asarray(token_ids, dtype=np.int64)
    if ids.ndim != 1 or ids.size == 0:
        raise ValueError("token_ids must be a non-empty 1-D sequence")
    if ids.size > config.max_len:
        raise ValueError(f"input length {ids.size} exceeds max_len {config.max_len}")
    if ids.min() < 0 or ids.max() >= config.vocab_size:
        raise ValueError("token id out of vocabulary range")
    _check_stack(store, stack)

    t = store.tensors
    heads, d = config.heads, config.d_model
    dh = d // heads
    scale = 1.0 / math.sqrt(dh)
    tape: list[tuple] = []

    x = t["embed.tok"][ids] + t["embed.pos"][: ids.size]
    tape.append(("embed", ids))

    for l in range(config.layers):
        p = f"layer{l}."
        # self-attention sublayer
        q = x @ t[p + "attn.wq"] + t[p + "attn.bq"]
        k = x @ t[p + "attn.wk"] + t[p + "attn.bk"]
        v = x @ t[p + "attn.wv"] + t[p + "attn.bv"]
        n = ids.size
        qh = q.reshape(n, heads, dh).transpose(1, 0, 2)
        kh = k.reshape(n, heads, dh).transpose(1, 0, 2)
        vh = v.reshape(n, heads, dh).transpose(1, 0, 2)
        s = (qh @ kh.transpose(0, 2, 1)) * scale
        a = _softmax(s, axis=-1)
        oh = a @ vh
        o = oh.transpose(1, 0, 2).reshape(n, d)
        r = x + (o @ t[p + "attn.wo"] + t[p + "attn.bo"])
        tape.append(("attn", l, (x, qh, kh, vh, a, o)))
        x = r

        x, cache = _ln_forward(x, t[p + "attn.ln_g"], t[p + "attn.ln_b"])
        tape.append(("ln", p + "attn", cache))

        for key in stack:
            x, cache = _adapter_step(t, key, l, "attn", x)
            tape.append(("adapter", key, l, "attn", cache))

        # feed-forward sublayer
        f1 = x @ t[p + "ffn.w1"] + t[p + "ffn.b1"]
        g, cdf = _gelu(f1)
        r = x + (g @ t[p + "ffn.w2"] + t[p + "ffn.b2"])
        tape.append(("ffn", l, (x, f1, cdf, g)))
        x = r

        x, cache = _ln_forward(x, t[p + "ffn.ln_g"], t[p + "ffn.ln_b"])
        tape.append(("ln", p + "ffn", cache))

        for key in stack:
            x, cache = _adapter_step(t, key, l, "ffn", x)
            tape.append(("adapter", key, l, "ffn", cache))

    return x, tape


def _ln_forward(x, gain, bias):
    mu = x.mean(axis=1, keepdims=True)
    centered = x - mu
    var = (centered * centered).mean(axis=1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = centered * inv
    return gain * xhat + bias, (xhat, inv)


def _adapter_step(t, key, layer, point, x):
    prefix = f"adapter.{key}.layer{layer}.{point}."
    pre = x @ t[prefix + "w_down"] + t[prefix + "b_down"]
    hidden = np.maximum(pre, 0.0)
    y = x + hidden @ t[prefix + "w_up"] + t[prefix + "b_up"]
    return y, (x, pre, hidden)


def _acc(grads: dict, name: str, value: np.ndarray):
    if name in grads:
        grads[name] += value
    else:
        grads[name] = value.copy() if isinstance(value, np.ndarray) else value


def _encode_backward(dx: np.ndarray, tape: list, store: ParamStore,
                     config: ModelConfig, grads: dict):
    """Walk the tape in reverse, accumulating parameter gradients."""
    t = store.tensors
    heads, d = config.heads, config.d_model
    dh_width = d // heads
    scale = 1.0 / math.sqrt(dh_width)

    for record in reversed(tape):
        kind = record[0]
        if kind == "adapter":
            _, key, layer, point, (x, pre, hidden) = record
            prefix = f"adapter.{key}.layer{layer}.{point}."
            _acc(grads, prefix + "b_up", dx.sum(axis=0))
            _acc(grads, prefix + "w_up", hidden.T @ dx)
            dpre = (dx @ t[prefix + "w_up"].T) * (pre > 0.0)
            _acc(grads, prefix + "b_down", dpre.sum(axis=0))
            _acc(grads, prefix + "w_down", x.T @ dpre)
            dx = dx + dpre @ t[prefix + "w_down"].T
        elif kind == "ln":
            _, name, (xhat, inv) = record
            gain = t[name + ".ln_g"]
            _acc(grads, name + ".ln_g", (dx * xhat).sum(axis=0))
            _acc(grads, name + ".ln_b", dx.sum(axis=0))
            dxhat = dx * gain
            dx = inv * (dxhat
                        - dxhat.mean(axis=1, keepdims=True)
                        - xhat * (dxhat * xhat).mean(axis=1, keepdims=True))
        elif kind == "ffn":
            _, l, (x_in, f1, cdf, g) = record
            p = f"layer{l}."
            df2 = dx
            _acc(grads, p + "ffn.b2", df2.sum(axis=0))
            _acc(grads, p + "ffn.w2", g.T @ df2)
            dg = df2 @ t[p + "ffn.w2"].T
            df1 = dg * _gelu_grad(f1, cdf)
            _acc(grads, p + "ffn.b1", df1.sum(axis=0))
            _acc(grads, p + "ffn.w1", x_in.T @ df1)
            dx = dx + df1 @ t[p + "ffn.w1"].T
        elif kind == "attn":
            _, l, (x_in, qh, kh, vh, a, o) = record
            p = f"layer{l}."
            n = x_in.shape[0]
            d_out = dx
            _acc(grads, p + "attn.bo", d_out.sum(axis=0))
            _acc(grads, p + "attn.wo", o.T @ d_out)
            do = d_out @ t[p + "attn.wo"].T
            doh = do.reshape(n, heads, dh_width).transpose(1, 0, 2)
            da = doh @ vh.transpose(0, 2, 1)
            dvh = a.transpose(0, 2, 1) @ doh
            ds = a * (da - (da * a).sum(axis=-1, keepdims=True))
            ds = ds * scale
            dqh = ds @ kh
            dkh = ds.transpose(0, 2, 1) @ qh
            dq = dqh.transpose(1, 0, 2).reshape(n, d)
            dk = dkh.transpose(1, 0, 2).reshape(n, d)
            dv = dvh.transpose(1, 0, 2).reshape(n, d)
            dx_new = dx.copy()
            for name, dproj in (("q", dq), ("k", dk), ("v", dv)):
                _acc(grads, p + f"attn.b{name}", dproj.sum(axis=0))
                _acc(grads, p + f"attn.w{name}", x_in.T @ dproj)
                dx_new = dx_new + dproj @ t[p + f"attn.w{name}"].T
            dx = dx_new
        elif kind == "embed":
            _, ids = record
            dtok = np.zeros_like(t["embed.tok"])
            np.add.at(dtok, ids, dx)
            _acc(grads, "embed.tok", dtok)
            dpos = np.zeros_like(t["embed.pos"])
            dpos[: ids.size] = dx
            _acc(grads, "embed.pos", dpos)
        else:
            raise AssertionError(f"unknown tape record {kind}")


def encode(store: ParamStore, config: ModelConfig, stack: Sequence[str],
           token_ids: Sequence[int]) -> np.ndarray:
    """Hidden states (len x d_model) for a token id sequence."""
    h, _ = _encode_forward(store, config, stack, token_ids)
    return h


def classify(store: ParamStore, config: ModelConfig, stack: Sequence[str],
             token_ids: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Four-class logits and softmax probabilities from the CLS state."""
    if len(token_ids) == 0 or token_ids[0] != CLS_ID:
        raise ValueError("classifier input must begin with the CLS token")
    h = encode(store, config, stack, token_ids)
    logits = h[0] @ store.tensors["head.cls.w"] + store.tensors["head.cls.b"]
    return logits, _softmax(logits)


def predict_label(store: ParamStore, config: ModelConfig, stack: Sequence[str],
                  token_ids: Sequence[int]) -> Label:
    logits, _ = classify(store, config, stack, token_ids)
    return LABEL_ORDER[int(np.argmax(logits))]


def ce_loss(logits: np.ndarray, gold: Label) -> float:
    """-log softmax(logits)[gold], stable via log-sum-exp."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.shape != (4,):
        raise ValueError("expected exactly 4 logits")
    gi = LABEL_ORDER.index(gold)
    shifted = logits - logits.max()
    return float(np.log(np.exp(shifted).sum()) - shifted[gi])


def classification_loss_and_grads(store: ParamStore, config: ModelConfig,
                                  stack: Sequence[str], token_ids: Sequence[int],
                                  gold: Label,
                                  trainable: Optional[set[str]] = None
                                  ) -> tuple[float, dict[str, np.ndarray]]:
    """Cross-entropy loss and analytic gradients for the trainable set."""
    if len(token_ids) == 0 or token_ids[0] != CLS_ID:
        raise ValueError("classifier input must begin with the CLS token")
    h, tape = _encode_forward(store, config, stack, token_ids)
    w, b = store.tensors["head.cls.w"], store.tensors["head.cls.b"]
    logits = h[0] @ w + b
    probs = _softmax(logits)
    gi = LABEL_ORDER.index(gold)
    loss = float(-np.log(probs[gi]))

    dlogits = probs.copy()
    dlogits[gi] -= 1.0
    grads: dict[str, np.ndarray] = {}
    _acc(grads, "head.cls.w", np.outer(h[0], dlogits))
    _acc(grads, "head.cls.b", dlogits)
    dh = np.zeros_like(h)
    dh[0] = w @ dlogits
    _encode_backward(dh, tape, store, config, grads)
    return loss, _filter_grads(grads, store, trainable)


def make_mlm_example(token_ids: Sequence[int], mask_prob: float,
                     rng: np.random.Generator, vocab_size: int
                     ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Select and corrupt positions for masked-token prediction.

    Each position is selected with probability mask_prob (one is forced if
    none were drawn). Selected positions are replaced by MASK with
    probability 0.8, by a random id with probability 0.1, and kept as-is
    otherwise. Returns (corrupted_ids, positions, original_ids_at_positions);
    the draw order is fixed, so one rng state gives one outcome.
    """
    if not 0.0 < mask_prob < 1.0:
        raise ValueError("mask_prob must be in (0, 1)")
    ids = np.asarray(token_ids, dtype=np.int64)
    if ids.size == 0:
        raise ValueError("cannot mask an empty sequence")
    selected = rng.random(ids.size) < mask_prob
    if not selected.any():
        selected[int(rng.integers(ids.size))] = True
    positions = np.flatnonzero(selected)
    corrupted = ids.copy()
    for pos in positions:
        u = rng.random()
        if u < 0.8:
            corrupted[pos] = MASK_ID
        elif u < 0.9:
            corrupted[pos] = int(rng.integers(vocab_size))
    return corrupted, positions, ids[positions]


def mlm_loss_from_positions(store: ParamStore, config: ModelConfig,
                            stack: Sequence[str], corrupted: Sequence[int],
                            positions: np.ndarray, targets: np.ndarray) -> float:
    """Mean cross-entropy of the MLM head at the given positions."""
    h = encode(store, config, stack, corrupted)
    logits = h[positions] @ store.tensors["head.mlm.w"] + store.tensors["head.mlm.b"]
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return float(-log_probs[np.arange(len(targets)), targets].mean())


def mlm_loss_and_grads(store: ParamStore, config: ModelConfig, stack: Sequence[str],
                       corrupted: Sequence[int], positions: np.ndarray,
                       targets: np.ndarray,
                       trainable: Optional[set[str]] = None
                       ) -> tuple[float, dict[str, np.ndarray]]:
    h, tape = _encode_forward(store, config, stack, corrupted)
    w, b = store.tensors["head.mlm.w"], store.tensors["head.mlm.b"]
    hp = h[positions]
    logits = hp @ w + b
    probs = _softmax(logits, axis=1)
    idx = np.arange(len(targets))
    loss = float(-np.log(probs[idx, targets]).mean())

    dlogits = probs.copy()
    dlogits[idx, targets] -= 1.0
    dlogits /= len(targets)
    grads: dict[str, np.ndarray] = {}
    _acc(grads, "head.mlm.w", hp.T @ dlogits)
    _acc(grads, "head.mlm.b", dlogits.sum(axis=0))
    dh = np.zeros_like(h)
    np.add.at(dh, positions, dlogits @ w.T)
    _encode_backward(dh, tape, store, config, grads)
    return loss, _filter_grads(grads, store, trainable)


def mlm_loss(store: ParamStore, config: ModelConfig, stack: Sequence[str],
             batch: Sequence[Sequence[int]], mask_prob: float,
             rng: np.random.Generator) -> float:
    """Mean masked-prediction loss over a batch of token id sequences."""
    if len(batch) == 0:
        raise ValueError("mlm_loss requires a non-empty batch")
    total = 0.0
    for token_ids in batch:
        corrupted, positions, targets = make_mlm_example(token_ids, mask_prob,
                                                         rng, config.vocab_size)
        total += mlm_loss_from_positions(store, config, stack, corrupted,
                                         positions, targets)
    return total / len(batch)


def _filter_grads(grads: dict, store: ParamStore,
                  trainable: Optional[set[str]]) -> dict[str, np.ndarray]:
    mask = store.trainable if trainable is None else trainable
    if not mask:
        return {}
    return {name: grads[name] for name in grads if name in mask}


def decode_dual(p_pos: float, p_neg: float, threshold: float = 0.5) -> Label:
    """Map independent positive/negative probabilities to a single label.

    Both below threshold -> neutral; both at or above -> mixed; otherwise
    the side that cleared the threshold wins.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must be in (0, 1)")
    pos_hi = p_pos >= threshold
    neg_hi = p_neg >= threshold
    if pos_hi and neg_hi:
        return Label.MIXED
    if pos_hi:
        return Label.POSITIVE
    if neg_hi:
        return Label.NEGATIVE
    return Label.NEUTRAL
