import numpy as np
import pytest

from latin_polarity import model
from latin_polarity.corpus import Label
from latin_polarity.model import (AdapterParams, ModelConfig, adapter_forward,
                                  build_vocab, ce_loss, classify, decode_dual,
                                  encode, init_params, mlm_loss)

CFG = ModelConfig(vocab_size=20, seed=0)


@pytest.fixture(scope="module")
def store():
    return init_params(CFG)


def noisy_store(sigma=0.1, seed=42):
    """Init plus seeded noise everywhere, so every path carries signal."""
    out = init_params(CFG)
    rng = np.random.default_rng(seed)
    for arr in out.tensors.values():
        arr += rng.normal(0, sigma, size=arr.shape)
    return out


# --- vocab


def test_vocab_empty_corpus():
    vocab = build_vocab([])
    assert vocab.size == 4
    assert vocab.id_to_token == model.SPECIAL_TOKENS


def test_vocab_ordering():
    vocab = build_vocab(["a a b"], min_count=1)
    assert vocab.token_to_id["a"] == 4
    assert vocab.token_to_id["b"] == 5


def test_vocab_min_count():
    vocab = build_vocab(["a a b"], min_count=2)
    assert "a" in vocab.token_to_id
    assert "b" not in vocab.token_to_id


def test_vocab_unknown_maps_to_unk():
    vocab = build_vocab(["bonus malus"])
    assert vocab.encode("bonus ignotus") == [vocab.token_to_id["bonus"], model.UNK_ID]


def test_vocab_round_trip_dict():
    vocab = build_vocab(["alpha beta beta"])
    again = model.Vocab.from_dict(vocab.to_dict())
    assert again == vocab


# --- adapters


def test_adapter_identity_at_init():
    params = model.init_adapter(CFG, seed=0, name="probe")
    x = np.linspace(-1, 1, CFG.d_model)
    assert np.array_equal(adapter_forward(x, params), x)


def test_adapter_hand_computed_positive_branch():
    params = AdapterParams(w_down=np.array([[2.0]]), b_down=np.array([0.0]),
                           w_up=np.array([[0.5]]), b_up=np.array([0.0]))
    assert adapter_forward(np.array([1.0]), params) == pytest.approx([2.0])


def test_adapter_hand_computed_dead_relu():
    params = AdapterParams(w_down=np.array([[2.0]]), b_down=np.array([0.0]),
                           w_up=np.array([[0.5]]), b_up=np.array([0.0]))
    assert adapter_forward(np.array([-1.0]), params) == pytest.approx([-1.0])


def test_adapter_shape_mismatch():
    params = model.init_adapter(CFG, seed=0, name="probe")
    with pytest.raises(ValueError):
        adapter_forward(np.zeros(CFG.d_model + 1), params)


# --- encoder forward


def test_encode_shape(store):
    h = encode(store, CFG, [], [model.CLS_ID])
    assert h.shape == (1, CFG.d_model)


def test_encode_identity_at_init_stacks(store):
    ids = [model.CLS_ID, 4, 5, 6]
    base = encode(store, CFG, [], ids)
    lang = encode(store, CFG, ["language"], ids)
    both = encode(store, CFG, ["language", "task"], ids)
    assert np.abs(lang - base).max() < 1e-6
    assert np.abs(both - base).max() < 1e-6


def test_encode_bitwise_deterministic(store):
    ids = [model.CLS_ID, 4, 5, 6, 7]
    a = encode(store, CFG, ["language", "task"], ids)
    b = encode(store, CFG, ["language", "task"], ids)
    assert np.array_equal(a, b)


def test_encode_rejects_overlong(store):
    with pytest.raises(ValueError):
        encode(store, CFG, [], [4] * (CFG.max_len + 1))


def test_encode_rejects_out_of_vocab(store):
    with pytest.raises(ValueError):
        encode(store, CFG, [], [CFG.vocab_size])


def test_encode_rejects_unknown_adapter(store):
    with pytest.raises(ValueError):
        encode(store, CFG, ["bogus"], [4])


def test_stack_order_matters_once_trained():
    trained = noisy_store(sigma=0.1, seed=3)
    ids = [model.CLS_ID, 4, 5, 6]
    one = encode(trained, CFG, ["language", "task"], ids)
    other = encode(trained, CFG, ["task", "language"], ids)
    assert np.abs(one - other).max() > 1e-9


# --- classification head


def test_classify_probabilities_sum_to_one(store):
    _, probs = classify(store, CFG, [], [model.CLS_ID, 4, 5])
    assert probs.sum() == pytest.approx(1.0, abs=1e-6)
    assert (probs > 0).all()


def test_classify_zero_head_uniform(store):
    zeroed = store.copy()
    zeroed.tensors["head.cls.w"][:] = 0.0
    zeroed.tensors["head.cls.b"][:] = 0.0
    _, probs = classify(zeroed, CFG, [], [model.CLS_ID, 4])
    assert probs == pytest.approx([0.25] * 4, abs=1e-12)


def test_classify_requires_cls(store):
    with pytest.raises(ValueError):
        classify(store, CFG, [], [4, 5])


def test_ce_loss_analytic_values():
    assert ce_loss(np.array([10.0, -10.0, -10.0, -10.0]), Label.POSITIVE) < 1e-3
    assert ce_loss(np.zeros(4), Label.MIXED) == pytest.approx(np.log(4), abs=1e-12)


def test_ce_loss_uses_all_four_logits_for_binary_golds():
    # an English-stage gold is positive or negative, but the softmax still
    # normalizes over all four classes
    logits = np.array([1.0, 1.0, 1.0, 1.0])
    assert ce_loss(logits, Label.POSITIVE) == pytest.approx(np.log(4), abs=1e-12)


# --- MLM


def test_mlm_loss_positive_and_deterministic(store):
    batch = [[4, 5, 6, 7], [8, 9, 10]]
    loss_a = mlm_loss(store, CFG, ["language"], batch, 0.15,
                      np.random.default_rng(0))
    loss_b = mlm_loss(store, CFG, ["language"], batch, 0.15,
                      np.random.default_rng(0))
    assert loss_a > 0
    assert loss_a == loss_b


def test_mlm_empty_batch_rejected(store):
    with pytest.raises(ValueError):
        mlm_loss(store, CFG, ["language"], [], 0.15, np.random.default_rng(0))


def test_mlm_mask_always_selects_at_least_one():
    rng = np.random.default_rng(0)
    for _ in range(200):
        _, positions, _ = model.make_mlm_example([4, 5], 0.05, rng, CFG.vocab_size)
        assert len(positions) >= 1


def test_mlm_memorization_toy():
    # two-word vocabulary, one sentence: training just the MLM head memorizes it
    vocab = build_vocab(["alpha beta alpha beta"])
    cfg = ModelConfig(vocab_size=vocab.size, seed=0)
    toy = init_params(cfg)
    seq = vocab.encode("alpha beta alpha beta")
    trainable = {"head.mlm.w", "head.mlm.b"}
    rng = np.random.default_rng(0)
    for step in range(400):
        corrupted, positions, targets = model.make_mlm_example(
            seq, 0.3, rng, cfg.vocab_size)
        loss, grads = model.mlm_loss_and_grads(toy, cfg, ["language"], corrupted,
                                               positions, targets,
                                               trainable=trainable)
        for name, g in grads.items():
            toy.tensors[name] -= 0.5 * g
    final = mlm_loss(toy, cfg, ["language"], [seq], 0.3, np.random.default_rng(1))
    assert final < 0.01


# --- gradients vs finite differences


def relative_errors(store, loss_fn, grads, names, coords_per_tensor=4,
                    step=1e-3, coord_seed=7):
    """Max relative error over sampled above-median-|g| coordinates."""
    rng = np.random.default_rng(coord_seed)
    worst = 0.0
    for name in sorted(names):
        tensor = store.tensors[name]
        g = grads[name]
        flat = np.abs(g).ravel()
        candidates = np.flatnonzero(flat >= np.median(flat))
        picks = rng.choice(candidates, size=min(coords_per_tensor, len(candidates)),
                           replace=False)
        for idx in picks:
            original = tensor.flat[idx]
            tensor.flat[idx] = original + step
            up = loss_fn()
            tensor.flat[idx] = original - step
            down = loss_fn()
            tensor.flat[idx] = original
            g_fd = (up - down) / (2 * step)
            rel = abs(g.flat[idx] - g_fd) / max(abs(g_fd), 1e-8)
            worst = max(worst, rel)
    return worst


def test_classification_gradients_match_finite_differences():
    noisy = noisy_store()
    stack = ["language", "task"]
    ids = [model.CLS_ID, 5, 6, 7, 8, 9]
    gold = Label.NEGATIVE
    names = set(noisy.tensors) - {"head.mlm.w", "head.mlm.b"}
    _, grads = model.classification_loss_and_grads(noisy, CFG, stack, ids, gold,
                                                   trainable=set(noisy.tensors))
    worst = relative_errors(
        noisy, lambda: ce_loss(classify(noisy, CFG, stack, ids)[0], gold),
        grads, names)
    assert worst < 1e-4


def test_mlm_gradients_match_finite_differences():
    noisy = noisy_store()
    stack = ["language", "task"]
    corrupted, positions, targets = model.make_mlm_example(
        [4, 5, 6, 7, 8, 9, 10, 11], 0.3, np.random.default_rng(3), CFG.vocab_size)
    names = set(noisy.tensors) - {"head.cls.w", "head.cls.b"}
    _, grads = model.mlm_loss_and_grads(noisy, CFG, stack, corrupted, positions,
                                        targets, trainable=set(noisy.tensors))
    worst = relative_errors(
        noisy,
        lambda: model.mlm_loss_from_positions(noisy, CFG, stack, corrupted,
                                              positions, targets),
        grads, names)
    assert worst < 1e-4


def test_gradients_filtered_by_trainable(store):
    ids = [model.CLS_ID, 4, 5]
    _, grads = model.classification_loss_and_grads(
        store, CFG, [], ids, Label.POSITIVE, trainable={"head.cls.w"})
    assert set(grads) == {"head.cls.w"}


def test_gradients_empty_trainable(store):
    ids = [model.CLS_ID, 4, 5]
    _, grads = model.classification_loss_and_grads(store, CFG, [], ids,
                                                   Label.POSITIVE, trainable=set())
    assert grads == {}


def test_saturated_example_has_tiny_gradient(store):
    saturated = store.copy()
    saturated.tensors["head.cls.b"][:] = np.array([30.0, 0.0, 0.0, 0.0])
    ids = [model.CLS_ID, 4, 5]
    loss, grads = model.classification_loss_and_grads(
        saturated, CFG, ["language", "task"], ids, Label.POSITIVE,
        trainable=set(saturated.tensors))
    assert loss < 1e-9
    norm = np.sqrt(sum(float((g * g).sum()) for g in grads.values()))
    assert norm < 1e-3


# --- dual decoder


def test_decode_dual_quadrants():
    assert decode_dual(0.9, 0.9, 0.5) is Label.MIXED
    assert decode_dual(0.1, 0.1, 0.5) is Label.NEUTRAL
    assert decode_dual(0.9, 0.2, 0.5) is Label.POSITIVE
    assert decode_dual(0.2, 0.9, 0.5) is Label.NEGATIVE


def test_decode_dual_threshold_boundary():
    assert decode_dual(0.5, 0.4, 0.5) is Label.POSITIVE
    assert decode_dual(0.5, 0.5, 0.5) is Label.MIXED


def test_decode_dual_threshold_validation():
    with pytest.raises(ValueError):
        decode_dual(0.5, 0.5, 0.0)


# --- config validation


def test_config_heads_must_divide():
    with pytest.raises(ValueError):
        ModelConfig(vocab_size=10, d_model=32, heads=5)


def test_config_adapter_dim_below_d_model():
    with pytest.raises(ValueError):
        ModelConfig(vocab_size=10, d_model=8, adapter_dim=8)


def test_init_reproducible():
    a = init_params(CFG)
    b = init_params(CFG)
    assert set(a.tensors) == set(b.tensors)
    for name in a.tensors:
        assert np.array_equal(a.tensors[name], b.tensors[name])
