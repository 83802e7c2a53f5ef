"""Decoder-only transformer: forward structure, gradients, generation."""

import numpy as np
import pytest

from ddpredict.errors import NumericalError
from ddpredict.models.transformer import (
    TokenizerConfig,
    TransformerConfig,
    TransformerForecaster,
    attention,
    detokenize,
    forward,
    generate,
    init_params,
    loss_grad,
    loss_mae,
    loss_mse,
    multi_head,
    param_order,
    tokenize,
)


@pytest.fixture
def tiny_config():
    return TransformerConfig(
        d_model=16, n_layers=1, n_heads=2, d_ff=32, segment_len=5, max_tokens=8
    )


def _model(config, seed=5):
    model = TransformerForecaster(config)
    model.init_params(seed)
    return model


# ---------------------------------------------------------------- tokenizer


def test_tokenize_round_trip(rng):
    x = rng.standard_normal((3, 20))
    tokens = tokenize(x, 5)
    assert tokens.shape == (3, 4, 5)
    np.testing.assert_array_equal(tokens[1, 2], x[1, 10:15])
    np.testing.assert_array_equal(detokenize(tokens), x)


def test_tokenize_rejects_indivisible(rng):
    with pytest.raises(ValueError, match="divisible"):
        tokenize(rng.standard_normal((2, 21)), 5)


def test_tokenizer_config_validation():
    cfg = TokenizerConfig(segment_len=5, n_tokens=6)
    assert cfg.context_len == 30
    with pytest.raises(ValueError):
        TokenizerConfig(segment_len=0, n_tokens=6)
    with pytest.raises(ValueError):
        TokenizerConfig(segment_len=5, n_tokens=1)


# ---------------------------------------------------------------- attention


def test_attention_matches_manual_softmax(rng):
    q = rng.standard_normal((4, 6))
    k = rng.standard_normal((5, 6))
    v = rng.standard_normal((5, 3))
    scores = q @ k.T / np.sqrt(6)
    e = np.exp(scores - scores.max(axis=-1, keepdims=True))
    want = (e / e.sum(axis=-1, keepdims=True)) @ v
    np.testing.assert_allclose(attention(q, k, v), want, atol=1e-12)


def test_attention_causal_zeroes_future(rng):
    q = rng.standard_normal((3, 4))
    k = rng.standard_normal((3, 4))
    v = np.eye(3)
    out = attention(q, k, v, causal=True)
    # row 0 may only attend to key 0
    np.testing.assert_allclose(out[0], [1.0, 0.0, 0.0], atol=1e-12)
    assert out[1, 2] == pytest.approx(0.0, abs=1e-12)


def test_attention_validates_shapes(rng):
    with pytest.raises(ValueError):
        attention(rng.standard_normal((2, 3)), rng.standard_normal((2, 4)), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        attention(np.zeros((2, 3)), np.zeros((4, 3)), np.zeros((2, 2)))
    with pytest.raises(ValueError, match="causal"):
        attention(np.zeros((2, 3)), np.zeros((4, 3)), np.zeros((4, 2)), causal=True)


def test_multi_head_single_head_equals_attention(rng):
    d = 6
    x = rng.standard_normal((1, 4, d))
    eye = np.eye(d)
    out = multi_head(x, eye, eye, eye, eye, n_heads=1, causal=False)
    np.testing.assert_allclose(out[0], attention(x[0], x[0], x[0]), atol=1e-12)


def test_multi_head_validates(rng):
    x = rng.standard_normal((1, 4, 6))
    eye = np.eye(6)
    with pytest.raises(ValueError, match="divisible"):
        multi_head(x, eye, eye, eye, eye, n_heads=4)
    with pytest.raises(ValueError, match="wk"):
        multi_head(x, eye, np.eye(5), eye, eye, n_heads=2)


# ---------------------------------------------------------------- forward


def test_forward_is_causal(tiny_config, rng):
    model = _model(tiny_config)
    tokens = rng.standard_normal((2, 6, 5))
    base, _ = forward(model.params, tokens, tiny_config)
    bumped = tokens.copy()
    bumped[:, -1, :] += 1.0  # disturb only the last token
    pred2, _ = forward(model.params, bumped, tiny_config)
    # outputs before the last position never see the perturbed token
    np.testing.assert_array_equal(pred2[:, :-1, :], base[:, :-1, :])
    assert not np.allclose(pred2[:, -1, :], base[:, -1, :])


def test_forward_validates(tiny_config, rng):
    model = _model(tiny_config)
    with pytest.raises(ValueError, match="tokens"):
        forward(model.params, rng.standard_normal((2, 6, 4)), tiny_config)
    with pytest.raises(ValueError, match="max_tokens"):
        forward(model.params, rng.standard_normal((2, 9, 5)), tiny_config)
    with pytest.raises(ValueError, match="2 tokens"):
        forward(model.params, rng.standard_normal((2, 1, 5)), tiny_config)


def test_forward_rejects_nonfinite_params(tiny_config, rng):
    model = _model(tiny_config)
    model.params["w_embed"][0, 0] = np.inf
    with np.errstate(invalid="ignore"), pytest.raises(NumericalError):
        forward(model.params, rng.standard_normal((1, 4, 5)), tiny_config)


def test_init_params_covers_param_order(tiny_config):
    params = init_params(tiny_config, np.random.default_rng(0))
    assert sorted(params) == sorted(param_order(tiny_config))
    assert params["w_embed"].shape == (5, 16)
    assert params["w_decode"].shape == (16, 5)
    assert params["te"].shape == (8, 16)


# ---------------------------------------------------------------- losses


def test_loss_values_match_definitions(rng):
    pred = rng.standard_normal((3, 4, 5))
    actual = rng.standard_normal((3, 4, 5))
    norm = 3 * (4 + 1) * 5  # per-sequence U*J with U = n_tok + 1
    assert loss_mse(pred, actual) == pytest.approx(np.sum((pred - actual) ** 2) / norm)
    assert loss_mae(pred, actual) == pytest.approx(np.sum(np.abs(pred - actual)) / norm)


def test_loss_grad_matches_fd(rng):
    pred = rng.standard_normal((2, 3, 5))
    actual = rng.standard_normal((2, 3, 5))
    for kind in ("mse", "mae"):
        loss, grad = loss_grad(pred, actual, kind)
        eps = 1e-6
        bumped = pred.copy()
        bumped[1, 2, 3] += eps
        lp = loss_mse(bumped, actual) if kind == "mse" else loss_mae(bumped, actual)
        fd = (lp - loss) / eps
        assert grad[1, 2, 3] == pytest.approx(fd, rel=1e-3)
    with pytest.raises(ValueError):
        loss_grad(pred, actual, "huber")
    with pytest.raises(ValueError):
        loss_mse(pred, actual[:1])


# ---------------------------------------------------------------- gradients


def test_gradients_match_finite_differences(tiny_config, rng, gradcheck):
    model = _model(tiny_config)
    contexts = rng.standard_normal((2, 20))
    targets = rng.standard_normal((2, 10))
    worst = gradcheck(model, contexts, targets, loss_kind="mse")
    assert worst < 1e-4


def test_gradients_cover_every_tensor(tiny_config, rng):
    model = _model(tiny_config)
    _, grads = model.loss_and_grads(
        rng.standard_normal((2, 20)), rng.standard_normal((2, 10)), "mse"
    )
    for name in param_order(tiny_config):
        assert name in grads
        assert grads[name].shape == model.params[name].shape


# ---------------------------------------------------------------- generation


def test_generate_is_iterated_next_token(tiny_config, rng):
    model = _model(tiny_config)
    contexts = rng.standard_normal((3, 20))
    out = model.predict(contexts, horizon=5)
    # one generated token: must equal the last-position forward output
    preds, _ = forward(model.params, tokenize(contexts, 5), tiny_config)
    np.testing.assert_allclose(out, preds[:, -1, :], atol=1e-12)


def test_generate_truncates_partial_token(tiny_config, rng):
    model = _model(tiny_config)
    contexts = rng.standard_normal((2, 20))
    out7 = model.predict(contexts, horizon=7)
    out10 = model.predict(contexts, horizon=10)
    assert out7.shape == (2, 7)
    np.testing.assert_array_equal(out7, out10[:, :7])


def test_generate_deterministic(tiny_config, rng):
    model = _model(tiny_config)
    contexts = rng.standard_normal((2, 20))
    np.testing.assert_array_equal(
        generate(model.params, contexts, 10, tiny_config),
        generate(model.params, contexts, 10, tiny_config),
    )


# ---------------------------------------------------------------- wrapper


def test_forecaster_init_deterministic(tiny_config):
    a = _model(tiny_config, seed=9)
    b = _model(tiny_config, seed=9)
    for name in a.params:
        np.testing.assert_array_equal(a.params[name], b.params[name])
    c = _model(tiny_config, seed=10)
    assert any(not np.array_equal(a.params[n], c.params[n]) for n in a.params)


def test_forecaster_clone_is_independent(tiny_config):
    a = _model(tiny_config)
    b = a.clone()
    b.params["w_embed"][0, 0] += 1.0
    assert a.params["w_embed"][0, 0] != b.params["w_embed"][0, 0]


def test_forecaster_requires_init(tiny_config, rng):
    model = TransformerForecaster(tiny_config)
    with pytest.raises(ValueError, match="initialized"):
        model.predict(rng.standard_normal((1, 20)), 5)
    with pytest.raises(ValueError, match="initialized"):
        model.loss_and_grads(rng.standard_normal((1, 20)), rng.standard_normal((1, 10)))


def test_forecaster_rejects_misaligned_window(tiny_config, rng):
    model = _model(tiny_config)
    with pytest.raises(ValueError, match="token boundaries"):
        model.loss_and_grads(rng.standard_normal((1, 18)), rng.standard_normal((1, 10)))


def test_config_validation():
    with pytest.raises(ValueError, match="divisible"):
        TransformerConfig(d_model=10, n_heads=4)
    with pytest.raises(ValueError):
        TransformerConfig(n_layers=0)
    cfg = TransformerConfig(d_model=32, n_heads=4)
    assert cfg.d_head == 8
    assert TransformerConfig(**cfg.as_dict()) == cfg
