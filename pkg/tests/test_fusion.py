import math

import numpy as np
import pytest

from morphofv.fusion import (
    FusionConfig,
    LabeledDataset,
    TrainConfig,
    VisualInput,
    backward,
    batch_loss,
    forward,
    forward_trace,
    init_params,
    loss,
    textual_attend,
    train,
    visual_attend,
)

TOY = FusionConfig(visual_dim=3, txt_in=10, n_classes=3, vis_out=6, txt_out=5)


def toy_batch(seed, size=4, spatial_every=2):
    rng = np.random.default_rng(seed)
    batch = []
    for i in range(size):
        if spatial_every and i % spatial_every == 0:
            vis = VisualInput(spatial=rng.normal(size=(3, 2, 2)))
        else:
            vis = VisualInput(pooled=rng.normal(size=3))
        batch.append((vis, rng.normal(size=10), int(rng.integers(0, 3))))
    return batch


def finite_difference_check(params, batch, config, step=1e-5, rtol=1e-4, atol=1e-7):
    _, grads, _ = backward(batch, params, config)
    failures = []
    for name, tensor in params.tensors().items():
        grad = np.atleast_1d(getattr(grads, name))
        flat = np.atleast_1d(tensor)
        for idx in np.ndindex(flat.shape):
            orig = flat[idx]
            flat[idx] = orig + step
            up = batch_loss(batch, params, config)
            flat[idx] = orig - step
            down = batch_loss(batch, params, config)
            flat[idx] = orig
            fd = (up - down) / (2 * step)
            diff = abs(fd - grad[idx])
            if diff > atol and diff / max(abs(fd), abs(grad[idx])) > rtol:
                failures.append((name, idx, fd, float(grad[idx])))
    return failures


class TestVisualAttend:
    def test_zero_attention_weights_scale_map_by_1_5(self):
        params = init_params(TOY, seed=0)
        params.att_w[:] = 0.0
        params.att_b[...] = 0.0
        x = np.random.default_rng(1).normal(size=(3, 2, 2))
        out = visual_attend(VisualInput(spatial=x), params)
        expected = params.vis_w @ (1.5 * x.mean(axis=(1, 2))) + params.vis_b
        np.testing.assert_allclose(out, expected, rtol=1e-14)

    def test_one_pixel_map_hand_formula(self):
        params = init_params(TOY, seed=2)
        cfg1 = FusionConfig(visual_dim=1, txt_in=4, n_classes=2, vis_out=1, txt_out=3)
        p = init_params(cfg1, seed=3)
        p.vis_w[:] = 1.0
        p.vis_b[:] = 0.0
        value = 0.7
        out = visual_attend(VisualInput(spatial=np.array([[[value]]])), p)
        att = 1.0 / (1.0 + math.exp(-(p.att_w[0] * value + float(p.att_b))))
        assert out[0] == pytest.approx(value * (1.0 + att), rel=1e-12)
        del params

    def test_pooled_input_skips_attention(self):
        params = init_params(TOY, seed=4)
        g = np.array([0.5, -1.0, 2.0])
        out = visual_attend(VisualInput(pooled=g), params)
        np.testing.assert_allclose(out, params.vis_w @ g + params.vis_b, rtol=1e-14)

    def test_channel_mismatch_rejected(self):
        params = init_params(TOY, seed=0)
        with pytest.raises(ValueError):
            visual_attend(VisualInput(spatial=np.zeros((4, 2, 2))), params)


class TestTextualAttend:
    def test_zero_weights_give_uniform_attention(self):
        params = init_params(TOY, seed=5)
        for name in ("attv_w", "attv_b", "attt_w", "attt_b"):
            getattr(params, name)[:] = 0.0
        t = np.random.default_rng(0).normal(size=5)
        v = np.random.default_rng(1).normal(size=6)
        np.testing.assert_allclose(textual_attend(v, t, params), t / 5.0, rtol=1e-14)

    def test_attention_is_a_distribution(self):
        params = init_params(TOY, seed=6)
        rng = np.random.default_rng(2)
        for _ in range(5):
            trace = forward_trace(VisualInput(pooled=rng.normal(size=3)),
                                  rng.normal(size=10), params, TOY)
            wa = trace["wa"]
            assert wa.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all((wa > 0) & (wa < 1))


class TestForward:
    def test_zero_classifier_gives_uniform_probabilities(self):
        params = init_params(TOY, seed=7)
        params.cls_w[:] = 0.0
        params.cls_b[:] = 0.0
        probs = forward(VisualInput(pooled=np.ones(3)), np.ones(10), params, TOY)
        np.testing.assert_allclose(probs, np.full(3, 1 / 3), rtol=1e-14)

    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(3)
        for seed in range(5):
            params = init_params(TOY, seed=seed)
            probs = forward(VisualInput(pooled=rng.normal(size=3)),
                            rng.normal(size=10), params, TOY)
            assert probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_fused_feature_length(self):
        cfg = FusionConfig(visual_dim=16, txt_in=40, n_classes=4)
        params = init_params(cfg, seed=0)
        trace = forward_trace(VisualInput(pooled=np.ones(16)), np.ones(40), params, cfg)
        assert trace["fused"].shape == (1024 + 512,)

    def test_matches_straight_line_recomputation(self):
        params = init_params(TOY, seed=8)
        rng = np.random.default_rng(4)
        x = rng.normal(size=(3, 2, 2))
        f = rng.normal(size=10)
        trace = forward_trace(VisualInput(spatial=x), f, params, TOY)

        att = 1.0 / (1.0 + np.exp(-(np.einsum("c,chw->hw", params.att_w, x) + float(params.att_b))))
        g = (x + x * att[None]).mean(axis=(1, 2))
        v = params.vis_w @ g + params.vis_b
        t = params.txt_w @ f + params.txt_b
        s = np.tanh(params.attv_w @ v + params.attv_b + params.attt_w @ t + params.attt_b)
        e = np.exp(s - s.max())
        wa = e / e.sum()
        fused = np.concatenate([v, wa * t])
        logits = params.cls_w @ fused + params.cls_b
        ez = np.exp(logits - logits.max())
        probs = ez / ez.sum()
        np.testing.assert_allclose(trace["probs"], probs, atol=1e-12)


class TestLoss:
    def test_one_hot_correct_is_zero(self):
        assert loss(np.array([0.0, 1.0, 0.0]), 1) == 0.0

    def test_uniform_is_log_n(self):
        assert loss(np.full(4, 0.25), 2) == pytest.approx(math.log(4), rel=1e-12)

    def test_hand_value(self):
        assert loss(np.array([0.7, 0.3]), 0) == pytest.approx(0.35667494393873245, abs=1e-12)

    def test_zero_probability_is_clamped(self):
        assert loss(np.array([0.0, 1.0]), 0) == pytest.approx(-math.log(1e-12), rel=1e-12)


class TestBackward:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_gradients_match_finite_differences(self, seed):
        params = init_params(TOY, seed=seed)
        batch = toy_batch(seed + 10)
        assert finite_difference_check(params, batch, TOY) == []

    def test_visual_only_config_gradients(self):
        cfg = FusionConfig(visual_dim=3, txt_in=10, n_classes=3, vis_out=6, txt_out=5,
                           use_text=False)
        params = init_params(cfg, seed=1)
        batch = toy_batch(3)
        failures = [f for f in finite_difference_check(params, batch, cfg)
                    if not f[0].startswith(("txt", "att"))]
        assert failures == []

    def test_unused_attention_path_has_exactly_zero_gradient(self):
        params = init_params(TOY, seed=9)
        batch = toy_batch(11, spatial_every=0)  # pooled inputs only
        assert all(b[0].pooled is not None for b in batch)
        _, grads, _ = backward(batch, params, TOY)
        assert np.all(grads.att_w == 0.0)
        assert float(grads.att_b) == 0.0

    def test_perfectly_confident_correct_batch_has_tiny_gradients(self):
        params = init_params(TOY, seed=10)
        params.cls_b[:] = 0.0
        params.cls_b[1] = 60.0  # saturates softmax onto class 1
        batch = [(vis, f, 1) for vis, f, _ in toy_batch(12)]
        _, grads, _ = backward(batch, params, TOY)
        for name, g in grads.tensors().items():
            assert np.max(np.abs(g)) <= 1e-10, name

    def test_empty_batch_rejected(self):
        with pytest.raises(ValueError):
            backward([], init_params(TOY, seed=0), TOY)


def separable_dataset(n=40, seed=0):
    rng = np.random.default_rng(seed)
    samples = []
    for i in range(n):
        label = i % 2
        vis = VisualInput(pooled=rng.normal(3.0 * (1 if label else -1), 0.5, size=3))
        fv = rng.normal(1.0 * (1 if label else -1), 0.5, size=10)
        samples.append((f"s{i}", vis, fv, ["neg", "pos"][label]))
    return LabeledDataset(samples=samples, classes=["neg", "pos"])


class TestTrain:
    def test_separable_dataset_reaches_full_accuracy(self):
        dataset = separable_dataset()
        cfg = FusionConfig(visual_dim=3, txt_in=10, n_classes=2, vis_out=6, txt_out=5)
        params, history = train(dataset, cfg, TrainConfig(epochs=30, batch_size=8,
                                                          learning_rate=0.05, seed=0))
        assert history[-1]["accuracy"] == 1.0
        assert history[-1]["loss"] < 0.01
        del params

    def test_fixed_seed_training_is_bit_reproducible(self):
        dataset = separable_dataset(seed=3)
        cfg = FusionConfig(visual_dim=3, txt_in=10, n_classes=2, vis_out=6, txt_out=5)
        tc = TrainConfig(epochs=5, batch_size=8, learning_rate=0.01, seed=42)
        a, _ = train(dataset, cfg, tc)
        b, _ = train(dataset, cfg, tc)
        for name, tensor in a.tensors().items():
            np.testing.assert_array_equal(tensor, getattr(b, name), err_msg=name)

    def test_zero_learning_rate_leaves_params_unchanged(self):
        dataset = separable_dataset(seed=4)
        cfg = FusionConfig(visual_dim=3, txt_in=10, n_classes=2, vis_out=6, txt_out=5)
        params, _ = train(dataset, cfg, TrainConfig(epochs=3, batch_size=8,
                                                    learning_rate=0.0, seed=1))
        fresh = init_params(cfg, seed=1)
        for name, tensor in params.tensors().items():
            np.testing.assert_array_equal(tensor, getattr(fresh, name), err_msg=name)

    def test_empty_dataset_rejected(self):
        with pytest.raises(ValueError):
            train(LabeledDataset(samples=[], classes=["a"]), TOY, TrainConfig(epochs=1))

    def test_dataset_validation(self):
        vis = VisualInput(pooled=np.zeros(3))
        with pytest.raises(ValueError):
            LabeledDataset(samples=[("a", vis, np.zeros(10), "x"),
                                    ("a", vis, np.zeros(10), "x")], classes=["x"])
        with pytest.raises(ValueError):
            LabeledDataset(samples=[("a", vis, np.zeros(10), "zzz")], classes=["x"])


class TestVisualInput:
    def test_exactly_one_variant(self):
        with pytest.raises(ValueError):
            VisualInput()
        with pytest.raises(ValueError):
            VisualInput(pooled=np.zeros(3), spatial=np.zeros((3, 2, 2)))

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            VisualInput(pooled=np.zeros((3, 2)))
        with pytest.raises(ValueError):
            VisualInput(spatial=np.zeros((3, 2)))
