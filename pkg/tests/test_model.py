"""Model module: init, forward/backward, Adam updates, checkpoint I/O."""

import numpy as np
import pytest
from oracles import PARAM_FIELDS, fd_param_gradients, max_param_relative_error

from spml.errors import DimensionError, InputError, ParseError, TrainingError
from spml.losses import bce_full
from spml.model import (
    ADAM_EPS,
    PROB_EPS,
    Gradients,
    MlpModel,
    adam_step,
    backward,
    forward,
    forward_with_cache,
    init_adam,
    init_model,
    load_model,
    save_model,
)


def _zero_model(d=3, h=4, l=2):
    return MlpModel(
        w1=np.zeros((d, h)), b1=np.zeros(h), w2=np.zeros((h, l)), b2=np.zeros(l)
    )


class TestInit:
    def test_deterministic_in_seed(self):
        a = init_model(3, 4, 2, seed=7)
        b = init_model(3, 4, 2, seed=7)
        for field in PARAM_FIELDS:
            np.testing.assert_array_equal(getattr(a, field), getattr(b, field))

    def test_different_seeds_differ(self):
        a = init_model(3, 4, 2, seed=7)
        b = init_model(3, 4, 2, seed=8)
        assert not np.array_equal(a.w1, b.w1)

    def test_zero_biases(self):
        m = init_model(3, 4, 2, seed=0)
        np.testing.assert_array_equal(m.b1, np.zeros(4))
        np.testing.assert_array_equal(m.b2, np.zeros(2))

    def test_glorot_bounds(self):
        m = init_model(8, 16, 5, seed=1)
        assert np.all(np.abs(m.w1) <= np.sqrt(6.0 / (8 + 16)))
        assert np.all(np.abs(m.w2) <= np.sqrt(6.0 / (16 + 5)))

    @pytest.mark.parametrize("dims", [(0, 4, 2), (3, 0, 2), (3, 4, 0), (-1, 4, 2)])
    def test_bad_dimensions(self, dims):
        with pytest.raises(DimensionError):
            init_model(*dims, seed=0)


class TestForward:
    def test_zero_model_outputs_half(self):
        probs = forward(_zero_model(), np.random.default_rng(0).normal(size=(5, 3)))
        np.testing.assert_array_equal(probs, np.full((5, 2), 0.5))

    def test_hand_evaluated_composition(self):
        m = MlpModel(
            w1=np.array([[1.0]]), b1=np.zeros(1), w2=np.array([[1.0]]), b2=np.zeros(1)
        )
        probs = forward(m, np.array([[2.0]]))
        np.testing.assert_allclose(probs[0, 0], 1.0 / (1.0 + np.exp(-2.0)), rtol=1e-12)
        assert abs(probs[0, 0] - 0.880797) < 1e-6

    def test_outputs_clamped(self):
        # Huge weights saturate the sigmoid; clamping must still hold exactly.
        rng = np.random.default_rng(3)
        m = init_model(4, 8, 3, seed=3)
        m.w2 *= 1e4
        probs = forward(m, rng.normal(size=(16, 4)))
        assert np.all(probs >= PROB_EPS)
        assert np.all(probs <= 1.0 - PROB_EPS)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            forward(init_model(3, 4, 2, seed=0), np.zeros((5, 7)))

    def test_non_finite_input(self):
        x = np.zeros((2, 3))
        x[0, 0] = np.nan
        with pytest.raises(InputError):
            forward(init_model(3, 4, 2, seed=0), x)


class TestBackward:
    def test_zero_upstream_gives_zero_gradients(self):
        m = init_model(3, 4, 2, seed=0)
        probs, cache = forward_with_cache(m, np.random.default_rng(1).normal(size=(5, 3)))
        grads = backward(m, cache, np.zeros_like(probs))
        for field in PARAM_FIELDS:
            np.testing.assert_array_equal(getattr(grads, field), 0.0)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(42)
        m = init_model(8, 16, 5, seed=42)
        x = rng.normal(size=(4, 8))
        y = rng.integers(0, 2, size=(4, 5))
        probs, cache = forward_with_cache(m, x)
        analytic = backward(m, cache, bce_full(probs, y).dloss_dlogits)
        numeric = fd_param_gradients(m, lambda mm: bce_full(forward(mm, x), y).value)
        assert max_param_relative_error(analytic, numeric) < 1e-4

    def test_duplicated_batch_same_gradients(self):
        rng = np.random.default_rng(5)
        m = init_model(4, 6, 3, seed=5)
        x = rng.normal(size=(2, 4))
        y = rng.integers(0, 2, size=(2, 3))
        x2 = np.repeat(x, 2, axis=0)
        y2 = np.repeat(y, 2, axis=0)
        p1, c1 = forward_with_cache(m, x)
        p2, c2 = forward_with_cache(m, x2)
        g1 = backward(m, c1, bce_full(p1, y).dloss_dlogits)
        g2 = backward(m, c2, bce_full(p2, y2).dloss_dlogits)
        for field in PARAM_FIELDS:
            np.testing.assert_allclose(
                getattr(g1, field), getattr(g2, field), rtol=1e-12, atol=1e-15
            )

    def test_shape_mismatch(self):
        m = init_model(3, 4, 2, seed=0)
        _, cache = forward_with_cache(m, np.zeros((5, 3)))
        with pytest.raises(DimensionError):
            backward(m, cache, np.zeros((5, 3)))


class TestAdam:
    def test_zero_gradient_leaves_parameters(self):
        m = init_model(3, 4, 2, seed=0)
        state = init_adam(m, learning_rate=0.01)
        zero = Gradients(*(np.zeros_like(getattr(m, f)) for f in PARAM_FIELDS))
        m2, state2 = adam_step(m, zero, state)
        assert state2.step == 1
        for field in PARAM_FIELDS:
            np.testing.assert_array_equal(getattr(m2, field), getattr(m, field))

    def test_first_step_magnitude(self):
        # With bias correction, step 1 moves each entry by -lr * g / (|g| + eps).
        m = _zero_model(2, 2, 2)
        lr = 0.01
        state = init_adam(m, learning_rate=lr)
        rng = np.random.default_rng(9)
        grads = Gradients(*(rng.normal(size=getattr(m, f).shape) for f in PARAM_FIELDS))
        m2, _ = adam_step(m, grads, state)
        for field in PARAM_FIELDS:
            g = getattr(grads, field)
            expected = -lr * g / (np.abs(g) + ADAM_EPS)
            np.testing.assert_allclose(getattr(m2, field), expected, rtol=1e-12)

    def test_deterministic(self):
        m = init_model(3, 4, 2, seed=1)
        grads = Gradients(*(np.full_like(getattr(m, f), 0.3) for f in PARAM_FIELDS))
        a, sa = adam_step(m, grads, init_adam(m, 0.01))
        b, sb = adam_step(m, grads, init_adam(m, 0.01))
        for field in PARAM_FIELDS:
            np.testing.assert_array_equal(getattr(a, field), getattr(b, field))
            np.testing.assert_array_equal(getattr(sa.m, field), getattr(sb.m, field))

    def test_non_finite_gradient_aborts(self):
        m = init_model(3, 4, 2, seed=0)
        grads = Gradients(*(np.zeros_like(getattr(m, f)) for f in PARAM_FIELDS))
        grads.w1[0, 0] = np.inf
        with pytest.raises(TrainingError):
            adam_step(m, grads, init_adam(m, 0.01))


class TestCheckpoint:
    def test_round_trip_bit_exact(self, tmp_path):
        m = init_model(6, 5, 4, seed=11)
        path = tmp_path / "model.mlp"
        save_model(path, m)
        loaded = load_model(path)
        for field in PARAM_FIELDS:
            np.testing.assert_array_equal(getattr(loaded, field), getattr(m, field))
        second = tmp_path / "model2.mlp"
        save_model(second, loaded)
        assert path.read_bytes() == second.read_bytes()

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.mlp"
        path.write_bytes(b"not a checkpoint\n" + b"\x00" * 16)
        with pytest.raises(ParseError):
            load_model(path)

    def test_truncated_payload(self, tmp_path):
        m = init_model(3, 4, 2, seed=0)
        path = tmp_path / "model.mlp"
        save_model(path, m)
        data = path.read_bytes()
        path.write_bytes(data[:-8])
        with pytest.raises(ParseError):
            load_model(path)
