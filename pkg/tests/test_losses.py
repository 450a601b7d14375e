"""Cross-entropy: closed-form anchors and finite-difference gradients."""

import math

import numpy as np
import pytest

from vgscore.errors import ClassOutOfRange
from vgscore.nn import tensor as T
from vgscore.nn.losses import cross_entropy_mean, softmax_cross_entropy, softmax_probs
from vgscore.nn.tensor import Tensor


class TestSingleSample:
    def test_uniform_logits_give_ln_k(self):
        for k in (2, 5, 10):
            loss, _ = softmax_cross_entropy(np.zeros(k), 0)
            assert loss == pytest.approx(math.log(k), abs=1e-12)

    def test_ln_10_value(self):
        loss, _ = softmax_cross_entropy(np.zeros(10), 3)
        assert loss == pytest.approx(2.302585, abs=1e-6)

    def test_saturated_correct_logit(self):
        logits = np.zeros(10)
        logits[4] = 1000.0
        loss, _ = softmax_cross_entropy(logits, 4)
        assert loss == pytest.approx(0.0, abs=1e-9)

    def test_gradient_is_probs_minus_onehot(self):
        rng = np.random.default_rng(3)
        logits = rng.normal(size=7)
        _, grad = softmax_cross_entropy(logits, 2)
        expected = softmax_probs(logits).copy()
        expected[2] -= 1.0
        np.testing.assert_allclose(grad, expected, atol=1e-12)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(4)
        logits = rng.normal(size=5)
        _, grad = softmax_cross_entropy(logits, 1)
        step = 1e-6
        for i in range(5):
            hi = logits.copy()
            hi[i] += step
            lo = logits.copy()
            lo[i] -= step
            fd = (softmax_cross_entropy(hi, 1)[0] - softmax_cross_entropy(lo, 1)[0]) / (2 * step)
            assert abs(fd - grad[i]) / max(abs(fd), abs(grad[i]), 1.0) < 1e-6

    def test_large_logits_stable(self):
        loss, grad = softmax_cross_entropy(np.array([1e4, 1e4 - 5.0]), 0)
        assert np.isfinite(loss) and np.all(np.isfinite(grad))

    def test_class_guard(self):
        with pytest.raises(ClassOutOfRange):
            softmax_cross_entropy(np.zeros(10), 10)
        with pytest.raises(ClassOutOfRange):
            softmax_cross_entropy(np.zeros(10), -1)

    def test_nonfinite_guard(self):
        with pytest.raises(ValueError):
            softmax_cross_entropy(np.array([np.nan, 0.0]), 0)


class TestBatchMean:
    def test_matches_per_sample_mean(self):
        rng = np.random.default_rng(5)
        logits = rng.normal(size=(4, 10))
        classes = np.array([0, 3, 9, 1])
        loss = cross_entropy_mean(Tensor(logits), classes)
        expected = np.mean([softmax_cross_entropy(logits[i], classes[i])[0]
                            for i in range(4)])
        assert float(loss.data) == pytest.approx(expected, abs=1e-12)

    def test_gradient_matches_scaled_per_sample(self):
        rng = np.random.default_rng(6)
        logits = rng.normal(size=(3, 5))
        classes = np.array([4, 0, 2])
        t = Tensor(logits.copy(), requires_grad=True)
        cross_entropy_mean(t, classes).backward()
        for i in range(3):
            _, g = softmax_cross_entropy(logits[i], classes[i])
            np.testing.assert_allclose(t.grad[i], g / 3.0, atol=1e-12)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        logits = rng.normal(size=(2, 4))
        classes = np.array([1, 3])
        t = Tensor(logits.copy(), requires_grad=True)
        cross_entropy_mean(t, classes).backward()
        step = 1e-6
        for i in range(2):
            for j in range(4):
                hi = logits.copy()
                hi[i, j] += step
                lo = logits.copy()
                lo[i, j] -= step
                fd = (float(cross_entropy_mean(Tensor(hi), classes).data)
                      - float(cross_entropy_mean(Tensor(lo), classes).data)) / (2 * step)
                assert abs(fd - t.grad[i, j]) < 1e-8

    def test_flows_through_upstream_graph(self):
        rng = np.random.default_rng(8)
        w = Tensor(rng.normal(size=(3, 4)), requires_grad=True)
        x = Tensor(rng.normal(size=(2, 3)))
        loss = cross_entropy_mean(T.matmul(x, w), np.array([0, 2]))
        loss.backward()
        assert w.grad is not None and w.grad.shape == (3, 4)

    def test_batch_class_guards(self):
        with pytest.raises(ClassOutOfRange):
            cross_entropy_mean(Tensor(np.zeros((2, 4))), np.array([0, 4]))
        with pytest.raises(ClassOutOfRange):
            cross_entropy_mean(Tensor(np.zeros((2, 4))), np.array([0]))
