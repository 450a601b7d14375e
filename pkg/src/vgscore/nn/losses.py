"""Cross-entropy over class logits with max-subtraction stabilization."""

import numpy as np

from ..errors import ClassOutOfRange
from .tensor import Tensor, _accumulate, _make, _tracked


def softmax_probs(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(logits: np.ndarray, class_index: int):
    """Single-sample loss and logit gradient, both as plain arrays."""
    logits = np.asarray(logits)
    if not np.all(np.isfinite(logits)):
        raise ValueError("logits must be finite")
    n = logits.shape[-1]
    if not 0 <= class_index < n:
        raise ClassOutOfRange(f"class {class_index} outside [0, {n})")
    shifted = logits - logits.max()
    log_z = np.log(np.exp(shifted).sum())
    loss = log_z - shifted[class_index]
    grad = np.exp(shifted - log_z)
    grad[class_index] -= 1.0
    return float(loss), grad


def cross_entropy_mean(logits: Tensor, classes: np.ndarray) -> Tensor:
    """Autodiff mean cross-entropy for a (B, K) logit batch."""
    classes = np.asarray(classes)
    batch, n = logits.data.shape
    if classes.shape != (batch,):
        raise ClassOutOfRange(f"expected {batch} class labels, got shape {classes.shape}")
    if classes.min() < 0 or classes.max() >= n:
        raise ClassOutOfRange(f"classes {classes.min()}..{classes.max()} outside [0, {n})")
    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_z
    rows = np.arange(batch)
    loss = -log_probs[rows, classes].mean()
    out_data = np.asarray(loss, dtype=logits.data.dtype)

    def backward(g):
        if not _tracked(logits):
            return
        grad = np.exp(log_probs)
        grad[rows, classes] -= 1.0
        _accumulate(logits, grad * (g / logits.data.dtype.type(batch)))

    return _make(out_data, (logits,), backward)
