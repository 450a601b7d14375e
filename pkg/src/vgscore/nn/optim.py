"""Adam with inverse-time learning-rate decay.

The effective rate for the step taken at count t (0-based) is
lr_t = lr0 / (1 + decay * t), so the very first step uses exactly lr0.
Moment estimates are bias-corrected.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError


@dataclass
class AdamState:
    lr0: float = 1e-4
    decay: float = 1e-6
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(state: AdamState, params: list, grads: dict):
    """Applies one update in place.

    params: [(name, Tensor)]; grads: name -> array (missing names are
    treated as zero gradient and skipped).
    """
    lr_t = state.lr0 / (1.0 + state.decay * state.t)
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for name, p in params:
        g = grads.get(name)
        if g is None:
            continue
        if g.shape != p.data.shape:
            raise ShapeError(p.data.shape, g.shape)
        g = g.astype(np.float64, copy=False)
        m = state.m.get(name)
        if m is None:
            m = np.zeros(p.data.shape, dtype=np.float64)
            state.m[name] = m
            state.v[name] = np.zeros(p.data.shape, dtype=np.float64)
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        update = lr_t * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
        p.data = (p.data.astype(np.float64) - update).astype(p.data.dtype)
