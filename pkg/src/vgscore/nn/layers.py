"""Layer kinds composing the video and text branches.

Every layer exposes params() -> [(name, Tensor)], spec() -> dict for
checkpointing, and forward(x, train=False).  Weights are created by the
constructor from an explicit Generator so initialization is replayable
per branch.
"""

import numpy as np

from ..errors import ConfigError, ShapeError
from . import tensor as T
from .tensor import Tensor

DTYPE = np.float32


def glorot_uniform(rng: np.random.Generator, shape, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(DTYPE)


def _positive(name: str, value: int):
    if value <= 0:
        raise ConfigError(f"{name} must be positive, got {value}")


class Layer:
    """Base: parameter-free identity-ish layer."""

    def params(self) -> list:
        return []

    def spec(self) -> dict:
        return {"kind": type(self).__name__}

    def forward(self, x: Tensor, train: bool = False) -> Tensor:
        raise NotImplementedError


class Embedding(Layer):
    """Token indices (B, L) -> (B, embed_dim, L), channels-first for Conv1D."""

    def __init__(self, vocab_size: int, embed_dim: int, rng: np.random.Generator):
        _positive("vocab_size", vocab_size)
        _positive("embed_dim", embed_dim)
        self.vocab_size = vocab_size
        self.embed_dim = embed_dim
        self.table = Tensor(glorot_uniform(rng, (vocab_size, embed_dim), vocab_size, embed_dim),
                            requires_grad=True)

    def params(self):
        return [("table", self.table)]

    def spec(self):
        return {"kind": "Embedding", "vocab_size": self.vocab_size, "embed_dim": self.embed_dim}

    def forward(self, x, train=False):
        idx = np.asarray(x.data if isinstance(x, Tensor) else x)
        if idx.ndim != 2:
            raise ShapeError("(B, L) token indices", idx.shape)
        if idx.min(initial=0) < 0 or idx.max(initial=0) >= self.vocab_size:
            raise ShapeError(f"indices in [0, {self.vocab_size})", (int(idx.min()), int(idx.max())))
        return T.swap_time_channel(T.gather_rows(self.table, idx))


class Dense(Layer):
    """Affine map on the last feature block.

    Inputs with more than two axes are flattened to (B, -1) first, so a
    conv stack can feed a head without a separate reshape layer.
    """

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator,
                 zero_init: bool = False):
        _positive("in_dim", in_dim)
        _positive("out_dim", out_dim)
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.zero_init = zero_init
        if zero_init:
            w = np.zeros((in_dim, out_dim), dtype=DTYPE)
        else:
            w = glorot_uniform(rng, (in_dim, out_dim), in_dim, out_dim)
        self.W = Tensor(w, requires_grad=True)
        self.b = Tensor(np.zeros(out_dim, dtype=DTYPE), requires_grad=True)

    def params(self):
        return [("W", self.W), ("b", self.b)]

    def spec(self):
        return {"kind": "Dense", "in_dim": self.in_dim, "out_dim": self.out_dim,
                "zero_init": self.zero_init}

    def forward(self, x, train=False):
        if x.data.ndim > 2:
            x = T.reshape(x, (x.data.shape[0], -1))
        if x.data.shape[1] != self.in_dim:
            raise ShapeError(f"(B, {self.in_dim})", x.data.shape)
        return T.add(T.matmul(x, self.W), self.b)


class Conv1D(Layer):
    """Valid 1-d convolution, (B, C, L) -> (B, O, L-K+1)."""

    def __init__(self, in_channels: int, out_channels: int, kernel: int,
                 rng: np.random.Generator):
        _positive("in_channels", in_channels)
        _positive("out_channels", out_channels)
        _positive("kernel", kernel)
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel = kernel
        fan_in = in_channels * kernel
        fan_out = out_channels * kernel
        self.w = Tensor(glorot_uniform(rng, (out_channels, in_channels, kernel), fan_in, fan_out),
                        requires_grad=True)
        self.b = Tensor(np.zeros(out_channels, dtype=DTYPE), requires_grad=True)

    def params(self):
        return [("w", self.w), ("b", self.b)]

    def spec(self):
        return {"kind": "Conv1D", "in_channels": self.in_channels,
                "out_channels": self.out_channels, "kernel": self.kernel}

    def forward(self, x, train=False):
        y = T.conv1d(x, self.w)
        return T.add(y, T.reshape(self.b, (1, self.out_channels, 1)))


class Conv3D(Layer):
    """Valid strided 3-d convolution, (B, C, T, H, W) -> (B, O, T', H', W')."""

    def __init__(self, in_channels: int, out_channels: int, kernel: tuple, stride: tuple,
                 rng: np.random.Generator):
        _positive("in_channels", in_channels)
        _positive("out_channels", out_channels)
        if len(kernel) != 3 or len(stride) != 3:
            raise ConfigError(f"kernel and stride must be 3-tuples, got {kernel}, {stride}")
        for v in (*kernel, *stride):
            _positive("kernel/stride entry", v)
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel = tuple(kernel)
        self.stride = tuple(stride)
        k = int(np.prod(kernel))
        self.w = Tensor(glorot_uniform(rng, (out_channels, in_channels, *kernel),
                                       in_channels * k, out_channels * k),
                        requires_grad=True)
        self.b = Tensor(np.zeros(out_channels, dtype=DTYPE), requires_grad=True)

    def params(self):
        return [("w", self.w), ("b", self.b)]

    def spec(self):
        return {"kind": "Conv3D", "in_channels": self.in_channels,
                "out_channels": self.out_channels, "kernel": list(self.kernel),
                "stride": list(self.stride)}

    def forward(self, x, train=False):
        y = T.conv3d(x, self.w, self.stride)
        return T.add(y, T.reshape(self.b, (1, self.out_channels, 1, 1, 1)))


class MaxPool1D(Layer):
    """Non-overlapping by default: width 2, stride 2."""

    def __init__(self, width: int = 2, stride: int = 2):
        _positive("width", width)
        _positive("stride", stride)
        self.width = width
        self.stride = stride

    def spec(self):
        return {"kind": "MaxPool1D", "width": self.width, "stride": self.stride}

    def forward(self, x, train=False):
        return T.maxpool1d(x, self.width, self.stride)


class Dropout(Layer):
    """Inverted dropout: identity in eval mode, mask/(1-rate) in train mode."""

    def __init__(self, rate: float, rng: np.random.Generator):
        if not 0.0 <= rate < 1.0:
            raise ConfigError(f"dropout rate must be in [0, 1), got {rate}")
        self.rate = rate
        self.rng = rng

    def spec(self):
        return {"kind": "Dropout", "rate": self.rate}

    def forward(self, x, train=False):
        if not train or self.rate == 0.0:
            return x
        keep = (self.rng.random(x.data.shape) >= self.rate).astype(x.data.dtype)
        mask = keep / x.data.dtype.type(1.0 - self.rate)
        return T.mul(x, Tensor(mask))


class Tanh(Layer):
    def forward(self, x, train=False):
        return T.tanh(x)


class Softmax(Layer):
    def forward(self, x, train=False):
        return T.softmax(x)


class Concat(Layer):
    """Joins a list of (B, D_i) tensors along the feature axis."""

    def forward(self, xs, train=False):
        if isinstance(xs, Tensor):
            return xs
        if len(xs) == 1:
            return xs[0]
        return T.concat(list(xs), axis=-1)


class MeanOverTime(Layer):
    """(B, M, D) -> (B, D); lets one fixed head serve any trailer length."""

    def forward(self, x, train=False):
        if x.data.ndim != 3:
            raise ShapeError("(B, M, D)", x.data.shape)
        return T.mean_over_time(x)


def lstm_step(x_t: Tensor, h_prev: Tensor, c_prev: Tensor,
              W: Tensor, U: Tensor, b: Tensor, hidden: int):
    """One gated-recurrence step; gate blocks ordered i, f, g, o."""
    z = T.add(T.add(T.matmul(x_t, W), T.matmul(h_prev, U)), b)
    i = T.sigmoid(T.narrow(z, 1, 0, hidden))
    f = T.sigmoid(T.narrow(z, 1, hidden, hidden))
    g = T.tanh(T.narrow(z, 1, 2 * hidden, hidden))
    o = T.sigmoid(T.narrow(z, 1, 3 * hidden, hidden))
    c = T.add(T.mul(f, c_prev), T.mul(i, g))
    h = T.mul(o, T.tanh(c))
    return h, c


class LSTM(Layer):
    """Single recurrence level over (B, M, D_in).

    return_sequences=True emits (B, M, H) for stacking; otherwise the
    last step's hidden state (B, H).
    """

    def __init__(self, input_dim: int, hidden_dim: int, rng: np.random.Generator,
                 return_sequences: bool = False):
        _positive("input_dim", input_dim)
        _positive("hidden_dim", hidden_dim)
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.return_sequences = return_sequences
        h = hidden_dim
        self.W = Tensor(glorot_uniform(rng, (input_dim, 4 * h), input_dim, 4 * h),
                        requires_grad=True)
        self.U = Tensor(glorot_uniform(rng, (h, 4 * h), h, 4 * h), requires_grad=True)
        self.b = Tensor(np.zeros(4 * h, dtype=DTYPE), requires_grad=True)

    def params(self):
        return [("W", self.W), ("U", self.U), ("b", self.b)]

    def spec(self):
        return {"kind": "LSTM", "input_dim": self.input_dim, "hidden_dim": self.hidden_dim,
                "return_sequences": self.return_sequences}

    def forward(self, x, train=False):
        if x.data.ndim != 3 or x.data.shape[2] != self.input_dim:
            raise ShapeError(f"(B, M, {self.input_dim})", x.data.shape)
        batch, steps, _ = x.data.shape
        h = Tensor(np.zeros((batch, self.hidden_dim), dtype=self.W.data.dtype))
        c = Tensor(np.zeros((batch, self.hidden_dim), dtype=self.W.data.dtype))
        outputs = []
        for t in range(steps):
            h, c = lstm_step(T.select_time(x, t), h, c, self.W, self.U, self.b,
                             self.hidden_dim)
            if self.return_sequences:
                outputs.append(h)
        if self.return_sequences:
            return T.stack_time(outputs)
        return h


class TimeDistributed(Layer):
    """Applies an inner stack independently at each timestep of (B, M, D)."""

    def __init__(self, inner: "Layer"):
        self.inner = inner

    def params(self):
        return [(f"inner.{name}", p) for name, p in self.inner.params()]

    def spec(self):
        return {"kind": "TimeDistributed", "inner": self.inner.spec()}

    def forward(self, x, train=False):
        if x.data.ndim != 3:
            raise ShapeError("(B, M, D)", x.data.shape)
        batch, steps, _ = x.data.shape
        flat = T.reshape(x, (batch * steps, x.data.shape[2]))
        out = self.inner.forward(flat, train=train)
        return T.reshape(out, (batch, steps, out.data.shape[-1]))


class Sequential(Layer):
    """Chains layers; also chains specs and parameter names."""

    def __init__(self, layers: list):
        self.layers = list(layers)

    def params(self):
        out = []
        for i, layer in enumerate(self.layers):
            for name, p in layer.params():
                out.append((f"{i}.{name}", p))
        return out

    def spec(self):
        return {"kind": "Sequential", "layers": [layer.spec() for layer in self.layers]}

    def forward(self, x, train=False):
        for layer in self.layers:
            x = layer.forward(x, train=train)
        return x


def n_params(layer: Layer) -> int:
    return sum(p.data.size for _, p in layer.params())
