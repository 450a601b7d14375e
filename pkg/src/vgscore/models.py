"""Assembles the three predictor variants and their trailer-only ablations.

Video branches:
  M1  stacked LSTMs over the (M, 2048) frame-feature sequence,
  M2  a shared per-frame dense encoder applied at every timestep, pooled
      over time so one head serves any trailer length,
  M3  strided 3-d convolutions over a reduced raw-frame tensor.

The text branch embeds the 100-token summary and runs ConvPoolBlocks
(convolution, tanh, max-pool, dropout) then a ConvBlock (no pool).
Representations are concatenated and a zero-initialized dense layer maps
to the 10 classes, so a fresh model predicts the uniform distribution.
"""

from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .dataset import NUM_CLASSES
from .errors import (ConfigError, DimensionMismatch, EmptyTrailer, ModalityError,
                     ShapeError)
from .features import FEATURE_DIM, FrameFeatureMatrix
from .nn import layers as L
from .nn import tensor as T
from .nn.gradcheck import GradCheckReport, grad_check
from .nn.losses import cross_entropy_mean
from .nn.tensor import Tensor
from .rng import substream
from .text import SUMMARY_LENGTH, EncodedSummary


class Variant(str, Enum):
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"


class Modality(str, Enum):
    TRAILER_ONLY = "TrailerOnly"
    TRAILER_AND_SUMMARY = "TrailerAndSummary"


@dataclass(frozen=True)
class ModelConfig:
    variant: Variant = Variant.M1
    modality: Modality = Modality.TRAILER_AND_SUMMARY
    vocab_size: int = 2
    feature_dim: int = FEATURE_DIM
    summary_length: int = SUMMARY_LENGTH
    embed_dim: int = 300
    video_repr_dim: int = 512
    text_repr_dim: int = 512
    num_classes: int = NUM_CLASSES
    lstm_layers: int = 2
    m2_encoder_dims: tuple = (256, 128)
    text_channels: tuple = (128, 256, 256)
    text_pool_blocks: int = 2
    text_kernel: int = 3
    pool_width: int = 2
    dropout_rate: float = 0.5
    m3_frame_shape: tuple = (16, 64, 64, 3)
    m3_channels: tuple = (16, 32, 64)
    m3_kernel: int = 3

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "modality", Modality(self.modality))
        for name in ("vocab_size", "feature_dim", "summary_length", "embed_dim",
                     "video_repr_dim", "text_repr_dim", "lstm_layers", "text_kernel",
                     "pool_width", "m3_kernel"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.num_classes != NUM_CLASSES:
            raise ConfigError(f"num_classes must be {NUM_CLASSES}, got {self.num_classes}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        if not self.m2_encoder_dims or any(d <= 0 for d in self.m2_encoder_dims):
            raise ConfigError(f"bad m2_encoder_dims {self.m2_encoder_dims}")
        if not self.text_channels or any(c <= 0 for c in self.text_channels):
            raise ConfigError(f"bad text_channels {self.text_channels}")
        if not 0 <= self.text_pool_blocks <= len(self.text_channels):
            raise ConfigError(f"text_pool_blocks {self.text_pool_blocks} exceeds "
                              f"{len(self.text_channels)} conv blocks")
        if len(self.m3_frame_shape) != 4 or any(d <= 0 for d in self.m3_frame_shape):
            raise ConfigError(f"m3_frame_shape must be (T, H, W, C), got {self.m3_frame_shape}")
        if not self.m3_channels or any(c <= 0 for c in self.m3_channels):
            raise ConfigError(f"bad m3_channels {self.m3_channels}")

    @property
    def multimodal(self) -> bool:
        return self.modality is Modality.TRAILER_AND_SUMMARY

    def as_dict(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        d["modality"] = self.modality.value
        for key in ("m2_encoder_dims", "text_channels", "m3_frame_shape", "m3_channels"):
            d[key] = list(d[key])
        return d

    @staticmethod
    def from_dict(d: dict) -> "ModelConfig":
        kwargs = dict(d)
        for key in ("m2_encoder_dims", "text_channels", "m3_frame_shape", "m3_channels"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return ModelConfig(**kwargs)


def _valid_out(length: int, kernel: int, stride: int = 1) -> int:
    return (length - kernel) // stride + 1


def _m3_strides(config: ModelConfig) -> list:
    # first conv keeps temporal rate, later convs halve every axis
    return [(1, 2, 2) if i == 0 else (2, 2, 2) for i in range(len(config.m3_channels))]


def _m3_flat_dim(config: ModelConfig) -> int:
    t, h, w, _ = config.m3_frame_shape
    k = config.m3_kernel
    for (st, sh, sw) in _m3_strides(config):
        if min(t, h, w) < k:
            raise ConfigError(f"m3_frame_shape {config.m3_frame_shape} too small for "
                              f"kernel {k} at some stage (reached {t}x{h}x{w})")
        t, h, w = _valid_out(t, k, st), _valid_out(h, k, sh), _valid_out(w, k, sw)
    return config.m3_channels[-1] * t * h * w


def _text_flat_dim(config: ModelConfig) -> int:
    length = config.summary_length
    for i in range(len(config.text_channels)):
        length = _valid_out(length, config.text_kernel)
        if i < config.text_pool_blocks:
            length = _valid_out(length, config.pool_width, config.pool_width)
        if length <= 0:
            raise ConfigError(f"summary_length {config.summary_length} too short for "
                              f"the text conv stack (block {i})")
    return config.text_channels[-1] * length


def _video_stack(config: ModelConfig, rng) -> L.Sequential:
    if config.variant is Variant.M1:
        layers = []
        for i in range(config.lstm_layers):
            in_dim = config.feature_dim if i == 0 else config.video_repr_dim
            last = i == config.lstm_layers - 1
            layers.append(L.LSTM(in_dim, config.video_repr_dim, rng,
                                 return_sequences=not last))
        return L.Sequential(layers)
    if config.variant is Variant.M2:
        encoder = []
        in_dim = config.feature_dim
        for out_dim in config.m2_encoder_dims:
            encoder += [L.Dense(in_dim, out_dim, rng), L.Tanh()]
            in_dim = out_dim
        return L.Sequential([
            L.TimeDistributed(L.Sequential(encoder)),
            L.MeanOverTime(),
            L.Dense(in_dim, config.video_repr_dim, rng),
            L.Tanh(),
        ])
    flat = _m3_flat_dim(config)
    layers = []
    in_ch = config.m3_frame_shape[3]
    k = (config.m3_kernel,) * 3
    for out_ch, stride in zip(config.m3_channels, _m3_strides(config)):
        layers += [L.Conv3D(in_ch, out_ch, k, stride, rng), L.Tanh()]
        in_ch = out_ch
    layers += [L.Dense(flat, config.video_repr_dim, rng), L.Tanh()]
    return L.Sequential(layers)


def _text_stack(config: ModelConfig, rng, seed: int) -> L.Sequential:
    if config.vocab_size < 2:
        raise ConfigError(f"vocab_size must be at least 2, got {config.vocab_size}")
    layers = [L.Embedding(config.vocab_size, config.embed_dim, rng)]
    in_ch = config.embed_dim
    for i, out_ch in enumerate(config.text_channels):
        layers += [L.Conv1D(in_ch, out_ch, config.text_kernel, rng), L.Tanh()]
        if i < config.text_pool_blocks:
            layers.append(L.MaxPool1D(config.pool_width, config.pool_width))
        layers.append(L.Dropout(config.dropout_rate, substream(seed, f"dropout/text/{i}")))
        in_ch = out_ch
    layers += [L.Dense(_text_flat_dim(config), config.text_repr_dim, rng), L.Tanh()]
    return L.Sequential(layers)


class BuiltModel:
    """Video stack, optional text stack, concat head."""

    def __init__(self, config: ModelConfig, seed: int):
        self.config = config
        self.seed = seed
        self.video = _video_stack(config, substream(seed, "init/video"))
        self.text = (_text_stack(config, substream(seed, "init/text"), seed)
                     if config.multimodal else None)
        head_in = config.video_repr_dim + (config.text_repr_dim if config.multimodal else 0)
        self.head = L.Sequential([
            L.Concat(),
            L.Dense(head_in, config.num_classes, substream(seed, "init/head"),
                    zero_init=True),
        ])

    def params(self) -> list:
        out = [(f"video/{n}", p) for n, p in self.video.params()]
        if self.text is not None:
            out += [(f"text/{n}", p) for n, p in self.text.params()]
        out += [(f"head/{n}", p) for n, p in self.head.params()]
        return out

    def spec(self) -> dict:
        return {
            "video": self.video.spec(),
            "text": None if self.text is None else self.text.spec(),
            "head": self.head.spec(),
        }

    def zero_grads(self):
        for _, p in self.params():
            p.zero_grad()

    def forward(self, video_batch: np.ndarray, summaries: np.ndarray | None = None,
                train: bool = False) -> Tensor:
        """video_batch: (B, M, D) for M1/M2 or (B, T, H, W, C) for M3;
        summaries: (B, summary_length) token indices when multimodal."""
        if self.config.variant is Variant.M3:
            if video_batch.ndim != 5 or video_batch.shape[1:] != tuple(self.config.m3_frame_shape):
                raise ConfigError(f"expected frames (B, {self.config.m3_frame_shape}), "
                                  f"got {video_batch.shape}")
            video_batch = np.ascontiguousarray(video_batch.transpose(0, 4, 1, 2, 3))
        else:
            if video_batch.ndim != 3:
                raise ShapeError("(B, M, D) feature batch", video_batch.shape)
            if video_batch.shape[2] != self.config.feature_dim:
                raise DimensionMismatch(f"feature width {video_batch.shape[2]}, "
                                        f"expected {self.config.feature_dim}")
            if video_batch.shape[1] == 0:
                raise EmptyTrailer("no frames in batch")
        reprs = [self.video.forward(Tensor(video_batch), train=train)]
        if self.config.multimodal:
            if summaries is None:
                raise ModalityError("model is multimodal but no summaries given")
            summaries = np.asarray(summaries)
            if summaries.shape != (video_batch.shape[0], self.config.summary_length):
                raise ShapeError(f"(B, {self.config.summary_length}) summaries",
                                 summaries.shape)
            reprs.append(self.text.forward(Tensor(summaries), train=train))
        elif summaries is not None:
            raise ModalityError("model is trailer-only but summaries were given")
        return self.head.forward(reprs, train=train)

    def loss(self, video_batch, summaries, classes, train: bool = False) -> Tensor:
        return cross_entropy_mean(self.forward(video_batch, summaries, train=train),
                                  np.asarray(classes))


def build_model(config: ModelConfig, seed: int) -> BuiltModel:
    return BuiltModel(config, seed)


def count_params(model: BuiltModel) -> int:
    return sum(p.data.size for _, p in model.params())


def _single_video(model: BuiltModel, video_input) -> np.ndarray:
    config = model.config
    if config.variant is Variant.M3:
        frames = np.asarray(video_input, dtype=np.float32)
        if frames.shape != tuple(config.m3_frame_shape):
            raise ConfigError(f"expected raw frames {config.m3_frame_shape}, "
                              f"got {frames.shape}")
        return frames[None]
    if isinstance(video_input, FrameFeatureMatrix):
        features = video_input.features
    else:
        features = np.asarray(video_input, dtype=np.float32)
    if features.ndim != 2:
        raise ShapeError("(M, D) feature matrix", features.shape)
    if features.shape[0] == 0:
        raise EmptyTrailer("trailer has no selected frames")
    if features.shape[1] != config.feature_dim:
        raise DimensionMismatch(f"feature width {features.shape[1]}, "
                                f"expected {config.feature_dim}")
    return features.astype(np.float32, copy=False)[None]


def predict(model: BuiltModel, video_input, summary=None) -> np.ndarray:
    """One game -> 10 class probabilities, eval mode."""
    config = model.config
    if config.multimodal and summary is None:
        raise ModalityError("multimodal model needs a summary")
    if not config.multimodal and summary is not None:
        raise ModalityError("trailer-only model takes no summary")
    batch = _single_video(model, video_input)
    summaries = None
    if summary is not None:
        indices = summary.indices if isinstance(summary, EncodedSummary) else np.asarray(summary)
        summaries = indices[None]
    logits = model.forward(batch, summaries, train=False)
    return T.softmax(logits).data[0]


def to_float64(model: BuiltModel) -> BuiltModel:
    for _, p in model.params():
        p.data = p.data.astype(np.float64)
    return model


def grad_check_model(model: BuiltModel, video_batch, summaries, classes,
                     tolerance: float = 1e-4) -> GradCheckReport:
    """Finite-difference check of the full model in eval mode at 64-bit."""
    to_float64(model)
    video64 = np.asarray(video_batch, dtype=np.float64)
    classes = np.asarray(classes)

    def loss_fn():
        return model.loss(video64, summaries, classes, train=False)

    return grad_check(loss_fn, model.params(), tolerance=tolerance)
