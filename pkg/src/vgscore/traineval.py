"""Training loop, stratified 10-fold cross-validation, and the
multimodal-vs-trailer-only ablation with Table-style reporting.

Reports serialize without wall-clock times or filesystem paths so a
rerun with the same seed produces byte-identical files.
"""

import json
from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset, GameRecord
from .errors import (EmptyDataset, EmptyTrailer, FeatureUnavailable, TooFewSamples)
from .features import FrameFeatureMatrix, read_feature_file, synth_features
from .frames import DEFAULT_PARAMS, clamp_frame_count, select_frames
from .models import BuiltModel, ModelConfig, Variant, build_model
from .nn.optim import AdamState, adam_step
from .rng import substream
from .text import Vocab, build_vocab, encode_tokens, tokenize

ASSUMPTIONS = (
    "folds are stratified by G-Score class (seeded shuffle)",
    "vocabulary is rebuilt per fold from that fold's training split only",
)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 25
    batch_size: int = 32
    lr0: float = 1e-4
    decay: float = 1e-6
    seed: int = 0

    def as_dict(self) -> dict:
        return {"epochs": self.epochs, "batch_size": self.batch_size,
                "lr0": self.lr0, "decay": self.decay, "seed": self.seed}


@dataclass(frozen=True)
class FoldPlan:
    k: int
    folds: tuple
    seed: int
    stratified: bool

    def validation_indices(self, fold: int) -> tuple:
        return self.folds[fold]

    def training_indices(self, fold: int) -> tuple:
        held = set(self.folds[fold])
        everything = sorted(i for f in self.folds for i in f)
        return tuple(i for i in everything if i not in held)


def make_folds(labels, k: int, seed: int, stratified: bool = True) -> FoldPlan:
    """Deterministic k-fold partition; stratified deals each class's
    (shuffled) members round-robin with a cursor that carries across
    classes, keeping both per-class and total sizes within one."""
    labels = list(labels)
    n = len(labels)
    if n < k:
        raise TooFewSamples(f"{n} samples cannot fill {k} folds")
    if k < 2:
        raise TooFewSamples(f"need at least 2 folds, got {k}")
    rng = substream(seed, "folds")
    folds = [[] for _ in range(k)]
    if stratified:
        by_class: dict = {}
        for i, label in enumerate(labels):
            by_class.setdefault(label, []).append(i)
        cursor = 0
        for label in sorted(by_class):
            members = np.array(by_class[label])
            rng.shuffle(members)
            for i in members:
                folds[cursor % k].append(int(i))
                cursor += 1
    else:
        order = np.arange(n)
        rng.shuffle(order)
        for pos, i in enumerate(order):
            folds[pos % k].append(int(i))
    return FoldPlan(k=k, folds=tuple(tuple(sorted(f)) for f in folds),
                    seed=seed, stratified=stratified)


class SyntheticFeatureSource:
    """Backbone-free inputs: deterministic frame features and, for the
    3-d variant, deterministic raw frames in [0, 1].

    Frame count comes from the record's trailer_ref when it is an
    integer (e.g. "720"), else the default."""

    def __init__(self, seed: int, default_frames: int = 720, params=DEFAULT_PARAMS):
        self.seed = seed
        self.default_frames = default_frames
        self.params = params

    def _frame_count(self, record: GameRecord) -> int:
        ref = record.trailer_ref
        if ref is not None:
            text = ref.rsplit(":", 1)[-1]
            if text.isdigit():
                return int(text)
        return self.default_frames

    def matrix(self, record: GameRecord) -> FrameFeatureMatrix:
        n = clamp_frame_count(self._frame_count(record), self.params)
        selection = select_frames(n, self.params)
        return synth_features(record.id, selection.indices, self.seed)

    def raw_frames(self, record: GameRecord, frame_shape: tuple) -> np.ndarray:
        rng = substream(self.seed, f"frames/{record.id}")
        return rng.random(tuple(frame_shape), dtype=np.float32)


class FileFeatureSource:
    """Reads VGDF files; `feature_ref` wins, else <dir>/<id>.vgdf."""

    def __init__(self, directory):
        self.directory = directory

    def matrix(self, record: GameRecord) -> FrameFeatureMatrix:
        import os

        path = record.feature_ref or os.path.join(str(self.directory), f"{record.id}.vgdf")
        if not os.path.exists(path):
            raise FeatureUnavailable(record.id, "no feature file")
        matrix = read_feature_file(path)
        if matrix.game_id != record.id:
            raise FeatureUnavailable(record.id,
                                     f"feature file belongs to {matrix.game_id!r}")
        return matrix

    def raw_frames(self, record: GameRecord, frame_shape: tuple) -> np.ndarray:
        raise FeatureUnavailable(
            record.id, "Model-3 consumes raw frames, which only the synthetic source provides")


@dataclass(frozen=True)
class Example:
    game_id: str
    video: np.ndarray
    summary: np.ndarray | None
    label: int


def materialize(records, config: ModelConfig, source, vocab: Vocab | None) -> list:
    """Resolves every record to model-ready arrays up front so missing
    features fail fast with the offending game id."""
    examples = []
    for record in records:
        if config.variant is Variant.M3:
            video = source.raw_frames(record, config.m3_frame_shape)
        else:
            matrix = source.matrix(record)
            if matrix.features.shape[0] == 0:
                raise EmptyTrailer(f"{record.id}: no frames selected")
            video = matrix.features
        summary = None
        if config.multimodal:
            if vocab is None:
                raise FeatureUnavailable(record.id, "multimodal run needs a vocabulary")
            summary = encode_tokens(tokenize(record.summary), vocab, config.summary_length)
        examples.append(Example(game_id=record.id, video=video, summary=summary,
                                label=record.gscore().class_index))
    return examples


def _batches(examples, batch_size: int, rng: np.random.Generator) -> list:
    """Same-shaped examples share a batch (trailer lengths vary); batch
    order and membership are reshuffled every epoch."""
    by_shape: dict = {}
    for i, ex in enumerate(examples):
        by_shape.setdefault(ex.video.shape, []).append(i)
    batches = []
    for shape in sorted(by_shape):
        members = np.array(by_shape[shape])
        rng.shuffle(members)
        for k in range(0, len(members), batch_size):
            batches.append(members[k:k + batch_size])
    order = rng.permutation(len(batches))
    return [batches[i] for i in order]


def _stack_batch(examples, index_batch, multimodal: bool):
    video = np.stack([examples[i].video for i in index_batch])
    summaries = None
    if multimodal:
        summaries = np.stack([examples[i].summary for i in index_batch])
    classes = np.array([examples[i].label for i in index_batch])
    return video, summaries, classes


def train(model: BuiltModel, examples: list, tconfig: TrainConfig) -> list:
    """Minibatch Adam on cross-entropy; returns per-epoch mean loss."""
    if not examples:
        raise EmptyDataset("nothing to train on")
    if tconfig.epochs == 0:
        return []
    state = AdamState(lr0=tconfig.lr0, decay=tconfig.decay)
    shuffle_rng = substream(tconfig.seed, "shuffle")
    params = model.params()
    multimodal = model.config.multimodal
    history = []
    for _ in range(tconfig.epochs):
        epoch_loss = 0.0
        for index_batch in _batches(examples, tconfig.batch_size, shuffle_rng):
            video, summaries, classes = _stack_batch(examples, index_batch, multimodal)
            model.zero_grads()
            loss = model.loss(video, summaries, classes, train=True)
            loss.backward()
            grads = {name: p.grad for name, p in params if p.grad is not None}
            adam_step(state, params, grads)
            epoch_loss += float(loss.data) * len(index_batch)
        history.append(epoch_loss / len(examples))
    return history


def evaluate(model: BuiltModel, examples: list) -> float:
    """Fraction of argmax-correct predictions; np.argmax already breaks
    ties toward the lowest class index."""
    if not examples:
        raise EmptyDataset("nothing to evaluate")
    correct = 0
    by_shape: dict = {}
    for i, ex in enumerate(examples):
        by_shape.setdefault(ex.video.shape, []).append(i)
    for shape in sorted(by_shape):
        index_batch = np.array(by_shape[shape])
        video, summaries, classes = _stack_batch(examples, index_batch,
                                                 model.config.multimodal)
        logits = model.forward(video, summaries, train=False)
        correct += int((np.argmax(logits.data, axis=1) == classes).sum())
    return correct / len(examples)


@dataclass(frozen=True)
class FoldReport:
    variant: str
    modality: str
    k: int
    seed: int
    epochs: int
    fold_sizes: tuple
    fold_accuracies: tuple
    mean_accuracy: float
    stratified: bool
    assumptions: tuple = ASSUMPTIONS
    wall_seconds: float | None = None  # never serialized: reports must be byte-stable

    def to_json(self) -> str:
        payload = {
            "variant": self.variant,
            "modality": self.modality,
            "k": self.k,
            "seed": self.seed,
            "epochs": self.epochs,
            "fold_sizes": list(self.fold_sizes),
            "fold_accuracies": [round(a, 6) for a in self.fold_accuracies],
            "mean_accuracy": round(self.mean_accuracy, 6),
            "stratified": self.stratified,
            "assumptions": list(self.assumptions),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.k}-fold cross-validation  variant={self.variant}  "
                 f"modality={self.modality}  seed={self.seed}  epochs={self.epochs}"]
        for note in self.assumptions:
            lines.append(f"  assumption: {note}")
        for i, (size, acc) in enumerate(zip(self.fold_sizes, self.fold_accuracies)):
            lines.append(f"  fold {i:>2d}  n={size:<5d} accuracy={acc * 100:6.2f}%")
        lines.append(f"  mean accuracy: {self.mean_accuracy * 100:.2f}%")
        return "\n".join(lines) + "\n"


def fold_model_seed(seed: int, fold: int) -> int:
    """Per-fold init seed drawn from the run seed's named substream."""
    return int(substream(seed, f"fold/{fold}").integers(0, 2 ** 63))


def cross_validate(dataset: Dataset, config: ModelConfig, tconfig: TrainConfig,
                   source, k: int = 10, stratified: bool = True,
                   plan: FoldPlan | None = None) -> FoldReport:
    """Fresh model and fresh training-split vocabulary per fold."""
    records = dataset.records
    labels = [r.gscore().class_index for r in records]
    if plan is None:
        plan = make_folds(labels, k=k, seed=tconfig.seed, stratified=stratified)
    accuracies = []
    sizes = []
    for fold in range(plan.k):
        train_records = [records[i] for i in plan.training_indices(fold)]
        val_records = [records[i] for i in plan.validation_indices(fold)]
        vocab = None
        fold_config = config
        if config.multimodal:
            vocab = build_vocab([tokenize(r.summary) for r in train_records])
            fold_config = replace(config, vocab_size=len(vocab))
        model = build_model(fold_config, seed=fold_model_seed(tconfig.seed, fold))
        train(model, materialize(train_records, fold_config, source, vocab), tconfig)
        accuracy = evaluate(model, materialize(val_records, fold_config, source, vocab))
        accuracies.append(accuracy)
        sizes.append(len(val_records))
    mean = float(np.mean(accuracies))
    return FoldReport(variant=config.variant.value, modality=config.modality.value,
                      k=plan.k, seed=tconfig.seed, epochs=tconfig.epochs,
                      fold_sizes=tuple(sizes), fold_accuracies=tuple(accuracies),
                      mean_accuracy=mean, stratified=plan.stratified)


@dataclass(frozen=True)
class AblationReport:
    variant: str
    trailer_only: FoldReport
    multimodal: FoldReport
    delta_points: float

    def to_json(self) -> str:
        payload = {
            "variant": self.variant,
            "trailer_only_mean": round(self.trailer_only.mean_accuracy, 6),
            "multimodal_mean": round(self.multimodal.mean_accuracy, 6),
            "improvement_points": round(self.delta_points, 4),
            "k": self.trailer_only.k,
            "seed": self.trailer_only.seed,
            "epochs": self.trailer_only.epochs,
            "fold_accuracies": {
                "trailer_only": [round(a, 6) for a in self.trailer_only.fold_accuracies],
                "multimodal": [round(a, 6) for a in self.multimodal.fold_accuracies],
            },
            "assumptions": list(self.trailer_only.assumptions),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        name = {"M1": "Model-1", "M2": "Model-2", "M3": "Model-3"}[self.variant]
        lines = [
            f"Results for {name} (mean accuracy over {self.trailer_only.k} folds)",
            f"  Trailer Only          {self.trailer_only.mean_accuracy * 100:6.2f}%",
            f"  Trailer and Summary   {self.multimodal.mean_accuracy * 100:6.2f}%",
            f"  Improvement           {self.delta_points:+6.2f} points",
        ]
        for note in self.trailer_only.assumptions:
            lines.append(f"  assumption: {note}")
        return "\n".join(lines) + "\n"


def ablate(dataset: Dataset, config: ModelConfig, tconfig: TrainConfig, source,
           k: int = 10, stratified: bool = True) -> AblationReport:
    """Both modalities share the fold plan, per-fold seeds, and therefore
    identical video-branch initial weights."""
    labels = [r.gscore().class_index for r in dataset.records]
    plan = make_folds(labels, k=k, seed=tconfig.seed, stratified=stratified)
    solo = cross_validate(dataset, replace(config, modality="TrailerOnly"),
                          tconfig, source, plan=plan)
    multi = cross_validate(dataset, replace(config, modality="TrailerAndSummary"),
                           tconfig, source, plan=plan)
    delta = (multi.mean_accuracy - solo.mean_accuracy) * 100.0
    return AblationReport(variant=config.variant.value, trailer_only=solo,
                          multimodal=multi, delta_points=delta)
