"""Command-line entry point.

Subcommands: stats, select-frames, featurize, build-vocab, train, cv,
ablate, predict, gradcheck.  Values resolve as flag > config file >
built-in default; the config file is plain `key = value` lines (keys are
flag names, dashes or underscores) named by --config or the
VGSCORE_CONFIG environment variable.

Report files carry a run stamp derived from the scientific settings, and
their contents contain no wall-clock times or paths, so identical
invocations write byte-identical files.
"""

import argparse
import hashlib
import json
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .dataset import dataset_stats, gscore_bin_label, load_manifest
from .errors import ConfigError, CorruptCheckpoint, VGError
from .features import write_feature_file
from .frames import FrameSelectionParams, clamp_frame_count, select_frames
from .models import ModelConfig, Variant, build_model, grad_check_model
from .models import predict as model_predict
from .nn.checkpoint import load_checkpoint, save_checkpoint
from .rng import substream
from .text import Vocab, build_vocab, encode_tokens, save_vocab, tokenize
from .traineval import (FileFeatureSource, SyntheticFeatureSource, TrainConfig, ablate,
                        cross_validate, materialize, train)


def _bool_text(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _csv_ints(text: str) -> tuple:
    try:
        return tuple(int(part) for part in str(text).split(","))
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc


# dest -> (cast for config-file strings, ModelConfig field)
_MODEL_FIELDS = {
    "variant": str,
    "modality": str,
    "feature_dim": int,
    "summary_length": int,
    "embed_dim": int,
    "video_repr_dim": int,
    "text_repr_dim": int,
    "lstm_layers": int,
    "m2_encoder_dims": _csv_ints,
    "text_channels": _csv_ints,
    "text_pool_blocks": int,
    "text_kernel": int,
    "pool_width": int,
    "dropout_rate": float,
    "m3_frame_shape": _csv_ints,
    "m3_channels": _csv_ints,
    "m3_kernel": int,
}

_TRAIN_FIELDS = {
    "epochs": int,
    "batch_size": int,
    "lr0": float,
    "decay": float,
    "seed": int,
}

_OTHER_FIELDS = {
    "k": int,
    "stratified": _bool_text,
    "frames": int,
    "feature_seed": int,
    "synthetic": _bool_text,
    "batch": int,
    "steps": int,
    "tolerance": float,
}

_ALL_FIELDS = {**_MODEL_FIELDS, **_TRAIN_FIELDS, **_OTHER_FIELDS}

# compact dimensions for the finite-difference check (64-bit, full models)
_GRADCHECK_TOY = {
    "feature_dim": 8, "summary_length": 12, "embed_dim": 5, "video_repr_dim": 6,
    "text_repr_dim": 6, "lstm_layers": 2, "m2_encoder_dims": (7, 4),
    "text_channels": (4, 5), "text_pool_blocks": 1, "m3_frame_shape": (4, 8, 8, 2),
    "m3_channels": (2, 3), "m3_kernel": 2,
}


def parse_config_file(path) -> dict:
    """`key = value` lines; blank lines and #-comments ignored."""
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                if "=" not in stripped:
                    raise ConfigError(f"{path}:{line_no}: expected key = value")
                key, _, value = stripped.partition("=")
                key = key.strip().replace("-", "_")
                if key not in _ALL_FIELDS:
                    raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
                values[key] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return values


def _resolve(args, file_config: dict, dest: str, default=None):
    flag_value = getattr(args, dest, None)
    if flag_value is not None:
        return flag_value
    if dest in file_config:
        return _ALL_FIELDS[dest](file_config[dest])
    return default


def _model_config(args, file_config: dict, vocab_size: int,
                  toy_defaults: dict | None = None) -> ModelConfig:
    kwargs = {}
    for dest in _MODEL_FIELDS:
        value = _resolve(args, file_config, dest)
        if value is not None:
            kwargs[dest] = value
    if toy_defaults:
        kwargs = {**toy_defaults, **kwargs}
    return ModelConfig(vocab_size=vocab_size, **kwargs)


def _train_config(args, file_config: dict) -> TrainConfig:
    kwargs = {}
    for dest in _TRAIN_FIELDS:
        value = _resolve(args, file_config, dest)
        if value is not None:
            kwargs[dest] = value
    return TrainConfig(**kwargs)


def _stamp(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True).encode("utf-8")
    return hashlib.blake2b(blob, digest_size=4).hexdigest()


def _manifest_digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.blake2b(fh.read(), digest_size=4).hexdigest()


def _write(path, text: str):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _feature_source(args, file_config):
    synthetic = _resolve(args, file_config, "synthetic", False)
    feature_seed = _resolve(args, file_config, "feature_seed", 0)
    frames = _resolve(args, file_config, "frames", 720)
    if synthetic:
        return SyntheticFeatureSource(seed=feature_seed, default_frames=frames)
    if getattr(args, "features", None):
        return FileFeatureSource(args.features)
    raise ConfigError("need --features DIR or --synthetic")


def _selection_params(args) -> FrameSelectionParams:
    return FrameSelectionParams(
        start_offset=args.start_offset, window=args.window, stride=args.stride,
        fps=args.fps, max_duration=args.max_duration)


def cmd_stats(args, file_config) -> int:
    ds = load_manifest(args.manifest)
    report = dataset_stats(ds)
    print(report.to_text(), end="")
    if args.out:
        stamp = _manifest_digest(args.manifest)
        _write(os.path.join(args.out, f"stats-{stamp}.txt"), report.to_text())
        _write(os.path.join(args.out, f"stats-{stamp}.json"), report.to_json())
    return 0


def cmd_select_frames(args, file_config) -> int:
    params = _selection_params(args)
    n = clamp_frame_count(args.frames, params)
    selection = select_frames(n, params)
    if selection.fallback:
        print(f"note: algorithm selected nothing for {n} frames; "
              f"fell back to {len(selection.indices)} evenly spaced indices",
              file=sys.stderr)
    for index in selection.indices:
        print(index)
    return 0


def cmd_featurize(args, file_config) -> int:
    synthetic = _resolve(args, file_config, "synthetic", False)
    if not synthetic:
        raise ConfigError("this package only produces synthetic features; "
                          "pass --synthetic (the extractor sidecar makes real ones)")
    ds = load_manifest(args.manifest)
    source = SyntheticFeatureSource(seed=_resolve(args, file_config, "feature_seed", 0),
                                    default_frames=_resolve(args, file_config, "frames", 720))
    os.makedirs(args.out, exist_ok=True)
    for record in ds.records:
        write_feature_file(source.matrix(record), os.path.join(args.out, f"{record.id}.vgdf"))
    print(f"wrote {len(ds.records)} feature files to {args.out}")
    return 0


def cmd_build_vocab(args, file_config) -> int:
    ds = load_manifest(args.manifest)
    vocab = build_vocab([tokenize(r.summary) for r in ds.records])
    save_vocab(vocab, args.out)
    print(f"vocabulary of {len(vocab)} indices (including pad/oov) -> {args.out}")
    return 0


def _build_vocab_and_config(args, file_config, ds, toy_defaults=None):
    probe = _model_config(args, file_config, vocab_size=2, toy_defaults=toy_defaults)
    vocab = None
    if probe.multimodal:
        vocab = build_vocab([tokenize(r.summary) for r in ds.records])
        probe = replace(probe, vocab_size=len(vocab))
    return vocab, probe


def cmd_train(args, file_config) -> int:
    ds = load_manifest(args.manifest)
    tconfig = _train_config(args, file_config)
    vocab, config = _build_vocab_and_config(args, file_config, ds)
    source = _feature_source(args, file_config)
    model = build_model(config, seed=tconfig.seed)
    examples = materialize(ds.records, config, source, vocab)
    history = train(model, examples, tconfig)
    stamp = _stamp({"cmd": "train", "model": config.as_dict(), "train": tconfig.as_dict(),
                    "manifest": _manifest_digest(args.manifest)})
    base = os.path.join(args.out, f"train-{config.variant.value}-s{tconfig.seed}-{stamp}")
    extra = {"vocab": None if vocab is None else vocab.word_to_index,
             "model_seed": tconfig.seed}
    os.makedirs(args.out, exist_ok=True)
    save_checkpoint(base + ".vgdm", model.params(),
                    {"model": config.as_dict(), "train": tconfig.as_dict(),
                     "model_seed": tconfig.seed},
                    model.spec(), extra=extra)
    _write(base + "-history.json",
           json.dumps({"epoch_mean_loss": [round(h, 6) for h in history]},
                      indent=2, sort_keys=True) + "\n")
    final = history[-1] if history else float("nan")
    print(f"trained {config.variant.value} ({config.modality.value}) for "
          f"{tconfig.epochs} epochs; final mean loss {final:.4f}")
    print(f"checkpoint: {base}.vgdm")
    return 0


def cmd_cv(args, file_config) -> int:
    ds = load_manifest(args.manifest)
    tconfig = _train_config(args, file_config)
    _, config = _build_vocab_and_config(args, file_config, ds)
    source = _feature_source(args, file_config)
    k = _resolve(args, file_config, "k", 10)
    stratified = _resolve(args, file_config, "stratified", True)
    report = cross_validate(ds, config, tconfig, source, k=k, stratified=stratified)
    print(report.to_text(), end="")
    if args.out:
        stamp = _stamp({"cmd": "cv", "model": config.as_dict(),
                        "train": tconfig.as_dict(), "k": k, "stratified": stratified,
                        "manifest": _manifest_digest(args.manifest)})
        base = os.path.join(args.out, f"cv-{config.variant.value}-s{tconfig.seed}-{stamp}")
        _write(base + ".json", report.to_json())
        _write(base + ".txt", report.to_text())
    return 0


def cmd_ablate(args, file_config) -> int:
    ds = load_manifest(args.manifest)
    tconfig = _train_config(args, file_config)
    _, config = _build_vocab_and_config(args, file_config, ds)
    source = _feature_source(args, file_config)
    k = _resolve(args, file_config, "k", 10)
    stratified = _resolve(args, file_config, "stratified", True)
    report = ablate(ds, config, tconfig, source, k=k, stratified=stratified)
    print(report.to_text(), end="")
    if args.out:
        stamp = _stamp({"cmd": "ablate", "model": config.as_dict(),
                        "train": tconfig.as_dict(), "k": k, "stratified": stratified,
                        "manifest": _manifest_digest(args.manifest)})
        base = os.path.join(args.out, f"ablate-{config.variant.value}-s{tconfig.seed}-{stamp}")
        _write(base + ".json", report.to_json())
        _write(base + ".txt", report.to_text())
    return 0


def cmd_predict(args, file_config) -> int:
    ds = load_manifest(args.manifest)
    record = next((r for r in ds.records if r.id == args.id), None)
    if record is None:
        raise ConfigError(f"game id {args.id!r} not in manifest")
    header, arrays, _ = load_checkpoint(args.model)
    config = ModelConfig.from_dict(header["config"]["model"])
    model = build_model(config, seed=int(header["config"]["model_seed"]))
    for name, p in model.params():
        stored = arrays.get(name)
        if stored is None or stored.shape != p.data.shape:
            raise CorruptCheckpoint(f"checkpoint misses or mis-shapes {name}")
        p.data = stored.astype(p.data.dtype, copy=False)
    source = _feature_source(args, file_config)
    summary = None
    if config.multimodal:
        word_to_index = header.get("extra", {}).get("vocab")
        if word_to_index is None:
            raise CorruptCheckpoint("multimodal checkpoint lacks a vocabulary")
        vocab = Vocab(word_to_index=word_to_index)
        summary = encode_tokens(tokenize(record.summary), vocab, config.summary_length)
    if config.variant is Variant.M3:
        video = source.raw_frames(record, config.m3_frame_shape)
    else:
        video = source.matrix(record)
    probs = model_predict(model, video, summary)
    winner = int(np.argmax(probs))
    print(f"{record.id}: class {winner} (G-Score bin {gscore_bin_label(winner)})")
    for cls, p in enumerate(probs):
        print(f"  class {cls} ({gscore_bin_label(cls):>6s})  p={p:.6f}")
    return 0


def cmd_gradcheck(args, file_config) -> int:
    seed = _resolve(args, file_config, "seed", 0)
    batch = _resolve(args, file_config, "batch", 2)
    steps = _resolve(args, file_config, "steps", 3)
    tolerance = _resolve(args, file_config, "tolerance", 1e-4)
    vocab_size = 9
    config = _model_config(args, file_config, vocab_size=vocab_size,
                           toy_defaults=_GRADCHECK_TOY)
    model = build_model(config, seed=seed)
    rng = substream(seed, "gradcheck/batch")
    if config.variant is Variant.M3:
        video = rng.uniform(-1, 1, size=(batch, *config.m3_frame_shape))
    else:
        video = rng.uniform(-1, 1, size=(batch, steps, config.feature_dim))
    summaries = None
    if config.multimodal:
        summaries = rng.integers(0, vocab_size, size=(batch, config.summary_length))
    classes = rng.integers(0, config.num_classes, size=batch)
    report = grad_check_model(model, video, summaries, classes, tolerance=tolerance)
    print(report.to_text())
    if not report.passed:
        print("gradient check failed", file=sys.stderr)
        return 1
    return 0


def _add_model_flags(sub):
    sub.add_argument("--variant", choices=["M1", "M2", "M3"],
                     help="architecture: M1 recurrent, M2 time-distributed encoder, "
                          "M3 3-d convolution over raw frames (default M1)")
    sub.add_argument("--modality", choices=["TrailerOnly", "TrailerAndSummary"],
                     help="drop or keep the summary branch (default TrailerAndSummary)")
    sub.add_argument("--feature-dim", type=int, help="per-frame feature width (default 2048)")
    sub.add_argument("--summary-length", type=int,
                     help="token count each summary is padded/trimmed to (default 100)")
    sub.add_argument("--embed-dim", type=int, help="word-embedding width (default 300)")
    sub.add_argument("--video-repr-dim", type=int,
                     help="video representation width (default 512)")
    sub.add_argument("--text-repr-dim", type=int,
                     help="text representation width (default 512)")
    sub.add_argument("--lstm-layers", type=int, help="recurrence depth for M1 (default 2)")
    sub.add_argument("--m2-encoder-dims", type=_csv_ints,
                     help="comma-separated per-frame encoder widths for M2 (default 256,128)")
    sub.add_argument("--text-channels", type=_csv_ints,
                     help="comma-separated conv channels in the text branch "
                          "(default 128,256,256)")
    sub.add_argument("--text-pool-blocks", type=int,
                     help="how many leading text conv blocks also max-pool (default 2)")
    sub.add_argument("--text-kernel", type=int, help="text conv kernel width (default 3)")
    sub.add_argument("--pool-width", type=int, help="max-pool width and stride (default 2)")
    sub.add_argument("--dropout-rate", type=float, help="dropout rate in [0,1) (default 0.5)")
    sub.add_argument("--m3-frame-shape", type=_csv_ints,
                     help="T,H,W,C raw-frame tensor shape for M3 (default 16,64,64,3)")
    sub.add_argument("--m3-channels", type=_csv_ints,
                     help="comma-separated conv channels for M3 (default 16,32,64)")
    sub.add_argument("--m3-kernel", type=int, help="cubic conv kernel size for M3 (default 3)")


def _add_train_flags(sub):
    sub.add_argument("--epochs", type=int, help="training epochs (default 25)")
    sub.add_argument("--batch-size", type=int, help="minibatch size (default 32)")
    sub.add_argument("--lr0", type=float, help="initial learning rate (default 1e-4)")
    sub.add_argument("--decay", type=float,
                     help="inverse-time learning-rate decay (default 1e-6)")
    sub.add_argument("--seed", type=int,
                     help="master seed; folds, init, dropout, and shuffle draw "
                          "named substreams from it (default 0)")


def _add_source_flags(sub):
    sub.add_argument("--features", help="directory of <id>.vgdf feature files")
    sub.add_argument("--synthetic", action="store_true", default=None,
                     help="use the deterministic synthetic feature source instead "
                          "of feature files")
    sub.add_argument("--feature-seed", type=int,
                     help="seed for the synthetic feature source (default 0)")
    sub.add_argument("--frames", type=int,
                     help="synthetic trailer length in frames when the manifest "
                          "does not override it (default 720)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vgscore",
        description="Video-game rating-class prediction from trailers and summaries.")
    parser.add_argument("--version", action="version", version=f"vgscore {__version__}")
    parser.add_argument("--config",
                        help="key = value defaults file; flags override it "
                             "(also via the VGSCORE_CONFIG environment variable)")
    commands = parser.add_subparsers(dest="command", metavar="command")

    sub = commands.add_parser("stats", help="dataset distribution tables",
                              description="Summarize a manifest: genre, age-rating, "
                                          "and G-Score class distributions.")
    sub.add_argument("--manifest", required=True, help="line-delimited JSON manifest")
    sub.add_argument("--out", help="directory for the stamped report files")
    sub.set_defaults(func=cmd_stats)

    sub = commands.add_parser("select-frames", help="dry-run the frame selection",
                              description="Print the 1-based frame indices the "
                                          "selection algorithm keeps for a trailer "
                                          "of the given length.")
    sub.add_argument("--frames", type=int, required=True,
                     help="raw frame count before the duration cap")
    sub.add_argument("--fps", type=int, default=4, help="frames per second after "
                     "rate reduction (default 4)")
    sub.add_argument("--max-duration", type=int, default=180,
                     help="duration cap in seconds (default 180)")
    sub.add_argument("--start-offset", type=int, default=50,
                     help="frames skipped at the start (default 50)")
    sub.add_argument("--window", type=int, default=10,
                     help="frames taken per burst (default 10)")
    sub.add_argument("--stride", type=int, default=150,
                     help="frames between burst starts (default 150)")
    sub.set_defaults(func=cmd_select_frames)

    sub = commands.add_parser("featurize", help="write synthetic feature files",
                              description="Write one .vgdf feature file per manifest "
                                          "record using the deterministic synthetic "
                                          "source (real features come from the "
                                          "extractor sidecar).")
    sub.add_argument("--manifest", required=True, help="line-delimited JSON manifest")
    sub.add_argument("--out", required=True, help="output directory for .vgdf files")
    sub.add_argument("--synthetic", action="store_true", default=None,
                     help="confirm synthetic generation (required)")
    sub.add_argument("--feature-seed", type=int,
                     help="seed for the synthetic feature source (default 0)")
    sub.add_argument("--frames", type=int,
                     help="synthetic trailer length in frames when the manifest "
                          "does not override it (default 720)")
    sub.set_defaults(func=cmd_featurize)

    sub = commands.add_parser("build-vocab", help="write the token index",
                              description="Build the word index from every summary "
                                          "in the manifest and save it as TSV. "
                                          "Cross-validation rebuilds vocabularies "
                                          "per fold; this artifact is for "
                                          "whole-dataset training.")
    sub.add_argument("--manifest", required=True, help="line-delimited JSON manifest")
    sub.add_argument("--out", required=True, help="path for the vocabulary TSV")
    sub.set_defaults(func=cmd_build_vocab)

    sub = commands.add_parser("train", help="train one model on the whole manifest",
                              description="Train a single model and save a "
                                          "checkpoint plus the loss history.")
    sub.add_argument("--manifest", required=True, help="line-delimited JSON manifest")
    sub.add_argument("--out", required=True, help="output directory")
    _add_source_flags(sub)
    _add_model_flags(sub)
    _add_train_flags(sub)
    sub.set_defaults(func=cmd_train)

    sub = commands.add_parser("cv", help="k-fold cross-validation",
                              description="Stratified k-fold cross-validation with a "
                                          "fresh model and fresh training-split "
                                          "vocabulary per fold.")
    sub.add_argument("--manifest", required=True, help="line-delimited JSON manifest")
    sub.add_argument("--out", help="directory for the stamped report files")
    sub.add_argument("--k", type=int, help="number of folds (default 10)")
    sub.add_argument("--stratified", type=_bool_text,
                     help="stratify folds by class, true/false (default true)")
    _add_source_flags(sub)
    _add_model_flags(sub)
    _add_train_flags(sub)
    sub.set_defaults(func=cmd_cv)

    sub = commands.add_parser("ablate", help="multimodal vs trailer-only comparison",
                              description="Run cross-validation for both modalities "
                                          "on the same folds, seeds, and video-branch "
                                          "initialization, and report the "
                                          "improvement in points.")
    sub.add_argument("--manifest", required=True, help="line-delimited JSON manifest")
    sub.add_argument("--out", help="directory for the stamped report files")
    sub.add_argument("--k", type=int, help="number of folds (default 10)")
    sub.add_argument("--stratified", type=_bool_text,
                     help="stratify folds by class, true/false (default true)")
    _add_source_flags(sub)
    _add_model_flags(sub)
    _add_train_flags(sub)
    sub.set_defaults(func=cmd_ablate)

    sub = commands.add_parser("predict", help="classify one game",
                              description="Load a checkpoint and print the predicted "
                                          "rating class and per-class probabilities "
                                          "for one game from the manifest.")
    sub.add_argument("--manifest", required=True, help="line-delimited JSON manifest")
    sub.add_argument("--model", required=True, help="checkpoint file from `train`")
    sub.add_argument("--id", required=True, help="game id to classify")
    _add_source_flags(sub)
    sub.set_defaults(func=cmd_predict)

    sub = commands.add_parser("gradcheck", help="finite-difference gradient check",
                              description="Verify reverse-mode gradients of a full "
                                          "model against central finite differences "
                                          "at 64-bit. Dimensions default to compact "
                                          "sizes so the check stays fast.")
    sub.add_argument("--batch", type=int, help="batch size of the probe input (default 2)")
    sub.add_argument("--steps", type=int,
                     help="trailer length of the probe input (default 3)")
    sub.add_argument("--tolerance", type=float,
                     help="max relative error allowed (default 1e-4)")
    sub.add_argument("--seed", type=int, help="seed for weights and probe data (default 0)")
    _add_model_flags(sub)
    sub.set_defaults(func=cmd_gradcheck)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    if not getattr(args, "func", None):
        parser.print_help()
        return 2
    try:
        config_path = args.config or os.environ.get("VGSCORE_CONFIG")
        file_config = parse_config_file(config_path) if config_path else {}
        return args.func(args, file_config)
    except VGError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
