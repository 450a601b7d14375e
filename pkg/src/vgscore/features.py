"""Per-frame feature matrices, the VGDF file format, and a synthetic source.

A feature file stores one game's M x 2048 float32 matrix of per-frame
backbone features plus the selected frame indices.  The binary layout
(little-endian) is normative:

    magic   4 bytes  "VGDF"
    version u32      1
    M       u32      number of frames
    D       u32      feature width (2048)
    id_len  u32      length of the UTF-8 game id
    id      id_len bytes
    indices M x u32  1-based frame indices, ascending
    payload M x D x float32, row-major

Writes go through a temp file and an atomic rename so concurrent readers
never observe a partial file.
"""

import hashlib
import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import CorruptFeatureFile, DimensionMismatch, UnsupportedFormat

FEATURE_DIM = 2048

_MAGIC = b"VGDF"
_VERSION = 1
_HEADER = struct.Struct("<4sIIII")


@dataclass(frozen=True)
class FrameFeatureMatrix:
    game_id: str
    frame_indices: tuple[int, ...]
    features: np.ndarray  # (M, D) float32

    def __post_init__(self):
        m = len(self.frame_indices)
        if self.features.ndim != 2 or self.features.shape[0] != m:
            raise DimensionMismatch(
                f"feature matrix {self.features.shape} does not match {m} indices"
            )
        if any(b <= a for a, b in zip(self.frame_indices, self.frame_indices[1:])):
            raise ValueError("frame indices must be strictly ascending")
        if m and not np.isfinite(self.features).all():
            raise ValueError("feature values must be finite")

    @property
    def num_frames(self) -> int:
        return len(self.frame_indices)


def write_feature_file(matrix: FrameFeatureMatrix, path) -> None:
    if matrix.features.shape[1] != FEATURE_DIM:
        raise DimensionMismatch(
            f"expected D={FEATURE_DIM}, got {matrix.features.shape[1]}"
        )
    game_id = matrix.game_id.encode("utf-8")
    m = matrix.num_frames
    payload = np.ascontiguousarray(matrix.features, dtype=np.float32)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, m, FEATURE_DIM, len(game_id)))
        fh.write(game_id)
        fh.write(np.asarray(matrix.frame_indices, dtype="<u4").tobytes())
        fh.write(payload.astype("<f4", copy=False).tobytes())
    os.replace(tmp, path)


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise CorruptFeatureFile(f"truncated {what}: wanted {n} bytes, got {len(data)}")
    return data


def read_feature_file(path) -> FrameFeatureMatrix:
    with open(path, "rb") as fh:
        magic, version, m, d, id_len = _HEADER.unpack(_read_exact(fh, _HEADER.size, "header"))
        if magic != _MAGIC:
            raise UnsupportedFormat(f"bad magic {magic!r}")
        if version != _VERSION:
            raise UnsupportedFormat(f"unsupported version {version}")
        if d != FEATURE_DIM:
            raise DimensionMismatch(f"expected D={FEATURE_DIM}, got {d}")
        game_id = _read_exact(fh, id_len, "game id").decode("utf-8")
        indices = np.frombuffer(_read_exact(fh, 4 * m, "frame indices"), dtype="<u4")
        payload = _read_exact(fh, 4 * m * d, "feature payload")
        trailing = fh.read(1)
    if trailing:
        raise CorruptFeatureFile("trailing bytes after payload")
    features = np.frombuffer(payload, dtype="<f4").reshape(m, d).copy()
    return FrameFeatureMatrix(
        game_id=game_id,
        frame_indices=tuple(int(i) for i in indices),
        features=features,
    )


def synth_features(game_id: str, frame_indices, seed: int) -> FrameFeatureMatrix:
    """Deterministic backbone stand-in: features in [-1, 1].

    Each row is a pure function of (game_id, frame index, seed), so the
    same inputs always produce bit-identical matrices, on any platform.
    """
    indices = tuple(int(i) for i in frame_indices)
    rows = np.empty((len(indices), FEATURE_DIM), dtype=np.float32)
    for row, idx in enumerate(indices):
        if idx <= 0:
            raise ValueError("frame indices must be positive")
        digest = hashlib.blake2b(
            f"{game_id}\x00{idx}\x00{seed}".encode("utf-8"), digest_size=8
        ).digest()
        gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(int.from_bytes(digest, "little")))
        )
        rows[row] = gen.uniform(-1.0, 1.0, FEATURE_DIM).astype(np.float32)
    return FrameFeatureMatrix(game_id=game_id, frame_indices=indices, features=rows)
