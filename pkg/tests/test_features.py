import struct

import numpy as np
import pytest

from vgscore.errors import CorruptFeatureFile, DimensionMismatch, UnsupportedFormat
from vgscore.features import (
    FEATURE_DIM,
    FrameFeatureMatrix,
    read_feature_file,
    synth_features,
    write_feature_file,
)


def small_matrix(game_id="game-1", m=3, seed=0):
    gen = np.random.default_rng(seed)
    return FrameFeatureMatrix(
        game_id=game_id,
        frame_indices=tuple(range(50, 50 + m)),
        features=gen.normal(size=(m, FEATURE_DIM)).astype(np.float32),
    )


def test_roundtrip_identity(tmp_path):
    matrix = small_matrix()
    path = tmp_path / "g.vgdf"
    write_feature_file(matrix, path)
    back = read_feature_file(path)
    assert back.game_id == matrix.game_id
    assert back.frame_indices == matrix.frame_indices
    assert back.features.dtype == np.float32
    assert np.array_equal(back.features, matrix.features)


def test_file_size_is_exact(tmp_path):
    m = 50
    matrix = FrameFeatureMatrix(
        game_id="fifty",
        frame_indices=tuple(range(1, m + 1)),
        features=np.zeros((m, FEATURE_DIM), dtype=np.float32),
    )
    path = tmp_path / "g.vgdf"
    write_feature_file(matrix, path)
    header = 20 + len(b"fifty")
    assert path.stat().st_size == header + 4 * m + 4 * m * FEATURE_DIM


def test_rejects_wrong_width_matrix(tmp_path):
    bad = FrameFeatureMatrix(
        game_id="g", frame_indices=(1,), features=np.zeros((1, 1024), dtype=np.float32)
    )
    with pytest.raises(DimensionMismatch):
        write_feature_file(bad, tmp_path / "g.vgdf")


def test_rejects_wrong_width_file(tmp_path):
    path = tmp_path / "g.vgdf"
    payload = np.zeros((1, 1024), dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIIII", b"VGDF", 1, 1, 1024, 1))
        fh.write(b"g")
        fh.write(struct.pack("<I", 1))
        fh.write(payload)
    with pytest.raises(DimensionMismatch):
        read_feature_file(path)


def test_rejects_bad_magic_and_version(tmp_path):
    matrix = small_matrix(m=1)
    path = tmp_path / "g.vgdf"
    write_feature_file(matrix, path)
    raw = bytearray(path.read_bytes())

    bad_magic = tmp_path / "bad_magic.vgdf"
    bad_magic.write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(UnsupportedFormat):
        read_feature_file(bad_magic)

    bad_version = tmp_path / "bad_version.vgdf"
    bad_version.write_bytes(raw[:4] + struct.pack("<I", 2) + raw[8:])
    with pytest.raises(UnsupportedFormat):
        read_feature_file(bad_version)


def test_rejects_truncated_and_trailing(tmp_path):
    matrix = small_matrix(m=2)
    path = tmp_path / "g.vgdf"
    write_feature_file(matrix, path)
    raw = path.read_bytes()

    truncated = tmp_path / "trunc.vgdf"
    truncated.write_bytes(raw[:-5])
    with pytest.raises(CorruptFeatureFile):
        read_feature_file(truncated)

    padded = tmp_path / "padded.vgdf"
    padded.write_bytes(raw + b"\x00")
    with pytest.raises(CorruptFeatureFile):
        read_feature_file(padded)


def test_matrix_invariants():
    with pytest.raises(DimensionMismatch):
        FrameFeatureMatrix(
            game_id="g", frame_indices=(1, 2),
            features=np.zeros((3, FEATURE_DIM), dtype=np.float32),
        )
    with pytest.raises(ValueError):
        FrameFeatureMatrix(
            game_id="g", frame_indices=(2, 1),
            features=np.zeros((2, FEATURE_DIM), dtype=np.float32),
        )
    with pytest.raises(ValueError):
        FrameFeatureMatrix(
            game_id="g", frame_indices=(1,),
            features=np.full((1, FEATURE_DIM), np.nan, dtype=np.float32),
        )


def test_synth_deterministic():
    a = synth_features("mygame", (50, 51, 52), seed=7)
    b = synth_features("mygame", (50, 51, 52), seed=7)
    assert np.array_equal(a.features, b.features)
    assert a.features.shape == (3, FEATURE_DIM)
    assert a.features.dtype == np.float32


def test_synth_depends_on_seed_and_id():
    base = synth_features("mygame", (50,), seed=7)
    other_seed = synth_features("mygame", (50,), seed=8)
    other_id = synth_features("yourgame", (50,), seed=7)
    assert not np.array_equal(base.features, other_seed.features)
    assert not np.array_equal(base.features, other_id.features)


def test_synth_range_and_empty():
    m = synth_features("g", range(1, 40), seed=0)
    assert (m.features >= -1).all() and (m.features <= 1).all()
    empty = synth_features("g", (), seed=0)
    assert empty.features.shape == (0, FEATURE_DIM)


def test_synth_rejects_bad_index():
    with pytest.raises(ValueError):
        synth_features("g", (0,), seed=0)
