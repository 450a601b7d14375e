import numpy as np

from vgscore.text import (
    OOV_INDEX,
    PAD_INDEX,
    SUMMARY_LENGTH,
    build_vocab,
    clean_summary,
    encode_summary,
    load_vocab,
    save_vocab,
    tokenize,
)


def test_clean_summary_drops_non_ascii():
    assert clean_summary("café") == "caf"
    assert clean_summary("plain text") == "plain text"
    assert clean_summary("日本語") == ""


def test_clean_summary_keeps_ascii_whitespace():
    assert clean_summary("a\tb\nc") == "a\tb\nc"
    # non-whitespace control characters and unicode whitespace both go
    assert clean_summary("a\x00b c") == "abc"


def test_tokenize():
    assert tokenize("Mario's world!") == ["mario", "s", "world"]
    assert tokenize("") == []
    assert tokenize("A a A") == ["a", "a", "a"]
    assert tokenize("x2-y3") == ["x2", "y3"]


def test_build_vocab_first_seen_order():
    vocab = build_vocab([["a", "b"], ["b", "c"]])
    assert vocab.word_to_index == {"a": 2, "b": 3, "c": 4}
    assert len(vocab) == 5


def test_build_vocab_empty_and_deterministic():
    assert build_vocab([]).word_to_index == {}
    assert len(build_vocab([])) == 2
    v1 = build_vocab([["x"]])
    v2 = build_vocab([["x"]])
    assert v1.word_to_index == v2.word_to_index


def test_encode_pads_to_fixed_length():
    vocab = build_vocab([["a", "b", "c"]])
    enc = encode_summary(["a", "b", "c"], vocab)
    assert enc.indices.shape == (SUMMARY_LENGTH,)
    assert list(enc.indices[:3]) == [2, 3, 4]
    assert (enc.indices[3:] == PAD_INDEX).all()


def test_encode_trims_long_input():
    vocab = build_vocab([[f"w{i}" for i in range(150)]])
    enc = encode_summary([f"w{i}" for i in range(150)], vocab)
    assert enc.indices.shape == (SUMMARY_LENGTH,)
    assert list(enc.indices) == list(range(2, 102))
    assert PAD_INDEX not in enc.indices


def test_encode_unknown_token_is_oov():
    vocab = build_vocab([["known"]])
    enc = encode_summary(["known", "mystery"], vocab)
    assert enc.indices[0] == 2
    assert enc.indices[1] == OOV_INDEX


def test_pad_only_as_suffix():
    vocab = build_vocab([["a", "b"]])
    for tokens in (["a"], ["a", "b"], [], ["zzz", "a"]):
        idx = encode_summary(tokens, vocab).indices
        in_pad = False
        for v in idx:
            if v == PAD_INDEX:
                in_pad = True
            else:
                assert not in_pad


def test_pipeline_always_length_100():
    vocab = build_vocab([tokenize(clean_summary("Some words here"))])
    for raw in ("", "日本語", "a " * 500, "Mixed: café text!"):
        enc = encode_summary(tokenize(clean_summary(raw)), vocab)
        assert enc.indices.shape == (SUMMARY_LENGTH,)


def test_vocab_file_roundtrip(tmp_path):
    vocab = build_vocab([["alpha", "beta"], ["gamma"]])
    path = tmp_path / "vocab.tsv"
    save_vocab(vocab, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "<PAD>\t0" and lines[1] == "<OOV>\t1"
    loaded = load_vocab(path)
    assert loaded.word_to_index == vocab.word_to_index


def test_encoding_deterministic():
    vocab = build_vocab([["a", "b"]])
    e1 = encode_summary(["a", "b", "a"], vocab)
    e2 = encode_summary(["a", "b", "a"], vocab)
    assert np.array_equal(e1.indices, e2.indices)
