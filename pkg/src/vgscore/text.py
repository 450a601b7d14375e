"""Summary cleaning, tokenization, vocabulary, and fixed-length encoding.

Summaries are reduced to ASCII, split into lowercase alphanumeric tokens,
mapped through a word-index vocabulary, and trimmed/zero-padded to exactly
100 indices.  Index 0 is reserved for padding and index 1 for
out-of-vocabulary words; real words start at 2 in first-seen corpus order.
"""

import re
from dataclasses import dataclass

import numpy as np

PAD_INDEX = 0
OOV_INDEX = 1
SUMMARY_LENGTH = 100

_PAD_TOKEN = "<PAD>"
_OOV_TOKEN = "<OOV>"

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def clean_summary(text: str) -> str:
    """Delete (not transliterate) everything outside printable ASCII.

    ASCII whitespace is kept; non-ASCII code points and non-whitespace
    control characters are dropped.
    """
    return "".join(
        c for c in text if ("\x20" <= c <= "\x7e") or c in "\t\n\r\v\f"
    )


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on maximal runs of non-alphanumerics."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Vocab:
    """Injective word-to-index map; no word maps to the PAD or OOV slots."""

    word_to_index: dict[str, int]

    def __len__(self) -> int:
        # Reserved slots count toward the index space.
        return len(self.word_to_index) + 2

    def index_of(self, word: str) -> int:
        return self.word_to_index.get(word, OOV_INDEX)

    def words_in_index_order(self) -> list[str]:
        return sorted(self.word_to_index, key=self.word_to_index.__getitem__)


def build_vocab(corpus: list[list[str]]) -> Vocab:
    """Index every distinct token, first-seen order, starting at 2."""
    word_to_index: dict[str, int] = {}
    next_index = 2
    for tokens in corpus:
        for token in tokens:
            if token not in word_to_index:
                word_to_index[token] = next_index
                next_index += 1
    return Vocab(word_to_index=word_to_index)


@dataclass(frozen=True)
class EncodedSummary:
    """Exactly SUMMARY_LENGTH vocabulary indices, PAD only as a suffix."""

    indices: np.ndarray

    def __post_init__(self):
        assert self.indices.shape == (SUMMARY_LENGTH,)


def encode_tokens(tokens: list[str], vocab: Vocab, length: int) -> np.ndarray:
    """First `length` token indices (unknown words become OOV), zero-padded."""
    indices = np.zeros(length, dtype=np.int64)
    for pos, token in enumerate(tokens[:length]):
        indices[pos] = vocab.index_of(token)
    return indices


def encode_summary(tokens: list[str], vocab: Vocab) -> EncodedSummary:
    """Standard-length encoding used throughout the pipeline."""
    return EncodedSummary(indices=encode_tokens(tokens, vocab, SUMMARY_LENGTH))


def save_vocab(vocab: Vocab, path) -> None:
    """Line-oriented "word<TAB>index" file, reserved slots first."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{_PAD_TOKEN}\t{PAD_INDEX}\n")
        fh.write(f"{_OOV_TOKEN}\t{OOV_INDEX}\n")
        for word in vocab.words_in_index_order():
            fh.write(f"{word}\t{vocab.word_to_index[word]}\n")


def load_vocab(path) -> Vocab:
    word_to_index: dict[str, int] = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            word, _, index = line.partition("\t")
            if word in (_PAD_TOKEN, _OOV_TOKEN):
                continue
            word_to_index[word] = int(index)
    return Vocab(word_to_index=word_to_index)
