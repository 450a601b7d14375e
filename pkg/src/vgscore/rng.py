"""Seeded random substreams.

All randomness in the package flows from one integer seed through named
substreams ("folds", "init/video", "dropout", ...), so any component can
be reproduced in isolation.  Stream derivation hashes the name with
blake2b, which is stable across platforms and Python versions.
"""

import hashlib

import numpy as np


def _name_key(name: str) -> int:
    digest = hashlib.blake2b(name.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def substream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for (seed, name), identical on every call."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, _name_key(name)])
    return np.random.Generator(np.random.PCG64(ss))
