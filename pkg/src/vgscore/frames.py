"""Trailer frame bookkeeping and burst-based frame selection.

Trailers are decoded at 4 fps and capped at 3 minutes, giving at most 720
frames.  Selection then takes a 10-frame burst every 150 frames, skipping
the first 50 (trailers usually open with developer titles and rating
cards).  Frame indices are 1-based throughout this module; conversion to
0-based arrays happens at the decode boundary.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FrameSelectionParams:
    start_offset: int = 50
    window: int = 10
    stride: int = 150
    fps: int = 4
    max_duration: int = 180

    def __post_init__(self):
        for name in ("start_offset", "window", "stride", "fps", "max_duration"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.window > self.stride:
            raise ValueError("window must not exceed stride")

    @property
    def max_frames(self) -> int:
        return self.fps * self.max_duration


DEFAULT_PARAMS = FrameSelectionParams()


@dataclass(frozen=True)
class FrameSelection:
    """Selected 1-based frame indices; fallback marks even-spaced sampling."""

    indices: tuple[int, ...]
    fallback: bool = False


def clamp_frame_count(raw_frames: int, params: FrameSelectionParams = DEFAULT_PARAMS) -> int:
    """Cap the decoded frame count at fps * max_duration."""
    if raw_frames < 0:
        raise ValueError("frame count must be >= 0")
    return min(raw_frames, params.max_frames)


def _fallback_indices(n: int, params: FrameSelectionParams) -> tuple[int, ...]:
    k = min(params.window, n)
    if k == 0:
        return ()
    spaced = np.linspace(1, n, num=k)
    return tuple(int(i) for i in np.unique(np.rint(spaced).astype(np.int64)))


def select_frames(n: int, params: FrameSelectionParams = DEFAULT_PARAMS) -> FrameSelection:
    """Burst selection over frames 1..n.

    Starting at start_offset, take up to `window` consecutive frames, then
    jump `stride` forward, while the burst start stays strictly below n.
    Short trailers where that yields nothing fall back to up to `window`
    evenly spaced indices over [1, n], flagged.
    """
    if n < 0:
        raise ValueError("frame count must be >= 0")
    indices: list[int] = []
    f_start = params.start_offset
    while f_start < n:
        for j in range(params.window):
            if f_start + j <= n:
                indices.append(f_start + j)
            else:
                break
        f_start += params.stride
    if not indices and n > 0:
        return FrameSelection(indices=_fallback_indices(n, params), fallback=True)
    return FrameSelection(indices=tuple(indices), fallback=False)
