"""Pure-numpy convolution/pooling kernels.

Reference implementations of the hot inner loops; the numba twins in
kernels_numba.py compute the same functions.  Loops run only over the
small kernel extent, everything else is vectorized.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def conv1d_fwd(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Valid cross-correlation: x (B,C,L), w (O,C,K) -> y (B,O,L-K+1)."""
    B, C, L = x.shape
    O, _, K = w.shape
    lo = L - K + 1
    y = np.zeros((B, O, lo), dtype=x.dtype)
    for k in range(K):
        y += np.einsum("bcl,oc->bol", x[:, :, k:k + lo], w[:, :, k])
    return y


def conv1d_bwd_input(dy: np.ndarray, w: np.ndarray, L: int) -> np.ndarray:
    B, O, lo = dy.shape
    _, C, K = w.shape
    dx = np.zeros((B, C, L), dtype=dy.dtype)
    for k in range(K):
        dx[:, :, k:k + lo] += np.einsum("bol,oc->bcl", dy, w[:, :, k])
    return dx


def conv1d_bwd_weight(x: np.ndarray, dy: np.ndarray, K: int) -> np.ndarray:
    B, C, L = x.shape
    _, O, lo = dy.shape
    dw = np.zeros((O, C, K), dtype=x.dtype)
    for k in range(K):
        dw[:, :, k] = np.einsum("bol,bcl->oc", dy, x[:, :, k:k + lo])
    return dw


def maxpool1d_fwd(x: np.ndarray, width: int, stride: int):
    """Returns (y, arg) with arg holding winning positions along L."""
    windows = sliding_window_view(x, width, axis=2)[:, :, ::stride]
    arg_in_window = windows.argmax(axis=-1)
    y = np.take_along_axis(windows, arg_in_window[..., None], axis=-1)[..., 0]
    lo = windows.shape[2]
    offsets = (np.arange(lo) * stride).reshape(1, 1, lo)
    return np.ascontiguousarray(y), arg_in_window + offsets


def maxpool1d_bwd(dy: np.ndarray, arg: np.ndarray, L: int) -> np.ndarray:
    B, C, lo = dy.shape
    dx = np.zeros((B, C, L), dtype=dy.dtype)
    flat_dx = dx.reshape(B * C, L)
    rows = np.repeat(np.arange(B * C), lo)
    np.add.at(flat_dx, (rows, arg.reshape(-1)), dy.reshape(-1))
    return dx


def conv3d_fwd(x: np.ndarray, w: np.ndarray, st: int, sh: int, sw: int) -> np.ndarray:
    """Valid strided cross-correlation: x (B,C,T,H,W), w (O,C,kt,kh,kw)."""
    B, C, T, H, W = x.shape
    O, _, kt, kh, kw = w.shape
    to = (T - kt) // st + 1
    ho = (H - kh) // sh + 1
    wo = (W - kw) // sw + 1
    y = np.zeros((B, O, to, ho, wo), dtype=x.dtype)
    for a in range(kt):
        for b in range(kh):
            for c in range(kw):
                xs = x[:, :, a:a + st * to:st, b:b + sh * ho:sh, c:c + sw * wo:sw]
                y += np.einsum("bcthw,oc->bothw", xs, w[:, :, a, b, c])
    return y


def conv3d_bwd_input(dy: np.ndarray, w: np.ndarray, T: int, H: int, W: int,
                     st: int, sh: int, sw: int) -> np.ndarray:
    B, O, to, ho, wo = dy.shape
    _, C, kt, kh, kw = w.shape
    dx = np.zeros((B, C, T, H, W), dtype=dy.dtype)
    for a in range(kt):
        for b in range(kh):
            for c in range(kw):
                dx[:, :, a:a + st * to:st, b:b + sh * ho:sh, c:c + sw * wo:sw] += \
                    np.einsum("bothw,oc->bcthw", dy, w[:, :, a, b, c])
    return dx


def conv3d_bwd_weight(x: np.ndarray, dy: np.ndarray, kt: int, kh: int, kw: int,
                      st: int, sh: int, sw: int) -> np.ndarray:
    B, C, T, H, W = x.shape
    _, O, to, ho, wo = dy.shape
    dw = np.zeros((O, C, kt, kh, kw), dtype=x.dtype)
    for a in range(kt):
        for b in range(kh):
            for c in range(kw):
                xs = x[:, :, a:a + st * to:st, b:b + sh * ho:sh, c:c + sw * wo:sw]
                dw[:, :, a, b, c] = np.einsum("bothw,bcthw->oc", dy, xs)
    return dw
