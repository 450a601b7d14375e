"""Numba-compiled twins of the kernels in kernels_numpy.py.

Same signatures, same results up to float summation order.  Compiled
lazily per dtype; cache=True keeps compiled artifacts across runs.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def conv1d_fwd(x, w):
    B, C, L = x.shape
    O, _, K = w.shape
    lo = L - K + 1
    y = np.zeros((B, O, lo), dtype=x.dtype)
    for b in range(B):
        for o in range(O):
            for l in range(lo):
                acc = y[b, o, l]
                for c in range(C):
                    for k in range(K):
                        acc += x[b, c, l + k] * w[o, c, k]
                y[b, o, l] = acc
    return y


@njit(cache=True)
def conv1d_bwd_input(dy, w, L):
    B, O, lo = dy.shape
    _, C, K = w.shape
    dx = np.zeros((B, C, L), dtype=dy.dtype)
    for b in range(B):
        for o in range(O):
            for l in range(lo):
                g = dy[b, o, l]
                for c in range(C):
                    for k in range(K):
                        dx[b, c, l + k] += g * w[o, c, k]
    return dx


@njit(cache=True)
def conv1d_bwd_weight(x, dy, K):
    B, C, L = x.shape
    _, O, lo = dy.shape
    dw = np.zeros((O, C, K), dtype=x.dtype)
    for b in range(B):
        for o in range(O):
            for l in range(lo):
                g = dy[b, o, l]
                for c in range(C):
                    for k in range(K):
                        dw[o, c, k] += g * x[b, c, l + k]
    return dw


@njit(cache=True)
def maxpool1d_fwd(x, width, stride):
    B, C, L = x.shape
    lo = (L - width) // stride + 1
    y = np.empty((B, C, lo), dtype=x.dtype)
    arg = np.empty((B, C, lo), dtype=np.int64)
    for b in range(B):
        for c in range(C):
            for j in range(lo):
                start = j * stride
                best = x[b, c, start]
                best_pos = start
                for k in range(1, width):
                    v = x[b, c, start + k]
                    if v > best:
                        best = v
                        best_pos = start + k
                y[b, c, j] = best
                arg[b, c, j] = best_pos
    return y, arg


@njit(cache=True)
def maxpool1d_bwd(dy, arg, L):
    B, C, lo = dy.shape
    dx = np.zeros((B, C, L), dtype=dy.dtype)
    for b in range(B):
        for c in range(C):
            for j in range(lo):
                dx[b, c, arg[b, c, j]] += dy[b, c, j]
    return dx


@njit(cache=True)
def conv3d_fwd(x, w, st, sh, sw):
    B, C, T, H, W = x.shape
    O, _, kt, kh, kw = w.shape
    to = (T - kt) // st + 1
    ho = (H - kh) // sh + 1
    wo = (W - kw) // sw + 1
    y = np.zeros((B, O, to, ho, wo), dtype=x.dtype)
    for b in range(B):
        for o in range(O):
            for t in range(to):
                for i in range(ho):
                    for j in range(wo):
                        acc = y[b, o, t, i, j]
                        for c in range(C):
                            for a in range(kt):
                                for p in range(kh):
                                    for q in range(kw):
                                        acc += (
                                            x[b, c, t * st + a, i * sh + p, j * sw + q]
                                            * w[o, c, a, p, q]
                                        )
                        y[b, o, t, i, j] = acc
    return y


@njit(cache=True)
def conv3d_bwd_input(dy, w, T, H, W, st, sh, sw):
    B, O, to, ho, wo = dy.shape
    _, C, kt, kh, kw = w.shape
    dx = np.zeros((B, C, T, H, W), dtype=dy.dtype)
    for b in range(B):
        for o in range(O):
            for t in range(to):
                for i in range(ho):
                    for j in range(wo):
                        g = dy[b, o, t, i, j]
                        for c in range(C):
                            for a in range(kt):
                                for p in range(kh):
                                    for q in range(kw):
                                        dx[b, c, t * st + a, i * sh + p, j * sw + q] += (
                                            g * w[o, c, a, p, q]
                                        )
    return dx


@njit(cache=True)
def conv3d_bwd_weight(x, dy, kt, kh, kw, st, sh, sw):
    B, C, T, H, W = x.shape
    _, O, to, ho, wo = dy.shape
    dw = np.zeros((O, C, kt, kh, kw), dtype=x.dtype)
    for b in range(B):
        for o in range(O):
            for t in range(to):
                for i in range(ho):
                    for j in range(wo):
                        g = dy[b, o, t, i, j]
                        for c in range(C):
                            for a in range(kt):
                                for p in range(kh):
                                    for q in range(kw):
                                        dw[o, c, a, p, q] += (
                                            g * x[b, c, t * st + a, i * sh + p, j * sw + q]
                                        )
    return dw
