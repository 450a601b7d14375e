"""Compare the numba kernels against the pure-numpy fallback.

Runs every hot kernel at training-realistic shapes under both backends
and prints per-call times plus the speedup.  Invoke from the repository
root:

    python3 benchmarks/bench_kernels.py [--repeats 20]

Backend modules are imported directly, so the VGSCORE_NUMBA environment
variable does not matter here.
"""

import argparse
import time

import numpy as np

from vgscore.nn import kernels_numpy

try:
    from vgscore.nn import kernels_numba
except ImportError:
    kernels_numba = None


def _time(fn, args, repeats):
    fn(*args)  # warm up (JIT compile / cache)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    rng = np.random.default_rng(0)
    f32 = lambda *shape: rng.standard_normal(shape).astype(np.float32)

    # text branch: batch of 100-token summaries, 128->256 channels, kernel 3
    x1 = f32(32, 128, 100)
    w1 = f32(256, 128, 3)
    y1 = kernels_numpy.conv1d_fwd(x1, w1)
    g1 = f32(*y1.shape)
    yield "conv1d_fwd (32,128,100)x(256,128,3)", "conv1d_fwd", (x1, w1)
    yield "conv1d_bwd_input", "conv1d_bwd_input", (g1, w1, x1.shape[2])
    yield "conv1d_bwd_weight", "conv1d_bwd_weight", (x1, g1, w1.shape[2])

    p1 = f32(32, 256, 98)
    yp, argmax = kernels_numpy.maxpool1d_fwd(p1, 2, 2)
    gp = f32(*yp.shape)
    yield "maxpool1d_fwd (32,256,98)", "maxpool1d_fwd", (p1, 2, 2)
    yield "maxpool1d_bwd", "maxpool1d_bwd", (gp, argmax, p1.shape[2])

    # video branch: clip of 16 frames at 64x64x3, 16 output channels
    x3 = f32(4, 3, 16, 64, 64)
    w3 = f32(16, 3, 3, 3, 3)
    st, sh, sw = 1, 2, 2
    y3 = kernels_numpy.conv3d_fwd(x3, w3, st, sh, sw)
    g3 = f32(*y3.shape)
    yield "conv3d_fwd (4,3,16,64,64)x(16,3,3,3,3)", "conv3d_fwd", (x3, w3, st, sh, sw)
    yield "conv3d_bwd_input", "conv3d_bwd_input", (g3, w3, *x3.shape[2:], st, sh, sw)
    yield "conv3d_bwd_weight", "conv3d_bwd_weight", (x3, g3, *w3.shape[2:], st, sh, sw)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20,
                        help="timed repetitions per kernel; best time wins (default 20)")
    args = parser.parse_args()

    if kernels_numba is None:
        print("numba unavailable; nothing to compare")
        return

    header = f"{'kernel':<44} {'numpy':>10} {'numba':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, name, call_args in cases():
        t_np = _time(getattr(kernels_numpy, name), call_args, args.repeats)
        t_nb = _time(getattr(kernels_numba, name), call_args, args.repeats)
        print(f"{label:<44} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms "
              f"{t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
