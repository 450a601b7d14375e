"""Kernel backend selection.

The numba-compiled kernels are the default; set VGSCORE_NUMBA=0 to force
the pure-numpy fallback (useful where numba is unavailable or while
debugging kernels).  Selection happens once at import.
"""

import os

from . import kernels_numpy

_want_numba = os.environ.get("VGSCORE_NUMBA", "1") != "0"

if _want_numba:
    try:
        from . import kernels_numba as _impl
        BACKEND = "numba"
    except ImportError:
        _impl = kernels_numpy
        BACKEND = "numpy"
else:
    _impl = kernels_numpy
    BACKEND = "numpy"

conv1d_fwd = _impl.conv1d_fwd
conv1d_bwd_input = _impl.conv1d_bwd_input
conv1d_bwd_weight = _impl.conv1d_bwd_weight
maxpool1d_fwd = _impl.maxpool1d_fwd
maxpool1d_bwd = _impl.maxpool1d_bwd
conv3d_fwd = _impl.conv3d_fwd
conv3d_bwd_input = _impl.conv3d_bwd_input
conv3d_bwd_weight = _impl.conv3d_bwd_weight


def active_backend() -> str:
    return BACKEND
