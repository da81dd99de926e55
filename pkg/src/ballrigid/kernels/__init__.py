"""Backend selection for the hot numeric kernels.

The numba-compiled path is used by default when numba imports cleanly.
Set ``BALLRIGID_NUMBA=0`` (or ``false``/``no``) to force the pure-numpy path;
both implement identical arithmetic and are compared by the test suite and by
``benchmarks/bench_kernels.py``.
"""
from __future__ import annotations

import os

_FLAG = os.environ.get("BALLRIGID_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "false", "no")

if _WANT_NUMBA:
    try:
        from . import _numba_impl as _impl

        _BACKEND = "numba"
    except ImportError:
        from . import _numpy_impl as _impl

        _BACKEND = "numpy"
else:
    from . import _numpy_impl as _impl

    _BACKEND = "numpy"

max_dist_to_centers = _impl.max_dist_to_centers
max_dist_batch = _impl.max_dist_batch
min_max_dist_on_segment = _impl.min_max_dist_on_segment
directed_max_min = _impl.directed_max_min


def backend() -> str:
    """Name of the active kernel backend ("numba" or "numpy")."""
    return _BACKEND


__all__ = [
    "backend",
    "max_dist_to_centers",
    "max_dist_batch",
    "min_max_dist_on_segment",
    "directed_max_min",
]
