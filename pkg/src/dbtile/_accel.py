"""Numba switch shared by the hot kernels.

Set ``DBTILE_DISABLE_NUMBA=1`` to run every kernel on its pure numpy/python
path. Kernels that have a vectorized numpy twin pick it at import time.
"""

import os

_flag = os.environ.get("DBTILE_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag in ("1", "true", "yes", "on")

try:
    if _disabled:
        raise ImportError("numba disabled by DBTILE_DISABLE_NUMBA")
    import numba

    HAS_NUMBA = True
except ImportError:
    numba = None
    HAS_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise a no-op decorator."""
    if HAS_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(fn):
        return fn

    return wrap


def py_func(fn):
    """The undecorated python body of a kernel (works with or without numba)."""
    return getattr(fn, "py_func", fn)
