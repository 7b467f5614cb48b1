"""Switch between numba-compiled kernels and the plain numpy path.

Set ``MARKOFF_NO_NUMBA=1`` to run every kernel through its numpy/Python
fallback. The flag is read once, at import time.
"""

from __future__ import annotations

import functools
import os

_flag = os.environ.get("MARKOFF_NO_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _disabled


def njit(fn):
    """Compile ``fn`` in nopython mode, or return it untouched.

    The original function is always reachable as ``.py_func`` so tests and
    the benchmark can run both paths in one process.
    """
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)

    @functools.wraps(fn)
    def wrapper(*args):
        return fn(*args)

    wrapper.py_func = fn
    return wrapper


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
