"""Select between numba-compiled kernels and the pure numpy fallbacks.

Set ``PIPPHASE_DISABLE_NUMBA=1`` before import to force the numpy path.
Both paths are always importable so they can be benchmarked side by side.
"""

import os

_DISABLED = os.environ.get("PIPPHASE_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity decorator otherwise."""
    if not HAVE_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn
    return numba.njit(*args, **kwargs)


def thread_count():
    """Worker threads for trial-level parallelism (``PIPPHASE_THREADS``)."""
    raw = os.environ.get("PIPPHASE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1
