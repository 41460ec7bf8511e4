"""Optional numba acceleration.

Set ``LIEADAPT_DISABLE_NUMBA=1`` to run every kernel as plain numpy.
"""
import os

_FLAG = os.environ.get("LIEADAPT_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def kernel(fn):
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn
