"""Numba switch.

Set STRESSFREE_NO_NUMBA=1 to run every kernel through its numpy twin.
The flag is read once, at import time.
"""
import os

DISABLED = os.environ.get("STRESSFREE_NO_NUMBA", "").strip() not in ("", "0")

try:
    if DISABLED:
        raise ImportError("numba disabled by STRESSFREE_NO_NUMBA")
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False


def njit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
