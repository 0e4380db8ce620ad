"""Kernel backend selection.

Hot numeric loops ship in two versions: numba @njit kernels and pure-numpy
twins.  The active backend is chosen once at import time:

  * LAB_NO_NUMBA=1 in the environment forces the numpy path;
  * otherwise numba is used when importable, numpy when not.

Both paths implement identical summation orders at the algorithm level, so
reported values agree to roundoff (~1e-13 relative); fixtures and
tolerances absorb the difference.  The active backend is part of a run's
config digest, so determinism guarantees are per-backend.
"""
import os

_FORCED_OFF = os.environ.get("LAB_NO_NUMBA", "").strip() in ("1", "true", "yes")

if not _FORCED_OFF:
    try:
        import numba  # noqa: F401
        HAS_NUMBA = True
    except ImportError:  # pragma: no cover
        HAS_NUMBA = False
else:
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
