"""Backend selection for the hot kernels.

Every kernel ships twice: a loop version compiled with numba and a
vectorized pure-numpy version. ``OBR_BACKEND=numpy`` forces the numpy path;
it is also used automatically when numba cannot be imported. Both paths
must produce identical results, which the test suite checks.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
BACKEND = os.environ.get("OBR_BACKEND", "numba" if HAVE_NUMBA else "numpy").lower()
if BACKEND not in ("numba", "numpy"):
    raise ImportError(f"OBR_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")
if BACKEND == "numba" and not HAVE_NUMBA:
    BACKEND = "numpy"


def njit(func):
    """Compile ``func`` in nopython mode, or return None without numba."""
    if not HAVE_NUMBA:
        return None
    return numba.njit(cache=True, nogil=True)(func)


def pick(jitted, fallback):
    """Return the kernel for the active backend."""
    if BACKEND == "numba" and jitted is not None:
        return jitted
    return fallback
