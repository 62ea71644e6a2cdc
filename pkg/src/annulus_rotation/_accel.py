"""JIT switch.

Hot kernels are compiled with numba when it is importable and the environment
variable ``ANNULUS_ROTATION_JIT`` is not set to a false value ("0", "false",
"no", "off").  Otherwise every kernel dispatches to its vectorized numpy twin.
"""
import os

_FALSE = {"0", "false", "no", "off"}

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("ANNULUS_ROTATION_JIT", "1").strip().lower() not in _FALSE


def njit(func):
    """Compile ``func`` in nopython mode, or return a stub when numba is missing."""
    if not HAVE_NUMBA:
        def _missing(*args, **kwargs):
            raise RuntimeError("numba is not available")
        _missing.__name__ = func.__name__
        _missing.py_func = func
        return _missing
    return numba.njit(cache=True, nogil=True)(func)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
