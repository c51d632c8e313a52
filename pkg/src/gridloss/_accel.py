"""Backend switch for the compiled kernels.

Set ``GRIDLOSS_NUMBA=0`` to force the pure-numpy path. Thread count for
parallel kernels comes from ``GRIDLOSS_THREADS`` (or :func:`set_threads`).
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_FALSY = {"0", "false", "no", "off"}

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("GRIDLOSS_NUMBA", "1").strip().lower() not in _FALSY


def njit(*args, **kwargs):
    """``numba.njit`` with cache on, or a no-op decorator without numba."""
    kwargs.setdefault("cache", True)
    if numba is None:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


if numba is not None:
    prange = numba.prange
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the bundled TBB is often too old; skip straight to the others
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
else:  # pragma: no cover
    prange = range


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def set_threads(n: int | None) -> None:
    """Set the numba worker count; ignored on the numpy path."""
    if n is None or numba is None:
        return
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)


def threads_from_env() -> int | None:
    raw = os.environ.get("GRIDLOSS_THREADS")
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        return None
