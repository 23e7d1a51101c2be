"""JIT switch for the numeric kernels.

Kernels in :mod:`nhdyn._kernels` are written in the numpy subset that numba
understands.  They are compiled with ``numba.njit`` unless the environment
variable ``NHDYN_DISABLE_NUMBA`` is set to a truthy value (or numba is not
importable), in which case the very same functions run as plain numpy code.

The flag is read once, at import time.
"""

import functools
import os

_FALSY = {"", "0", "false", "no", "off"}


def _numba_requested():
    return os.environ.get("NHDYN_DISABLE_NUMBA", "").strip().lower() in _FALSY


try:
    import numba as _nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    _nb = None

USE_NUMBA = _nb is not None and _numba_requested()


def njit(func=None, **options):
    """``numba.njit`` with package defaults, or the identity when disabled.

    The undecorated function stays reachable as ``.py_func`` in both modes so
    benchmarks can time the two paths side by side.
    """
    if func is None:
        return functools.partial(njit, **options)
    if not USE_NUMBA:
        func.py_func = func
        return func
    opts = {"cache": True, "nogil": True}
    opts.update(options)
    return _nb.njit(**opts)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
