"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly, unless the environment
variable ``CKPTMERGE_DISABLE_NUMBA`` is set to a truthy value, in which case
the numpy implementations are bound instead. Both paths share signatures, so
``get_backend("numpy")`` / ``get_backend("numba")`` can be used side by side
in tests and benchmarks.
"""

import importlib
import os

from . import _numpy

_TRUTHY = {"1", "true", "yes", "on"}
KERNEL_NAMES = ("lerp_f32", "axpy_f64", "sq_dist", "se_cross", "gp_predict", "acq_grid")


def numba_available():
    try:
        importlib.import_module("numba")
    except ImportError:
        return False
    return True


def get_backend(name):
    if name == "numpy":
        return _numpy
    if name == "numba":
        return importlib.import_module("._numba", __name__)
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    if os.environ.get("CKPTMERGE_DISABLE_NUMBA", "").strip().lower() in _TRUTHY:
        return "numpy"
    return "numba" if numba_available() else "numpy"


BACKEND = _select()
_impl = get_backend(BACKEND)

lerp_f32 = _impl.lerp_f32
axpy_f64 = _impl.axpy_f64
sq_dist = _impl.sq_dist
se_cross = _impl.se_cross
gp_predict = _impl.gp_predict
acq_grid = _impl.acq_grid

__all__ = ["BACKEND", "KERNEL_NAMES", "get_backend", "numba_available", *KERNEL_NAMES]
