"""Select the compiled series kernels when built, else the Python fallback.

Set ``WACHFORGE_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
series_mul = _kernels_py.series_mul
series_compose = _kernels_py.series_compose

if not os.environ.get("WACHFORGE_PURE_PYTHON"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        series_mul = _ckernels.series_mul
        series_compose = _ckernels.series_compose
        BACKEND = "cython"
