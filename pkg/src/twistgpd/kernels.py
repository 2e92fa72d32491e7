"""Kernel selection: the compiled extension when it was built, NumPy otherwise.

Set ``TWISTGPD_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("TWISTGPD_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

twisted_convolution = _impl.twisted_convolution
coo_power_iteration = _impl.coo_power_iteration
symbol_grid_max = _impl.symbol_grid_max

__all__ = ["BACKEND", "twisted_convolution", "coo_power_iteration", "symbol_grid_max"]
