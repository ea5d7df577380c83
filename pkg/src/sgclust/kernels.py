"""Kernel dispatch: the compiled extension when importable, else pure Python.

Set ``SGCLUST_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("SGCLUST_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

subset_table = _impl.subset_table
feasible_masks = _impl.feasible_masks
