"""Hot kernels: compiled extension when built, pure Python otherwise.

Set ``COAMOEBA_LAB_PURE=1`` to force the pure-Python backend.
"""

import os

from . import _collapse_py

if os.environ.get("COAMOEBA_LAB_PURE", "") not in ("", "0"):
    collapse = _collapse_py.collapse
    BACKEND = "python"
else:
    try:
        from ._collapse import collapse  # noqa: F401
        BACKEND = "cython"
    except ImportError:
        collapse = _collapse_py.collapse
        BACKEND = "python"

__all__ = ["collapse", "BACKEND"]
