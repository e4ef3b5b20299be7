"""Kernel backend selection.

The compiled Cython extension is preferred; the pure NumPy/SciPy fallback is
used when the extension is unavailable or KGREC_PURE_PYTHON=1 is set.
"""

import os

from . import pure

if os.environ.get("KGREC_PURE_PYTHON") == "1":
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _compiled as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

pagerank_power = _impl.pagerank_power
propagate_labels = _impl.propagate_labels

__all__ = ["BACKEND", "pagerank_power", "propagate_labels", "pure"]
