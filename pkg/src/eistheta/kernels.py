"""Backend selection for the hot loops: compiled when available, pure Python otherwise.

Set ``EISTHETA_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("EISTHETA_PURE_PYTHON") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

crossing_candidates = _impl.crossing_candidates

__all__ = ["BACKEND", "crossing_candidates"]
