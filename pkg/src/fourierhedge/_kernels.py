"""Selects the compiled kernels when built, else the numpy fallback.

Set ``FOURIERHEDGE_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("FOURIERHEDGE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _native as _impl  # type: ignore[no-redef]
        BACKEND = "native"
    except ImportError:
        pass

j0_double_sum = _impl.j0_double_sum
hedge_table = _impl.hedge_table
hedge_atoms = _impl.hedge_atoms
