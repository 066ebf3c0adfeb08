"""Kernel backend selection.

Hot loops (point-to-triangle scans, the nearest-element cascade, nodal force
assembly) exist twice: a numba-jitted implementation and a pure-numpy one
with identical semantics.  The numba lane is used when numba imports cleanly
and ``HISTREMESH_NO_NUMBA`` is not set; the numpy lane is the fallback and
the reference the jitted lane is tested against.

Set ``HISTREMESH_NO_NUMBA=1`` before import to force the numpy lane.
"""

import os

_DISABLED = os.environ.get("HISTREMESH_NO_NUMBA", "0") == "1"

if not _DISABLED:
    try:
        from . import _kernels_numba as kernels

        HAS_NUMBA = True
    except ImportError:  # pragma: no cover - depends on install
        from . import _kernels_numpy as kernels

        HAS_NUMBA = False
else:
    from . import _kernels_numpy as kernels

    HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA else "numpy"

__all__ = ["kernels", "HAS_NUMBA", "BACKEND"]
