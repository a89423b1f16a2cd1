"""Kernel backend selection: compiled extension when available, numpy otherwise.

Set ERGOKIT_BACKEND=python (or =compiled) to force a choice; forcing the
compiled backend raises if the extension is missing.
"""

from __future__ import annotations

import os

_forced = os.environ.get("ERGOKIT_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _kernels_py as kernels
elif _forced in ("compiled", "c"):
    from . import _core as kernels  # type: ignore[no-redef]
else:
    try:
        from . import _core as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as kernels


def backend_name() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return kernels.BACKEND
