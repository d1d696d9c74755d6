"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python twin is
the fallback. Set RIMU_OPT_KERNEL to ``compiled`` or ``python`` to force one
(``compiled`` raises if the extension is unavailable).
"""

from __future__ import annotations

import os

_requested = os.environ.get("RIMU_OPT_KERNEL", "auto").strip().lower()

if _requested in ("", "auto"):
    try:
        from rimu_opt import _kernels as kernels  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from rimu_opt import _kernels_py as kernels

        BACKEND = "python"
elif _requested == "compiled":
    from rimu_opt import _kernels as kernels  # type: ignore[attr-defined]

    BACKEND = "compiled"
elif _requested == "python":
    from rimu_opt import _kernels_py as kernels

    BACKEND = "python"
else:
    raise ValueError(f"RIMU_OPT_KERNEL must be auto, compiled or python, got {_requested!r}")


def kernel_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return BACKEND
