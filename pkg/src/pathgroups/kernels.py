"""Kernel backend selection.

The compiled Cython module is preferred when it imported cleanly; the pure
numpy module is the fallback. Set PATHGROUPS_KERNELS=pure|compiled to force a
backend (the benchmark uses this to compare both).
"""

from __future__ import annotations

import os

from . import _kernels_py as pure

try:
    from . import _kernels as compiled
except ImportError:
    compiled = None

HAVE_COMPILED = compiled is not None


def get_backend(name=None):
    """Resolve a backend module by name: None/'auto', 'compiled' or 'pure'."""
    if name is None:
        name = os.environ.get("PATHGROUPS_KERNELS", "auto")
    if name in ("auto", ""):
        return compiled if HAVE_COMPILED else pure
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernels are not available in this install")
        return compiled
    if name == "pure":
        return pure
    raise ValueError(f"unknown kernel backend {name!r}")


def backend_name(module=None) -> str:
    module = module or get_backend()
    return "compiled" if getattr(module, "COMPILED", False) else "pure"
