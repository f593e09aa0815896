"""Kernel selection: compiled extension when importable, pure Python otherwise.

Set ``FIVEG_TTP_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernel

try:
    if os.environ.get("FIVEG_TTP_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _kernel as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
COMPILED_MAX_ASSETS = 64


def available_backends() -> list[str]:
    return ["cython", "python"] if _compiled is not None else ["python"]


def kernel_for(n_assets: int, backend: str | None = None):
    if backend is None:
        backend = BACKEND if n_assets <= COMPILED_MAX_ASSETS else "python"
    if backend == "python":
        return _pykernel.enumerate_encoded
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not built")
        return _compiled.enumerate_encoded
    raise ValueError(f"unknown backend {backend!r}")
