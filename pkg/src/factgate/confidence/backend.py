"""Kernel backend selection: compiled extension when available, numpy
fallback otherwise. VERIFY_PURE_PYTHON=1 forces the fallback."""

from __future__ import annotations

import os

_TRUTHY = {"1", "true", "yes", "on"}


def _force_pure_python() -> bool:
    return os.environ.get("VERIFY_PURE_PYTHON", "").strip().lower() in _TRUTHY


try:
    if _force_pure_python():
        raise ImportError("pure-python kernels forced via VERIFY_PURE_PYTHON")
    from factgate.confidence import _calkernel as _selected

    KERNEL_BACKEND = "cython"
except ImportError:
    from factgate.confidence import _calkernel_py as _selected

    KERNEL_BACKEND = "python"


def get_kernels(backend: str | None = None):
    """Return the kernel module; pass 'cython' or 'python' to override the
    import-time selection (tests and the benchmark compare both)."""
    if backend is None:
        return _selected
    if backend == "python":
        from factgate.confidence import _calkernel_py

        return _calkernel_py
    if backend == "cython":
        from factgate.confidence import _calkernel

        return _calkernel
    raise ValueError(f"unknown kernel backend: {backend!r}")
