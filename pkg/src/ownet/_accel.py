"""Numba availability, lane selection, and worker-thread configuration.

The hot kernels in :mod:`ownet._kernels` come in two flavours: numba
``@njit`` loops and vectorized numpy/scipy fallbacks. The lane is picked
automatically (numba when importable) and can be forced with the
``OWNET_NUMBA`` environment variable (``0``/``false`` selects the fallback).
"""

from __future__ import annotations

import os


def _numba_importable() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_AVAILABLE = _numba_importable()

_FALSey = ("0", "false", "no", "off")


def numba_enabled() -> bool:
    flag = os.environ.get("OWNET_NUMBA", "").strip().lower()
    if flag in _FALSey:
        return False
    return NUMBA_AVAILABLE


def resolve_lane(use_numba: bool | None) -> bool:
    """True = numba lane. ``None`` means follow the environment."""
    if use_numba is None:
        return numba_enabled()
    return use_numba and NUMBA_AVAILABLE


def worker_threads() -> int:
    """Worker cap from OWNET_THREADS (0 or unset = one per CPU)."""
    raw = os.environ.get("OWNET_THREADS", "").strip()
    n = int(raw) if raw.isdigit() else 0
    return n if n > 0 else (os.cpu_count() or 1)
