"""Hot loops, compiled when available.

The compiled extension is used unless it failed to build or the environment
variable ``DFACTOR_PURE_PYTHON`` is set to a non-empty value other than ``0``.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from . import _kernels_py

_impl = _kernels_py
if os.environ.get("DFACTOR_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _kernels_py

BACKEND = _impl.BACKEND


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True


def implementation(name: str | None = None):
    """The kernel module for ``name`` (``"python"``/``"compiled"``), or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def pair_points(perm, d: int, n: int):
    return _impl.pair_points(np.ascontiguousarray(perm, dtype=np.int64), d, n)


def count_plan(frame, gptr, gidx, degM, totM, plan, tables=None, impl=None):
    impl = impl or _impl
    P, ends = tables if tables is not None else (None, None)
    if impl is _kernels_py:
        return impl.count_plan(frame.n, gptr, gidx, frame.rptr, frame.ridx, frame.S,
                               degM, totM, plan, P, ends)
    return impl.count_plan(
        frame.n,
        np.ascontiguousarray(gptr, dtype=np.int32),
        np.ascontiguousarray(gidx, dtype=np.int32),
        np.ascontiguousarray(frame.rptr, dtype=np.int32),
        np.ascontiguousarray(frame.ridx, dtype=np.int32),
        frame.Snp,
        np.ascontiguousarray(degM, dtype=np.int64),
        int(totM),
        plan,
        None if P is None else np.ascontiguousarray(P, dtype=np.int64),
        None if ends is None else np.ascontiguousarray(ends, dtype=np.int64),
    )


@lru_cache(maxsize=8)
def _red_keys(instance) -> np.ndarray:
    n = instance.n
    return np.sort(np.fromiter((u * n + v for u, v in instance.forbidden_edges), dtype=np.int64,
                               count=len(instance.forbidden_edges)))


def count_red_pairs(arr, instance) -> int:
    """Number of rows of an ``(m, 2)`` ``(lo, hi)`` array that are red pairs."""
    arr = np.asarray(arr)
    if arr.size == 0 or instance.m_red_total == 0:
        return 0
    return _kernels_py.count_red_pairs(arr[:, 0], arr[:, 1], _red_keys(instance), instance.n)
