"""Kernel selection: compiled ``_ckernels`` when importable, else ``_pykernels``.

Set ``LEVELPOINTS_PURE_PYTHON=1`` to force the fallback.  The compiled kernels
work in int64, so every call goes through a guard that routes inputs whose
intermediates could exceed 2**62 to the exact pure-Python kernels instead.
"""

import os

from . import _pykernels

compiled = None
if not os.environ.get("LEVELPOINTS_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None

active = compiled if compiled is not None else _pykernels
BACKEND = active.BACKEND

_LIMIT = 1 << 62


def _radius(L, H):
    return max(max(abs(v) for v in L), max(abs(v) for v in H))


def det2_safe(m, L, H):
    R = _radius(L, H)
    return R <= 1 << 30 and m <= 1 << 60


def quad_safe(m, q, L, H):
    R = _radius(L, H)
    S = sum(abs(v) for row in q for v in row)
    a = abs(q[-1][-1])
    return (S * R) ** 2 + 4 * a * (S * R * R + m) < _LIMIT


def det2_points(m, L, H, lo, hi, backend=None):
    mod = _pick(backend)
    if mod is not _pykernels and not det2_safe(m, L, H):
        mod = _pykernels
    return mod.det2_points(m, L, H, lo, hi)


def pff2_points(m, L, H, lo, hi, backend=None):
    mod = _pick(backend)
    if mod is not _pykernels and not det2_safe(m, L, H):
        mod = _pykernels
    return mod.pff2_points(m, L, H, lo, hi)


def quad_points(m, q, L, H, lo, hi, backend=None):
    mod = _pick(backend)
    if not quad_safe(m, q, L, H):
        return _pykernels.quad_points(m, q, L, H, lo, hi, dtype=object)
    return mod.quad_points(m, q, L, H, lo, hi)


def _pick(backend):
    if backend is None:
        return active
    if backend == "python":
        return _pykernels
    if backend == "cython":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return compiled
    raise ValueError(f"unknown backend {backend!r}")
