"""Backend selection for the reading-density kernels.

The compiled extension is used when it was built; setting
``WEAKPATH_PURE_PYTHON=1`` forces the numpy fallback.  ``WEAKPATH_THREADS``
caps the OpenMP thread count of the compiled kernels.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

if os.environ.get("WEAKPATH_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled


def available_backends() -> list[str]:
    return list(_BACKENDS)


def thread_count() -> int:
    raw = os.environ.get("WEAKPATH_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def density(amps: np.ndarray, tables: list[np.ndarray], backend: str | None = None) -> np.ndarray:
    """``sum_c |sum_p amps[c, p] prod_k tables[k][p, i_k]|^2`` on the tensor grid.

    ``amps`` has shape (C, P); ``tables[k]`` has shape (P, M_k) and is real.
    The result has shape (M_0, ..., M_{K-1}).
    """
    impl = _BACKENDS[backend or BACKEND]
    amps = np.atleast_2d(np.asarray(amps, dtype=complex))
    are = np.ascontiguousarray(amps.real)
    aim = np.ascontiguousarray(amps.imag)
    tabs = [np.ascontiguousarray(t, dtype=float) for t in tables]
    if len(tabs) == 0:
        s = amps.sum(axis=1)
        return np.asarray(np.sum(np.abs(s) ** 2))
    if len(tabs) == 1:
        return impl.density_1d(are, aim, tabs[0], thread_count())
    if len(tabs) == 2:
        return impl.density_2d(are, aim, tabs[0], tabs[1], thread_count())
    # three or more pointers: generic contraction, numpy only
    letters = "abcdefghijklmnopqrstuvwxyz"[: len(tabs)]
    spec = "p," + ",".join("p" + x for x in letters) + "->" + letters
    out = np.zeros(tuple(t.shape[1] for t in tabs))
    for a in amps:
        psi = np.einsum(spec, a, *tabs)
        out += psi.real**2 + psi.imag**2
    return out
