"""Hot numerical kernels with an optional numba backend.

Set ``DISFERMION_NO_NUMBA=1`` to force the pure-numpy implementations
(also used automatically when numba is not importable).
"""
from __future__ import annotations

import os

import numpy as np

__all__ = ["pfaffian", "pfaffian_batch", "pfaffian_batch_numpy", "BACKEND"]


def pfaffian(a: np.ndarray) -> complex:
    """Pfaffian of one skew-symmetric matrix (pivoted Parlett-Reid elimination)."""
    return complex(pfaffian_batch_numpy(np.asarray(a, dtype=complex)[None])[0])


def pfaffian_batch_numpy(a: np.ndarray) -> np.ndarray:
    """Pfaffians of a stack ``(T, k, k)`` of skew-symmetric matrices."""
    a = np.array(a, dtype=complex, copy=True)
    t, k, _ = a.shape
    out = np.ones(t, dtype=complex)
    if k % 2:
        return np.zeros(t, dtype=complex)
    rows = np.arange(t)
    for c in range(0, k - 1, 2):
        # pivot the largest entry of row c into column c+1
        piv = c + 1 + np.argmax(np.abs(a[:, c, c + 1:]), axis=1)
        swap = piv != c + 1
        if swap.any():
            r = rows[swap]
            p = piv[swap]
            tmp = a[r, c + 1, :].copy()
            a[r, c + 1, :] = a[r, p, :]
            a[r, p, :] = tmp
            tmp = a[r, :, c + 1].copy()
            a[r, :, c + 1] = a[r, :, p]
            a[r, :, p] = tmp
            out[swap] *= -1
        head = a[:, c, c + 1]
        out *= head
        if c + 2 < k:
            safe = np.where(head == 0, 1, head)
            tau = a[:, c, c + 2:] / safe[:, None]
            col = a[:, c + 2:, c + 1]
            a[:, c + 2:, c + 2:] += tau[:, :, None] * col[:, None, :] - col[:, :, None] * tau[:, None, :]
    return out


def _make_numba():
    from numba import njit

    @njit(cache=True)
    def _pf_batch(a):
        t, k, _ = a.shape
        out = np.ones(t, dtype=np.complex128)
        if k % 2:
            return np.zeros(t, dtype=np.complex128)
        for s in range(t):
            m = a[s].copy()
            pf = 1.0 + 0.0j
            for c in range(0, k - 1, 2):
                p = c + 1
                best = abs(m[c, c + 1])
                for j in range(c + 2, k):
                    if abs(m[c, j]) > best:
                        best = abs(m[c, j])
                        p = j
                if p != c + 1:
                    for j in range(k):
                        tmp = m[c + 1, j]
                        m[c + 1, j] = m[p, j]
                        m[p, j] = tmp
                    for j in range(k):
                        tmp = m[j, c + 1]
                        m[j, c + 1] = m[j, p]
                        m[j, p] = tmp
                    pf = -pf
                head = m[c, c + 1]
                if head == 0:
                    pf = 0.0 + 0.0j
                    break
                pf *= head
                for i in range(c + 2, k):
                    ti = m[c, i] / head
                    for j in range(c + 2, k):
                        m[i, j] += ti * m[j, c + 1] - m[i, c + 1] * (m[c, j] / head)
            out[s] = pf
        return out

    return _pf_batch


_NUMBA_KERNEL = None
BACKEND = "numpy"
if not os.environ.get("DISFERMION_NO_NUMBA"):
    try:
        _NUMBA_KERNEL = _make_numba()
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba missing
        _NUMBA_KERNEL = None


def pfaffian_batch(a: np.ndarray) -> np.ndarray:
    """Batched Pfaffians using the selected backend."""
    a = np.ascontiguousarray(a, dtype=complex)
    if a.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    if _NUMBA_KERNEL is not None:
        return _NUMBA_KERNEL(a)
    return pfaffian_batch_numpy(a)
