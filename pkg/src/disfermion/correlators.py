"""Fermion correlations through the inverse Kasteleyn matrix.

``E[eta(w) xi(b)] = conj(K^{-1}(w, b))`` and multipoint correlations are the
Wick determinants of these two-point functions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dimers import DimerGraph
from .exact import GaussQ, ONE, ZERO, to_gauss
from .lattice import UNIT_STEPS, is_white
from .linalg import SparseLU, bareiss_det

__all__ = [
    "CouplingTable",
    "coupling_table",
    "two_point",
    "multipoint",
    "dee",
    "deebar",
    "dee_K",
    "deebar_K",
    "HolomorphicityReport",
    "verify_holomorphicity",
]


class CouplingTable:
    """Inverse Kasteleyn matrix of a graph, exact or in complex doubles.

    The exact table is filled by sparse exact elimination.  The float table
    factorizes ``K`` once with a sparse LU and produces columns on demand.
    """

    def __init__(self, graph: DimerGraph, backend: str = "exact"):
        if backend not in ("exact", "float"):
            raise ValueError(f"unknown backend {backend!r}")
        self.graph = graph
        self.backend = backend
        self._cols: dict = {}
        self._lu = None
        self._dense = None

    @property
    def exact(self) -> bool:
        return self.backend == "exact"

    def _factor(self):
        if self._lu is None:
            if self.exact:
                self._lu = SparseLU(self.graph.kasteleyn_rows, self.graph.n)
            else:
                from scipy.sparse.linalg import splu

                self._lu = splu(self.graph.kasteleyn_sparse().tocsc())
        return self._lu

    def column(self, b):
        """``K^{-1}(., b)`` as a list (exact) or array (float) over whites."""
        bi = self.graph.b_index[tuple(b)]
        col = self._cols.get(bi)
        if col is None:
            if self._dense is not None:
                col = self._dense[:, bi]
            elif self.exact:
                col = self._factor().solve({bi: ONE})
            else:
                rhs = np.zeros(self.graph.n, dtype=complex)
                rhs[bi] = 1.0
                col = self._factor().solve(rhs)
            self._cols[bi] = col
        return col

    def inverse_entry(self, w, b):
        return self.column(b)[self.graph.w_index[tuple(w)]]

    def two_point(self, w, b):
        """``E[eta(w) xi(b)]``."""
        v = self.inverse_entry(w, b)
        return v.conjugate()

    def dense_inverse(self) -> np.ndarray:
        """Full ``K^{-1}`` (float), computed once."""
        if self._dense is None:
            if self.exact:
                m = np.array([[complex(self.inverse_entry(w, b)) for b in self.graph.blacks]
                              for w in self.graph.whites], dtype=complex)
            else:
                m = np.linalg.inv(self.graph.kasteleyn_array()) if self.graph.n else \
                    np.zeros((0, 0), dtype=complex)
            self._dense = m
        return self._dense

    def verify_inverse(self) -> bool:
        """Exact check of ``K K^{-1} = 1``."""
        g = self.graph
        for b in g.blacks:
            col = self.column(b)
            for bb in g.blacks:
                s = ZERO if self.exact else 0j
                for w in g.white_neighbors(bb):
                    s = s + g.K(bb, w) * col[g.w_index[w]] if self.exact else \
                        s + complex(g.K(bb, w)) * col[g.w_index[w]]
                target = 1 if bb == tuple(b) else 0
                if self.exact and s != target:
                    return False
                if not self.exact and abs(s - target) > 1e-9:
                    return False
        return True

    def multipoint(self, pairs):
        """Wick determinant ``det[E[eta(w_i) xi(b_j)]]``."""
        pairs = [(tuple(w), tuple(b)) for w, b in pairs]
        if not pairs:
            return ONE if self.exact else 1.0 + 0j
        ws = [w for w, _ in pairs]
        bs = [b for _, b in pairs]
        if len(set(ws)) < len(ws) or len(set(bs)) < len(bs):
            return ZERO if self.exact else 0j
        m = [[self.two_point(w, b) for b in bs] for w in ws]
        if self.exact:
            return bareiss_det(m)
        return complex(np.linalg.det(np.array(m, dtype=complex)))


_TABLES: dict = {}


def coupling_table(graph: DimerGraph, backend: str = "exact") -> CouplingTable:
    """Cached CouplingTable per (graph, backend)."""
    key = (graph.whites, graph.blacks, backend)
    t = _TABLES.get(key)
    if t is None:
        t = CouplingTable(graph, backend)
        _TABLES[key] = t
    return t


def two_point(t: CouplingTable, w, b):
    return t.two_point(w, b)


def multipoint(t: CouplingTable, pairs):
    return t.multipoint(pairs)


# ----------------------------------------------------------------------
# derivatives


def _value(f, p):
    if callable(f):
        return f(p)
    return f.get(p, 0)


def dee(f, z):
    """Lattice derivative ``sum_{|w - z| = 1} f(w) / (w - z)``.

    ``f`` is a callable or a mapping; missing mapping entries count as zero.
    """
    acc = 0
    for dx, dy in UNIT_STEPS:
        v = _value(f, (z[0] + dx, z[1] + dy))
        if v:
            acc = acc + v * GaussQ(dx, -dy)  # 1/d = conj(d)
    return acc


def deebar(f, z):
    """``sum_{|w - z| = 1} f(w) / conj(w - z)``."""
    acc = 0
    for dx, dy in UNIT_STEPS:
        v = _value(f, (z[0] + dx, z[1] + dy))
        if v:
            acc = acc + v * GaussQ(dx, dy)
    return acc


def dee_K(g: DimerGraph, f, v):
    """Kasteleyn derivative: ``sum K(b,w) f(w)`` at blacks, ``-sum K(b,w) f(b)`` at whites."""
    v = tuple(v)
    acc = ZERO
    if is_white(v):
        for b in g.black_neighbors(v):
            acc = acc - g.K(b, v) * _value(f, b)
    else:
        for w in g.white_neighbors(v):
            acc = acc + g.K(v, w) * _value(f, w)
    return acc


def deebar_K(g: DimerGraph, f, v):
    """Conjugate Kasteleyn derivative, same sign convention as :func:`dee_K`."""
    v = tuple(v)
    acc = ZERO
    if is_white(v):
        for b in g.black_neighbors(v):
            acc = acc - g.K(b, v).conjugate() * _value(f, b)
    else:
        for w in g.white_neighbors(v):
            acc = acc + g.K(v, w).conjugate() * _value(f, w)
    return acc


@dataclass
class HolomorphicityReport:
    """Outcome of the two delta identities.

    With the derivative conventions of :func:`deebar_K` the identities that
    hold are ``deebar_K_w E[eta(w0) xi(.)](w) = -delta(w, w0)`` and
    ``deebar_K_b E[eta(.) xi(b0)](b) = +delta(b, b0)``.
    """

    ok: bool
    checked: int
    violation: tuple | None = None


def verify_holomorphicity(t: CouplingTable, w0=None, b0=None, tol: float = 1e-9):
    """Evaluate both delta identities at every vertex of the graph.

    ``w0``/``b0`` default to all whites/blacks.
    """
    g = t.graph
    w0s = g.whites if w0 is None else [tuple(w0)]
    b0s = g.blacks if b0 is None else [tuple(b0)]

    def close(a, target):
        if t.exact:
            return a == target
        return abs(complex(a) - target) <= tol

    checked = 0
    for wz in w0s:
        f = {b: t.two_point(wz, b) for b in g.blacks}
        for w in g.whites:
            val = deebar_K(g, f, w) if t.exact else _deebar_K_float(g, f, w)
            checked += 1
            if not close(val, -1 if w == wz else 0):
                return HolomorphicityReport(False, checked, ("white", wz, w, val))
    for bz in b0s:
        f = {w: t.two_point(w, bz) for w in g.whites}
        for b in g.blacks:
            val = deebar_K(g, f, b) if t.exact else _deebar_K_float(g, f, b)
            checked += 1
            if not close(val, 1 if b == bz else 0):
                return HolomorphicityReport(False, checked, ("black", bz, b, val))
    return HolomorphicityReport(True, checked)


def _deebar_K_float(g, f, v):
    acc = 0j
    if is_white(v):
        for b in g.black_neighbors(v):
            acc -= complex(g.K(b, v)).conjugate() * f.get(b, 0)
    else:
        for w in g.white_neighbors(v):
            acc += complex(g.K(v, w)).conjugate() * f.get(w, 0)
    return acc
