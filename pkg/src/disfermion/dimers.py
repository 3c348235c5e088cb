"""Induced bipartite graphs of Z^2, Kasteleyn matrices and dimer covers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .exact import GaussQ, ONE, ZERO, to_gauss
from .lattice import UNIT_STEPS, Color, Domain, classify, is_white
from .linalg import SparseLU, SingularMatrixError, bareiss_det

__all__ = [
    "DimerGraph",
    "DimerCover",
    "DoubleDimerCover",
    "UnbalancedGraphError",
    "induce",
    "kasteleyn_entry",
    "verify_kasteleyn",
    "kasteleyn_faces",
    "count_covers",
    "enumerate_covers",
    "edge_open_probability",
    "spanning_tree_count",
    "even_sublattice_tree_count",
]


class UnbalancedGraphError(ValueError):
    pass


def kasteleyn_entry(b, w) -> GaussQ:
    """``conj(b - w)`` for nearest neighbours, zero otherwise."""
    dx, dy = b[0] - w[0], b[1] - w[1]
    if abs(dx) + abs(dy) != 1:
        return ZERO
    return GaussQ(dx, -dy)


@dataclass(frozen=True)
class DimerGraph:
    """Bipartite graph induced on a finite vertex set.

    ``edges`` holds ``(black_index, white_index)`` pairs in lexicographic
    order.  Kasteleyn entries are ``K(b, w) = conj(b - w)``.
    """

    whites: tuple
    blacks: tuple
    edges: tuple
    w_index: dict = field(repr=False, compare=False, hash=False)
    b_index: dict = field(repr=False, compare=False, hash=False)

    @property
    def vertices(self):
        return sorted(self.whites + self.blacks)

    @property
    def n(self) -> int:
        return len(self.whites)

    def is_balanced(self) -> bool:
        return len(self.whites) == len(self.blacks)

    def __contains__(self, p) -> bool:
        p = tuple(p)
        return p in self.w_index or p in self.b_index

    def K(self, b, w) -> GaussQ:
        if tuple(b) not in self.b_index or tuple(w) not in self.w_index:
            return ZERO
        return kasteleyn_entry(b, w)

    @cached_property
    def kasteleyn(self):
        """Dense exact matrix, rows indexed by blacks and columns by whites."""
        m = [[ZERO] * len(self.whites) for _ in self.blacks]
        for bi, wi in self.edges:
            m[bi][wi] = kasteleyn_entry(self.blacks[bi], self.whites[wi])
        return m

    @cached_property
    def kasteleyn_rows(self):
        rows = [dict() for _ in self.blacks]
        for bi, wi in self.edges:
            rows[bi][wi] = kasteleyn_entry(self.blacks[bi], self.whites[wi])
        return rows

    def kasteleyn_array(self) -> np.ndarray:
        m = np.zeros((len(self.blacks), len(self.whites)), dtype=complex)
        for bi, wi in self.edges:
            b, w = self.blacks[bi], self.whites[wi]
            m[bi, wi] = complex(b[0] - w[0], -(b[1] - w[1]))
        return m

    def kasteleyn_sparse(self):
        import scipy.sparse as sp

        bi = np.array([e[0] for e in self.edges], dtype=np.int64)
        wi = np.array([e[1] for e in self.edges], dtype=np.int64)
        vals = np.array([complex(self.blacks[b][0] - self.whites[w][0],
                                 -(self.blacks[b][1] - self.whites[w][1]))
                         for b, w in self.edges], dtype=complex)
        return sp.csc_matrix((vals, (bi, wi)), shape=(len(self.blacks), len(self.whites)))

    def black_neighbors(self, w):
        """Black neighbours of a white vertex that lie in the graph."""
        return [(w[0] + dx, w[1] + dy) for dx, dy in UNIT_STEPS
                if (w[0] + dx, w[1] + dy) in self.b_index]

    def white_neighbors(self, b):
        return [(b[0] + dx, b[1] + dy) for dx, dy in UNIT_STEPS
                if (b[0] + dx, b[1] + dy) in self.w_index]

    def edge_list(self):
        """Edges as ``(black_point, white_point)``."""
        return [(self.blacks[b], self.whites[w]) for b, w in self.edges]


def induce(domain, allow_unbalanced: bool = False) -> DimerGraph:
    """Graph induced by the domain with its sink removed.

    Raises UnbalancedGraphError when the colour classes differ in size,
    unless ``allow_unbalanced`` is set.
    """
    if isinstance(domain, Domain):
        verts = domain.reduced()
    else:
        verts = sorted({tuple(v) for v in domain})
    whites = tuple(v for v in verts if is_white(v))
    blacks = tuple(v for v in verts if not is_white(v))
    w_index = {w: i for i, w in enumerate(whites)}
    b_index = {b: i for i, b in enumerate(blacks)}
    edges = []
    for bi, b in enumerate(blacks):
        for dx, dy in UNIT_STEPS:
            w = (b[0] + dx, b[1] + dy)
            if w in w_index:
                edges.append((bi, w_index[w]))
    g = DimerGraph(whites, blacks, tuple(sorted(edges)), w_index, b_index)
    if not allow_unbalanced and not g.is_balanced():
        raise UnbalancedGraphError(
            f"unbalanced graph: {len(whites)} whites, {len(blacks)} blacks")
    return g


def kasteleyn_faces(g: DimerGraph):
    """Unit squares of the graph as cyclic tuples ``(b1, w1, b2, w2)``."""
    verts = set(g.whites) | set(g.blacks)
    faces = []
    for x, y in sorted(verts):
        sq = [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]
        if all(p in verts for p in sq):
            if is_white(sq[0]):
                sq = sq[1:] + sq[:1]
            faces.append(tuple(sq))
    return faces


def verify_kasteleyn(g: DimerGraph, matrix=None):
    """Check the alternating face product ``(-1)^(n+1)`` on every unit face.

    Returns ``(True, None)`` or ``(False, face)`` for the first violation.
    ``matrix`` optionally overrides the Kasteleyn entries (rows = blacks).
    """
    def entry(b, w):
        if matrix is None:
            return g.K(b, w)
        return to_gauss(matrix[g.b_index[b]][g.w_index[w]])

    for face in kasteleyn_faces(g):
        b1, w1, b2, w2 = face
        prod = entry(b1, w1) * entry(b2, w1).conjugate() * entry(b2, w2) \
            * entry(b1, w2).conjugate()
        if prod != GaussQ(-1):  # n = 2 black vertices on a unit face
            return False, face
    return True, None


def kasteleyn_det(g: DimerGraph):
    """Exact ``det K``; sparse elimination beyond a dozen vertices."""
    if not g.is_balanced():
        return ZERO
    if g.n == 0:
        return ONE
    if g.n <= 12:
        return bareiss_det(g.kasteleyn)
    try:
        return SparseLU(g.kasteleyn_rows, g.n).det()
    except SingularMatrixError:
        return ZERO


__all__.append("kasteleyn_det")


def count_covers(g: DimerGraph, backend: str = "exact") -> int:
    """Number of dimer covers, ``|det K|``."""
    if not g.is_balanced():
        return 0
    if backend == "float":
        sign, logdet = np.linalg.slogdet(g.kasteleyn_array())
        return 0 if sign == 0 else int(round(math.exp(logdet)))
    d = kasteleyn_det(g)
    n2 = d.norm2()
    r = math.isqrt(int(n2))
    if r * r != n2:  # pragma: no cover - Kasteleyn determinants are unit multiples
        raise ArithmeticError("determinant modulus is not an integer")
    return r


@dataclass(frozen=True)
class DimerCover:
    """Perfect matching stored as black index per white index."""

    matching: tuple

    def edge_set(self):
        return frozenset((b, w) for w, b in enumerate(self.matching))

    def contains(self, b_index: int, w_index: int) -> bool:
        return self.matching[w_index] == b_index


@dataclass(frozen=True)
class DoubleDimerCover:
    first: DimerCover
    second: DimerCover


def enumerate_covers(g: DimerGraph, cap: int = 16):
    """All perfect matchings, matching the lowest unmatched white first."""
    if g.n > cap:
        raise ValueError(f"too large: {g.n} whites exceeds cap {cap}")
    if not g.is_balanced():
        return []
    adj = [[] for _ in g.whites]
    for bi, wi in g.edges:
        adj[wi].append(bi)
    for lst in adj:
        lst.sort(key=lambda bi: g.blacks[bi])
    used = [False] * len(g.blacks)
    cur = [0] * g.n
    out = []

    def rec(wi):
        if wi == g.n:
            out.append(DimerCover(tuple(cur)))
            return
        for bi in adj[wi]:
            if not used[bi]:
                used[bi] = True
                cur[wi] = bi
                rec(wi + 1)
                used[bi] = False

    rec(0)
    return out


def edge_open_probability(g: DimerGraph, edge, method: str = "kasteleyn"):
    """Probability that ``edge = (b, w)`` lies in the first cover.

    ``method="enumerate"`` counts covers; ``"kasteleyn"`` uses
    ``K(b, w) K^{-1}(w, b)``.  Both return an exact Fraction.
    """
    b, w = tuple(edge[0]), tuple(edge[1])
    if not is_white(w):
        b, w = w, b
    bi, wi = g.b_index[b], g.w_index[w]
    if (bi, wi) not in set(g.edges):
        raise ValueError(f"{(b, w)} is not an edge")
    if method == "enumerate":
        covers = enumerate_covers(g, cap=max(16, g.n))
        hit = sum(1 for c in covers if c.contains(bi, wi))
        return Fraction(hit, len(covers))
    from .correlators import CouplingTable

    t = CouplingTable(g)
    p = g.K(b, w) * t.inverse_entry(w, b)
    if p.im:  # pragma: no cover
        raise ArithmeticError("non-real edge probability")
    return Fraction(int(p.re.numerator), int(p.re.denominator))


def spanning_tree_count(vertices, adjacent, root) -> int:
    """Matrix-tree theorem: determinant of the Laplacian with ``root`` deleted."""
    verts = [v for v in vertices if v != root]
    idx = {v: i for i, v in enumerate(verts)}
    allv = set(vertices)
    rows = []
    for v in verts:
        row = {}
        deg = 0
        for u in adjacent(v):
            if u in allv:
                deg += 1
                if u in idx:
                    row[idx[u]] = row.get(idx[u], 0) - 1
        row[idx[v]] = deg
        rows.append(row)
    if not rows:
        return 1
    d = SparseLU(rows).det()
    return int(d.re)


def even_sublattice_tree_count(domain: Domain) -> int:
    """Spanning trees of the even-black graph (step-2 edges), rooted at the sink."""
    evens = domain.even_blacks
    es = set(evens)

    def adjacent(v):
        # an edge of the even graph runs through the white vertex between
        return [(v[0] + 2 * dx, v[1] + 2 * dy) for dx, dy in UNIT_STEPS
                if (v[0] + 2 * dx, v[1] + 2 * dy) in es and (v[0] + dx, v[1] + dy) in domain]

    return spanning_tree_count(evens, adjacent, domain.sink)
