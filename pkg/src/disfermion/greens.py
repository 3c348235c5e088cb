"""Green's functions on the black sublattices and the full-plane potential kernel.

Two step-2 graphs are attached to a temperleyan domain: the even-black graph
with a Dirichlet condition at the sink only, and the odd-black graph with
Dirichlet conditions on the odd vertices just outside the domain.  An edge
joins ``b`` and ``b + 2d`` when the white vertex ``b + d`` lies in the domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .correlators import CouplingTable, coupling_table
from .dimers import induce
from .exact import GaussQ, ONE, PiPoly, Q, ZERO, to_gauss
from .lattice import UNIT_STEPS, Domain, centered_square, is_white
from .linalg import SparseLU

__all__ = [
    "SublatticeGraph",
    "even_graph",
    "odd_graph",
    "laplacian",
    "green_even",
    "green_odd",
    "GreenReport",
    "check_two_point_green",
    "check_harmonic_conjugates",
    "check_harmonic_conjugates_plane",
    "potential_kernel",
    "FullPlaneGreen",
    "EULER_GAMMA",
    "GREEN_CONSTANT",
    "limit_two_point",
    "convergence_table",
    "edge_open_sequence",
    "EXACT_LIMIT",
]

EULER_GAMMA = 0.5772156649015329
GREEN_CONSTANT = -(EULER_GAMMA + 1.5 * math.log(2)) / (2 * math.pi)
EXACT_LIMIT = 2000  # unknowns solved exactly; float sparse solve beyond


@dataclass(frozen=True)
class SublatticeGraph:
    """Step-2 graph: ``interior`` vertices carry equations, ``boundary`` is Dirichlet."""

    interior: tuple
    boundary: tuple
    adjacency: dict

    @property
    def vertices(self):
        return self.interior + self.boundary

    def neighbors(self, v):
        return self.adjacency.get(tuple(v), ())


def _step2_adjacency(verts, domain: Domain):
    vs = set(verts)
    adj = {}
    for v in verts:
        nb = []
        for dx, dy in UNIT_STEPS:
            u = (v[0] + 2 * dx, v[1] + 2 * dy)
            if u in vs and (v[0] + dx, v[1] + dy) in domain:
                nb.append(u)
        adj[v] = tuple(nb)
    return adj


def even_graph(domain: Domain) -> SublatticeGraph:
    """Even-black graph, Dirichlet at the sink."""
    if domain.sink is None:
        raise ValueError("domain needs a sink")
    evens = tuple(domain.even_blacks)
    interior = tuple(v for v in evens if v != domain.sink)
    return SublatticeGraph(interior, (domain.sink,), _step2_adjacency(evens, domain))


def odd_graph(domain: Domain) -> SublatticeGraph:
    """Odd-black graph with its outer odd boundary."""
    interior = tuple(domain.odd_blacks)
    boundary = tuple(domain.odd_boundary())
    return SublatticeGraph(interior, boundary, _step2_adjacency(interior + boundary, domain))


def laplacian(g: SublatticeGraph, f, v):
    """``sum_{u ~ v} (f(u) - f(v))`` with ``f`` a mapping (missing = 0) or callable."""
    get = f if callable(f) else (lambda p: f.get(p, 0))
    fv = get(tuple(v))
    acc = 0
    for u in g.neighbors(v):
        acc = acc + (get(u) - fv)
    return acc


def _solve(g: SublatticeGraph, pole, backend: str):
    pole = tuple(pole)
    idx = {v: i for i, v in enumerate(g.interior)}
    if pole not in idx:
        raise ValueError(f"pole {pole} is not an interior vertex")
    n = len(idx)
    if backend == "auto":
        backend = "exact" if n <= EXACT_LIMIT else "float"
    # -Delta f = delta_pole, Dirichlet values vanish
    if backend == "exact":
        rows = []
        for v in g.interior:
            row = {idx[v]: GaussQ(len(g.neighbors(v)))}
            for u in g.neighbors(v):
                if u in idx:
                    row[idx[u]] = row.get(idx[u], ZERO) - 1
            rows.append(row)
        x = SparseLU(rows, n).solve({idx[pole]: ONE})
        out = {v: x[i] for v, i in idx.items()}
        zero = ZERO
    elif backend == "float":
        import scipy.sparse as sp
        from scipy.sparse.linalg import spsolve

        r, c, d = [], [], []
        for v in g.interior:
            i = idx[v]
            r.append(i), c.append(i), d.append(float(len(g.neighbors(v))))
            for u in g.neighbors(v):
                if u in idx:
                    r.append(i), c.append(idx[u]), d.append(-1.0)
        a = sp.csc_matrix((d, (r, c)), shape=(n, n))
        rhs = np.zeros(n)
        rhs[idx[pole]] = 1.0
        x = spsolve(a, rhs)
        out = {v: float(x[i]) for v, i in idx.items()}
        zero = 0.0
    else:
        raise ValueError(f"unknown backend {backend!r}")
    for b in g.boundary:
        out[b] = zero
    return out


def green_even(g: SublatticeGraph, b0, backend: str = "auto"):
    """Green's function of the even graph with pole ``b0`` (zero at the sink)."""
    return _solve(g, b0, backend)


def green_odd(g: SublatticeGraph, b0, backend: str = "auto"):
    """Green's function of the odd graph with pole ``b0`` (zero on the boundary)."""
    if tuple(b0) in g.boundary:
        return {v: ZERO for v in g.vertices}
    return _solve(g, b0, backend)


def _white_neighbours(w):
    """``(b1, b2, s1, s2)``: even neighbours ``w + i, w - i`` or ``w + 1, w - 1``,
    odd neighbours ordered so that ``s1 - s2 = -i (b1 - b2)``."""
    x, y = w
    if x % 2 == 0:  # (even, odd): even neighbours vertical
        b1, b2 = (x, y + 1), (x, y - 1)
        s1, s2 = (x + 1, y), (x - 1, y)
    else:
        b1, b2 = (x + 1, y), (x - 1, y)
        s1, s2 = (x, y - 1), (x, y + 1)
    return b1, b2, s1, s2


def _diff(p, q) -> GaussQ:
    return GaussQ(p[0] - q[0], p[1] - q[1])


@dataclass
class GreenReport:
    ok: bool
    checked: int
    violations: list


def check_two_point_green(domain: Domain, w, table: CouplingTable | None = None) -> GreenReport:
    """Compare ``E[eta(w) xi(z)] / 2`` with the Green-function differences.

    Even ``z``: ``(G_even(b1, z) - G_even(b2, z)) / (b1 - b2)``; odd ``z``
    likewise with the odd graph.  Exact, at every admissible ``z``.
    """
    w = tuple(w)
    if not domain.is_temperleyan():
        raise ValueError(f"not temperleyan: {domain.temperleyan_report()}")
    if not is_white(w) or w not in domain:
        raise ValueError("w must be a white vertex of the domain")
    sink = domain.sink
    if sum(abs(a - b) for a, b in zip(w, sink)) == 1:
        raise ValueError("w is adjacent to the sink")
    g = induce(domain)
    t = table or coupling_table(g, "exact")
    ge, go = even_graph(domain), odd_graph(domain)
    b1, b2, s1, s2 = _white_neighbours(w)
    fe1, fe2 = green_even(ge, b1, "exact"), green_even(ge, b2, "exact")
    fo1, fo2 = green_odd(go, s1, "exact"), green_odd(go, s2, "exact")
    de, do = _diff(b1, b2), _diff(s1, s2)
    bad = []
    checked = 0
    for z in ge.interior:
        lhs = t.two_point(w, z) / 2
        rhs = (fe1[z] - fe2[z]) / de
        checked += 1
        if lhs != rhs:
            bad.append((z, lhs, rhs))
    for z in go.interior:
        lhs = t.two_point(w, z) / 2
        rhs = (fo1.get(z, ZERO) - fo2.get(z, ZERO)) / do
        checked += 1
        if lhs != rhs:
            bad.append((z, lhs, rhs))
    return GreenReport(not bad, checked, bad)


def _cauchy_riemann(fe, fo, whites, skip):
    """``f_e(b+) - f_e(b-) = f_o(s_L) - f_o(s_R)`` at each white except ``skip``.

    ``s_L``/``s_R`` sit on the left/right when walking from ``b-`` to ``b+``.
    """
    bad = []
    for wt in whites:
        if wt == skip:
            continue
        bp, bm, sr, sl = _white_neighbours(wt)
        # going from b- to b+, the right-hand side is s1 by construction
        lhs = fe(bp) - fe(bm)
        rhs = fo(sl) - fo(sr)
        if lhs != rhs:
            bad.append((wt, lhs, rhs))
    return bad


def check_harmonic_conjugates(domain: Domain, w) -> GreenReport:
    """Discrete Cauchy-Riemann relation between the two Green differences."""
    w = tuple(w)
    ge, go = even_graph(domain), odd_graph(domain)
    b1, b2, s1, s2 = _white_neighbours(w)
    fe1, fe2 = green_even(ge, b1, "exact"), green_even(ge, b2, "exact")
    fo1, fo2 = green_odd(go, s1, "exact"), green_odd(go, s2, "exact")
    fe = lambda b: fe1[b] - fe2[b]
    fo = lambda s: fo1.get(s, ZERO) - fo2.get(s, ZERO)
    whites = domain.whites
    bad = _cauchy_riemann(fe, fo, whites, w)
    return GreenReport(not bad, len(whites) - 1, bad)


def check_harmonic_conjugates_plane(w, radius: int = 6) -> GreenReport:
    """Full-plane version with ``F_e(b) = G(b1 - b) - G(b2 - b)`` and likewise odd.

    ``G`` is read on the step-2 lattice, i.e. ``G((b1 - b) / 2)``.
    """
    w = tuple(w)
    b1, b2, s1, s2 = _white_neighbours(w)

    def F(p1, p2):
        return lambda b: (potential_kernel(((p1[0] - b[0]) // 2, (p1[1] - b[1]) // 2))
                          - potential_kernel(((p2[0] - b[0]) // 2, (p2[1] - b[1]) // 2)))

    whites = [(x, y) for x in range(w[0] - radius, w[0] + radius + 1)
              for y in range(w[1] - radius, w[1] + radius + 1) if (x + y) % 2]
    bad = _cauchy_riemann(F(b1, b2), F(s1, s2), whites, w)
    return GreenReport(not bad, len(whites) - 1, bad)


# ----------------------------------------------------------------------
# full plane


class FullPlaneGreen:
    """Full-plane Green's function ``G = -a/4`` on the unit lattice.

    ``a`` is the potential kernel of simple random walk, built exactly in
    ``Q + Q/pi`` from ``a(0) = 0``, ``a(1, 0) = 1``, the diagonal values
    ``a(n, n) = (4/pi) sum_{k<=n} 1/(2k-1)`` and harmonicity away from the
    origin.  The even sublattice of the domain is the unit lattice scaled
    by two.
    """

    def __init__(self, radius: int = 16):
        self.radius = 0
        self._a: dict = {(0, 0): PiPoly(), (1, 0): PiPoly.const(1), (1, 1): PiPoly({-1: 4})}
        self._diag_sum = Q(1)
        self._grow(max(radius, 2))

    def _get(self, x, y):
        x, y = abs(x), abs(y)
        if y > x:
            x, y = y, x
        return self._a[(x, y)]

    def _grow(self, radius):
        a = self._a
        n = max(1, self.radius)
        while n < radius:
            # fill column n + 1 from the harmonic equations at column n
            self._diag_sum = self._diag_sum + Q(1, 2 * n + 1)
            a[(n + 1, n + 1)] = PiPoly({-1: 4 * self._diag_sum})
            a[(n + 1, n)] = self._get(n, n) * 2 - self._get(n, n - 1)
            for y in range(n - 1, -1, -1):
                a[(n + 1, y)] = (self._get(n, y) * 4 - self._get(n - 1, y)
                                 - self._get(n, y + 1) - self._get(n, y - 1))
            n += 1
        self.radius = max(self.radius, radius, 1)

    def kernel(self, z):
        """``a(z)`` (potential kernel)."""
        x, y = z
        r = max(abs(x), abs(y))
        if r > self.radius:
            self._grow(r)
        return self._get(x, y)

    def __call__(self, z) -> PiPoly:
        return self.kernel(z) * GaussQ(Q(-1, 4))

    def value(self, z) -> complex:
        return self(z).to_complex().real

    def asymptotic(self, z) -> float:
        return -math.log(math.hypot(*z)) / (2 * math.pi) + GREEN_CONSTANT


@lru_cache(maxsize=1)
def _shared_green() -> FullPlaneGreen:
    return FullPlaneGreen(16)


def potential_kernel(z) -> PiPoly:
    """``G(z)`` on the unit lattice, exact; see :class:`FullPlaneGreen`."""
    return _shared_green()(tuple(z))


def _same_parity_neighbours(w, z):
    b1, b2, s1, s2 = _white_neighbours(w)
    if z[0] % 2 == 0 and z[1] % 2 == 0:
        return b1, b2
    return s1, s2


def limit_two_point(w, z) -> complex:
    """Full-plane value of ``E[eta(w) xi(z)]``:
    ``2 (G((z - w1)/2) - G((z - w2)/2)) / (w1 - w2)``."""
    w, z = tuple(w), tuple(z)
    if not is_white(w) or is_white(z):
        raise ValueError("need a white w and a black z")
    w1, w2 = _same_parity_neighbours(w, z)
    g1 = potential_kernel(((z[0] - w1[0]) // 2, (z[1] - w1[1]) // 2))
    g2 = potential_kernel(((z[0] - w2[0]) // 2, (z[1] - w2[1]) // 2))
    return 2 * (g1 - g2).to_complex() / complex(w1[0] - w2[0], w1[1] - w2[1])


def convergence_table(ns, w, z, backend: str = "float"):
    """Rows ``(n, finite, limit, abs_err)`` along centered squares of half-side ``2n``."""
    w, z = tuple(w), tuple(z)
    lim = limit_two_point(w, z)
    rows = []
    for n in ns:
        d = centered_square(2 * n)
        if w not in d or z not in d or z == d.sink:
            continue
        g = induce(d)
        t = CouplingTable(g, backend)
        fin = complex(t.two_point(w, z))
        rows.append((n, fin, lim, abs(fin - lim)))
    return rows


def edge_open_sequence(ns, edge=((0, 0), (1, 0))):
    """Probability that ``edge`` is in a uniform dimer cover, per square size."""
    b, w = tuple(edge[0]), tuple(edge[1])
    if is_white(b):
        b, w = w, b
    out = []
    for n in ns:
        g = induce(centered_square(2 * n))
        t = CouplingTable(g, "float")
        p = complex(g.K(b, w)) * complex(t.inverse_entry(w, b))
        out.append((n, p.real))
    return out
