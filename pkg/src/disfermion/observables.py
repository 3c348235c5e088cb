"""Fermion pair observables defined through adapted odd simple paths.

This is the combinatorial ground truth: random variables are tabulated over
all double-dimer covers ``(omega, omega_bar)`` of small graphs.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dimers import DimerGraph, enumerate_covers
from .exact import GaussQ, Q, ZERO
from .lattice import UNIT_STEPS, is_white

__all__ = [
    "OddPath",
    "PathLimitError",
    "enumerate_paths",
    "path_factor",
    "RandomVariable",
    "pair_observable",
    "pair_observable_disjoint",
    "permutation_sign",
]


class PathLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class OddPath:
    """Simple path ``w = v_0, v_1, ..., v_n = b`` with an odd number of edges."""

    vertices: tuple

    @property
    def edges(self):
        v = self.vertices
        return [(v[k], v[k + 1]) for k in range(len(v) - 1)]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def ell(self) -> int:
        """Number of even-position edges."""
        return (self.length - 1) // 2

    def odd_edges(self):
        """Edges ``e_1, e_3, ...`` as ``(black, white)``."""
        return [_bw(e) for e in self.edges[0::2]]

    def even_edges(self):
        return [_bw(e) for e in self.edges[1::2]]


def _bw(e):
    u, v = e
    return (v, u) if is_white(u) else (u, v)


def enumerate_paths(g: DimerGraph, w, b, max_paths: int = 10**6):
    """All simple paths from white ``w`` to black ``b`` (depth-first, fixed order)."""
    w, b = tuple(w), tuple(b)
    if w not in g.w_index or b not in g.b_index:
        raise KeyError("endpoints must be a white and a black vertex of the graph")
    out = []
    path = [w]
    on = {w}

    def rec(v):
        if v == b:
            out.append(OddPath(tuple(path)))
            if len(out) > max_paths:
                raise PathLimitError(f"more than {max_paths} paths")
            return
        for dx, dy in UNIT_STEPS:
            u = (v[0] + dx, v[1] + dy)
            if u in on or u not in g:
                continue
            on.add(u)
            path.append(u)
            rec(u)
            path.pop()
            on.discard(u)

    rec(w)
    return out


def path_factor(g: DimerGraph, lam: OddPath) -> GaussQ:
    """``(-1)^ell * prod_odd K(b, w) * prod_even conj(K(b, w))``."""
    f = GaussQ(-1 if lam.ell % 2 else 1)
    for b, w in lam.odd_edges():
        f = f * g.K(b, w)
    for b, w in lam.even_edges():
        f = f * g.K(b, w).conjugate()
    return f


def permutation_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


class RandomVariable:
    """Gaussian-integer valued function on ``Dim(G) x Dim(G)``.

    ``values`` is an integer array of shape ``(C, C, 2)`` holding real and
    imaginary parts; covers are listed in ``covers``.
    """

    def __init__(self, covers, values: np.ndarray):
        self.covers = covers
        self.values = values

    def __call__(self, i: int, j: int) -> GaussQ:
        re, im = self.values[i, j]
        return GaussQ(int(re), int(im))

    def table(self):
        """Sparse table ``{(i, j): value}`` of the nonzero entries."""
        nz = np.argwhere(np.any(self.values != 0, axis=2))
        return {(int(i), int(j)): self(int(i), int(j)) for i, j in nz}

    def expectation(self) -> GaussQ:
        c = len(self.covers)
        if c == 0:
            return ZERO
        s = self.values.sum(axis=(0, 1))
        return GaussQ(Q(int(s[0]), c * c), Q(int(s[1]), c * c))

    def __eq__(self, other):
        return isinstance(other, RandomVariable) and np.array_equal(self.values, other.values)


def _edge_bits(g: DimerGraph):
    eidx = {(g.blacks[b], g.whites[w]): k for k, (b, w) in enumerate(g.edges)}
    return eidx


def _cover_intersections(g: DimerGraph, covers):
    """Bit masks of ``omega ∩ omega_bar`` for every ordered pair of covers."""
    eidx = {e: k for k, e in enumerate(g.edges)}
    dtype = np.uint64 if len(g.edges) <= 64 else object
    masks = np.zeros(len(covers), dtype=dtype)
    for i, c in enumerate(covers):
        m = 0
        for w, b in enumerate(c.matching):
            m |= 1 << eidx[(b, w)]
        masks[i] = m if dtype is object else np.uint64(m)
    return masks[:, None] & masks[None, :]


def _adapted(path_mask: int, inter: np.ndarray) -> np.ndarray:
    pm = path_mask if inter.dtype == object else np.uint64(path_mask)
    return (inter & pm) == pm


def _group_by_mask(g: DimerGraph, paths, eidx):
    """Sum of path factors per odd-edge mask."""
    out: dict = {}
    for lam in paths:
        mask = 0
        for e in lam.odd_edges():
            mask |= 1 << eidx[e]
        out[mask] = out.get(mask, ZERO) + path_factor(g, lam)
    return out


def _gauss_int(z: GaussQ):
    return int(z.re), int(z.im)


def pair_observable(g: DimerGraph, pairs, cap: int = 14, max_paths: int = 10**6):
    """Random variable ``eta(w_1) xi(b_1) ... eta(w_n) xi(b_n)``.

    Evaluated from its definition ``sum_sigma sgn(sigma) prod_i
    sum_{lambda: w_i -> b_sigma(i)} f(lambda) 1_lambda``.
    """
    pairs = [(tuple(w), tuple(b)) for w, b in pairs]
    if g.n > cap:
        raise ValueError(f"size cap exceeded: {g.n} whites > {cap}")
    covers = enumerate_covers(g, cap=cap)
    C = len(covers)
    k = len(pairs)
    if k == 0:
        vals = np.zeros((C, C, 2), dtype=np.int64)
        vals[..., 0] = 1
        return RandomVariable(covers, vals)
    inter = _cover_intersections(g, covers)
    eidx = _edge_bits(g)
    # A[i][j] = sum over paths w_i -> b_j of f * indicator, as (re, im) arrays
    A = [[None] * k for _ in range(k)]
    cache: dict = {}
    for i, (w, _) in enumerate(pairs):
        for j, (_, b) in enumerate(pairs):
            key = (w, b)
            if key not in cache:
                acc = np.zeros((C, C, 2), dtype=np.int64)
                grouped = _group_by_mask(g, enumerate_paths(g, w, b, max_paths=max_paths), eidx)
                for mask, f in grouped.items():
                    if not f:
                        continue
                    re, im = _gauss_int(f)
                    ind = _adapted(mask, inter)
                    acc[ind, 0] += re
                    acc[ind, 1] += im
                cache[key] = acc
            A[i][j] = cache[key]
    total = np.zeros((C, C, 2), dtype=np.int64)
    for perm in itertools.permutations(range(k)):
        s = permutation_sign(perm)
        prod_re = np.ones((C, C), dtype=np.int64)
        prod_im = np.zeros((C, C), dtype=np.int64)
        for i in range(k):
            a = A[i][perm[i]]
            prod_re, prod_im = (prod_re * a[..., 0] - prod_im * a[..., 1],
                                prod_re * a[..., 1] + prod_im * a[..., 0])
        total[..., 0] += s * prod_re
        total[..., 1] += s * prod_im
    return RandomVariable(covers, total)


def pair_observable_disjoint(g: DimerGraph, pairs, cap: int = 14, max_paths: int = 10**6):
    """Same random variable, summing only over mutually vertex-disjoint path systems."""
    pairs = [(tuple(w), tuple(b)) for w, b in pairs]
    if g.n > cap:
        raise ValueError(f"size cap exceeded: {g.n} whites > {cap}")
    covers = enumerate_covers(g, cap=cap)
    C = len(covers)
    k = len(pairs)
    if k == 0:
        return pair_observable(g, pairs, cap=cap)
    eidx = _edge_bits(g)
    vidx = {v: n for n, v in enumerate(sorted(set(g.whites) | set(g.blacks)))}
    paths: dict = {}
    for w, _ in pairs:
        for _, b in pairs:
            if (w, b) not in paths:
                lst = []
                for lam in enumerate_paths(g, w, b, max_paths=max_paths):
                    vm = 0
                    for v in lam.vertices:
                        vm |= 1 << vidx[v]
                    em = 0
                    for e in lam.odd_edges():
                        em |= 1 << eidx[e]
                    lst.append((vm, em, path_factor(g, lam)))
                paths[(w, b)] = lst
    # coefficient per union of odd-edge masks
    coeff: dict = {}
    for perm in itertools.permutations(range(k)):
        s = permutation_sign(perm)

        def rec(i, vmask, emask, f):
            if i == k:
                coeff[emask] = coeff.get(emask, ZERO) + (f if s > 0 else -f)
                return
            for vm, em, pf in paths[(pairs[i][0], pairs[perm[i]][1])]:
                if vm & vmask:
                    continue
                rec(i + 1, vmask | vm, emask | em, f * pf)

        rec(0, 0, 0, GaussQ(1))
    inter = _cover_intersections(g, covers)
    total = np.zeros((C, C, 2), dtype=np.int64)
    for em, c in coeff.items():
        if not c:
            continue
        ind = _adapted(em, inter)
        re, im = _gauss_int(c)
        total[ind, 0] += re
        total[ind, 1] += im
    return RandomVariable(covers, total)
