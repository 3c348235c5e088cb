"""Exact Grassmann algebra with Berezin integration.

Elements are sparse maps from bitsets of generator indices to exact
scalars.  The bit position of a generator is its place in the reference
order, so a bitset stands for the ordered monomial ``g_1 g_2 ... g_k``
with increasing positions.
"""
from __future__ import annotations

from .dimers import DimerGraph
from .exact import GaussQ, ONE, ZERO, to_gauss

__all__ = [
    "GeneratorSet",
    "GrassmannElement",
    "FermionAction",
    "merge_sign",
    "permutation_parity",
    "berezin",
    "partition_function",
    "correlator",
    "symplectic_generators",
]


def merge_sign(a: int, b: int) -> int:
    """Sign of reordering ``v_a v_b`` into increasing order (0 if they overlap)."""
    if a & b:
        return 0
    inv = 0
    while b:
        low = b & -b
        j = low.bit_length() - 1
        inv += bin(a >> (j + 1)).count("1")
        b ^= low
    return -1 if inv & 1 else 1


def permutation_parity(seq) -> int:
    """``+1`` or ``-1``: sign of the permutation sorting ``seq``."""
    seq = list(seq)
    seen = [False] * len(seq)
    rank = {v: i for i, v in enumerate(sorted(seq))}
    parity = 0
    for i in range(len(seq)):
        if not seen[i]:
            k, ln = i, 0
            while not seen[k]:
                seen[k] = True
                k = rank[seq[k]]
                ln += 1
            parity += ln - 1
    return -1 if parity & 1 else 1


class GeneratorSet:
    """Named generators with a reference order (positions ``0..n-1``)."""

    def __init__(self, names):
        self.names = tuple(names)
        self.index = {n: i for i, n in enumerate(self.names)}
        if len(self.index) != len(self.names):
            raise ValueError("generator names must be distinct")

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, GeneratorSet) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def gen(self, name) -> "GrassmannElement":
        return GrassmannElement(self, {1 << self.index[name]: ONE})

    def scalar(self, c) -> "GrassmannElement":
        c = to_gauss(c)
        return GrassmannElement(self, {0: c} if c else {})

    @property
    def full(self) -> int:
        return (1 << len(self.names)) - 1


class GrassmannElement:
    __slots__ = ("gens", "terms")

    def __init__(self, gens: GeneratorSet, terms=None):
        self.gens = gens
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def _check(self, other):
        if other.gens is not self.gens and other.gens != self.gens:
            raise ValueError("generator-set mismatch")

    def _coerce(self, other):
        if isinstance(other, GrassmannElement):
            self._check(other)
            return other
        return self.gens.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return GrassmannElement(self.gens, out)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannElement(self.gens, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, GrassmannElement):
            c = to_gauss(other)
            return GrassmannElement(self.gens, {k: v * c for k, v in self.terms.items()})
        self._check(other)
        out: dict = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                s = merge_sign(ka, kb)
                if s:
                    k = ka | kb
                    p = va * vb
                    out[k] = out.get(k, ZERO) + (p if s > 0 else -p)
        return GrassmannElement(self.gens, out)

    def __rmul__(self, other):
        c = to_gauss(other)
        return GrassmannElement(self.gens, {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, GrassmannElement):
            other = self.gens.scalar(other)
        return self.gens == other.gens and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda m: (bin(m).count("1"), m)):
            names = [str(self.gens.names[i]) for i in range(len(self.gens)) if k >> i & 1]
            parts.append(f"({self.terms[k]})" + ("*" + "*".join(names) if names else ""))
        return " + ".join(parts)

    def constant(self):
        return self.terms.get(0, ZERO)

    def is_even(self) -> bool:
        return all(bin(k).count("1") % 2 == 0 for k in self.terms)

    def exp(self) -> "GrassmannElement":
        """Power series, terminating by nilpotency."""
        if self.constant():
            raise ValueError("exp requires a vanishing constant term")
        result = self.gens.scalar(1)
        power = self.gens.scalar(1)
        k = 0
        while True:
            k += 1
            power = power * self
            power = GrassmannElement(self.gens, {m: v / k for m, v in power.terms.items()})
            if not power.terms:
                return result
            result = result + power


def berezin(v: GrassmannElement, order=None):
    """Top coefficient of ``v`` in the basis sorted by ``order``.

    ``order`` maps each generator name to its position; ``None`` is the
    reference order of the generator set.
    """
    top = v.terms.get(v.gens.full, ZERO)
    if order is None or not top:
        return top
    pos = [order[n] for n in v.gens.names]
    return top if permutation_parity(pos) > 0 else -top


def symplectic_generators(g: DimerGraph, vertex_order=None) -> GeneratorSet:
    """Generators ``eta, eta_bar`` on whites and ``xi, xi_bar`` on blacks.

    With a vertex order ``s`` the positions are ``xi_bar(b) -> 2s(b)-1``,
    ``xi(b) -> 2s(b)``, ``eta(w) -> 2s(w)-1`` and ``eta_bar(w) -> 2s(w)``.
    """
    verts = vertex_order or sorted(g.whites + g.blacks)
    names = []
    for v in verts:
        if v in g.w_index:
            names += [("eta", v), ("eta_bar", v)]
        else:
            names += [("xi_bar", v), ("xi", v)]
    return GeneratorSet(names)


class FermionAction:
    """Quadratic action coupling fermions along the edges of a graph.

    ``convention="edge"`` (default) is
    ``sum_{edges} (conj(K(b,w)) eta(w) xi(b) + K(b,w) eta_bar(w) xi_bar(b))``,
    whose correlations reproduce ``E[eta(w) xi(b)] = conj(K^{-1}(w, b))``.
    ``convention="derivative"`` is ``sum_w eta(w) dbar^K xi(w) + eta_bar(w)
    d^K xi_bar(w)`` with the Kasteleyn derivatives taken at white vertices;
    the minus sign there flips every pair, so ``n``-pair correlations carry
    ``(-1)^n``.
    """

    def __init__(self, graph: DimerGraph, vertex_order=None, convention: str = "edge"):
        if convention not in ("edge", "derivative"):
            raise ValueError(f"unknown convention {convention!r}")
        self.graph = graph
        self.convention = convention
        self.gens = symplectic_generators(graph, vertex_order)
        sign = 1 if convention == "edge" else -1
        # quadratic pieces (coefficient, first generator, second generator)
        self.quadratic = []
        for b, w in graph.edge_list():
            k = graph.K(b, w) * sign
            self.quadratic.append((k.conjugate(), ("eta", w), ("xi", b)))
            self.quadratic.append((k, ("eta_bar", w), ("xi_bar", b)))

    @property
    def element(self) -> GrassmannElement:
        s = self.gens.scalar(0)
        for c, x, y in self.quadratic:
            s = s + self.gens.gen(x) * self.gens.gen(y) * c
        return s

    def integrate(self, insertions=()):
        """``int insertions * e^S`` in the symplectic order.

        ``e^S`` is the product of ``1 + c x y`` over the quadratic pieces
        (they commute); partial products that can no longer reach the top
        monomial are dropped.
        """
        gens = self.gens
        idx = gens.index
        ins = 0
        sign = 1
        for name in insertions:
            bit = 1 << idx[name]
            s = merge_sign(ins, bit)
            if not s:
                return ZERO
            sign *= s
            ins |= bit
        factors = []
        for c, x, y in self.quadratic:
            bx, by = 1 << idx[x], 1 << idx[y]
            s = merge_sign(bx, by)
            factors.append((bx | by, c if s > 0 else -c))
        # process vertex by vertex so generators saturate early
        factors.sort(key=lambda f: f[0].bit_length())
        remaining = [0] * (len(factors) + 1)
        for k in range(len(factors) - 1, -1, -1):
            remaining[k] = remaining[k + 1] | factors[k][0]
        full = gens.full
        if (ins | remaining[0]) != full:
            return ZERO
        state = {ins: ONE if sign > 0 else -ONE}
        for k, (m, c) in enumerate(factors):
            need = remaining[k + 1]
            new: dict = {}
            for key, v in state.items():
                if (key | need) == full:
                    new[key] = new.get(key, ZERO) + v
                if not key & m:
                    nk = key | m
                    if (nk | need) == full:
                        s = merge_sign(key, m)
                        p = v * c
                        new[nk] = new.get(nk, ZERO) + (p if s > 0 else -p)
            state = {a: b for a, b in new.items() if b}
        return state.get(full, ZERO)


def partition_function(a: FermionAction):
    """``int e^S``; equals ``|det K|^2``."""
    return a.integrate(())


def correlator(a: FermionAction, insertions):
    """Normalized Berezin integral of the ordered insertions against ``e^S``.

    Insertions are generator names such as ``("eta", (1, 0))``.
    """
    insertions = [(n, tuple(v)) for n, v in insertions]
    if len(set(insertions)) < len(insertions):
        return ZERO
    z = partition_function(a)
    if not z:
        raise ZeroDivisionError("graph is not dimerable")
    return a.integrate(insertions) / z
