"""Local fields, their evaluation in double-dimer correlations, nullity
probes and the fermion current modes.

A local field is a polynomial in commuting pair symbols
``phi(z) phi(w)``.  Each symbol slot holds a :class:`LinearForm`, a finite
combination ``sum_p c_p phi(p)``; a plain vertex is the unit form at that
point.  Mode application produces fields whose slots are contour sums, so
they stay one term long instead of expanding into thousands of vertex
monomials.

Expectations of translated fields are Pfaffians of the contraction matrix
``<f g>`` of the forms involved, which for vertex forms reduces to the
sorted Wick determinant.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from ._accel import pfaffian_batch
from .correlators import coupling_table
from .dimers import DimerGraph, induce
from .exact import ONE, ZERO, GaussQ
from .grassmann import permutation_parity
from .lattice import UNIT_STEPS, centered_square, diamond_contour, is_white, norm
from .monomials import MonomialFamily, family as monomial_family

__all__ = [
    "LinearForm",
    "LocalField",
    "vertex",
    "dee_xi",
    "deebar_xi",
    "parse_field",
    "evaluate",
    "ev_random_variable",
    "ProbeDomain",
    "ProbeSuite",
    "NullVerdict",
    "is_null",
    "ModeOperator",
    "mode_form",
    "apply_mode",
    "anticommutator",
    "anticommutator_check",
    "sandwiched_anticommutator_check",
    "FamilyExhaustedError",
    "d_symbol",
]


def _pt(p):
    return (int(p[0]), int(p[1]))


def _is_zero(c) -> bool:
    return not c


def _inexact(x) -> bool:
    return isinstance(x, (float, complex, np.floating, np.complexfloating))


def _add(a, b):
    """Sum that stays exact for exact inputs and falls back to complex doubles."""
    if _inexact(a) or _inexact(b):
        return complex(a) + complex(b)
    return a + b


def _mul(a, b):
    if _inexact(a) or _inexact(b):
        return complex(a) * complex(b)
    return a * b


class LinearForm:
    """Finite combination ``sum_p c_p phi(p)`` with a canonical item order."""

    __slots__ = ("items", "_hash", "_key")

    def __init__(self, mapping=None):
        if isinstance(mapping, dict):
            it = mapping.items()
        else:
            it = mapping or ()
        acc: dict = {}
        for p, c in it:
            p = _pt(p)
            acc[p] = _add(acc[p], c) if p in acc else c
        self.items = tuple(sorted((p, c) for p, c in acc.items() if not _is_zero(c)))
        self._hash = hash(tuple((p, complex(c)) for p, c in self.items))
        self._key = None

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, LinearForm) and self.items == other.items

    def __bool__(self):
        return bool(self.items)

    def __len__(self):
        return len(self.items)

    def __repr__(self):
        if len(self.items) == 1 and self.items[0][1] == 1:
            return f"phi{self.items[0][0]}"
        return "(" + " + ".join(f"{c}*phi{p}" for p, c in self.items) + ")"

    @property
    def points(self):
        return [p for p, _ in self.items]

    def key(self):
        if self._key is None:
            self._key = tuple((p, complex(c).real, complex(c).imag) for p, c in self.items)
        return self._key

    def scaled(self, s) -> "LinearForm":
        return LinearForm([(p, c * s) for p, c in self.items])

    def is_vertex(self) -> bool:
        return len(self.items) == 1 and self.items[0][1] == 1


def vertex(p) -> LinearForm:
    """The single symbol ``phi(p)``."""
    return LinearForm([(p, 1)])


def dee_xi(w) -> LinearForm:
    """``d phi(w) = sum_d phi(w + d) / d``."""
    x, y = _pt(w)
    return LinearForm([((x + dx, y + dy), GaussQ(dx, -dy)) for dx, dy in UNIT_STEPS])


def deebar_xi(w) -> LinearForm:
    """``dbar phi(w) = sum_d phi(w + d) / conj(d)``."""
    x, y = _pt(w)
    return LinearForm([((x + dx, y + dy), GaussQ(dx, dy)) for dx, dy in UNIT_STEPS])


def _pair_key(pair):
    return (pair[0].key(), pair[1].key())


def _canonical(monomial):
    return tuple(sorted(monomial, key=_pair_key))


class LocalField:
    """Sparse map from monomials (sorted tuples of form pairs) to scalars.

    Pair symbols commute in the ring; reordering the two slots of a pair is
    a different generator (their sum is null, not zero).
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        acc: dict = {}
        for mono, c in (terms or {}).items():
            mono = _canonical(mono)
            acc[mono] = _add(acc[mono], c) if mono in acc else c
        self.terms = {m: c for m, c in acc.items() if not _is_zero(c)}

    @classmethod
    def _raw(cls, terms) -> "LocalField":
        """From already canonical monomials."""
        f = cls.__new__(cls)
        f.terms = {m: c for m, c in terms.items() if not _is_zero(c)}
        return f

    # construction -----------------------------------------------------
    @classmethod
    def one(cls) -> "LocalField":
        return cls({(): ONE})

    @classmethod
    def zero(cls) -> "LocalField":
        return cls({})

    @classmethod
    def pair(cls, a, b, coeff=ONE) -> "LocalField":
        a = a if isinstance(a, LinearForm) else vertex(a)
        b = b if isinstance(b, LinearForm) else vertex(b)
        if not a or not b:
            return cls.zero()
        return cls({((a, b),): coeff})

    @classmethod
    def from_points(cls, *points, coeff=ONE) -> "LocalField":
        """``phi(p_1) phi(p_2) ... phi(p_2n)`` grouped into consecutive pairs."""
        if len(points) % 2:
            raise ValueError("a monomial needs an even number of symbols")
        f = cls({(): coeff})
        for k in range(0, len(points), 2):
            f = f * cls.pair(points[k], points[k + 1])
        return f

    # ring -------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, LocalField):
            return other
        return LocalField({(): other})

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = _add(out[m], c) if m in out else c
        return LocalField._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return LocalField._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, LocalField):
            return LocalField._raw({m: _mul(c, other) for m, c in self.terms.items()})
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _canonical(ma + mb)
                v = _mul(ca, cb)
                out[m] = _add(out[m], v) if m in out else v
        return LocalField(out)

    def __rmul__(self, other):
        return LocalField._raw({m: _mul(other, c) for m, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, LocalField):
            other = self._coerce(other)
        return self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms.items():
            body = "*".join(f"{a}*{b}" for a, b in m)
            parts.append(f"({c})" + ("*" + body if body else ""))
        return " + ".join(parts)

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # geometry ---------------------------------------------------------
    def support(self) -> set:
        s = set()
        for m in self.terms:
            for a, b in m:
                s.update(a.points)
                s.update(b.points)
        return s

    def radius(self) -> int:
        """Largest Manhattan norm of the support (0 for constants)."""
        return max((norm(p) for p in self.support()), default=0)

    def monomial_fields(self):
        """The field split into single-term fields."""
        return [LocalField._raw({m: c}) for m, c in self.terms.items()]

    def expand(self) -> "LocalField":
        """Same field with every form expanded into vertex symbols."""
        out = LocalField.zero()
        for m, c in self.terms.items():
            acc = LocalField({(): c})
            for a, b in m:
                acc = acc * _sum_pairs(a, b)
            out = out + acc
        return out


def _sum_pairs(a: LinearForm, b: LinearForm) -> LocalField:
    out: dict = {}
    for p, ca in a.items:
        for q, cb in b.items:
            key = ((vertex(p), vertex(q)),)
            out[key] = _add(out[key], _mul(ca, cb)) if key in out else _mul(ca, cb)
    return LocalField(out)


# ----------------------------------------------------------------------
# literal syntax

_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?[ij]?|[ij])"
                    r"|(?P<sym>eta|xi|phi|dbarxi|dxi)\s*\(\s*(?P<x>-?\d+)\s*,\s*(?P<y>-?\d+)\s*\)"
                    r"|(?P<op>[-+*()]))")


def _number(text: str):
    if text in ("i", "j"):
        return GaussQ(0, 1)
    if text[-1] in "ij":
        v = text[:-1]
        return GaussQ(0, int(v)) if v.isdigit() else complex(0, float(v))
    return int(text) if text.isdigit() else float(text)


def parse_field(text: str) -> LocalField:
    """Parse e.g. ``"eta(1,0)*xi(0,0) + 2*eta(1,0)*eta(-1,0)"``.

    Symbols: ``eta`` (white point), ``xi`` (black point), ``phi`` (any),
    ``dxi``/``dbarxi`` (lattice derivatives of the symbol at a white point).
    Consecutive symbols inside a product form the pairs.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse field at {text[pos:]!r}")
        pos = m.end()
        if m.group("num"):
            tokens.append(("num", _number(m.group("num"))))
        elif m.group("sym"):
            tokens.append(("sym", (m.group("sym"), (int(m.group("x")), int(m.group("y"))))))
        else:
            tokens.append(("op", m.group("op")))
    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else (None, None)

    def parse_sum():
        nonlocal i
        total = LocalField.zero()
        sign = 1
        first = True
        while True:
            kind, val = peek()
            if kind == "op" and val in "+-":
                sign = -sign if val == "-" else sign
                i += 1
                continue
            if not first and kind is None:
                raise ValueError("dangling operator")
            total = total + parse_product() * sign
            first = False
            kind, val = peek()
            if kind == "op" and val in "+-":
                sign = 1
                continue
            return total

    def parse_product():
        nonlocal i
        coeff = ONE
        symbols = []
        sub = None
        while True:
            kind, val = peek()
            if kind == "num":
                coeff = coeff * val
                i += 1
            elif kind == "sym":
                symbols.append(_symbol(*val))
                i += 1
            elif kind == "op" and val == "(":
                i += 1
                inner = parse_sum()
                if peek() != ("op", ")"):
                    raise ValueError("unbalanced parenthesis")
                i += 1
                if len(inner.terms) == 1 and () in inner.terms:
                    coeff = coeff * inner.terms[()]
                else:
                    sub = inner if sub is None else sub * inner
            else:
                raise ValueError(f"unexpected token {val!r}")
            if peek() == ("op", "*"):
                i += 1
                continue
            break
        if len(symbols) % 2:
            raise ValueError("a product needs an even number of symbols")
        f = LocalField({(): coeff})
        for k in range(0, len(symbols), 2):
            f = f * LocalField.pair(symbols[k], symbols[k + 1])
        return f * sub if sub is not None else f

    result = parse_sum()
    if i != len(tokens):
        raise ValueError(f"trailing input near token {tokens[i]!r}")
    return result


def _symbol(name: str, p) -> LinearForm:
    if name == "eta" and not is_white(p):
        raise ValueError(f"eta needs a white point, got {p}")
    if name == "xi" and is_white(p):
        raise ValueError(f"xi needs a black point, got {p}")
    if name in ("dxi", "dbarxi") and not is_white(p):
        raise ValueError(f"{name} is taken at a white point, got {p}")
    if name == "dxi":
        return dee_xi(p)
    if name == "dbarxi":
        return deebar_xi(p)
    return vertex(p)


# ----------------------------------------------------------------------
# evaluation


def _sorted_pairs(points):
    """Sign and (white, black) pairs of a vertex sequence, or None if unbalanced."""
    whites = [k for k, p in enumerate(points) if is_white(p)]
    blacks = [k for k, p in enumerate(points) if not is_white(p)]
    if len(whites) != len(blacks):
        return None
    order = []
    for a, b in zip(whites, blacks):
        order += [a, b]
    sign = permutation_parity(order)
    return sign, [(points[a], points[b]) for a, b in zip(whites, blacks)]


def evaluate(F: LocalField, z, g: DimerGraph, backend: str = "exact"):
    """``E[ev_z(F)]`` through Wick determinants of the coupling table.

    Every form is expanded into vertex monomials; a monomial is zero when
    it is unbalanced or leaves the graph, otherwise it contributes the sign
    of the sort into (white, black, ...) order times the Wick determinant.
    """
    t = coupling_table(g, backend)
    zx, zy = _pt(z)
    total = ZERO if t.exact else 0j
    for mono, c in F.expand().terms.items():
        pts = []
        for a, b in mono:
            pts.append(a.items[0][0])
            pts.append(b.items[0][0])
        coef = c
        for a, b in mono:
            coef = coef * a.items[0][1] * b.items[0][1]
        pts = [(x + zx, y + zy) for x, y in pts]
        if any(p not in g for p in pts):
            continue
        sp = _sorted_pairs(pts)
        if sp is None:
            continue
        sign, pairs = sp
        val = t.multipoint(pairs)
        if not t.exact:
            coef = complex(coef)
        total = total + (coef * val if sign > 0 else -(coef * val))
    return total


def ev_random_variable(F: LocalField, z, g: DimerGraph, cap: int = 14):
    """``ev_z(F)`` as a random variable on pairs of dimer covers.

    Coefficients must be Gaussian integers; uses the non-intersecting
    path-system form of the pair observables.
    """
    from .observables import RandomVariable, pair_observable_disjoint
    from .dimers import enumerate_covers

    covers = enumerate_covers(g, cap=cap)
    total = np.zeros((len(covers), len(covers), 2), dtype=np.int64)
    zx, zy = _pt(z)
    for mono, c in F.expand().terms.items():
        coef = GaussQ(1)
        coef = coef * c
        pts = []
        for a, b in mono:
            coef = coef * a.items[0][1] * b.items[0][1]
            pts += [a.items[0][0], b.items[0][0]]
        pts = [(x + zx, y + zy) for x, y in pts]
        if any(p not in g for p in pts):
            continue
        sp = _sorted_pairs(pts)
        if sp is None:
            continue
        sign, pairs = sp
        if coef.re.denominator != 1 or coef.im.denominator != 1:
            raise ValueError("random-variable evaluation needs Gaussian-integer coefficients")
        rv = pair_observable_disjoint(g, pairs, cap=cap).values
        re_, im_ = int(coef.re) * sign, int(coef.im) * sign
        total[..., 0] += re_ * rv[..., 0] - im_ * rv[..., 1]
        total[..., 1] += re_ * rv[..., 1] + im_ * rv[..., 0]
    return RandomVariable(covers, total)


class ProbeDomain:
    """A dimer graph with its dense float coupling matrix ``conj(K^-1)``."""

    def __init__(self, domain):
        self.domain = domain
        self.graph = induce(domain)
        k = self.graph.kasteleyn_array()
        self.coupling = np.conj(np.linalg.inv(k))  # [white, black]

    def gram(self, forms, z) -> np.ndarray:
        """Antisymmetric matrix ``<f_i f_j>`` of the forms translated by ``z``."""
        import scipy.sparse as sp

        g = self.graph
        zx, zy = _pt(z)
        wr, wc, wv, br, bc, bv = [], [], [], [], [], []
        for i, f in enumerate(forms):
            for (x, y), c in f.items:
                p = (x + zx, y + zy)
                j = g.w_index.get(p)
                if j is not None:
                    wr.append(i)
                    wc.append(j)
                    wv.append(complex(c))
                    continue
                j = g.b_index.get(p)
                if j is not None:
                    br.append(i)
                    bc.append(j)
                    bv.append(complex(c))
        n = len(forms)
        W = sp.csr_matrix((wv, (wr, wc)), shape=(n, len(g.whites)), dtype=complex)
        B = sp.csr_matrix((bv, (br, bc)), shape=(n, len(g.blacks)), dtype=complex)
        half = np.asarray((B @ (W @ self.coupling).T).T)
        return half - half.T


@dataclass
class NullVerdict:
    null: bool
    max_residual: float
    max_relative: float
    witness: dict | None
    checked: int
    radius: int

    @property
    def verdict(self) -> str:
        return "NULL-CONSISTENT" if self.null else "WITNESSED-NONNULL"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "max_probe_residual": self.max_residual,
                "max_relative_residual": self.max_relative, "checked": self.checked,
                "R": self.radius, "witness": self.witness}


_PROBE_DOMAINS: dict = {}


def probe_domain(half: int) -> ProbeDomain:
    pd = _PROBE_DOMAINS.get(half)
    if pd is None:
        pd = _PROBE_DOMAINS[half] = ProbeDomain(centered_square(half))
    return pd


@dataclass
class ProbeSuite:
    """Test data for nullity: domains, evaluation points and insertions.

    Domains are centered squares with a corner sink.  The base half sides
    are raised (keeping their spacing) when the exclusion radius does not
    fit.  Insertions, in field coordinates, are: none, one adjacent pair
    on each axis at norms ``R+1, R+2``, and the east and west pairs
    together.
    """

    halves: tuple = (8, 12, 16)
    points: tuple = ((0, 0), (2, 0), (1, 1), (-1, -1), (1, 0), (0, -1))

    def domain_halves(self, R: int):
        need = R + 4
        need += need % 2
        shift = max(0, need - self.halves[0])
        return tuple(h + shift for h in self.halves)

    @staticmethod
    def insertions(R: int):
        a, b = R + 1, R + 2
        pairs = [
            ((a, 0), (b, 0)),
            ((0, a), (0, b)),
            ((-a, 0), (-b, 0)),
            ((0, -a), (0, -b)),
        ]
        probes = [()]
        for p, q in pairs:
            probes.append((vertex(p), vertex(q)))
        probes.append((vertex(pairs[0][0]), vertex(pairs[0][1]),
                       vertex(pairs[2][0]), vertex(pairs[2][1])))
        return probes


DEFAULT_SUITE = ProbeSuite()


def probe_values(F: LocalField, pd: ProbeDomain, z, probes):
    """Per probe ``(sum_terms c * Pf, sum_terms |c * Pf|)``."""
    forms: list = []
    index: dict = {}

    def idx(f):
        k = index.get(f)
        if k is None:
            k = index[f] = len(forms)
            forms.append(f)
        return k

    term_idx = []
    coeffs = []
    for mono, c in F.terms.items():
        seq = []
        for a, b in mono:
            seq += [idx(a), idx(b)]
        term_idx.append(seq)
        coeffs.append(complex(c))
    probe_idx = [[idx(f) for f in pr] for pr in probes]
    if not forms:
        gm = np.zeros((0, 0), dtype=complex)
    else:
        gm = pd.gram(forms, z)
    coeffs = np.array(coeffs, dtype=complex)
    out = []
    for pi in probe_idx:
        groups: dict = {}
        for t, seq in enumerate(term_idx):
            groups.setdefault(len(seq) + len(pi), []).append(t)
        value = 0j
        scale = 0.0
        for k, ts in groups.items():
            if k == 0:
                vals = np.ones(len(ts), dtype=complex)
            else:
                sel = np.array([term_idx[t] + pi for t in ts], dtype=np.int64)
                mats = gm[sel[:, :, None], sel[:, None, :]]
                vals = pfaffian_batch(mats)
            contrib = coeffs[ts] * vals
            value += contrib.sum()
            scale += float(np.abs(contrib).sum())
        out.append((value, scale))
    return out


def is_null(F: LocalField, R: int | None = None, suite: ProbeSuite | None = None,
            tol: float = 1e-9) -> NullVerdict:
    """Probe-based semi-decision of nullity.

    A probe passes when ``|E| <= tol * max(1, S)`` with ``S`` the sum of the
    absolute term contributions (so the tolerance is relative to the size
    of the cancelling pieces).
    """
    suite = suite or DEFAULT_SUITE
    if R is None:
        R = F.radius() + 4
    probes = suite.insertions(R)
    worst_abs = 0.0
    worst_rel = 0.0
    witness = None
    checked = 0
    for half in suite.domain_halves(R):
        pd = probe_domain(half)
        for z in suite.points:
            for k, (val, scale) in enumerate(probe_values(F, pd, z, probes)):
                checked += 1
                rel = abs(val) / max(1.0, scale)
                worst_abs = max(worst_abs, abs(val))
                if rel > worst_rel:
                    worst_rel = rel
                    if rel > tol:
                        witness = {"half": half, "z": list(z), "probe": k,
                                   "value": [val.real, val.imag], "scale": scale}
    return NullVerdict(worst_rel <= tol, worst_abs, worst_rel, witness, checked, R)


# ----------------------------------------------------------------------
# current modes


class FamilyExhaustedError(RuntimeError):
    pass


_DEFAULT_NMAX = 16
_DEFAULT_RMAX = 32


def default_family(nmax: int = 0, rmax: int = 0) -> MonomialFamily:
    return monomial_family(max(nmax, _DEFAULT_NMAX), max(rmax, _DEFAULT_RMAX))


def d_symbol(alpha: str, beta: str) -> int:
    """Antisymmetric symbol with ``d(-, +) = 1``."""
    if alpha == beta:
        return 0
    return 1 if (alpha, beta) == ("-", "+") else -1


def _chi(alpha: str, w) -> LinearForm:
    if alpha == "-":
        return vertex(w)
    if alpha == "+":
        return dee_xi(w)
    raise ValueError(f"mode label must be '+' or '-', got {alpha!r}")


_CONTOURS: dict = {}


def _contour_edges(r: int):
    e = _CONTOURS.get(r)
    if e is None:
        e = _CONTOURS[r] = diamond_contour(r).edges()
    return e


_MODE_FORMS: dict = {}


def mode_form(alpha: str, n: int, radius: int, fam: MonomialFamily) -> LinearForm:
    """``sum_k (p_k - p_{k-1}) z^[n](b_k) chi^alpha(w_k)`` on the diamond contour."""
    key = (alpha, n, radius, id(fam))
    f = _MODE_FORMS.get(key)
    if f is None or f[0] is not fam:
        f = _MODE_FORMS[key] = (fam, _mode_form(alpha, n, radius, fam))
    return f[1]


def _mode_form(alpha, n, radius, fam):
    if n not in fam:
        raise FamilyExhaustedError(f"monomial index {n} not in the family")
    if radius + 2 > fam.rmax:
        raise FamilyExhaustedError(f"contour radius {radius} exceeds the family box {fam.rmax}")
    acc: dict = {}
    for (dx, dy), w, b in _contour_edges(radius):
        v = fam.value(n, b)
        if v == 0:
            continue
        c = complex(dx, dy) * v
        for p, cp in _chi(alpha, w).items:
            acc[p] = acc.get(p, 0) + c * complex(cp)
    return LinearForm(acc)


@dataclass(frozen=True)
class ModeOperator:
    """``chi^alpha_m chi^beta_n``: ``m`` on the outer contour, ``n`` on the inner one."""

    alpha: str
    m: int
    beta: str
    n: int

    def radii(self, support_radius: int, fam: MonomialFamily, inner_extra: int = 0,
              outer_extra: int = 0):
        """Inner and outer diamond radii for a field of the given support radius."""
        if self.n not in fam or self.m not in fam:
            raise FamilyExhaustedError(f"indices {self.m}, {self.n} outside the family")
        r_in = max(support_radius + 1, fam.singular_radius(self.n)) + inner_extra
        r_out = max(r_in + 2, fam.singular_radius(self.m)) + outer_extra
        return r_in, r_out


def apply_mode(op: ModeOperator, F: LocalField, fam: MonomialFamily | None = None,
               inner_extra: int = 0, outer_extra: int = 0) -> LocalField:
    """Representative of ``chi^alpha_m chi^beta_n (F)``.

    Applied monomial by monomial: the inner contour surrounds the monomial's
    support at distance > 1 and the singular ball of the inner index, the
    outer contour lies two steps outside it and surrounds the singular ball
    of the outer index.
    """
    fam = fam or default_family()
    out: dict = {}
    for mono, c in F.terms.items():
        s = LocalField._raw({mono: c}).radius()
        r_in, r_out = op.radii(s, fam, inner_extra, outer_extra)
        inner = mode_form(op.beta, op.n, r_in, fam)
        if not inner:
            continue
        outer = mode_form(op.alpha, op.m, r_out, fam)
        if not outer:
            continue
        m2 = _canonical(((outer, inner),) + mono)
        val = complex(c) / (2 * math.pi)
        out[m2] = out[m2] + val if m2 in out else val
    return LocalField._raw(out)


def anticommutator(alpha: str, n: int, beta: str, m: int, F: LocalField,
                   fam: MonomialFamily | None = None) -> LocalField:
    """``{chi^alpha_n, chi^beta_m}(F) = chi^alpha_n chi^beta_m F + chi^beta_m chi^alpha_n F``."""
    return (apply_mode(ModeOperator(alpha, n, beta, m), F, fam)
            + apply_mode(ModeOperator(beta, m, alpha, n), F, fam))


@dataclass
class AnticommutatorReport:
    alpha: str
    n: int
    beta: str
    m: int
    expected: complex
    verdict: NullVerdict

    @property
    def ok(self) -> bool:
        return self.verdict.null


def anticommutator_check(alpha: str, n: int, beta: str, m: int, F: LocalField,
                         fam: MonomialFamily | None = None, tol: float = 1e-9,
                         suite: ProbeSuite | None = None) -> AnticommutatorReport:
    """Nullity of ``{chi^alpha_n, chi^beta_m}(F) - n delta_{n+m} d^{alpha beta} F``."""
    k = n * d_symbol(alpha, beta) if n + m == 0 else 0
    resid = anticommutator(alpha, n, beta, m, F, fam) - F * k
    return AnticommutatorReport(alpha, n, beta, m, k, is_null(resid, suite=suite, tol=tol))


def sandwiched_anticommutator_check(gamma: str, k: int, alpha: str, n: int, beta: str, m: int,
                                    delta: str, l: int, F: LocalField,
                                    fam: MonomialFamily | None = None, tol: float = 1e-9,
                                    suite: ProbeSuite | None = None) -> AnticommutatorReport:
    """``chi^g_k {chi^a_n, chi^b_m} chi^d_l (F) - n delta_{n+m} d^{ab} chi^g_k chi^d_l (F)``.

    The operator ``chi^g_k chi^a_n o chi^b_m chi^d_l`` composes the two pair
    modes, the right one applied first.
    """
    fam = fam or default_family()

    def comp(a1, i1, a2, i2):
        inner = apply_mode(ModeOperator(a2, i2, delta, l), F, fam)
        return apply_mode(ModeOperator(gamma, k, a1, i1), inner, fam)

    lhs = comp(alpha, n, beta, m) + comp(beta, m, alpha, n)
    c = n * d_symbol(alpha, beta) if n + m == 0 else 0
    rhs = apply_mode(ModeOperator(gamma, k, delta, l), F, fam) * c
    return AnticommutatorReport(alpha, n, beta, m, c, is_null(lhs - rhs, suite=suite, tol=tol))
