"""Exact scalars: Gaussian rationals and Laurent polynomials in pi over them.

Gaussian rationals carry every combinatorial quantity (Kasteleyn entries,
inverse Kasteleyn matrices, Berezin integrals).  Values of the full-plane
Green's function and of the negative discrete monomials involve ``1/pi`` and
``pi``; :class:`PiPoly` represents the ring ``Q(i)[pi, 1/pi]`` exactly.
"""
from __future__ import annotations

import math
from numbers import Number

try:  # gmpy2 rationals are a drop-in, much faster Fraction
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as _Q

__all__ = ["Q", "GaussQ", "PiPoly", "ZERO", "ONE", "I", "to_gauss", "as_complex"]


def Q(num, den=1):
    """Rational number in the fastest available backend."""
    return _Q(num, den)


_ZQ = _Q(0)
_OQ = _Q(1)


class GaussQ:
    """Gaussian rational ``re + i*im`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_ZQ) else _Q(re)
        self.im = im if type(im) is type(_ZQ) else _Q(im)

    @staticmethod
    def _raw(re, im):
        g = GaussQ.__new__(GaussQ)
        g.re = re
        g.im = im
        return g

    def _coerce(self, other):
        if isinstance(other, GaussQ):
            return other
        if isinstance(other, complex):
            return GaussQ(_float_q(other.real), _float_q(other.imag))
        if isinstance(other, float):
            return GaussQ(_float_q(other), 0)
        if isinstance(other, Number) or type(other) is type(_ZQ):
            return GaussQ._raw(_Q(other), _ZQ)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussQ._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussQ._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return GaussQ._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return GaussQ._raw(a * c, _ZQ)
        return GaussQ._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.re * o.re + o.im * o.im
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        a, b, c, d = self.re, self.im, o.re, o.im
        return GaussQ._raw((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return (ONE / self) ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return GaussQ._raw(self.re, -self.im)

    def norm2(self):
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return f"GaussQ({self.re})"
        return f"GaussQ({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def _bitsize(q) -> int:
    return abs(q.numerator).bit_length() + q.denominator.bit_length()


def _project(terms, bits) -> complex:
    import mpmath

    with mpmath.workprec(bits):
        pi = mpmath.pi
        re = mpmath.mpf(0)
        im = mpmath.mpf(0)
        for k, c in terms.items():
            w = pi ** k
            if c.re:
                re += mpmath.mpf(int(c.re.numerator)) / int(c.re.denominator) * w
            if c.im:
                im += mpmath.mpf(int(c.im.numerator)) / int(c.im.denominator) * w
        return complex(float(re), float(im))


def _float_q(x: float):
    # floats are only accepted when they are exact dyadic rationals
    return _Q(*x.as_integer_ratio())


ZERO = GaussQ(0, 0)
ONE = GaussQ(1, 0)
I = GaussQ(0, 1)


def to_gauss(z) -> GaussQ:
    """Coerce ints, rationals, Gaussian integers given as complex, or GaussQ."""
    if isinstance(z, GaussQ):
        return z
    if isinstance(z, complex):
        return GaussQ(_float_q(z.real), _float_q(z.imag))
    if isinstance(z, tuple):
        return GaussQ(z[0], z[1])
    return GaussQ(z, 0)


def as_complex(z) -> complex:
    """Float projection of any exact scalar used in the package."""
    if isinstance(z, PiPoly):
        return z.to_complex()
    return complex(z)


class PiPoly:
    """Element of ``Q(i)[pi, 1/pi]``: a finite sum ``sum_k c_k pi**k``.

    >>> g = PiPoly({0: -1, -1: 2})      # -1 + 2/pi
    >>> round(float(g.to_complex().real), 6)
    -0.36338
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        if terms:
            for k, v in dict(terms).items():
                v = to_gauss(v)
                if v:
                    t[int(k)] = v
        self.terms = t

    @staticmethod
    def _raw(terms):
        p = PiPoly.__new__(PiPoly)
        p.terms = terms
        return p

    @classmethod
    def const(cls, c):
        return cls({0: c})

    @classmethod
    def pi(cls, power: int = 1):
        return cls({power: 1})

    def _coerce(self, other):
        if isinstance(other, PiPoly):
            return other
        if isinstance(other, (GaussQ, Number)) or type(other) is type(_ZQ):
            g = to_gauss(other)
            return PiPoly._raw({0: g} if g else {})
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        t = dict(self.terms)
        for k, v in o.terms.items():
            s = t.get(k)
            s = v if s is None else s + v
            if s:
                t[k] = s
            else:
                t.pop(k, None)
        return PiPoly._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return PiPoly._raw({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, (GaussQ, Number)) or type(other) is type(_ZQ):
            g = to_gauss(other)
            if not g:
                return PiPoly._raw({})
            return PiPoly._raw({k: v * g for k, v in self.terms.items()})
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        t: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = k1 + k2
                s = t.get(k)
                t[k] = v1 * v2 if s is None else s + v1 * v2
        return PiPoly._raw({k: v for k, v in t.items() if v})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PiPoly):
            if len(other.terms) != 1:
                raise ZeroDivisionError("only monomials in pi are invertible here")
            (k, c), = other.terms.items()
            return PiPoly._raw({j - k: v / c for j, v in self.terms.items()})
        g = to_gauss(other)
        return PiPoly._raw({k: v / g for k, v in self.terms.items()})

    def conjugate(self):
        return PiPoly._raw({k: v.conjugate() for k, v in self.terms.items()})

    def coeff(self, k: int) -> GaussQ:
        return self.terms.get(k, ZERO)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.terms == o.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def to_complex(self) -> complex:
        # coefficients can be huge with near-total cancellation, so the
        # projection is done in a working precision sized to the inputs
        if not self.terms:
            return 0j
        if len(self.terms) == 1:
            (k, c), = self.terms.items()
            return complex(c) * math.pi ** k
        bits = 64
        for c in self.terms.values():
            for part in (c.re, c.im):
                if part:
                    bits = max(bits, _bitsize(part) + 64)
        return _project(self.terms, bits)

    __complex__ = to_complex

    def __repr__(self):
        if not self.terms:
            return "PiPoly(0)"
        parts = []
        for k in sorted(self.terms):
            c = self.terms[k]
            parts.append(f"({c})" if k == 0 else f"({c})*pi^{k}")
        return "PiPoly(" + " + ".join(parts) + ")"
