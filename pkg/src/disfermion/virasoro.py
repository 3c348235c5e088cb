"""Normally ordered mode sums, the Virasoro modes ``L_n`` and their checks.

Operators act field by field.  Sums over the mode index are cut to a
window outside of which every term vanishes identically: a pair mode is
exactly zero when the monomial on its inner contour vanishes there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import (
    DEFAULT_SUITE,
    FamilyExhaustedError,
    LocalField,
    ModeOperator,
    NullVerdict,
    ProbeSuite,
    anticommutator,
    apply_mode,
    default_family,
    is_null,
    probe_domain,
    probe_values,
)
from .monomials import MonomialFamily

__all__ = [
    "CENTRAL_CHARGE",
    "WINDOW_MARGIN",
    "normal_ordered",
    "truncation_bound",
    "window",
    "normal_sum",
    "apply_virasoro",
    "commutator",
    "commutator_check",
    "central_charge_fit",
    "comm_one_step_check",
    "trick1_check",
    "trick2_check",
    "trick1_scalar",
    "trick2_scalar",
    "normal_order_difference_check",
    "IdentityReport",
]

CENTRAL_CHARGE = -2
WINDOW_MARGIN = 2


def normal_ordered(m: int, n: int, cut: int):
    """``:chi^+_m chi^-_n:_cut`` as ``[(sign, ModeOperator)]``."""
    if n - m >= cut:
        return [(1, ModeOperator("+", m, "-", n))]
    return [(-1, ModeOperator("-", n, "+", m))]


def _apply_terms(terms, F: LocalField, fam) -> LocalField:
    out = LocalField.zero()
    for s, op in terms:
        out = out + apply_mode(op, F, fam) * s
    return out


def truncation_bound(F: LocalField, fam: MonomialFamily | None = None) -> int:
    """Smallest ``N`` with the inner contour of every monomial inside the null ball of ``z^[N]``.

    For a monomial of support radius ``s`` the inner contour hugs the ball
    of radius ``s + 1``; its black vertices reach norm ``s + 2``.
    """
    fam = fam or default_family()
    need = 0
    for mono in F.monomial_fields():
        need = max(need, mono.radius() + 2)
    if not F.terms:
        need = 2
    for n in range(0, fam.nmax + 1):
        if fam.null_radius(n) >= need:
            return n
    raise FamilyExhaustedError(f"no monomial in the family vanishes on the ball of radius {need}")


def window(p: int, cut: int, N: int, margin: int = WINDOW_MARGIN):
    """Index range of ``sum_k :chi^+_{p-k} chi^-_k:_cut`` beyond which terms vanish."""
    mid = (p + cut) / 2
    kmax = max(N, math.ceil(mid)) + margin
    kmin = min(p - N, math.floor(mid)) - margin
    return kmin, kmax


def normal_sum(p: int, cut: int, F: LocalField, weight=None, fam: MonomialFamily | None = None,
               margin: int = WINDOW_MARGIN) -> LocalField:
    """``sum_k weight(k) :chi^+_{p-k} chi^-_k:_cut (F)``, monomial by monomial."""
    fam = fam or default_family()
    out = LocalField.zero()
    for mono in F.monomial_fields():
        N = truncation_bound(mono, fam)
        kmin, kmax = window(p, cut, N, margin)
        for k in range(kmin, kmax + 1):
            w = 1 if weight is None else weight(k)
            if not w:
                continue
            out = out + _apply_terms(normal_ordered(p - k, k, cut), mono, fam) * w
    return out


def apply_virasoro(n: int, F: LocalField, fam: MonomialFamily | None = None,
                   margin: int = WINDOW_MARGIN) -> LocalField:
    """``L_n F = sum_k :chi^+_{n-k} chi^-_k:_0 F``."""
    return normal_sum(n, 0, F, fam=fam, margin=margin)


def commutator(n: int, m: int, F: LocalField, fam=None) -> LocalField:
    """``[L_n, L_m] F``."""
    return (apply_virasoro(n, apply_virasoro(m, F, fam), fam)
            - apply_virasoro(m, apply_virasoro(n, F, fam), fam))


@dataclass
class IdentityReport:
    name: str
    params: dict
    verdict: NullVerdict

    @property
    def ok(self) -> bool:
        return self.verdict.null

    def to_json(self) -> dict:
        return {"identity": self.name, "params": self.params, **self.verdict.to_json()}


def _delta(x: int) -> int:
    return 1 if x == 0 else 0


def commutator_check(n: int, m: int, F: LocalField, fam=None, tol: float = 1e-9,
                     suite: ProbeSuite | None = None, c: float = CENTRAL_CHARGE) -> IdentityReport:
    """Nullity of ``[L_n, L_m]F - (n-m) L_{n+m} F - (c/12)(n^3-n) delta_{n+m} F``."""
    resid = (commutator(n, m, F, fam) - apply_virasoro(n + m, F, fam) * (n - m)
             - F * (c / 12 * (n ** 3 - n) * _delta(n + m)))
    return IdentityReport("virasoro", {"n": n, "m": m}, is_null(resid, suite=suite, tol=tol))


def _probe_vector(F: LocalField, R: int, suite: ProbeSuite) -> np.ndarray:
    probes = suite.insertions(R)
    vals = []
    for half in suite.domain_halves(R):
        pd = probe_domain(half)
        for z in suite.points:
            vals += [v for v, _ in probe_values(F, pd, z, probes)]
    return np.array(vals)


@dataclass
class CentralChargeFit:
    c: float
    scalars: dict
    residual: float


def central_charge_fit(F: LocalField, ns=(1, 2, 3), fam=None,
                       suite: ProbeSuite | None = None) -> CentralChargeFit:
    """Fit ``c`` from ``[L_n, L_-n]F - 2n L_0 F = lambda_n F`` against ``(n^3 - n)/12``.

    ``lambda_n`` is the least-squares scalar over all probe values; the
    fit of ``c`` is least squares through the origin.
    """
    suite = suite or DEFAULT_SUITE
    lams = {}
    worst = 0.0
    l0 = apply_virasoro(0, F, fam)
    for n in ns:
        x = commutator(n, -n, F, fam) - l0 * (2 * n)
        R = max(x.radius(), F.radius()) + 4
        ex = _probe_vector(x, R, suite)
        ef = _probe_vector(F, R, suite)
        lam = complex(np.vdot(ef, ex) / np.vdot(ef, ef))
        worst = max(worst, float(np.max(np.abs(ex - lam * ef))))
        lams[n] = lam
    xs = np.array([(n ** 3 - n) / 12 for n in ns])
    ys = np.array([lams[n].real for n in ns])
    c = float(np.dot(xs, ys) / np.dot(xs, xs))
    return CentralChargeFit(c, lams, worst)


def comm_one_step_check(n: int, cut: int, l: int, k: int, F: LocalField, fam=None,
                        tol: float = 1e-9, suite=None) -> IdentityReport:
    """``[L_n, :chi^+_l chi^-_k:_cut] = -k :chi^+_l chi^-_{n+k}:_{-(l+k)} - l :chi^+_{n+l} chi^-_k:_{l+k}``."""
    fam = fam or default_family()
    inner = _apply_terms(normal_ordered(l, k, cut), F, fam)
    lhs = apply_virasoro(n, inner, fam) - _apply_terms(normal_ordered(l, k, cut),
                                                        apply_virasoro(n, F, fam), fam)
    rhs = (_apply_terms(normal_ordered(l, n + k, -(l + k)), F, fam) * (-k)
           + _apply_terms(normal_ordered(n + l, k, l + k), F, fam) * (-l))
    return IdentityReport("comm-one-step", {"n": n, "cut": cut, "l": l, "k": k},
                          is_null(lhs - rhs, suite=suite, tol=tol))


def _even(x: int) -> int:
    return 1 if x % 2 == 0 else 0


def trick1_scalar(m: int) -> float:
    a = abs(m)
    theta = 1 if -m >= 0 else 0
    return a / 2 * _even(a) * theta + sum(k for k in range(1, a) if k < a / 2)


def trick1_check(n: int, m: int, F: LocalField, fam=None, tol: float = 1e-9,
                 suite=None) -> IdentityReport:
    """``sum_k :chi^+_{n+m-k} chi^-_k:_m = L_{n+m} - delta_{n+m} (...)`` for ``m != 0``."""
    if m == 0:
        raise ValueError("m must be nonzero")
    lhs = normal_sum(n + m, m, F, fam=fam)
    rhs = apply_virasoro(n + m, F, fam) - F * (trick1_scalar(m) * _delta(n + m))
    return IdentityReport("trick1", {"n": n, "m": m}, is_null(lhs - rhs, suite=suite, tol=tol))


def trick2_scalar(m: int) -> float:
    return -((m ** 3 - m) / 12 + m / 4 * _even(abs(m)))


def trick2_check(n: int, m: int, F: LocalField, fam=None, tol: float = 1e-9,
                 suite=None) -> IdentityReport:
    """``sum_k k (:..:_m - :..:_{-m}) = -((m^3-m)/12 + (m/4) 1_even(|m|)) delta_{n+m}``."""
    if m == 0:
        raise ValueError("m must be nonzero")
    weight = lambda k: k  # noqa: E731
    lhs = normal_sum(n + m, m, F, weight, fam) - normal_sum(n + m, -m, F, weight, fam)
    rhs = F * (trick2_scalar(m) * _delta(n + m))
    return IdentityReport("trick2", {"n": n, "m": m}, is_null(lhs - rhs, suite=suite, tol=tol))


def normal_order_difference_check(m: int, n: int, k: int, l: int, F: LocalField, fam=None,
                                  tol: float = 1e-9, suite=None) -> IdentityReport:
    """For ``k < l``: ``:..:_k - :..:_l`` is ``{chi^+_m, chi^-_n}`` when ``k <= n-m < l``, else 0.

    Checked against the closed form ``-m delta_{n+m} F`` of the anticommutator.
    """
    if not k < l:
        raise ValueError("need k < l")
    fam = fam or default_family()
    lhs = (_apply_terms(normal_ordered(m, n, k), F, fam)
           - _apply_terms(normal_ordered(m, n, l), F, fam))
    if k <= n - m < l:
        structural = lhs - anticommutator("+", m, "-", n, F, fam)
        if not structural.is_zero():
            raise AssertionError("normal-ordering difference is not the anticommutator")
        rhs = F * (-m * _delta(n + m))
    else:
        rhs = LocalField.zero()
    return IdentityReport("normal-order-difference", {"m": m, "n": n, "k": k, "l": l},
                          is_null(lhs - rhs, suite=suite, tol=tol))
