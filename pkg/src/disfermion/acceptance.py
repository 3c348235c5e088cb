"""The acceptance battery: ten numbered criteria, each returning a verdict.

Shared by the ``suite`` command and the test-suite.  Every criterion is
deterministic; pair samples come from a seeded generator.
"""
from __future__ import annotations

import itertools
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .correlators import CouplingTable, coupling_table, verify_holomorphicity
from .dimers import (
    count_covers,
    enumerate_covers,
    even_sublattice_tree_count,
    induce,
)
from .fields import LocalField, anticommutator_check, default_family, parse_field
from .grassmann import FermionAction, correlator
from .greens import check_two_point_green, limit_two_point
from .lattice import Domain, centered_square
from .monomials import build_family, verify_family
from .observables import pair_observable, pair_observable_disjoint
from .virasoro import (
    CENTRAL_CHARGE,
    central_charge_fit,
    comm_one_step_check,
    commutator_check,
    normal_order_difference_check,
    trick1_check,
    trick2_check,
)

__all__ = [
    "CriterionResult",
    "CRITERIA",
    "QUICK",
    "fixture_fields",
    "run_criterion",
    "run_all",
]

SEED = 20240601
FIELD_TOL = 1e-9
ANTICOMMUTATOR_TOL = 1e-8


@dataclass
class CriterionResult:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"criterion {self.number:2d} {self.name:<22s} {'PASS' if self.ok else 'FAIL'}  {self.detail}"

    def to_json(self) -> dict:
        return {"criterion": self.number, "name": self.name, "ok": self.ok,
                "detail": self.detail, "seconds": round(self.seconds, 3), **self.data}


def _fib(n: int) -> int:
    a, b = 1, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def _counting_fixtures():
    """``(label, domain, expected)`` for the Kasteleyn counting check."""
    out = []
    for n in range(1, 9):
        out.append((f"strip 2x{n}", Domain.rect(0, 0, n - 1, 1), _fib(n)))
        out.append((f"strip {n}x2", Domain.rect(0, 0, 1, n - 1), _fib(n)))
    for side in (3, 5):
        e = side - 1
        for corner in ((0, 0), (e, 0), (0, e), (e, e)):
            d = Domain.rect(0, 0, e, e, sink=corner)
            out.append((f"square {side} sink {corner}", d, even_sublattice_tree_count(d)))
    return out


def criterion_1() -> CriterionResult:
    bad = []
    fx = _counting_fixtures()
    for label, d, expected in fx:
        g = induce(d)
        det = count_covers(g)
        brute = len(enumerate_covers(g, cap=16))
        if not det == brute == expected:
            bad.append((label, det, brute, expected))
    return CriterionResult(1, "kasteleyn counting", not bad,
                           f"{len(fx)} graphs, mismatches {bad}" if bad else f"{len(fx)} graphs exact",
                           data={"graphs": len(fx)})


def _correlator_fixtures():
    return [
        ("square 3 minus sink", Domain.rect(0, 0, 2, 2, sink=(0, 0)), 6),
        ("strip 2x4", Domain.rect(0, 0, 3, 1), 6),
        ("rect 3x4", Domain.rect(0, 0, 3, 2), 6),
        ("rect 4x4", Domain.rect(0, 0, 3, 3), 6),
        ("strip 2x6", Domain.rect(0, 0, 5, 1), 4),
        ("square 5 minus sink", Domain.rect(0, 0, 4, 4, sink=(0, 0)), 1),
    ]


def _pair_samples(g, k: int, count: int, rng: random.Random):
    out = []
    for _ in range(count):
        ws = rng.sample(g.whites, k)
        bs = rng.sample(g.blacks, k)
        out.append(list(zip(ws, bs)))
    return out


def criterion_2() -> CriterionResult:
    rng = random.Random(SEED)
    bad = []
    checked = 0
    for label, d, per_k in _correlator_fixtures():
        g = induce(d)
        t = coupling_table(g, "exact")
        action = FermionAction(g)
        for k in (1, 2, 3):
            if k > g.n:
                continue
            for pairs in _pair_samples(g, k, per_k, rng):
                wick = t.multipoint(pairs)
                ins = [x for w, b in pairs for x in (("eta", w), ("xi", b))]
                ber = correlator(action, ins)
                paths = pair_observable_disjoint(g, pairs).expectation()
                checked += 1
                if not wick == ber == paths:
                    bad.append((label, pairs, str(wick), str(ber), str(paths)))
    return CriterionResult(2, "triple agreement", not bad,
                           f"{checked} correlators, mismatches {bad[:3]}" if bad else
                           f"{checked} correlators exact on {len(_correlator_fixtures())} fixtures",
                           data={"checked": checked})


def _holomorphicity_fixtures():
    return [Domain.rect(0, 0, 2, 2, sink=(0, 0)), Domain.rect(0, 0, 4, 4, sink=(0, 0)),
            Domain.rect(0, 0, 3, 2), Domain.rect(0, 0, 5, 1), centered_square(2), centered_square(4)]


def criterion_3() -> CriterionResult:
    bad = []
    checked = 0
    for d in _holomorphicity_fixtures():
        rep = verify_holomorphicity(coupling_table(induce(d), "exact"))
        checked += rep.checked
        if not rep.ok:
            bad.append(rep.violation)
    return CriterionResult(3, "holomorphicity", not bad,
                           f"violations {bad}" if bad else f"{checked} vertex identities exact")


def criterion_4() -> CriterionResult:
    """Compare the unrestricted and the non-intersecting path sums pointwise."""
    fixtures = [Domain.rect(0, 0, 2, 2, sink=(0, 0)), Domain.rect(0, 0, 3, 1), Domain.rect(0, 0, 3, 2)]
    bad = []
    checked = 0
    for d in fixtures:
        g = induce(d)
        for k in (1, 2):
            for ws in itertools.combinations(g.whites, k):
                for bs in itertools.permutations(g.blacks, k):
                    pairs = list(zip(ws, bs))
                    checked += 1
                    if pair_observable(g, pairs) != pair_observable_disjoint(g, pairs):
                        bad.append(pairs)
    return CriterionResult(4, "disjoint path sums", not bad,
                           f"{len(bad)} of {checked} pair systems differ, e.g. {bad[0]}" if bad else
                           f"{checked} pair systems identical")


def _green_fixtures():
    return [Domain.rect(0, 0, 2, 2, sink=(0, 0)), Domain.rect(0, 0, 4, 4, sink=(0, 0)),
            centered_square(4)]


def criterion_5() -> CriterionResult:
    bad = []
    checked = 0
    for d in _green_fixtures():
        for w in d.whites:
            if abs(w[0] - d.sink[0]) + abs(w[1] - d.sink[1]) == 1:
                continue
            rep = check_two_point_green(d, w)
            checked += rep.checked
            if not rep.ok:
                bad.append((w, rep.violations[:1]))
    return CriterionResult(5, "green identity", not bad,
                           f"violations {bad[:3]}" if bad else f"{checked} values exact on 3 domains")


CONVERGENCE_PAIRS = (((1, 0), (0, 0)), ((1, 0), (2, 2)), ((0, 1), (3, 3)),
                     ((-1, 0), (1, 1)), ((2, 1), (-2, -2)))


def convergence_rows(nmax: int = 20, pairs=CONVERGENCE_PAIRS):
    """``[(n, side, [abs_err per pair], edge_open)]`` on squares of side ``4n + 1``."""
    edge_b, edge_w = (0, 0), (1, 0)
    limits = [limit_two_point(w, z) for w, z in pairs]
    rows = []
    for n in range(1, nmax + 1):
        g = induce(centered_square(2 * n))
        t = CouplingTable(g, "float")
        errs = []
        for (w, z), lim in zip(pairs, limits):
            if w in g.w_index and z in g.b_index:
                errs.append(abs(complex(t.two_point(w, z)) - lim))
            else:
                errs.append(math.nan)
        p = (complex(g.K(edge_b, edge_w)) * complex(t.inverse_entry(edge_w, edge_b))).real
        rows.append((n, 4 * n + 1, errs, p))
    return rows


def criterion_6(nmax: int = 20) -> CriterionResult:
    rows = convergence_rows(nmax)
    bad = []
    for j, pair in enumerate(CONVERGENCE_PAIRS):
        seq = [(n, r[j]) for n, _, r, _ in rows if n >= 3 and not math.isnan(r[j])]
        mono = all(b <= a for (_, a), (_, b) in zip(seq, seq[1:]))
        last = seq[-1][1]
        if not mono or last >= 0.02:
            bad.append((pair, mono, last))
    p_last = rows[-1][3]
    edge_ok = abs(p_last - 0.25) < 0.02
    last_errs = [f"{e:.4f}" for e in rows[-1][2]]
    detail = (f"side {rows[-1][1]}: errors {last_errs}, edge-open {p_last:.5f}"
              + (f"; failing pairs {bad}" if bad else ""))
    return CriterionResult(6, "thermodynamic limit", not bad and edge_ok, detail)


def criterion_7() -> CriterionResult:
    fam = build_family(6, 34)
    rep = verify_family(fam, nmax=6, radii=(8, 16, 32), tol=1e-10, exact_radius=10)
    failed = [k for k, (ok, _) in rep.results.items() if not ok]
    return CriterionResult(7, "monomial family", rep.ok,
                           f"failing properties {failed}" if failed else rep.results[7][1],
                           data={"properties": rep.to_json()})


def fixture_fields():
    """Five local fields of increasing complexity."""
    return [
        ("one", LocalField.one()),
        ("pair", LocalField.from_points((1, 0), (0, 0))),
        ("two pairs", LocalField.from_points((1, 0), (0, 0)) * LocalField.from_points((0, 1), (-1, 1))),
        ("derivative", parse_field("eta(1,0)*dxi(-1,0)")),
        ("mixed", parse_field("eta(0,1)*xi(1,1) + 2*phi(2,0)*phi(1,0)"
                              " - 3*eta(1,0)*xi(0,0)*eta(-1,0)*xi(-1,-1)")),
    ]


def _field(label):
    return dict(fixture_fields())[label]


def _map(fn, tasks, jobs: int):
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks, chunksize=4))


def _anticommutator_task(task):
    label, a, n, b, m = task
    rep = anticommutator_check(a, n, b, m, _field(label), tol=ANTICOMMUTATOR_TOL)
    return rep.ok, rep.verdict.max_relative, task


def criterion_8(jobs: int = 1) -> CriterionResult:
    default_family()
    tasks = [(label, a, n, b, m) for label, _ in fixture_fields()
             for a in "+-" for b in "+-" for n in range(-4, 5) for m in range(-4, 5)]
    res = _map(_anticommutator_task, tasks, jobs)
    bad = [t for ok, _, t in res if not ok]
    worst = max(r for _, r, _ in res)
    return CriterionResult(8, "anticommutation", not bad,
                           f"{len(res)} checks, worst relative residual {worst:.1e}"
                           + (f", failing {bad[:3]}" if bad else ""))


def _virasoro_task(task):
    label, n, m = task
    rep = commutator_check(n, m, _field(label), tol=FIELD_TOL)
    return rep.ok, rep.verdict.max_relative, task


def criterion_9(jobs: int = 1) -> CriterionResult:
    default_family()
    tasks = [(label, n, m) for label, _ in fixture_fields()
             for n in range(-3, 4) for m in range(-3, 4)]
    res = _map(_virasoro_task, tasks, jobs)
    bad = [t for ok, _, t in res if not ok]
    worst = max(r for _, r, _ in res)
    fit = central_charge_fit(_field("pair"), ns=(1, 2, 3))
    c_ok = abs(fit.c - CENTRAL_CHARGE) < 1e-6
    return CriterionResult(9, "virasoro", not bad and c_ok,
                           f"{len(res)} commutators, worst relative residual {worst:.1e}, c = {fit.c:.12f}"
                           + (f", failing {bad[:3]}" if bad else ""),
                           data={"central_charge": fit.c})


def _aux_tasks():
    r = range(-2, 3)
    for label, _ in fixture_fields():
        for n, cut, l, k in itertools.product(r, r, r, r):
            yield ("comm-one-step", label, (n, cut, l, k))
        for n, m in itertools.product(r, r):
            if m:
                yield ("trick1", label, (n, m))
                yield ("trick2", label, (n, m))
        for m, n, k, l in itertools.product(r, r, r, r):
            if k < l:
                yield ("normal-order-difference", label, (m, n, k, l))


_AUX = {"comm-one-step": comm_one_step_check, "trick1": trick1_check, "trick2": trick2_check,
        "normal-order-difference": normal_order_difference_check}


def _aux_task(task):
    name, label, params = task
    rep = _AUX[name](*params, _field(label), tol=FIELD_TOL)
    return rep.ok, rep.verdict.max_relative, task


def criterion_10(jobs: int = 1) -> CriterionResult:
    default_family()
    tasks = list(_aux_tasks())
    res = _map(_aux_task, tasks, jobs)
    bad = [t for ok, _, t in res if not ok]
    worst = max(r for _, r, _ in res)
    counts = {}
    for name, _, _ in tasks:
        counts[name] = counts.get(name, 0) + 1
    return CriterionResult(10, "auxiliary lemmas", not bad,
                           f"{len(res)} checks {counts}, worst relative residual {worst:.1e}"
                           + (f", failing {bad[:3]}" if bad else ""))


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}
# exact fixtures only
QUICK = (1, 2, 3, 4, 5, 7)
_PARALLEL = {8, 9, 10}


def run_criterion(number: int, jobs: int = 1) -> CriterionResult:
    t0 = time.perf_counter()
    fn = CRITERIA[number]
    res = fn(jobs) if number in _PARALLEL else fn()
    res.seconds = time.perf_counter() - t0
    return res


def run_all(numbers=None, jobs: int = 1):
    return [run_criterion(k, jobs) for k in (numbers or sorted(CRITERIA))]
