import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from disfermion.correlators import coupling_table
from disfermion.dimers import count_covers, induce
from disfermion.exact import GaussQ, Q
from disfermion.grassmann import (
    FermionAction,
    GeneratorSet,
    berezin,
    correlator,
    merge_sign,
    partition_function,
    permutation_parity,
)
from disfermion.lattice import Domain

G2 = GeneratorSet(["x", "y"])
G4 = GeneratorSet(["x1", "y1", "x2", "y2"])
SQUARE2 = induce(Domain.rect(0, 0, 1, 1))
SQUARE3 = induce(Domain.rect(0, 0, 2, 2, sink=(0, 0)))


def test_anticommutation():
    x, y = G2.gen("x"), G2.gen("y")
    assert x * y == -(y * x)
    assert (x * x).terms == {}
    one = G2.scalar(1)
    assert (one + x * y) * (one + x * y) == one + x * y * 2


def test_exp_examples():
    x, y = G2.gen("x"), G2.gen("y")
    a = GaussQ(3, 1)
    assert (x * y * a).exp() == G2.scalar(1) + x * y * a
    assert G2.scalar(0).exp() == G2.scalar(1)
    x1, y1, x2, y2 = (G4.gen(n) for n in G4.names)
    s = x1 * y1 + x2 * y2
    assert s.exp() == G4.scalar(1) + x1 * y1 + x2 * y2 + x1 * y1 * x2 * y2
    with pytest.raises(ValueError):
        (G2.scalar(1) + x).exp()


def test_berezin_examples():
    x, y = G2.gen("x"), G2.gen("y")
    assert berezin(x * y, {"x": 1, "y": 2}) == 1
    assert berezin(x * y, {"y": 1, "x": 2}) == -1
    assert berezin(G2.scalar(1)) == 0
    a = GaussQ(Q(2, 3), -1)
    assert berezin((x * y * a).exp()) == a


def test_partition_function_examples():
    assert partition_function(FermionAction(SQUARE2)) == 4
    assert partition_function(FermionAction(SQUARE3)) == 16
    edge = induce(Domain(((0, 0), (1, 0))))
    assert partition_function(FermionAction(edge)) == 1


def test_partition_function_is_count_squared():
    for d in (Domain.rect(0, 0, 3, 1), Domain.rect(0, 0, 3, 2), Domain.rect(0, 0, 3, 3)):
        g = induce(d)
        assert partition_function(FermionAction(g)) == count_covers(g) ** 2


def test_correlator_examples():
    a = FermionAction(SQUARE2)
    assert correlator(a, [("eta", (1, 0)), ("xi", (0, 0))]) == GaussQ(Q(-1, 2))
    assert correlator(a, []) == 1
    ins = [("eta", (1, 0)), ("xi", (0, 0)), ("eta", (1, 0)), ("xi", (1, 1))]
    assert correlator(a, ins) == 0


def test_correlator_matches_wick_exhaustively():
    a = FermionAction(SQUARE3)
    t = coupling_table(SQUARE3)
    for k in (1, 2, 3):
        for ws in itertools.combinations(SQUARE3.whites, k):
            for bs in itertools.permutations(SQUARE3.blacks, k):
                pairs = list(zip(ws, bs))
                ins = [x for w, b in pairs for x in (("eta", w), ("xi", b))]
                assert correlator(a, ins) == t.multipoint(pairs)


def test_derivative_convention_flips_pairs():
    lit = FermionAction(SQUARE3, convention="derivative")
    edge = FermionAction(SQUARE3)
    w, b = SQUARE3.whites[0], SQUARE3.blacks[1]
    ins = [("eta", w), ("xi", b)]
    assert correlator(lit, ins) == -correlator(edge, ins)


def test_element_matches_integrate():
    a = FermionAction(SQUARE2)
    assert berezin(a.element.exp()) == a.integrate(())


@given(st.lists(st.integers(0, 50), min_size=0, max_size=8, unique=True))
def test_permutation_parity_matches_inversions(seq):
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    assert permutation_parity(seq) == (-1) ** inv


@given(st.integers(0, 255), st.integers(0, 255))
def test_merge_sign_is_reordering_sign(a, b):
    if a & b:
        assert merge_sign(a, b) == 0
        return
    bits = [i for i in range(8) if a >> i & 1] + [i for i in range(8) if b >> i & 1]
    assert merge_sign(a, b) == permutation_parity(bits)


def test_vertex_order_changes_sign_consistently():
    order = sorted(SQUARE2.whites + SQUARE2.blacks)
    random.Random(1).shuffle(order)
    a = FermionAction(SQUARE2, vertex_order=order)
    b = FermionAction(SQUARE2)
    ins = [("eta", (1, 0)), ("xi", (0, 0))]
    # normalized correlators do not depend on the order
    assert correlator(a, ins) == correlator(b, ins)
