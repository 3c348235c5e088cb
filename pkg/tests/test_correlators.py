from hypothesis import given, settings
from hypothesis import strategies as st

from disfermion.correlators import (
    CouplingTable,
    coupling_table,
    dee,
    deebar,
    deebar_K,
    verify_holomorphicity,
)
from disfermion.dimers import count_covers, induce
from disfermion.exact import GaussQ, Q, as_complex
from disfermion.grassmann import FermionAction, correlator
from disfermion.lattice import Domain

SQUARE2 = induce(Domain.rect(0, 0, 1, 1))
SQUARE3 = induce(Domain.rect(0, 0, 2, 2, sink=(0, 0)))


def test_two_point_examples():
    t = coupling_table(SQUARE2)
    assert t.two_point((1, 0), (0, 0)) == GaussQ(Q(-1, 2))
    assert t.two_point((1, 0), (1, 1)) == GaussQ(0, Q(-1, 2))
    edge = induce(Domain(((0, 0), (1, 0))))
    te = coupling_table(edge)
    k = edge.K((0, 0), (1, 0))
    assert te.inverse_entry((1, 0), (0, 0)) == k.conjugate()
    assert te.two_point((1, 0), (0, 0)) == k


def test_inverse_is_inverse():
    for g in (SQUARE2, SQUARE3, induce(Domain.rect(0, 0, 3, 3))):
        assert coupling_table(g).verify_inverse()
        assert CouplingTable(g, "float").verify_inverse()


def test_multipoint_examples():
    t = coupling_table(SQUARE2)
    w, b = (1, 0), (0, 0)
    assert t.multipoint([(w, b)]) == t.two_point(w, b)
    assert t.multipoint([((1, 0), (0, 0)), ((0, 1), (0, 0))]) == 0
    assert t.multipoint([]) == 1
    pairs = [((1, 0), (0, 0)), ((0, 1), (1, 1))]
    ins = [x for p in pairs for x in (("eta", p[0]), ("xi", p[1]))]
    assert t.multipoint(pairs) == correlator(FermionAction(SQUARE2), ins)


def test_float_backend_agrees():
    g = induce(Domain.rect(0, 0, 4, 4, sink=(0, 0)))
    te, tf = coupling_table(g, "exact"), coupling_table(g, "float")
    for w in g.whites:
        for b in g.blacks:
            assert abs(as_complex(te.two_point(w, b)) - tf.two_point(w, b)) < 1e-12
    pairs = list(zip(g.whites[:3], g.blacks[2:5]))
    assert abs(as_complex(te.multipoint(pairs)) - tf.multipoint(pairs)) < 1e-12


def test_plane_derivatives():
    one = lambda p: 1  # noqa: E731
    ident = lambda p: GaussQ(*p)  # noqa: E731
    for z in [(0, 0), (3, -2), (1, 4)]:
        assert dee(one, z) == 0
        assert deebar(ident, z) == 0
        assert dee(ident, z) == 4


def test_holomorphicity_square2():
    t = coupling_table(SQUARE2)
    w0 = (1, 0)
    f = {b: t.two_point(w0, b) for b in SQUARE2.blacks}
    assert deebar_K(SQUARE2, f, (1, 0)) == -1
    assert deebar_K(SQUARE2, f, (0, 1)) == 0
    assert sum((deebar_K(SQUARE2, f, w) for w in SQUARE2.whites), GaussQ(0)) == -1


def test_holomorphicity_full_tables():
    for d in (Domain.rect(0, 0, 2, 2, sink=(0, 0)), Domain.rect(0, 0, 3, 2), Domain.rect(-2, -2, 2, 2, sink=(2, 2))):
        g = induce(d)
        assert verify_holomorphicity(coupling_table(g, "exact")).ok
        assert verify_holomorphicity(CouplingTable(g, "float")).ok


@given(st.integers(1, 5), st.integers(1, 5), st.integers(-2, 2), st.integers(-2, 2))
@settings(max_examples=25, deadline=None)
def test_holomorphicity_on_rectangles(w, h, x0, y0):
    g = induce(Domain.rect(x0, y0, x0 + w - 1, y0 + h - 1), allow_unbalanced=True)
    if not g.is_balanced() or count_covers(g) == 0:
        return
    assert verify_holomorphicity(CouplingTable(g, "float")).ok
