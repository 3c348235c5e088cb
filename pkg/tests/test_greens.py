import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from disfermion.exact import GaussQ, PiPoly, Q
from disfermion.greens import (
    FullPlaneGreen,
    check_harmonic_conjugates,
    check_harmonic_conjugates_plane,
    check_two_point_green,
    convergence_table,
    edge_open_sequence,
    even_graph,
    green_even,
    green_odd,
    laplacian,
    limit_two_point,
    odd_graph,
    potential_kernel,
)
from disfermion.lattice import Domain, centered_square

SQUARE3 = Domain.rect(0, 0, 2, 2, sink=(0, 0))
SQUARE9 = Domain.rect(0, 0, 8, 8, sink=(0, 0))


def test_laplacian_examples():
    g = even_graph(SQUARE9)
    for v in g.interior:
        if len(g.neighbors(v)) == 4:
            assert laplacian(g, lambda p: 7, v) == 0
            assert laplacian(g, lambda p: p[0] - 3 * p[1], v) == 0
    f = green_even(g, (4, 4), "exact")
    for v in g.interior:
        assert laplacian(g, f, v) == (-1 if v == (4, 4) else 0)


def test_green_even_square3():
    f = green_even(even_graph(SQUARE3), (2, 2), "exact")
    assert f[(2, 2)] == 1
    assert f[(2, 0)] == GaussQ(Q(1, 2)) and f[(0, 2)] == GaussQ(Q(1, 2))
    assert f[(0, 0)] == 0


def test_green_odd_square3():
    g = odd_graph(SQUARE3)
    assert g.interior == ((1, 1),) and len(g.neighbors((1, 1))) == 4
    assert green_odd(g, (1, 1), "exact")[(1, 1)] == GaussQ(Q(1, 4))


def test_two_vertex_path():
    d = Domain(((0, 0), (1, 0), (2, 0)), sink=(0, 0))
    assert green_even(even_graph(d), (2, 0), "exact")[(2, 0)] == 1


def test_green_symmetry_and_positivity():
    for graph, solve in ((even_graph(SQUARE9), green_even), (odd_graph(SQUARE9), green_odd)):
        pts = graph.interior[:6]
        tables = {p: solve(graph, p, "exact") for p in pts}
        for p in pts:
            assert all(v.re >= 0 and v.im == 0 for v in tables[p].values())
            for q in pts:
                assert tables[p][q] == tables[q][p]


def test_float_matches_exact():
    g = even_graph(SQUARE9)
    fe, ff = green_even(g, (4, 2), "exact"), green_even(g, (4, 2), "float")
    assert max(abs(float(fe[v].re) - ff[v]) for v in g.interior) < 1e-12


def test_two_point_green_examples():
    rep = check_two_point_green(SQUARE3, (2, 1))
    assert rep.ok and rep.checked == 4
    with pytest.raises(ValueError):
        check_two_point_green(SQUARE3, (1, 0))


def test_two_point_green_all_whites():
    d = Domain.rect(0, 0, 6, 4, sink=(6, 4))
    for w in d.whites:
        if abs(w[0] - 6) + abs(w[1] - 4) == 1:
            continue
        assert check_two_point_green(d, w).ok


def test_harmonic_conjugates():
    for w in ((2, 1), (3, 4), (5, 2)):
        assert check_harmonic_conjugates(SQUARE9, w).ok
    assert check_harmonic_conjugates_plane((1, 0)).ok
    assert check_harmonic_conjugates_plane((0, 1)).ok


def test_potential_kernel_values():
    assert potential_kernel((0, 0)) == PiPoly()
    for z in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        assert potential_kernel(z) == PiPoly.const(Q(-1, 4))
    assert potential_kernel((1, 1)) == PiPoly({-1: -1})
    assert potential_kernel((2, 0)) == PiPoly({0: -1, -1: 2})


def test_potential_kernel_harmonic_and_asymptotic():
    g = FullPlaneGreen(12)
    for z in ((3, 1), (5, -2), (0, 7)):
        lap = sum((g((z[0] + dx, z[1] + dy)) for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))),
                  PiPoly()) - g(z) * 4
        assert lap == PiPoly()
    z = (30, 17)
    assert abs(g.value(z) - g.asymptotic(z)) < 1e-4


@given(st.integers(-10, 10), st.integers(-10, 10))
def test_potential_kernel_symmetry(x, y):
    a = potential_kernel((x, y))
    assert a == potential_kernel((-x, y)) == potential_kernel((y, x)) == potential_kernel((x, -y))


def test_limit_column_adjacent_case():
    # z = w1: (G(0) - G(w1 - w2)) / (w1 - w2) doubled, |w1 - w2| = 2
    w, z = (1, 0), (2, 0)
    expected = 2 * (0 - potential_kernel((-1, 0)).to_complex()) / complex(2, 0)
    assert abs(limit_two_point(w, z) - expected) < 1e-15


def test_convergence_improves():
    rows = convergence_table([4, 10], (1, 0), (0, 0))
    assert rows[1][3] < rows[0][3]
    seq = edge_open_sequence([4, 10])
    assert abs(seq[1][1] - 0.25) < abs(seq[0][1] - 0.25)


def test_centered_square_is_temperleyan():
    for h in (2, 4, 6):
        assert centered_square(2 * (h // 2)).is_temperleyan()
    assert math.isclose(potential_kernel((1, 1)).to_complex().real, -1 / math.pi)
