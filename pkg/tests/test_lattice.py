import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disfermion.lattice import (
    Color,
    Domain,
    DomainError,
    DualContour,
    ball,
    centered_square,
    classify,
    contour_around,
    diamond_contour,
    interior,
    is_white,
    norm,
    rect_contour,
)

UNIT_LOOP = DualContour(((-1, -1), (0, -1), (0, 0), (-1, 0), (-1, -1)))


def test_classify():
    assert classify((0, 0)) is Color.EVEN_BLACK
    assert classify((1, 1)) is Color.ODD_BLACK
    assert classify((1, 0)) is Color.WHITE
    assert classify((-3, 5)) is Color.ODD_BLACK


def test_temperleyan_examples():
    assert Domain.rect(0, 0, 2, 2).is_temperleyan()
    assert not Domain.rect(0, 0, 1, 1).is_temperleyan()
    assert not Domain(((0, 0),)).is_temperleyan()


def test_temperleyan_vertex_balance():
    for d in (Domain.rect(0, 0, 2, 2), Domain.rect(0, 0, 4, 6), centered_square(4)):
        assert d.is_temperleyan()
        assert len(d.even_blacks) + len(d.odd_blacks) == len(d.whites) + 1


def test_sink_must_be_even_black():
    with pytest.raises(DomainError):
        Domain.rect(0, 0, 2, 2, sink=(1, 1))


def test_unit_loop_interior():
    blacks, whites = interior(UNIT_LOOP)
    assert blacks == {(0, 0)} and whites == set()
    rev = UNIT_LOOP.reversed()
    assert interior(rev) == (blacks, whites)
    assert UNIT_LOOP.orientation == 1 and rev.orientation == -1


def test_three_by_three_interior():
    blacks, whites = rect_contour(2, 2).interior()
    assert whites == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert blacks == {(0, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)}


def test_rect_contour_examples():
    assert rect_contour(1, 1).plaquettes == UNIT_LOOP.plaquettes
    g = rect_contour(2, 2)
    assert len(g) == 12
    assert len(g.interior_points()) == 9
    g = rect_contour(1, 2)
    assert len(g) == 8
    assert g.interior_points() == {(0, 0), (0, 1), (0, -1)}


@given(st.integers(1, 7), st.integers(1, 7))
def test_rect_contour_invariants(hw, hh):
    g = rect_contour(hw, hh)
    steps = g.steps()
    assert len(steps) == len(g)
    assert sum(dx for dx, _ in steps) == 0 and sum(dy for _, dy in steps) == 0
    # closed form for the (2hw-1) x (2hh-1) block of enclosed points
    assert len(g.interior_points()) == (2 * hw - 1) * (2 * hh - 1)
    assert g.interior() == g.reversed().interior()
    assert g.signed_area() == -g.reversed().signed_area()


def test_contour_edges_straddle():
    for _, w, b in rect_contour(3, 2).edges():
        assert is_white(w) and not is_white(b)
        assert abs(w[0] - b[0]) + abs(w[1] - b[1]) == 1


@given(st.integers(0, 8))
@settings(max_examples=9)
def test_diamond_contour_hugs_ball(r):
    g = diamond_contour(r)
    assert g.interior_points() == set(ball(r))
    inside = g.interior_points()
    for p in g.straddling():
        assert norm(p) <= r if p in inside else norm(p) == r + 1


def test_contour_around_rejects_disconnected():
    with pytest.raises(ValueError):
        contour_around([(0, 0), (3, 0)])


def test_bad_contours_rejected():
    with pytest.raises(ValueError):
        DualContour(((0, 0), (1, 0)))
    with pytest.raises(ValueError):
        DualContour(((0, 0), (2, 0), (0, 0)))


def test_domain_json_roundtrip(tmp_path):
    d = Domain.rect(0, 0, 2, 2, sink=(0, 0))
    p = tmp_path / "d.json"
    import json

    p.write_text(json.dumps(d.to_json()))
    assert Domain.load(p) == d
    assert Domain.from_json({"rect": [0, 0, 2, 2], "sink": [0, 0]}) == d
