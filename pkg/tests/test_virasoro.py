import pytest

from disfermion.fields import LocalField, default_family, is_null, parse_field
from disfermion.virasoro import (
    CENTRAL_CHARGE,
    apply_virasoro,
    central_charge_fit,
    comm_one_step_check,
    commutator,
    commutator_check,
    normal_order_difference_check,
    normal_ordered,
    normal_sum,
    trick1_check,
    trick1_scalar,
    trick2_check,
    trick2_scalar,
    truncation_bound,
    window,
)

ONE = LocalField.one()
PAIR = LocalField.from_points((1, 0), (0, 0))


def test_truncation_bound():
    fam = default_family()
    assert truncation_bound(ONE, fam) == 3
    assert fam.null_radius(3) >= 2 > fam.null_radius(2)
    wide = parse_field("eta(3,0)*xi(0,0)")
    assert truncation_bound(wide, fam) >= truncation_bound(PAIR, fam) >= truncation_bound(ONE, fam)


def test_window_contains_midpoint_and_bound():
    kmin, kmax = window(0, 0, 3)
    assert kmin <= -3 and kmax >= 3
    kmin, kmax = window(10, 0, 3)
    assert kmin <= 5 <= kmax


def test_normal_ordered_switches_at_cut():
    (s, op), = normal_ordered(1, 3, 2)
    assert s == 1 and (op.alpha, op.m) == ("+", 1)
    (s, op), = normal_ordered(1, 2, 2)
    assert s == -1 and (op.alpha, op.m) == ("-", 2)


def test_wider_window_is_stable():
    fam = default_family()
    for n in (-2, 0, 1):
        a = normal_sum(n, 0, PAIR, fam=fam)
        b = normal_sum(n, 0, PAIR, fam=fam, margin=5)
        assert is_null(a - b).null


def test_vacuum_is_annihilated_by_nonnegative_modes():
    for n in (0, 1, 2):
        assert is_null(apply_virasoro(n, ONE)).null
    assert not is_null(apply_virasoro(-2, ONE)).null


def test_central_term_on_vacuum():
    # [L_2, L_-2] 1 = 4 L_0 1 + (c/2) 1 = -1
    x = commutator(2, -2, ONE)
    assert is_null(x + ONE).null
    assert CENTRAL_CHARGE / 12 * (2 ** 3 - 2) == -1


@pytest.mark.parametrize("m", [-2, -1, 1, 2])
def test_l0_grading(m):
    assert commutator_check(0, m, PAIR).ok


@pytest.mark.parametrize("n,m", [(1, -1), (2, -1), (-1, -2), (2, -2), (3, -3)])
def test_virasoro_relations_on_pair(n, m):
    rep = commutator_check(n, m, PAIR)
    assert rep.ok, rep.to_json()


def test_wrong_central_charge_fails():
    assert not commutator_check(2, -2, PAIR, c=1).ok


def test_central_charge_fit():
    fit = central_charge_fit(PAIR, ns=(1, 2))
    assert abs(fit.c - CENTRAL_CHARGE) < 1e-8
    assert fit.residual < 1e-8


def test_trick_scalars():
    assert trick2_scalar(2) == -1
    assert trick2_scalar(1) == 0
    assert trick1_scalar(1) == 0
    assert trick1_scalar(-2) == 1
    assert trick1_scalar(2) == 0
    assert trick1_scalar(-3) == 1


@pytest.mark.parametrize("n,m", [(-1, 1), (1, -1), (2, -2), (0, 1)])
def test_trick_checks(n, m):
    assert trick1_check(n, m, PAIR).ok
    assert trick2_check(n, m, PAIR).ok


def test_tricks_reject_zero():
    with pytest.raises(ValueError):
        trick1_check(1, 0, PAIR)
    with pytest.raises(ValueError):
        trick2_check(1, 0, PAIR)


@pytest.mark.parametrize("n,cut,l,k", [(1, 0, 0, 0), (-1, 1, -1, 0), (2, 0, 1, -2)])
def test_comm_one_step(n, cut, l, k):
    assert comm_one_step_check(n, cut, l, k, PAIR).ok


@pytest.mark.parametrize("m,n,k,l", [(1, -1, -3, 0), (0, 0, -1, 2), (1, 2, -1, 0)])
def test_normal_order_difference(m, n, k, l):
    assert normal_order_difference_check(m, n, k, l, PAIR).ok


def test_normal_order_difference_needs_order():
    with pytest.raises(ValueError):
        normal_order_difference_check(0, 0, 2, 1, PAIR)
