import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disfermion.exact import GaussQ, I, PiPoly, Q, as_complex
from disfermion.lattice import rect_contour
from disfermion.monomials import (
    POLE_WEIGHTS,
    PreconditionError,
    build_family,
    contour_integral,
    contour_integral_float,
    deebar_table,
    integrate_by_parts_check,
    load_family,
    pairing_matrix,
    stokes_rhs,
    verify_family,
)

TWO_PI_I = PiPoly.pi(1) * GaussQ(0, 2)


def _box(r):
    return [(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1)]


def test_constant_pairing_vanishes():
    one = lambda p: 1  # noqa: E731
    for g in (rect_contour(1, 1), rect_contour(3, 2), rect_contour(5, 5)):
        assert contour_integral(g, one, one) == 0


def test_base_pairing(small_family):
    fam = small_family
    g = rect_contour(4, 4)
    assert contour_integral(g, fam.exact[-1], fam.exact[0]) == TWO_PI_I
    assert contour_integral(g, fam.exact[0], fam.exact[-1]) == TWO_PI_I


def test_pole_weights_sum_to_one():
    assert sum((w for _, w in POLE_WEIGHTS), Q(0)) == 2
    # black-supported part (centre and diagonals) sums to one
    assert sum((w for p, w in POLE_WEIGHTS if (p[0] + p[1]) % 2 == 0), Q(0)) == 1


def test_first_negative_pole(small_family):
    db = deebar_table(small_family.exact[-1], _box(4))
    weights = dict(POLE_WEIGHTS)
    for p, v in db.items():
        assert v == PiPoly.pi(1) * 2 * GaussQ(weights.get(p, 0))


def test_negative_decay(small_family):
    a = np.abs(small_family.arrays[-1])
    r = small_family.rmax
    shells = [max(a[x + r, y + r] for x, y in _box(r) if abs(x) + abs(y) == k) for k in range(3, r)]
    assert all(b < c for b, c in zip(shells[1:], shells))


def test_low_powers(small_family):
    fam = small_family
    assert all(v == 1 for v in fam.exact[0].values())
    # z^[1] = z / 4 with the unit derivative constant
    for p in _box(5):
        assert fam.exact[1][p] == GaussQ(p[0], p[1]) * GaussQ(Q(1, 4))


def test_null_radii_increase(small_family):
    r0 = [small_family.null_radius(n) for n in range(0, 7)]
    assert r0 == [-1, 0, 1, 2, 3, 4, 5]
    for n in range(1, 7):
        for p in _box(3):
            if abs(p[0]) + abs(p[1]) <= n - 1:
                assert small_family.exact[n][p] == 0


def test_singular_radii(small_family):
    for k in range(1, 7):
        assert small_family.singular_radius(-k) == k + 1


@pytest.mark.parametrize("n", range(-7, 7))
def test_rotation_covariance(small_family, n):
    t = small_family.exact[n]
    c = GaussQ(0, 1) ** (n % 4)
    for x, y in _box(6):
        assert t[(-y, x)] == c * t[(x, y)]


def test_pairing_matrix_exact(small_family):
    pm = pairing_matrix(small_family, rect_contour(9, 9), range(-4, 5), exact=True)
    for (n, m), v in pm.items():
        if n + m + 1 == 0:
            assert v == TWO_PI_I
        else:
            assert not v


def test_pairing_matrix_float_nested(small_family):
    for r in (8, 12, 19):
        pm = pairing_matrix(small_family, rect_contour(r, r), range(-6, 7))
        for (n, m), v in pm.items():
            assert abs(v - (1 if n + m + 1 == 0 else 0)) < 1e-10


def test_stokes_on_random_functions():
    rng = random.Random(3)
    f = {p: GaussQ(rng.randint(-5, 5), rng.randint(-5, 5)) for p in _box(6)}
    g = {p: GaussQ(rng.randint(-5, 5), rng.randint(-5, 5)) for p in _box(6)}
    for gamma in (rect_contour(2, 3), rect_contour(4, 4), rect_contour(5, 1)):
        assert contour_integral(gamma, f, g) == stokes_rhs(gamma, f, g)


def test_stokes_base_case(small_family):
    one = lambda p: 1  # noqa: E731
    gamma = rect_contour(3, 3)
    val = contour_integral(gamma, small_family.exact[-1], one)
    assert val == TWO_PI_I


def test_integrate_by_parts(small_family):
    fam = small_family
    ok, lhs, rhs = integrate_by_parts_check(rect_contour(5, 5), fam.exact[1], fam.exact[1])
    assert ok and not lhs and not rhs
    ok, lhs, rhs = integrate_by_parts_check(rect_contour(8, 8), fam.exact[2], fam.exact[-3])
    assert ok


def test_integrate_by_parts_rejects_poles(small_family):
    with pytest.raises(PreconditionError):
        integrate_by_parts_check(rect_contour(2, 2), small_family.exact[1], small_family.exact[-3])


def test_float_contour_matches_exact(small_family):
    fam = small_family
    gamma = rect_contour(7, 5)
    for n, m in ((-1, 0), (-3, 2), (2, 4), (-2, -2)):
        exact = contour_integral(gamma, fam.exact[m], fam.exact[n])
        flt = contour_integral_float(gamma, fam.arrays[m], fam.arrays[n], fam.rmax)
        assert abs(as_complex(exact) - flt) < 1e-10


def test_verify_family(small_family):
    rep = verify_family(small_family, nmax=6, radii=(9, 14, 19), exact_radius=9)
    assert rep.ok, rep.to_json()
    assert set(rep.results) == set(range(1, 8))


def test_save_load_roundtrip(small_family, tmp_path):
    p = tmp_path / "fam.npz"
    small_family.save(p)
    fam = load_family(p)
    assert fam.manifest() == small_family.manifest()
    assert fam.exact is None
    rep = verify_family(fam, nmax=6, radii=(9, 19), exact_radius=None)
    assert rep.ok


def test_load_rejects_corruption(small_family, tmp_path):
    p = tmp_path / "fam.npz"
    small_family.save(p)
    with np.load(p) as data:
        arrays = {k: data[k] for k in data.files}
    arrays["n1"] = arrays["n1"] * 2
    np.savez(p, **arrays)
    with pytest.raises(ValueError):
        load_family(p)


def test_verify_family_rejects_small_contours(small_family):
    with pytest.raises(ValueError):
        verify_family(small_family, nmax=6, radii=(6,))
    with pytest.raises(ValueError):
        verify_family(small_family, nmax=6, radii=(20,))


@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(8, 19), st.integers(8, 19))
@settings(max_examples=30, deadline=None)
def test_pairing_any_rectangle(small_family, n, m, hw, hh):
    v = contour_integral_float(rect_contour(hw, hh), small_family.arrays[m], small_family.arrays[n],
                               small_family.rmax) / (2j * math.pi)
    assert abs(v - (1 if n + m + 1 == 0 else 0)) < 1e-10


def test_bad_build_arguments():
    with pytest.raises(ValueError):
        build_family(-1, 10)
    assert math.isfinite(abs(complex(I)))
