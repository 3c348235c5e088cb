"""Discrete Laurent monomials on Z^2 and discrete contour integration.

Positive powers are discrete antiderivatives: ``dbar z^[n] = 0`` and
``d z^[n] = n z^[n-1]``, integrated sublattice by sublattice with the four
class constants fixed by rotational covariance and by vanishing at
``0, 1, 1 + i``.  ``z^[-1]`` is the convolution of the full-plane discrete
Cauchy kernel ``d G`` with a pole spread over the nine black points of the
unit square around the origin; lower powers follow from
``z^[m-1] = d z^[m] / m``.

Values are exact: positive powers lie in Q(i), negative powers in
Q(i)[pi, 1/pi].  Float tables are correctly rounded projections.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exact import GaussQ, I, ONE, PiPoly, Q, ZERO, as_complex
from .greens import FullPlaneGreen
from .lattice import UNIT_STEPS, DualContour, is_white, norm, rect_contour

__all__ = [
    "MonomialFamily",
    "build_family",
    "load_family",
    "family",
    "contour_integral",
    "contour_integral_float",
    "dee_table",
    "deebar_table",
    "stokes_rhs",
    "integrate_by_parts_check",
    "PreconditionError",
    "DERIVATIVE_CONSTANT",
    "POLE_WEIGHTS",
    "FORMAT_VERSION",
]

# d z^[n] = DERIVATIVE_CONSTANT * n * z^[n-1]; the value 1 is the one for
# which the pairing integrals come out as exactly 2 pi i
DERIVATIVE_CONSTANT = 1
POLE_WEIGHTS = (((0, 0), Q(1, 2)),
                ((1, 0), Q(1, 4)), ((0, 1), Q(1, 4)), ((-1, 0), Q(1, 4)), ((0, -1), Q(1, 4)),
                ((1, 1), Q(1, 8)), ((-1, 1), Q(1, 8)), ((-1, -1), Q(1, 8)), ((1, -1), Q(1, 8)))
FORMAT_VERSION = 1
_IPOW = (ONE, I, -ONE, -I)
_CONJ_STEP = {d: GaussQ(d[0], -d[1]) for d in UNIT_STEPS}  # 1/d
_STEP = {d: GaussQ(d[0], d[1]) for d in UNIT_STEPS}  # 1/conj(d)


class PreconditionError(ValueError):
    pass


def _stencil(f, pts, coeffs):
    out = {}
    for p in pts:
        acc = None
        for d, c in coeffs.items():
            v = f.get((p[0] + d[0], p[1] + d[1]))
            if v is None:
                raise KeyError((p[0] + d[0], p[1] + d[1]))
            if v:
                t = v * c
                acc = t if acc is None else acc + t
        out[p] = ZERO if acc is None else acc
    return out


def dee_table(f: dict, pts):
    """``d f(z) = sum_d f(z + d) / d`` on ``pts`` (all neighbours must be tabulated)."""
    return _stencil(f, pts, _CONJ_STEP)


def deebar_table(f: dict, pts):
    """``dbar f(z) = sum_d f(z + d) / conj(d)``."""
    return _stencil(f, pts, _STEP)


def _box(r):
    return [(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1)]


def _positive(prev: dict, n: int, r: int) -> dict:
    """``z^[n]`` on the box of half-side ``r`` from ``z^[n-1]``."""
    half = GaussQ(Q(n, 2))
    ihalf = GaussQ(0, Q(n, 2))
    part = {}
    # f(z + 1) - f(z - 1) = (n/2) g(z) and f(z + i) - f(z - i) = (i n/2) g(z)
    for x0, y0 in ((0, 0), (1, 1), (1, 0), (0, 1)):
        part[(x0, y0)] = ZERO
        for x in range(x0 + 2, r + 1, 2):
            part[(x, y0)] = part[(x - 2, y0)] + half * prev[(x - 1, y0)]
        for x in range(x0 - 2, -r - 1, -2):
            part[(x, y0)] = part[(x + 2, y0)] - half * prev[(x + 1, y0)]
        xs = range(x0 - 2 * ((x0 + r) // 2), r + 1, 2)
        for x in xs:
            for y in range(y0 + 2, r + 1, 2):
                part[(x, y)] = part[(x, y - 2)] + ihalf * prev[(x, y - 1)]
            for y in range(y0 - 2, -r - 1, -2):
                part[(x, y)] = part[(x, y + 2)] - ihalf * prev[(x, y + 1)]
    c, c2 = _IPOW[n % 4], _IPOW[(2 * n) % 4]
    const = {(0, 0): ZERO}
    # rotation maps (1,1) to (-1,1) and (1,0) to (0,1) to (-1,0)
    rhs = c * part[(1, 1)] - part[(-1, 1)]
    if n % 4 == 0:
        if rhs:
            raise ArithmeticError(f"inconsistent class constant for n={n}")
        const[(1, 1)] = ZERO
    else:
        const[(1, 1)] = rhs / (ONE - c)
    if n % 2 == 0:
        if part[(-1, 0)]:
            raise ArithmeticError(f"inconsistent class constant for n={n}")
        const[(1, 0)] = ZERO
    else:
        const[(1, 0)] = -part[(-1, 0)] / (ONE - c2)
    const[(0, 1)] = c * const[(1, 0)]
    return {p: v + const[(p[0] % 2, p[1] % 2)] for p, v in part.items()}


def _first_negative(r: int, green: FullPlaneGreen) -> dict:
    """``z^[-1]`` on the box of half-side ``r``."""
    reach = r + 2
    out = {p: PiPoly() for p in _box(r)}
    two_pi = PiPoly.pi(1) * 2
    for s, wt in POLE_WEIGHTS:
        # h(x) = -G((x - s)/2) on the parity class of s: dbar d h = delta_s
        h = {}
        for x in range(-reach, reach + 1):
            for y in range(-reach, reach + 1):
                if (x - s[0]) % 2 == 0 and (y - s[1]) % 2 == 0:
                    h[(x, y)] = -green(((x - s[0]) // 2, (y - s[1]) // 2))
                else:
                    h[(x, y)] = ZERO
        k = dee_table(h, out.keys())
        scale = two_pi * wt
        for p, v in k.items():
            if v:
                out[p] = out[p] + v * scale
    return out


@dataclass
class MonomialFamily:
    """Tables of ``z^[n]`` for ``-nmax-1 <= n <= nmax`` on the box ``|x|, |y| <= rmax``.

    ``exact`` holds exact values (None after loading a float-only file);
    ``arrays[n][x + rmax, y + rmax]`` holds complex doubles.
    """

    nmax: int
    rmax: int
    exact: dict | None
    arrays: dict
    null_radii: dict = field(default_factory=dict)
    singular_radii: dict = field(default_factory=dict)

    @property
    def indices(self):
        return sorted(self.arrays)

    def __contains__(self, n) -> bool:
        return n in self.arrays

    def value(self, n: int, z) -> complex:
        x, y = z
        if max(abs(x), abs(y)) > self.rmax:
            raise KeyError(f"{z} outside the cached box of half-side {self.rmax}")
        return complex(self.arrays[n][x + self.rmax, y + self.rmax])

    def exact_value(self, n: int, z):
        if self.exact is None:
            raise RuntimeError("exact tables not available")
        return self.exact[n][tuple(z)]

    def table(self, n: int, exact: bool = False) -> dict:
        if exact:
            return self.exact[n]
        a = self.arrays[n]
        r = self.rmax
        return {(x, y): complex(a[x + r, y + r]) for x in range(-r, r + 1) for y in range(-r, r + 1)}

    def null_radius(self, n: int) -> int:
        return self.null_radii[n]

    def singular_radius(self, n: int) -> int:
        return self.singular_radii[n]

    def manifest(self) -> dict:
        digest = hashlib.sha256()
        for n in self.indices:
            digest.update(np.ascontiguousarray(self.arrays[n]).tobytes())
        return {
            "format_version": FORMAT_VERSION,
            "nmax": self.nmax,
            "rmax": self.rmax,
            "indices": self.indices,
            "derivative_constant": DERIVATIVE_CONSTANT,
            "null_radii": {str(k): v for k, v in self.null_radii.items()},
            "singular_radii": {str(k): v for k, v in self.singular_radii.items()},
            "sha256": digest.hexdigest(),
        }

    def save(self, path) -> None:
        """Float tables plus manifest in one ``.npz`` container."""
        arrays = {f"n{n}": self.arrays[n] for n in self.indices}
        with open(path, "wb") as fh:
            np.savez_compressed(fh, manifest=np.array(json.dumps(self.manifest())), **arrays)


def load_family(path) -> MonomialFamily:
    with np.load(path, allow_pickle=False) as data:
        man = json.loads(str(data["manifest"]))
        if man.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported format version {man.get('format_version')}")
        arrays = {n: data[f"n{n}"] for n in man["indices"]}
    fam = MonomialFamily(man["nmax"], man["rmax"], None, arrays,
                         {int(k): v for k, v in man["null_radii"].items()},
                         {int(k): v for k, v in man["singular_radii"].items()})
    if fam.manifest()["sha256"] != man["sha256"]:
        raise ValueError("table checksum mismatch")
    return fam


def _to_array(table: dict, r: int) -> np.ndarray:
    a = np.zeros((2 * r + 1, 2 * r + 1), dtype=complex)
    for (x, y), v in table.items():
        if max(abs(x), abs(y)) <= r and v:
            a[x + r, y + r] = as_complex(v)
    return a


def _null_radius(table: dict, r: int) -> int:
    """Largest ``k`` with ``z^[n] = 0`` on ``norm(z) <= k`` (``-1`` if nonzero at 0)."""
    best = r
    for p, v in table.items():
        if v and norm(p) <= best:
            best = norm(p) - 1
    return best


def _singular_radius(table: dict, r: int) -> int:
    pts = _box(r - 1)
    db = deebar_table(table, pts)
    return max((norm(p) for p, v in db.items() if v), default=0)


def build_family(nmax: int = 6, rmax: int = 34) -> MonomialFamily:
    """Exact construction for ``-nmax-1 <= n <= nmax`` on the box of half-side ``rmax``."""
    if nmax < 0 or rmax < 2:
        raise ValueError("need nmax >= 0 and rmax >= 2")
    exact: dict = {}
    exact[0] = {p: ONE for p in _box(rmax)}
    for n in range(1, nmax + 1):
        exact[n] = _positive(exact[n - 1], n, rmax)
    # negative powers lose one layer per derivative
    outer = rmax + nmax + 1
    green = FullPlaneGreen(outer // 2 + 3)
    cur = _first_negative(outer, green)
    exact[-1] = cur
    for m in range(-1, -nmax - 1, -1):
        pts = _box(outer + m)
        cur = {p: v / m for p, v in dee_table(cur, pts).items()}
        exact[m - 1] = cur
    for n in list(exact):
        exact[n] = {p: v for p, v in exact[n].items() if max(abs(p[0]), abs(p[1])) <= rmax}
    arrays = {n: _to_array(t, rmax) for n, t in exact.items()}
    null_radii = {n: _null_radius(exact[n], rmax) for n in range(0, nmax + 1)}
    singular_radii = {n: (_singular_radius(exact[n], rmax) if n < 0 else 0) for n in exact}
    return MonomialFamily(nmax, rmax, exact, arrays, null_radii, singular_radii)


_FAMILIES: dict = {}


def family(nmax: int = 6, rmax: int = 34) -> MonomialFamily:
    """Cached family; the float tables are also cached on disk when
    ``DISFERMION_CACHE`` names a directory (exact tables are then rebuilt
    only on demand)."""
    for (n0, r0), fam in _FAMILIES.items():
        if n0 >= nmax and r0 >= rmax:
            return fam
    cache = os.environ.get("DISFERMION_CACHE")
    path = Path(cache) / f"monomials_n{nmax}_r{rmax}.npz" if cache else None
    if path is not None and path.exists():
        fam = load_family(path)
    else:
        fam = build_family(nmax, rmax)
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            fam.save(path)
    _FAMILIES[(nmax, rmax)] = fam
    return fam


# ----------------------------------------------------------------------
# contour integration


def _lookup(f, p):
    if callable(f):
        return f(p)
    try:
        return f[p]
    except KeyError:
        raise PreconditionError(f"no value at {p}") from None


def contour_integral(gamma: DualContour, f, g):
    """``sum_k (p_k - p_{k-1}) f(w_k) g(b_k)``; ``f`` on whites, ``g`` on blacks.

    ``f`` and ``g`` are mappings or callables with exact or float values.
    """
    acc = 0
    for (dx, dy), w, b in gamma.edges():
        fv = _lookup(f, w)
        if not fv:
            continue
        gv = _lookup(g, b)
        if not gv:
            continue
        acc = acc + fv * gv * GaussQ(dx, dy)
    return acc


def contour_integral_float(gamma: DualContour, f: np.ndarray, g: np.ndarray, r: int) -> complex:
    """Float contour integral of two box arrays of half-side ``r``."""
    e = gamma.edges()
    steps = np.array([complex(dx, dy) for (dx, dy), _, _ in e])
    wi = np.array([(w[0] + r, w[1] + r) for _, w, _ in e])
    bi = np.array([(b[0] + r, b[1] + r) for _, _, b in e])
    return complex(np.sum(steps * f[wi[:, 0], wi[:, 1]] * g[bi[:, 0], bi[:, 1]]))


def stokes_rhs(gamma: DualContour, f, g):
    """``i sum_{b inside} dbar f(b) g(b) + i sum_{w inside} f(w) dbar g(w)``."""
    blacks, whites = gamma.interior()
    acc = 0
    for b in blacks:
        gb = _lookup(g, b)
        if not gb:
            continue
        s = 0
        for d in UNIT_STEPS:
            s = s + _lookup(f, (b[0] + d[0], b[1] + d[1])) * _STEP[d]
        acc = acc + s * gb
    for w in whites:
        fw = _lookup(f, w)
        if not fw:
            continue
        s = 0
        for d in UNIT_STEPS:
            s = s + _lookup(g, (w[0] + d[0], w[1] + d[1])) * _STEP[d]
        acc = acc + fw * s
    return acc * I


def _holomorphic_near(f, gamma: DualContour, tol):
    """Return an offending vertex if ``dbar f`` is nonzero within distance 1 of gamma."""
    pts = set()
    for p in gamma.straddling():
        pts.add(p)
        for d in UNIT_STEPS:
            pts.add((p[0] + d[0], p[1] + d[1]))
    for p in sorted(pts):
        s = 0
        for d in UNIT_STEPS:
            s = s + _lookup(f, (p[0] + d[0], p[1] + d[1])) * _STEP[d]
        if abs(as_complex(s)) > tol:
            return p
    return None


def integrate_by_parts_check(gamma: DualContour, f, g, tol: float = 1e-9):
    """``contour(d f on blacks, g on whites) == -contour(f on whites, d g on blacks)``.

    ``f`` and ``g`` are full-lattice mappings; both must be discrete
    holomorphic near ``gamma``.  Returns ``(ok, lhs, rhs)``; raises
    PreconditionError naming an offending vertex otherwise.
    """
    for h in (f, g):
        bad = _holomorphic_near(h, gamma, tol)
        if bad is not None:
            raise PreconditionError(f"not discrete holomorphic at {bad}")

    def dee_at(h):
        def fn(p):
            s = 0
            for d in UNIT_STEPS:
                s = s + _lookup(h, (p[0] + d[0], p[1] + d[1])) * _CONJ_STEP[d]
            return s
        return fn

    lhs = contour_integral(gamma, g, dee_at(f))
    rhs = -contour_integral(gamma, f, dee_at(g))
    diff = lhs - rhs
    ok = (not diff) if not isinstance(diff, complex) else abs(diff) <= tol
    if isinstance(diff, (GaussQ, PiPoly)):
        ok = not diff
    return ok, lhs, rhs


def pairing_matrix(fam: MonomialFamily, gamma: DualContour, n_range, exact: bool = False):
    """``contour(z^[m] on whites, z^[n] on blacks) / (2 pi i)`` as ``{(n, m): value}``.

    Exact mode returns ``PiPoly`` values of the integral itself.
    """
    out = {}
    for n in n_range:
        for m in n_range:
            if exact:
                out[(n, m)] = contour_integral(gamma, fam.exact[m], fam.exact[n])
            else:
                v = contour_integral_float(gamma, fam.arrays[m], fam.arrays[n], fam.rmax)
                out[(n, m)] = v / (2j * math.pi)
    return out


__all__.append("pairing_matrix")


# ----------------------------------------------------------------------
# property verification


@dataclass
class PropertyReport:
    results: dict  # property number -> (ok, detail)

    @property
    def ok(self) -> bool:
        return all(ok for ok, _ in self.results.values())

    def to_json(self) -> dict:
        return {str(k): {"ok": bool(ok), "detail": d} for k, (ok, d) in sorted(self.results.items())}


def _rotation_ok(fam: MonomialFamily, n: int, tol: float) -> bool:
    a = fam.arrays[n]
    rotated = np.rot90(a, -1)  # value at (x, y) is a(-y, x) = f(iz)
    return bool(np.max(np.abs(rotated - (1j ** n) * a)) <= tol * max(1.0, np.max(np.abs(a))))


def verify_family(fam: MonomialFamily, nmax: int = 6, radii=(8, 16, 32), tol: float = 1e-10,
                  exact_radius: int | None = 10) -> PropertyReport:
    """Check the seven defining properties for ``|n| <= nmax``.

    Properties 1-6 are checked on the cached box; the pairing (property 7)
    on square contours of the given half sides in floats, and exactly on
    one square when exact tables are available.
    """
    if nmax > fam.nmax:
        raise ValueError(f"family only holds |n| <= {fam.nmax}")
    # square of half side R encloses the Manhattan ball of radius R - 1
    need = max((fam.singular_radius(n) for n in range(-nmax, 0)), default=0) + 1
    for R in tuple(radii) + ((exact_radius,) if exact_radius else ()):
        if R < need or R >= fam.rmax:
            raise ValueError(f"square of half side {R} must satisfy {need} <= R < {fam.rmax}")
    ns = range(-nmax, nmax + 1)
    res = {}
    bad = [n for n in ns if not _rotation_ok(fam, n, 1e-12)]
    res[1] = (not bad, f"rotation covariance fails for {bad}" if bad else "z^[n](iz) = i^n z^[n](z)")
    res[2] = (bool(np.all(fam.arrays[0] == 1)), "z^[0] = 1")
    r0 = [fam.null_radius(n) for n in range(0, nmax + 1)]
    inc = all(b > a for a, b in zip(r0, r0[1:]))
    res[3] = (inc, f"null radii {r0}")
    shells = {}
    decay = True
    r = fam.rmax
    for n in range(-nmax, 0):
        a = np.abs(fam.arrays[n])
        xs, ys = np.meshgrid(np.arange(-r, r + 1), np.arange(-r, r + 1), indexing="ij")
        nrm = np.abs(xs) + np.abs(ys)
        lo = fam.singular_radius(n) + 2
        mx = [float(a[nrm == k].max()) for k in range(lo, r + 1)]
        shells[n] = mx[-1]
        decay = decay and all(y <= x * (1 + 1e-12) for x, y in zip(mx, mx[1:]))
    res[4] = (decay, f"max |z^[n]| on the outer shell: {shells}")
    pts = _box(fam.rmax - 1)
    if fam.exact is not None:
        db = deebar_table(fam.exact[-1], _box(3))
        target = {p: ZERO for p in _box(3)}
        for p, wt in POLE_WEIGHTS:
            target[p] = GaussQ(wt) * PiPoly.pi(1) * 2
        ok5 = all(db[p] == target[p] for p in target)
    else:
        db = _deebar_float(fam.arrays[-1], fam.rmax, 3)
        target = np.zeros_like(db)
        for (x, y), wt in POLE_WEIGHTS:
            target[x + 3, y + 3] = 2 * math.pi * float(wt)
        ok5 = bool(np.max(np.abs(db - target)) <= 1e-10)
    res[5] = (ok5, "dbar z^[-1] / (2 pi) is the nine-point pole")
    bad6 = []
    for n in ns:
        db = _deebar_float(fam.arrays[n], fam.rmax, fam.rmax - 1)
        xs, ys = np.meshgrid(np.arange(-fam.rmax + 1, fam.rmax), np.arange(-fam.rmax + 1, fam.rmax),
                             indexing="ij")
        outside = (np.abs(xs) + np.abs(ys)) > fam.singular_radius(n)
        scale = max(1.0, float(np.max(np.abs(fam.arrays[n]))))
        if np.max(np.abs(db[outside])) > 1e-9 * scale:
            bad6.append(n)
    res[6] = (not bad6, f"dbar z^[n] nonzero outside r_sing for {bad6}" if bad6 else
              "dbar z^[n] = 0 outside the singular radius")
    worst = 0.0
    for R in radii:
        gamma = rect_contour(R, R)
        pm = pairing_matrix(fam, gamma, ns)
        for (n, m), v in pm.items():
            worst = max(worst, abs(v - (1 if n + m + 1 == 0 else 0)))
    detail = f"max |pairing/(2 pi i) - delta| = {worst:.3e} on squares {list(radii)}"
    ok7 = worst < tol
    if exact_radius is not None and fam.exact is not None:
        gamma = rect_contour(exact_radius, exact_radius)
        pm = pairing_matrix(fam, gamma, ns, exact=True)
        two_pi_i = PiPoly.pi(1) * GaussQ(0, 2)
        exact_ok = all(not (v - two_pi_i if n + m + 1 == 0 else v) for (n, m), v in pm.items())
        ok7 = ok7 and exact_ok
        detail += f"; exact on square {exact_radius}: {exact_ok}"
    res[7] = (ok7, detail)
    return PropertyReport(res)


def _deebar_float(a: np.ndarray, r: int, k: int) -> np.ndarray:
    """``dbar`` of a box array on the sub-box of half side ``k``."""
    c = r
    out = np.zeros((2 * k + 1, 2 * k + 1), dtype=complex)
    for dx, dy in UNIT_STEPS:
        out += complex(dx, dy) * a[c - k + dx:c + k + 1 + dx, c - k + dy:c + k + 1 + dy]
    return out


__all__ += ["verify_family", "PropertyReport"]
