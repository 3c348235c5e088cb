"""Geometry of Z^2 viewed inside the complex plane.

Points are integer pairs ``(x, y)``.  A point is *white* when ``x + y`` is odd,
*even-black* when both coordinates are even and *odd-black* when both are odd.

Dual contours run through plaquette centres ``(a + 1/2, b + 1/2)``; a
plaquette is stored by its lower-left corner ``(a, b)`` so that all contour
arithmetic stays in the integers.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "Color",
    "LatticePoint",
    "DomainError",
    "Domain",
    "DualContour",
    "classify",
    "is_white",
    "is_black",
    "norm",
    "neighbors",
    "UNIT_STEPS",
    "rect_contour",
    "diamond_contour",
    "contour_around",
    "interior",
    "ball",
]

# counterclockwise unit steps, also the four directions d with |d| = 1
UNIT_STEPS = ((1, 0), (0, 1), (-1, 0), (0, -1))


class Color(enum.Enum):
    WHITE = "white"
    EVEN_BLACK = "even-black"
    ODD_BLACK = "odd-black"


class LatticePoint(NamedTuple):
    x: int
    y: int

    @property
    def color(self) -> Color:
        return classify(self)

    @property
    def norm(self) -> int:
        return abs(self.x) + abs(self.y)

    def __complex__(self):
        return complex(self.x, self.y)


def classify(p) -> Color:
    """Colour of a lattice point from the parity of its coordinates."""
    x, y = p
    if (x + y) % 2:
        return Color.WHITE
    return Color.EVEN_BLACK if x % 2 == 0 else Color.ODD_BLACK


def is_white(p) -> bool:
    return (p[0] + p[1]) % 2 == 1


def is_black(p) -> bool:
    return (p[0] + p[1]) % 2 == 0


def norm(p) -> int:
    """Manhattan norm."""
    return abs(p[0]) + abs(p[1])


def neighbors(p):
    x, y = p
    return [(x + dx, y + dy) for dx, dy in UNIT_STEPS]


def ball(r: int, center=(0, 0)):
    """Points of the closed Manhattan ball of radius ``r``."""
    cx, cy = center
    return [(cx + x, cy + y) for x in range(-r, r + 1)
            for y in range(-(r - abs(x)), r - abs(x) + 1)]


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    """Finite vertex set of Z^2 with an optional sink.

    Vertices are kept sorted so that every downstream indexing is
    deterministic.
    """

    vertices: tuple
    sink: tuple | None = None
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        verts = tuple(sorted({(int(x), int(y)) for x, y in self.vertices}))
        object.__setattr__(self, "vertices", verts)
        if self.sink is not None:
            object.__setattr__(self, "sink", (int(self.sink[0]), int(self.sink[1])))
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(verts)})
        if self.sink is not None:
            self._check_sink()

    # construction -----------------------------------------------------
    @classmethod
    def rect(cls, x0: int, y0: int, x1: int, y1: int, sink=None) -> "Domain":
        """All points with ``x0 <= x <= x1`` and ``y0 <= y <= y1``."""
        pts = [(x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1)]
        return cls(tuple(pts), sink)

    @classmethod
    def from_json(cls, data, sink=None) -> "Domain":
        """Parse ``{"vertices": [[x, y], ...]}`` or ``{"rect": [x0, y0, x1, y1]}``."""
        if isinstance(data, str):
            data = json.loads(data)
        s = sink if sink is not None else data.get("sink")
        if "rect" in data:
            return cls.rect(*data["rect"], sink=s)
        return cls(tuple(tuple(v) for v in data["vertices"]), s)

    @classmethod
    def load(cls, path, sink=None) -> "Domain":
        with open(path) as fh:
            return cls.from_json(json.load(fh), sink=sink)

    def to_json(self) -> dict:
        out = {"vertices": [list(v) for v in self.vertices]}
        if self.sink is not None:
            out["sink"] = list(self.sink)
        return out

    def with_sink(self, sink) -> "Domain":
        return Domain(self.vertices, sink)

    # queries ----------------------------------------------------------
    def __contains__(self, p) -> bool:
        return tuple(p) in self._index

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def whites(self):
        return [v for v in self.vertices if is_white(v)]

    @property
    def blacks(self):
        return [v for v in self.vertices if is_black(v)]

    @property
    def even_blacks(self):
        return [v for v in self.vertices if classify(v) is Color.EVEN_BLACK]

    @property
    def odd_blacks(self):
        return [v for v in self.vertices if classify(v) is Color.ODD_BLACK]

    def reduced(self):
        """Vertex set with the sink removed."""
        return [v for v in self.vertices if v != self.sink]

    def _check_sink(self):
        s = self.sink
        if s not in self:
            raise DomainError(f"sink {s} is not a vertex of the domain")
        if classify(s) is not Color.EVEN_BLACK:
            raise DomainError(f"sink {s} is not even-black")
        if all(q in self for q in neighbors(s)):
            raise DomainError(f"sink {s} has no white neighbour outside the domain")

    # topology ---------------------------------------------------------
    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            p = stack.pop()
            for q in neighbors(p):
                if q in self and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return len(seen) == len(self.vertices)

    def is_simply_connected(self) -> bool:
        """Complement connectivity inside a padded bounding box.

        The complement is explored with 8-neighbour moves; a diagonal
        gap in the vertex set does not close a cycle of the induced graph.
        """
        if not self.is_connected():
            return False
        if not self.vertices:
            return True
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        x0, x1, y0, y1 = min(xs) - 1, max(xs) + 1, min(ys) - 1, max(ys) + 1
        start = (x0, y0)
        seen = {start}
        stack = [start]
        while stack:
            x, y = stack.pop()
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    q = (x + dx, y + dy)
                    if (x0 <= q[0] <= x1 and y0 <= q[1] <= y1 and q not in self
                            and q not in seen):
                        seen.add(q)
                        stack.append(q)
        n_box = (x1 - x0 + 1) * (y1 - y0 + 1)
        return len(seen) + len(self.vertices) == n_box

    def faces(self):
        """Unit squares with all four corners in the domain (lower-left corners)."""
        return [(x, y) for x, y in self.vertices
                if (x + 1, y) in self and (x, y + 1) in self and (x + 1, y + 1) in self]

    def corners(self):
        """Corners of the Jordan curve bounding the union of the faces.

        Raises DomainError when the union of faces is not a closed disc
        whose lattice points are exactly the vertices.
        """
        faces = set(self.faces())
        if not faces:
            raise DomainError("no Jordan curve: the domain has no faces")
        covered = set()
        for x, y in faces:
            covered.update({(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)})
        stray = [v for v in self.vertices if v not in covered]
        if stray:
            raise DomainError(f"vertex {stray[0]} is not on or inside the Jordan curve")
        # boundary unit edges belong to exactly one face
        count: dict = {}
        for x, y in faces:
            for e in (((x, y), (x + 1, y)), ((x, y), (x, y + 1)),
                      ((x + 1, y), (x + 1, y + 1)), ((x, y + 1), (x + 1, y + 1))):
                count[e] = count.get(e, 0) + 1
        bedges = [e for e, c in count.items() if c == 1]
        inc: dict = {}
        for a, b in bedges:
            inc.setdefault(a, []).append(b)
            inc.setdefault(b, []).append(a)
        for v, nb in inc.items():
            if len(nb) != 2:
                raise DomainError(f"boundary pinches at {v}: not a Jordan curve")
        # one closed curve
        start = bedges[0][0]
        prev, cur, steps = None, start, 0
        while True:
            a, b = inc[cur]
            nxt = a if a != prev else b
            prev, cur = cur, nxt
            steps += 1
            if cur == start:
                break
        if steps != len(bedges):
            raise DomainError("boundary consists of several curves")
        out = []
        for v, (a, b) in inc.items():
            d1 = (a[0] - v[0], a[1] - v[1])
            d2 = (b[0] - v[0], b[1] - v[1])
            if d1[0] * d2[0] + d1[1] * d2[1] == 0:
                out.append(v)
        return sorted(out)

    def temperleyan_report(self) -> str | None:
        """``None`` if temperleyan, otherwise the reason it is not."""
        if not self.vertices:
            return "empty domain"
        if not self.is_connected():
            return "not connected"
        if not self.is_simply_connected():
            return "not simply connected"
        try:
            cs = self.corners()
        except DomainError as exc:
            return str(exc)
        for c in cs:
            if classify(c) is not Color.EVEN_BLACK:
                return f"corner at {c} not even-black"
        return None

    def is_temperleyan(self) -> bool:
        return self.temperleyan_report() is None

    def boundary_even_blacks(self):
        """Even-black vertices with a white neighbour outside (admissible sinks)."""
        return [v for v in self.even_blacks if any(q not in self for q in neighbors(v))]

    def odd_boundary(self):
        """Odd-black points outside the domain at distance one from it."""
        out = set()
        for v in self.vertices:
            if is_white(v):
                for q in neighbors(v):
                    if q not in self and classify(q) is Color.ODD_BLACK:
                        out.add(q)
        return sorted(out)


def centered_square(half: int, sink: str | tuple = "corner") -> Domain:
    """Square ``[-half, half]^2``; with ``half`` even it is temperleyan."""
    d = Domain.rect(-half, -half, half, half)
    if sink == "corner":
        sink = (-half, -half)
    return d.with_sink(sink) if sink is not None else d


__all__.append("centered_square")


# ----------------------------------------------------------------------
# dual contours


@dataclass(frozen=True)
class DualContour:
    """Closed loop of plaquettes ``p_0, ..., p_n = p_0``.

    Plaquette ``(a, b)`` has centre ``(a + 1/2, b + 1/2)``.
    """

    plaquettes: tuple

    def __post_init__(self):
        pl = tuple((int(a), int(b)) for a, b in self.plaquettes)
        object.__setattr__(self, "plaquettes", pl)
        if len(pl) < 2 or pl[0] != pl[-1]:
            raise ValueError("dual contour must be closed (p_0 = p_n)")
        for p, q in zip(pl, pl[1:]):
            if abs(p[0] - q[0]) + abs(p[1] - q[1]) != 1:
                raise ValueError(f"non-unit step {p} -> {q}")
        if len(set(pl[1:])) != len(pl) - 1:
            raise ValueError("dual contour intersects itself")

    @property
    def points(self):
        """Plaquette centres as complex numbers."""
        return [complex(a + 0.5, b + 0.5) for a, b in self.plaquettes]

    def __len__(self) -> int:
        return len(self.plaquettes) - 1

    def steps(self):
        pl = self.plaquettes
        return [(q[0] - p[0], q[1] - p[1]) for p, q in zip(pl, pl[1:])]

    def signed_area(self) -> float:
        pts = self.plaquettes
        s = 0
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            s += x0 * y1 - x1 * y0
        return s / 2

    @property
    def orientation(self) -> int:
        return 1 if self.signed_area() > 0 else -1

    def reversed(self) -> "DualContour":
        return DualContour(tuple(reversed(self.plaquettes)))

    def edges(self):
        """Per step ``k``: ``(p_k - p_{k-1}, w_k, b_k)``.

        ``w_k`` and ``b_k`` are the white and black endpoints of the primal
        edge crossed by the k-th dual edge.
        """
        out = []
        for p, q in zip(self.plaquettes, self.plaquettes[1:]):
            dx, dy = q[0] - p[0], q[1] - p[1]
            if dx:  # shared side is vertical at x = max(a) + ... between columns
                x = max(p[0], q[0])
                u, v = (x, p[1]), (x, p[1] + 1)
            else:
                y = max(p[1], q[1])
                u, v = (p[0], y), (p[0] + 1, y)
            w, b = (u, v) if is_white(u) else (v, u)
            out.append(((dx, dy), w, b))
        return out

    def straddling(self):
        """All vertices adjacent to the contour."""
        s = set()
        for _, w, b in self.edges():
            s.add(w)
            s.add(b)
        return s

    def winding(self, p) -> int:
        x, y = p
        wnd = 0
        for (a0, b0), (a1, b1) in zip(self.plaquettes, self.plaquettes[1:]):
            if a0 == a1 and a0 >= x and max(b0, b1) == y:
                wnd += 1 if b1 > b0 else -1
        return wnd

    def interior(self):
        """Enclosed points as ``(blacks, whites)`` sets."""
        xs = [a for a, _ in self.plaquettes]
        ys = [b for _, b in self.plaquettes]
        blacks, whites = set(), set()
        for y in range(min(ys) + 1, max(ys) + 1):
            # scanline: accumulate winding from the right
            cross = {}
            for (a0, b0), (a1, b1) in zip(self.plaquettes, self.plaquettes[1:]):
                if a0 == a1 and max(b0, b1) == y:
                    cross[a0] = cross.get(a0, 0) + (1 if b1 > b0 else -1)
            wnd = 0
            for x in range(max(xs), min(xs), -1):
                wnd += cross.get(x, 0)
                if wnd:
                    (whites if is_white((x, y)) else blacks).add((x, y))
        return blacks, whites

    def interior_points(self):
        b, w = self.interior()
        return b | w

    def max_norm_inside(self) -> int:
        return max((norm(p) for p in self.interior_points()), default=-1)


def interior(contour: DualContour):
    return contour.interior()


def rect_contour(half_width: int, half_height: int) -> DualContour:
    """Counterclockwise rectangle through centres ``x = ±(hw - 1/2)``, ``y = ±(hh - 1/2)``."""
    if half_width < 1 or half_height < 1:
        raise ValueError("half sizes must be >= 1")
    a0, a1 = -half_width, half_width - 1
    b0, b1 = -half_height, half_height - 1
    pts = []
    for a in range(a0, a1):
        pts.append((a, b0))
    for b in range(b0, b1):
        pts.append((a1, b))
    for a in range(a1, a0, -1):
        pts.append((a, b1))
    for b in range(b1, b0, -1):
        pts.append((a0, b))
    pts.append(pts[0])
    return DualContour(tuple(pts))


def contour_around(points: Iterable) -> DualContour:
    """Counterclockwise dual contour separating a finite point set from the rest.

    The set must be 4-connected, without holes and without diagonal pinches;
    otherwise the boundary is not a single simple loop and ValueError is raised.
    """
    s = set(map(tuple, points))
    if not s:
        raise ValueError("empty point set")
    nxt = {}
    for u in s:
        for d in UNIT_STEPS:
            v = (u[0] + d[0], u[1] + d[1])
            if v in s:
                continue
            # step direction i*(v - u), inside on the left
            step = (-d[1], d[0])
            mx2, my2 = u[0] + v[0], u[1] + v[1]  # doubled midpoint
            # plaquette centres m -/+ step/2, stored as lower-left corners
            p = ((mx2 - step[0] - 1) // 2, (my2 - step[1] - 1) // 2)
            q = ((mx2 + step[0] - 1) // 2, (my2 + step[1] - 1) // 2)
            if p in nxt:
                raise ValueError(f"pinched boundary at plaquette {p}")
            nxt[p] = q
    start = min(nxt)
    loop = [start]
    cur = nxt[start]
    while cur != start:
        loop.append(cur)
        cur = nxt[cur]
        if len(loop) > len(nxt):  # pragma: no cover - defensive
            raise ValueError("boundary does not close")
    if len(loop) != len(nxt):
        raise ValueError("point set has several boundary components")
    loop.append(start)
    return DualContour(tuple(loop))


def diamond_contour(r: int) -> DualContour:
    """Contour hugging the Manhattan ball of radius ``r``.

    Straddling vertices inside have norm ``<= r`` and those outside have
    norm ``r + 1``.
    """
    return contour_around(ball(r))
