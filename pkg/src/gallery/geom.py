"""Exact plane geometry for simple polygons.

Coordinates are :class:`fractions.Fraction` throughout. Predicates that run
in inner loops (segment containment, point location) work on integer
coordinates obtained by scaling every point by the common denominator, which
keeps them exact and reasonably fast.

Vertex indices exposed by :class:`Polygon` are 1-based, matching the usual
boundary numbering 1..n.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np


class GeometryError(ValueError):
    pass


class NotSimple(GeometryError):
    pass


class DegeneratePolygon(GeometryError):
    pass


class Point(NamedTuple):
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x, y) -> "Point":
        return cls(to_fraction(x), to_fraction(y))

    def __str__(self) -> str:
        return f"{format_number(self.x)} {format_number(self.y)}"


def to_fraction(value) -> Fraction:
    """Parse an int, Fraction, ``"p/q"`` or finite decimal string exactly.

    Floats are accepted but converted via their exact binary value.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite coordinate {value!r}")
        return Fraction(value)
    return Fraction(str(value).strip())


def format_number(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def cross(o: Point, a: Point, b: Point):
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


@dataclass(frozen=True)
class Polygon:
    """A simple polygon in counter-clockwise order.

    ``points[i - 1]`` is vertex ``i``. When the polygon has reflex vertices,
    vertex 1 is reflex.
    """

    points: tuple[Point, ...]
    reflex: frozenset[int]

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @property
    def convex(self) -> frozenset[int]:
        return frozenset(self.vertices) - self.reflex

    @property
    def r(self) -> int:
        return len(self.reflex)

    def point(self, i: int) -> Point:
        return self.points[i - 1]

    def is_reflex(self, i: int) -> bool:
        return i in self.reflex

    def edges(self) -> Iterator[tuple[Point, Point]]:
        pts = self.points
        for k in range(len(pts)):
            yield pts[k], pts[(k + 1) % len(pts)]

    @cached_property
    def index(self) -> dict[Point, int]:
        return {p: i for i, p in enumerate(self.points, start=1)}

    @cached_property
    def _scaled(self) -> "_Scaled":
        return _Scaled.build(self.points, ())

    def __str__(self) -> str:
        return format_polygon(self)


# ---------------------------------------------------------------------------
# construction and validation


def validate_polygon(raw: Sequence) -> Polygon:
    """Validate user input and return the canonical polygon.

    ``raw`` is a sequence of ``(x, y)`` pairs in boundary order, either
    orientation. Repeated points and collinear consecutive vertices are
    rejected.
    """
    points = [p if isinstance(p, Point) else Point.of(*p) for p in raw]
    return _make_polygon(points, allow_straight=False)


def _make_polygon(points: Sequence[Point], allow_straight: bool) -> Polygon:
    n = len(points)
    if n < 3:
        raise DegeneratePolygon(f"need at least 3 vertices, got {n}")
    if len(set(points)) != n:
        raise DegeneratePolygon("repeated vertex")
    if all(cross(points[0], points[1], p) == 0 for p in points[2:]):
        raise DegeneratePolygon("all vertices are collinear")

    turns = [cross(points[i - 1], points[i], points[(i + 1) % n]) for i in range(n)]
    if not allow_straight and any(t == 0 for t in turns):
        i = turns.index(0)
        raise DegeneratePolygon(f"collinear consecutive vertices at {points[i]}")

    _check_simple(points)

    area2 = sum(a.x * b.y - b.x * a.y for a, b in zip(points, points[1:] + points[:1]))
    if area2 < 0:
        points = list(reversed(points))
        turns = [cross(points[i - 1], points[i], points[(i + 1) % n]) for i in range(n)]

    reflex0 = [i for i in range(n) if turns[i] < 0]
    if reflex0:
        start = min(reflex0, key=lambda i: points[i])
        points = points[start:] + points[:start]
        reflex0 = [(i - start) % n for i in reflex0]
    return Polygon(tuple(points), frozenset(i + 1 for i in reflex0))


def _check_simple(points: Sequence[Point]) -> None:
    n = len(points)
    edges = [(points[k], points[(k + 1) % n]) for k in range(n)]
    for i in range(n):
        a, b = edges[i]
        c = edges[(i + 1) % n][1]
        # adjacent edges a-b, b-c: only a backtrack can overlap them
        if cross(a, b, c) == 0 and (b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y) < 0:
            raise NotSimple(f"edges fold back at {b}")
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if segments_touch(*edges[i], *edges[j]):
                raise NotSimple(f"edges {i + 1} and {j + 1} intersect")


def on_segment(p: Point, a: Point, b: Point) -> bool:
    return (
        cross(a, b, p) == 0
        and min(a.x, b.x) <= p.x <= max(a.x, b.x)
        and min(a.y, b.y) <= p.y <= max(a.y, b.y)
    )


def segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Closed segments ab and cd share at least one point."""
    d1, d2 = cross(c, d, a), cross(c, d, b)
    d3, d4 = cross(a, b, c), cross(a, b, d)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    return on_segment(a, c, d) or on_segment(b, c, d) or on_segment(c, a, b) or on_segment(d, a, b)


# ---------------------------------------------------------------------------
# visibility


def _ray_directions() -> Iterator[tuple[int, int]]:
    yield from ((1, 0), (0, 1), (-1, 0), (0, -1))
    for m in itertools.count(1):
        for a in range(1, m + 1):
            b = m + 1 - a
            if math.gcd(a, b) == 1:
                yield from ((a, b), (-a, b), (a, -b), (-a, -b))


@dataclass(frozen=True)
class _Scaled:
    """Polygon and query points multiplied by a common denominator."""

    scale: int
    poly: tuple[tuple[int, int], ...]
    extra: tuple[tuple[int, int], ...]

    @classmethod
    def build(cls, polygon: Sequence[Point], extra: Sequence[Point]) -> "_Scaled":
        scale = 1
        for p in itertools.chain(polygon, extra):
            scale = math.lcm(scale, p.x.denominator, p.y.denominator)

        def conv(p: Point) -> tuple[int, int]:
            return int(p.x * scale), int(p.y * scale)

        return cls(scale, tuple(map(conv, polygon)), tuple(map(conv, extra)))

    def contains(self, X: int, Y: int, W: int) -> bool:
        """Closed containment of the point (X/W, Y/W), W > 0."""
        poly = self.poly
        n = len(poly)
        rel = [(ax * W - X, ay * W - Y) for ax, ay in poly]
        for k in range(n):
            (ux, uy), (vx, vy) = rel[k], rel[(k + 1) % n]
            if ux * vy - uy * vx == 0 and ux * vx <= 0 and uy * vy <= 0:
                return True
        for rx, ry in _ray_directions():
            if any(rx * uy - ry * ux == 0 and rx * ux + ry * uy > 0 for ux, uy in rel):
                continue
            crossings = 0
            for k in range(n):
                (ux, uy), (vx, vy) = rel[k], rel[(k + 1) % n]
                s1 = rx * uy - ry * ux
                s2 = rx * vy - ry * vx
                if (s1 > 0 > s2) or (s1 < 0 < s2):
                    ex, ey = vx - ux, vy - uy
                    if (ux * ey - uy * ex) * (rx * ey - ry * ex) > 0:
                        crossings += 1
            return crossings % 2 == 1
        raise AssertionError("unreachable")

    def segment_inside(self, p: tuple[int, int], q: tuple[int, int]) -> bool:
        px, py = p
        dx, dy = q[0] - px, q[1] - py
        if dx == 0 and dy == 0:
            return True
        dd = dx * dx + dy * dy
        poly = self.poly
        n = len(poly)
        cuts = set()
        for k in range(n):
            ax, ay = poly[k]
            bx, by = poly[(k + 1) % n]
            o1 = dx * (ay - py) - dy * (ax - px)
            o2 = dx * (by - py) - dy * (bx - px)
            if o1 == 0:
                s = (ax - px) * dx + (ay - py) * dy
                if 0 < s < dd:
                    cuts.add(s)
            elif (o1 > 0 > o2) or (o1 < 0 < o2):
                ex, ey = bx - ax, by - ay
                o3 = ex * (py - ay) - ey * (px - ax)
                o4 = ex * (q[1] - ay) - ey * (q[0] - ax)
                if (o3 > 0 > o4) or (o3 < 0 < o4):
                    return False
        bounds = [0, *sorted(cuts), dd]
        W = 2 * dd
        for s0, s1 in zip(bounds, bounds[1:]):
            m = s0 + s1
            if not self.contains(px * W + dx * m, py * W + dy * m, W):
                return False
        return True


def contains(P: Polygon, p: Point) -> bool:
    """Closed point-in-polygon test (boundary counts as inside)."""
    sc = _Scaled.build(P.points, (p,))
    (x, y), = sc.extra
    return sc.contains(x, y, 1)


def sees(P: Polygon, p: Point, q: Point) -> bool:
    """True iff the closed segment pq lies inside the closed polygon."""
    sc = _Scaled.build(P.points, (p, q))
    return sc.segment_inside(*sc.extra)


def visibility_table(P: Polygon, candidates: Sequence[Point]) -> np.ndarray:
    """Symmetric boolean matrix of pairwise visibility among ``candidates``."""
    sc = _Scaled.build(P.points, candidates)
    m = len(candidates)
    table = np.ones((m, m), dtype=bool)
    for i in range(m):
        for j in range(i + 1, m):
            table[i, j] = table[j, i] = sc.segment_inside(sc.extra[i], sc.extra[j])
    return table


def vertex_visibility(P: Polygon) -> np.ndarray:
    """Vertex visibility indexed by 1-based vertex ids; row and column 0 are unused."""
    n = P.n
    padded = np.zeros((n + 1, n + 1), dtype=bool)
    padded[1:, 1:] = visibility_table(P, P.points)
    return padded


# ---------------------------------------------------------------------------
# discretization of the boundary


@dataclass(frozen=True)
class EssentialSet:
    points: tuple[Point, ...]
    original: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.points)


def essential_set(P: Polygon) -> EssentialSet:
    """Vertices plus every crossing of a vertex-pair line with an edge.

    Edges lying on the line are skipped; the result is deduplicated and
    listed in boundary order starting from vertex 1.
    """
    n = P.n
    pts = P.points
    on_edge: list[set[Fraction]] = [set() for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        a, b = pts[i], pts[j]
        for k in range(n):
            u, v = pts[k], pts[(k + 1) % n]
            su, sv = cross(a, b, u), cross(a, b, v)
            if su == 0 and sv == 0:
                continue
            if (su > 0 > sv) or (su < 0 < sv):
                on_edge[k].add(su / (su - sv))
    out: list[Point] = []
    flags: list[bool] = []
    for k in range(n):
        u, v = pts[k], pts[(k + 1) % n]
        out.append(u)
        flags.append(True)
        for t in sorted(on_edge[k]):
            out.append(Point(u.x + t * (v.x - u.x), u.y + t * (v.y - u.y)))
            flags.append(False)
    return EssentialSet(tuple(out), tuple(flags))


def subdivide(P: Polygon, extra: EssentialSet | Iterable[Point]) -> Polygon:
    """Insert boundary points of ``P`` as new (straight-angle) vertices."""
    pts = extra.points if isinstance(extra, EssentialSet) else tuple(extra)
    per_edge: list[list[tuple[Fraction, Point]]] = [[] for _ in range(P.n)]
    present = set(P.points)
    for p in pts:
        if p in present:
            continue
        for k, (u, v) in enumerate(P.edges()):
            if on_segment(p, u, v):
                t = (p.x - u.x) / (v.x - u.x) if v.x != u.x else (p.y - u.y) / (v.y - u.y)
                per_edge[k].append((t, p))
                present.add(p)
                break
        else:
            raise GeometryError(f"{p} is not on the boundary")
    boundary: list[Point] = []
    for k, u in enumerate(P.points):
        boundary.append(u)
        boundary.extend(p for _, p in sorted(per_edge[k]))
    return _make_polygon(boundary, allow_straight=True)


def midpoint_refine(P1: Polygon) -> Polygon:
    """Split every edge once at its midpoint; doubles the vertex count."""
    boundary: list[Point] = []
    for u, v in P1.edges():
        boundary.append(u)
        boundary.append(Point((u.x + v.x) / 2, (u.y + v.y) / 2))
    return _make_polygon(boundary, allow_straight=True)


# ---------------------------------------------------------------------------
# text format


def parse_polygon(text: str) -> list[Point]:
    """Parse the ``n`` / ``x y`` text format. Lines starting with ``#`` are comments."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty polygon file")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValueError(f"expected vertex count, got {lines[0]!r}") from None
    if len(lines) - 1 != n:
        raise ValueError(f"header says {n} vertices, found {len(lines) - 1}")
    points = []
    for ln in lines[1:]:
        fields = ln.split()
        if len(fields) != 2:
            raise ValueError(f"expected 'x y', got {ln!r}")
        try:
            points.append(Point.of(*fields))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"bad coordinate in {ln!r}") from None
    return points


def format_polygon(P: Polygon | Sequence[Point]) -> str:
    pts = P.points if isinstance(P, Polygon) else P
    return "\n".join([str(len(pts)), *map(str, pts)]) + "\n"


def load_polygon(path: str | Path) -> Polygon:
    return validate_polygon(parse_polygon(Path(path).read_text()))


def save_polygon(P: Polygon | Sequence[Point], path: str | Path) -> None:
    Path(path).write_text(format_polygon(P))
