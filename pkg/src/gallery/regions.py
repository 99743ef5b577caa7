"""Maximal convex regions and how vertices view them.

For a vertex ``v`` and a maximal convex region ``C``, ``first(v, C)`` and
``last(v, C)`` are the smallest and largest vertices of ``C`` seen by ``v``,
or ``None`` when ``v`` sees nothing in ``C``. Walking along a source element
and reading off these values gives a sequence that is always either
non-decreasing or non-increasing (ignoring ``None`` entries, which may not
sit between two equal values); :func:`classify_view` records which.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .geom import Polygon, vertex_visibility


class ConvexPolygonShortcut(Exception):
    """Raised by :func:`decompose` for polygons without reflex vertices."""


class NotMonotone(AssertionError):
    """A view sequence is neither non-decreasing nor non-increasing."""


class Orientation(enum.Enum):
    NON_DECREASING = "nondecreasing"
    NON_INCREASING = "nonincreasing"

    def __str__(self) -> str:
        return self.value


ND = Orientation.NON_DECREASING
NI = Orientation.NON_INCREASING


@dataclass(frozen=True, order=True)
class Element:
    """A maximal convex region ``[lo, hi]`` or a single reflex vertex."""

    lo: int
    hi: int
    reflex: bool = False

    @property
    def vertices(self) -> range:
        return range(self.lo, self.hi + 1)

    def __contains__(self, v: int) -> bool:
        return self.lo <= v <= self.hi

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def __str__(self) -> str:
        if self.reflex:
            return f"r{self.lo}"
        return f"[{self.lo},{self.hi}]"


@dataclass(frozen=True)
class RegionDecomposition:
    regions: tuple[Element, ...]
    reflex: tuple[Element, ...]

    @property
    def elements(self) -> tuple[Element, ...]:
        """Canonical element order: regions by ``lo``, then reflex vertices."""
        return self.regions + self.reflex

    @property
    def reflex_vertices(self) -> list[int]:
        return [e.lo for e in self.reflex]

    def element_of(self, v: int) -> Element:
        for e in self.elements:
            if v in e:
                return e
        raise KeyError(v)


def decompose(P: Polygon) -> RegionDecomposition:
    if not P.reflex:
        raise ConvexPolygonShortcut("polygon has no reflex vertices")
    assert 1 in P.reflex, "polygon is not in canonical rotation"
    regions = []
    v = 1
    while v <= P.n:
        if v in P.reflex:
            v += 1
            continue
        lo = v
        while v + 1 <= P.n and v + 1 not in P.reflex:
            v += 1
        regions.append(Element(lo, v))
        v += 1
    reflex = tuple(Element(u, u, reflex=True) for u in sorted(P.reflex))
    return RegionDecomposition(tuple(regions), reflex)


@dataclass
class ViewTable:
    """``first[C][v]`` / ``last[C][v]`` for every region ``C`` and vertex ``v`` (1-based)."""

    n: int
    first: dict[Element, list[Optional[int]]]
    last: dict[Element, list[Optional[int]]]


def view_table(P: Polygon, D: RegionDecomposition, vis: np.ndarray) -> ViewTable:
    first: dict[Element, list[Optional[int]]] = {}
    last: dict[Element, list[Optional[int]]] = {}
    for C in D.regions:
        lo, hi = C.lo, C.hi
        f: list[Optional[int]] = [None] * (P.n + 1)
        l: list[Optional[int]] = [None] * (P.n + 1)
        for v in P.vertices:
            seen = np.flatnonzero(vis[v, lo:hi + 1])
            if seen.size:
                f[v] = lo + int(seen[0])
                l[v] = lo + int(seen[-1])
        first[C], last[C] = f, l
    return ViewTable(P.n, first, last)


def check_contiguity(vt: ViewTable, vis: np.ndarray) -> bool:
    """Every vertex sees the whole stretch between its first and last vertex of each region."""
    for C, firsts in vt.first.items():
        lasts = vt.last[C]
        for v in range(1, vt.n + 1):
            a, b = firsts[v], lasts[v]
            if (a is None) != (b is None):
                return False
            if a is not None and not all(vis[v, t] for t in range(a, b + 1)):
                return False
    return True


def _follows(seq: Sequence[Optional[int]], orient: Orientation) -> bool:
    prev_val = None
    prev_pos = -1
    for pos, val in enumerate(seq):
        if val is None:
            continue
        if prev_val is not None:
            if orient is ND and val < prev_val:
                return False
            if orient is NI and val > prev_val:
                return False
            if val == prev_val and pos != prev_pos + 1:
                return False
        prev_val, prev_pos = val, pos
    return True


def sequence_orientation(seq: Sequence[Optional[int]]) -> Orientation:
    """Orientation of a view sequence; ties (constant or sparse) resolve to non-decreasing."""
    if _follows(seq, ND):
        return ND
    if _follows(seq, NI):
        return NI
    raise NotMonotone(f"view sequence {list(seq)} is not monotone")


def classify_view(
    vt: ViewTable, e: Element, C: Element, sources: Optional[Iterable[int]] = None
) -> tuple[Orientation, Orientation]:
    """Orientation of the way ``e`` views ``C`` with respect to first and last.

    ``sources`` restricts the walk along ``e`` to the given vertices (used
    when only some vertices may hold guards).
    """
    if e.reflex:
        return ND, ND
    walk = [t for t in e.vertices if sources is None or t in sources]
    firsts = [vt.first[C][t] for t in walk]
    lasts = [vt.last[C][t] for t in walk]
    return sequence_orientation(firsts), sequence_orientation(lasts)


@dataclass
class Workspace:
    """Everything the reduction needs about one polygon and its guard/target annotation.

    Guard values are expressed as ranks among ``candidates`` (1-based), so
    restricted guard sets keep every derived function monotone.
    """

    polygon: Polygon
    vis: np.ndarray
    decomposition: RegionDecomposition
    views: ViewTable
    candidates: tuple[int, ...]
    targets: frozenset[int]
    orientation: dict[tuple[Element, Element], tuple[Orientation, Orientation]] = field(default_factory=dict)
    memo: dict = field(default_factory=dict, repr=False)

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def domain(self) -> int:
        """Largest CSP value ``N``; guard ranks live in ``1..N-1``."""
        return self.m + 1

    def rank(self, v: int) -> int:
        i = bisect.bisect_left(self.candidates, v)
        assert i < self.m and self.candidates[i] == v, f"{v} is not a candidate"
        return i + 1

    def rank_ceil(self, v: int) -> int:
        """Rank of the smallest candidate >= v (``m + 1`` if none)."""
        return bisect.bisect_left(self.candidates, v) + 1

    def rank_floor(self, v: int) -> int:
        """Rank of the largest candidate <= v (0 if none)."""
        return bisect.bisect_right(self.candidates, v)

    def vertex(self, rank: int) -> int:
        return self.candidates[rank - 1]

    def candidates_in(self, e: Element) -> list[int]:
        lo = bisect.bisect_left(self.candidates, e.lo)
        hi = bisect.bisect_right(self.candidates, e.hi)
        return list(self.candidates[lo:hi])

    def targets_in(self, C: Element) -> list[int]:
        return [v for v in C.vertices if v in self.targets]

    def next_target(self, C: Element, a: int) -> Optional[int]:
        """Smallest target of ``C`` above ``a``."""
        for v in range(a + 1, C.hi + 1):
            if v in self.targets:
                return v
        return None

    def first(self, v: int, C: Element) -> Optional[int]:
        return self.views.first[C][v]

    def last(self, v: int, C: Element) -> Optional[int]:
        return self.views.last[C][v]

    def sees(self, u: int, v: int) -> bool:
        return bool(self.vis[u, v])


def build_workspace(
    P: Polygon,
    candidates: Optional[Iterable[int]] = None,
    targets: Optional[Iterable[int]] = None,
    vis: Optional[np.ndarray] = None,
) -> Workspace:
    D = decompose(P)
    if vis is None:
        vis = vertex_visibility(P)
    vt = view_table(P, D, vis)
    cands = tuple(sorted(set(P.vertices if candidates is None else candidates)))
    tgts = frozenset(P.vertices if targets is None else targets)
    ws = Workspace(P, vis, D, vt, cands, tgts)
    cand_set = set(cands)
    for e in D.elements:
        for C in D.regions:
            ws.orientation[e, C] = classify_view(vt, e, C, cand_set)
    return ws


def dump_views(ws: Workspace, tables: bool = False) -> str:
    """One line per (element, region): ``e C first-orientation last-orientation``."""
    lines = []
    for e in ws.decomposition.elements:
        for C in ws.decomposition.regions:
            fo, lo = ws.orientation[e, C]
            lines.append(f"{e} {C} {fo} {lo}")
    if tables:
        nil = lambda x: "-" if x is None else str(x)  # noqa: E731
        for C in ws.decomposition.regions:
            lines.append(f"first {C} " + " ".join(nil(ws.first(v, C)) for v in ws.polygon.vertices))
            lines.append(f"last {C} " + " ".join(nil(ws.last(v, C)) for v in ws.polygon.vertices))
    return "\n".join(lines) + "\n"
