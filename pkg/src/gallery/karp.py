"""Translation of one structured guess into a monotone 2-CSP instance.

Guard variables take values among candidate ranks ``1..m`` (rank = position
in the sorted candidate list), and ``N = m + 1``. When every vertex is a
candidate, ranks coincide with vertex indices and ``N = n + 1``.

Targets generalize "the next vertex": wherever the construction needs the
vertex right after ``a`` inside a region, the smallest target of that region
above ``a`` is used instead, and the first/last guarding steps aim at the
smallest/largest target of the region.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from .csp import GE, LE, Const, CspInstance, Fn, Constraint, check_monotone, is_monotone
from .regions import ND, NI, Element, Orientation, Workspace


class InternalError(AssertionError):
    """A constructed table broke monotonicity; the geometry or the tables are wrong."""


class EarlyNo(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


Placed = tuple[int, int]  # (element index, 1-based guard index within the element)


@dataclass(frozen=True)
class VariableMap:
    elements: tuple[Element, ...]
    pairs: tuple[Placed, ...]

    @classmethod
    def from_ig(cls, elements: Sequence[Element], ig: Sequence[int]) -> "VariableMap":
        pairs = tuple((ei, i) for ei, cnt in enumerate(ig) for i in range(1, cnt + 1))
        return cls(tuple(elements), pairs)

    @property
    def size(self) -> int:
        return len(self.pairs)

    def var(self, placed: Placed) -> int:
        return self._index[placed]

    def pair(self, var: int) -> Placed:
        return self.pairs[var]

    @property
    def _index(self) -> dict[Placed, int]:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {p: v for v, p in enumerate(self.pairs)}
            object.__setattr__(self, "_idx", idx)
        return idx


@dataclass
class Built:
    instance: CspInstance
    varmap: VariableMap


@dataclass
class Rejected:
    reason: str


BuildOutcome = Union[Built, Rejected]


# ---------------------------------------------------------------------------
# constraint families


def association(ws: Workspace, vm: VariableMap) -> list[Constraint]:
    out: list[Constraint] = []
    for x, (ei, _) in enumerate(vm.pairs):
        e = vm.elements[ei]
        if e.reflex:
            r = ws.rank(e.lo)
            out += [Const(x, LE, r), Const(x, GE, r)]
        else:
            out += [Const(x, GE, ws.rank_ceil(e.lo)), Const(x, LE, ws.rank_floor(e.hi))]
    return out


def successor_table(N: int) -> tuple[int, ...]:
    return tuple(min(q + 1, N) for q in range(N + 1))


def order(ws: Workspace, vm: VariableMap) -> list[Constraint]:
    succ = successor_table(ws.domain)
    out: list[Constraint] = []
    by_elem: dict[int, list[int]] = {}
    for x, (ei, _) in enumerate(vm.pairs):
        if not vm.elements[ei].reflex:
            by_elem.setdefault(ei, []).append(x)
    for xs in by_elem.values():
        for a in range(len(xs)):
            for b in range(a + 1, len(xs)):
                out.append(Fn(xs[b], GE, xs[a], succ, ND))
    return out


def sees_target(ws: Workspace, vm: VariableMap, y: int, placed: Placed) -> list[Constraint]:
    """The guard ``placed`` must see vertex ``y``."""
    e = vm.elements[placed[0]]
    x = vm.var(placed)
    if e.reflex:
        if not ws.sees(e.lo, y):
            raise EarlyNo(f"reflex {e.lo} does not see {y}")
        return []
    lo, hi = ws.first(y, e), ws.last(y, e)
    if lo is None:
        raise EarlyNo(f"{y} sees nothing in {e}")
    return [Const(x, GE, ws.rank_ceil(lo)), Const(x, LE, ws.rank_floor(hi))]


def seeing_range(ws: Workspace, e: Element, C: Element) -> Optional[tuple[int, int]]:
    """Ranks of the smallest and largest candidates of ``e`` that see some vertex of ``C``."""
    seeing = [v for v in ws.candidates_in(e) if ws.first(v, C) is not None]
    if not seeing:
        return None
    return ws.rank(seeing[0]), ws.rank(seeing[-1])


def _sweep(
    ws: Workspace,
    C: Element,
    src: tuple[int, int],
    dst: Element,
    ascending: bool,
    below: int,
    above: int,
    qualifies: Callable[[int, int], bool],
    pick_largest: bool,
) -> list[int]:
    """Fill a table over ``0..N`` for one of the eight middle-guard cases.

    ``src`` is the seeing range of the previous guard's element, ``below`` /
    ``above`` the fill values left and right of it. Inside the range the
    value is the rank of the largest (or smallest) candidate ``j`` of ``dst``
    with ``qualifies(j, b)`` where ``b`` is the target right after
    ``last(i, C)``; otherwise the value carries over from the neighbour
    already visited in sweep order.
    """
    N = ws.domain
    lo, hi = src
    f = [0] * (N + 1)
    for i in range(0, lo):
        f[i] = below
    for i in range(hi + 1, N + 1):
        f[i] = above
    dst_cands = ws.candidates_in(dst)
    span = range(lo, hi + 1) if ascending else range(hi, lo - 1, -1)
    for i in span:
        prev = f[i - 1] if ascending else f[i + 1]
        a = ws.last(ws.vertex(i), C)
        b = None if a is None else ws.next_target(C, a)
        if b is None:
            f[i] = prev
            continue
        js = [j for j in dst_cands if qualifies(j, b)]
        if not js:
            f[i] = prev
            continue
        f[i] = ws.rank(js[-1] if pick_largest else js[0])
    return f


@dataclass(frozen=True)
class MiddleTables:
    """Both middle-guard constraints for a pair of consecutive guards of a region."""

    window: Optional[tuple[int, int]]  # seeing range of the later guard's element
    first_cmp: str
    first_table: tuple[int, ...]
    first_dir: Orientation
    last_cmp: str
    last_table: tuple[int, ...]
    last_dir: Orientation


def _check(table: list[int], expected: Orientation, label: str) -> tuple[int, ...]:
    if not is_monotone(table, expected):
        raise InternalError(f"{label}: table {table} is not {expected} (found {check_monotone(table)})")
    return tuple(table)


def middle_tables(ws: Workspace, C: Element, prev: Element, cur: Element) -> MiddleTables:
    """Tables linking the guard in ``prev`` (t-1) to the guard in ``cur`` (t) for region ``C``.

    Raises :class:`EarlyNo` when one of the two elements has no candidate seeing ``C``.
    """
    key = (C, prev, cur)
    cache = ws.memo
    hit = cache.get(key)
    if isinstance(hit, EarlyNo):
        raise hit
    if hit is not None:
        return hit
    try:
        hit = _middle_tables(ws, C, prev, cur)
    except EarlyNo as exc:
        cache[key] = exc
        raise
    cache[key] = hit
    return hit


def _middle_tables(ws: Workspace, C: Element, prev: Element, cur: Element) -> MiddleTables:
    N = ws.domain
    win = seeing_range(ws, cur, C)
    if win is None:
        raise EarlyNo(f"nothing in {cur} sees {C}")
    src = seeing_range(ws, prev, C)
    if src is None:
        raise EarlyNo(f"nothing in {prev} sees {C}")
    last_prev = ws.orientation[prev, C][1]
    first_cur, last_cur = ws.orientation[cur, C]

    def first_ok(j: int, b: int) -> bool:
        fj = ws.first(j, C)
        return fj is not None and fj <= b

    def last_ok(j: int, b: int) -> bool:
        lj = ws.last(j, C)
        return lj is not None and lj >= b

    # first set: the later guard's first vertex reaches the target after the earlier guard's last
    if last_prev is ND and first_cur is ND:
        t1 = _sweep(ws, C, src, cur, True, 0, N, first_ok, True)
        c1, d1 = LE, ND
    elif last_prev is ND:
        t1 = _sweep(ws, C, src, cur, True, N, 0, first_ok, False)
        c1, d1 = GE, NI
    elif first_cur is ND:
        t1 = _sweep(ws, C, src, cur, False, N, 0, first_ok, True)
        c1, d1 = LE, NI
    else:
        t1 = _sweep(ws, C, src, cur, False, 0, N, first_ok, False)
        c1, d1 = GE, ND

    # second set: the later guard's last vertex reaches past the earlier guard's last
    if last_prev is ND and last_cur is ND:
        t2 = _sweep(ws, C, src, cur, False, 0, N, last_ok, False)
        c2, d2 = GE, ND
    elif last_prev is ND:
        t2 = _sweep(ws, C, src, cur, False, N, 0, last_ok, True)
        c2, d2 = LE, NI
    elif last_cur is ND:
        t2 = _sweep(ws, C, src, cur, True, N, 0, last_ok, False)
        c2, d2 = GE, NI
    else:
        t2 = _sweep(ws, C, src, cur, True, 0, N, last_ok, True)
        c2, d2 = LE, ND

    label = f"{prev}->{cur} on {C}"
    return MiddleTables(
        win,
        c1, _check(t1, d1, label + " (first)"), d1,
        c2, _check(t2, d2, label + " (last)"), d2,
    )


def middle(ws: Workspace, vm: VariableMap, C: Element, prev: Placed, cur: Placed) -> list[Constraint]:
    if prev == cur:
        # one guard cannot see strictly past its own last vertex
        raise EarlyNo(f"same guard used twice in a row on {C}")
    mt = middle_tables(ws, C, vm.elements[prev[0]], vm.elements[cur[0]])
    x, xp = vm.var(cur), vm.var(prev)
    lo, hi = mt.window
    return [
        Const(x, GE, lo),
        Const(x, LE, hi),
        Fn(x, mt.first_cmp, xp, mt.first_table, mt.first_dir),
        Fn(x, mt.last_cmp, xp, mt.last_table, mt.last_dir),
    ]


# ---------------------------------------------------------------------------


@dataclass
class GuessView:
    """The parts of a guess the builder reads; see :class:`gallery.structured.Guess`."""

    ig: Sequence[int]
    og: Sequence[int]
    how: Sequence[Sequence[Placed]]


def region_constraints(ws: Workspace, vm: VariableMap, C: Element, how: Sequence[Placed]) -> list[Constraint]:
    tg = ws.targets_in(C)
    if not how:
        return []
    out = sees_target(ws, vm, tg[0], how[0])
    for t in range(1, len(how)):
        out += middle(ws, vm, C, how[t - 1], how[t])
    out += sees_target(ws, vm, tg[-1], how[-1])
    return out


def build(ws: Workspace, guess: GuessView) -> BuildOutcome:
    elements = ws.decomposition.elements
    vm = VariableMap.from_ig(elements, guess.ig)
    inst = CspInstance(vm.size, ws.domain)
    try:
        inst.constraints += association(ws, vm)
        inst.constraints += order(ws, vm)
        for ei, e in enumerate(elements):
            how = guess.how[ei]
            if e.reflex:
                if how:
                    inst.constraints += sees_target(ws, vm, e.lo, how[0])
            else:
                inst.constraints += region_constraints(ws, vm, e, how)
    except EarlyNo as exc:
        return Rejected(exc.reason)
    return Built(inst, vm)
