"""Guess enumeration and the top-level solver.

A guess fixes, per element (maximal convex region or reflex vertex), how many
guards it holds (``ig``), how many guards cover it (``og``) and which placed
guard covers each stretch (``how``). Each guess is turned into a monotone
2-CSP instance by :mod:`gallery.karp`; the instance is satisfiable exactly when
some guard set realizes the guess.

Order of guesses: ``ig`` vectors in lexicographic order over the element
order (regions by ``lo``, then reflex vertices); for a fixed ``ig``, elements
are visited reflex vertices first, then regions, and each contributes its
``og`` (ascending) followed by its ``how`` sequence (lexicographic over
``(element, index)`` pairs).
"""

from __future__ import annotations

import enum
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

from .csp import Const, Constraint, CspInstance, GE, solve_csp
from .geom import Point, Polygon, essential_set, midpoint_refine, subdivide, vertex_visibility
from .karp import Built, EarlyNo, GuessView, Placed, VariableMap, association, build, middle, order, sees_target
from .regions import Element, Workspace, build_workspace


class InternalError(AssertionError):
    pass


BuildHook = Callable[["Guess", CspInstance, bool], None]  # called for every built instance


class Variant(enum.Enum):
    VV = "vv"
    VB = "vb"
    BV = "bv"

    @property
    def label(self) -> str:
        return {"vv": "vertex-vertex", "vb": "vertex-boundary", "bv": "boundary-vertex"}[self.value]


@dataclass
class Problem:
    """A guarding question on a working polygon: can ``k`` candidates see every target?"""

    original: Polygon
    variant: Variant
    polygon: Polygon
    candidates: tuple[int, ...]
    targets: frozenset[int]
    vis: object = field(repr=False, default=None)

    def __post_init__(self) -> None:
        if self.vis is None:
            self.vis = vertex_visibility(self.polygon)

    def to_original(self, v: int) -> Optional[int]:
        """Index in the input polygon of working vertex ``v``, if it is an input vertex."""
        return self.original.index.get(self.polygon.point(v))


def make_problem(P: Polygon, variant: Variant | str) -> Problem:
    variant = Variant(variant)
    if variant is Variant.VV:
        return Problem(P, variant, P, tuple(P.vertices), frozenset(P.vertices))
    P1 = subdivide(P, essential_set(P))
    originals = [P1.index[pt] for pt in P.points]
    if variant is Variant.BV:
        return Problem(P, variant, P1, tuple(P1.vertices), frozenset(originals))
    P2 = midpoint_refine(P1)
    cands = sorted(P2.index[pt] for pt in P.points)
    return Problem(P, variant, P2, tuple(cands), frozenset(P2.vertices))


def certify(problem: Problem, guards: Sequence[int]) -> bool:
    """Every target is seen by some guard, read directly off the visibility matrix."""
    if any(g not in problem.candidates for g in guards):
        return False
    return all(any(problem.vis[g, t] for g in guards) for t in problem.targets)


@dataclass(frozen=True)
class Guess:
    elements: tuple[Element, ...]
    ig: tuple[int, ...]
    og: tuple[int, ...]
    how: tuple[tuple[Placed, ...], ...]

    @property
    def total(self) -> int:
        return sum(self.ig)

    def describe(self) -> str:
        parts = []
        for e, a, b, h in zip(self.elements, self.ig, self.og, self.how):
            hs = ",".join(f"{self.elements[ei]}#{i}" for ei, i in h)
            parts.append(f"{e}: ig={a} og={b} how=[{hs}]")
        return "; ".join(parts)


@dataclass
class GuardSolution:
    guards: tuple[int, ...]
    points: tuple[Point, ...]
    witness: Optional[Guess] = None
    assignment: Optional[list[int]] = None


@dataclass
class SolveResult:
    answer: bool
    k: int
    problem: Problem
    solution: Optional[GuardSolution] = None
    guesses_tried: int = 0
    route: str = "search"

    @property
    def original_guards(self) -> list[Optional[int]]:
        if self.solution is None:
            return []
        return [self.problem.to_original(g) for g in self.solution.guards]


# ---------------------------------------------------------------------------
# enumeration


def _ig_vectors(ws: Workspace, k: int) -> Iterator[tuple[int, ...]]:
    caps = [min(k, len(ws.candidates_in(e))) for e in ws.decomposition.elements]
    for ig in itertools.product(*(range(c + 1) for c in caps)):
        if sum(ig) <= k:
            yield ig


def _visit_order(ws: Workspace) -> list[int]:
    elems = ws.decomposition.elements
    reflex = [i for i, e in enumerate(elems) if e.reflex]
    regions = [i for i, e in enumerate(elems) if not e.reflex]
    return reflex + regions


def _og_range(ws: Workspace, e: Element, total: int) -> range:
    if not ws.targets_in(e):
        return range(0, 1)
    if e.reflex:
        return range(1, 2)
    return range(1, total + 1)


def enumerate_guesses(ws: Workspace, k: int) -> Iterator[Guess]:
    """Every guess with at most ``k`` guards, unpruned, in canonical order.

    Elements without targets get ``og = 0``; a reflex target gets ``og = 1``;
    ``og`` of a region never exceeds the number of placed guards.
    """
    elems = ws.decomposition.elements
    order_ = _visit_order(ws)
    for ig in _ig_vectors(ws, k):
        placed = VariableMap.from_ig(elems, ig).pairs
        total = len(placed)
        per_elem = []
        for ei in order_:
            opts = []
            for o in _og_range(ws, elems[ei], total):
                for h in itertools.product(placed, repeat=o):
                    opts.append((o, h))
            per_elem.append(opts)
        for combo in itertools.product(*per_elem):
            og = [0] * len(elems)
            how: list[tuple[Placed, ...]] = [()] * len(elems)
            for ei, (o, h) in zip(order_, combo):
                og[ei], how[ei] = o, tuple(h)
            yield Guess(elems, ig, tuple(og), tuple(how))


def guess_count(ws: Workspace, k: int) -> int:
    """Closed-form size of :func:`enumerate_guesses`."""
    elems = ws.decomposition.elements
    n_reflex_targets = sum(1 for e in elems if e.reflex and ws.targets_in(e))
    region_targets = sum(1 for e in elems if not e.reflex and ws.targets_in(e))
    count = 0
    for ig in _ig_vectors(ws, k):
        t = sum(ig)
        per_region = sum(t ** o for o in range(1, t + 1))
        count += t ** n_reflex_targets * per_region ** region_targets
    return count


def guess_bound(r: int, k: int) -> int:
    """Upper bound on the number of guesses for ``r`` reflex vertices and budget ``k``."""
    return (k + 1) ** (2 * r) * k ** (2 * r) * ((2 * r * k) ** k) ** (2 * r)


# ---------------------------------------------------------------------------
# pruned search


def _intervals_ok(nvars: int, N: int, constraints: Sequence[Constraint]) -> bool:
    lo = [0] * nvars
    hi = [N] * nvars
    for c in constraints:
        if isinstance(c, Const):
            if c.cmp == GE:
                lo[c.var] = max(lo[c.var], c.beta)
            else:
                hi[c.var] = min(hi[c.var], c.beta)
    return all(a <= b for a, b in zip(lo, hi))


class _Search:
    """Depth-first walk over the guesses of one ``ig`` vector.

    A subtree is cut when the constraints collected so far already form an
    unsatisfiable instance (or an early rejection fires): every guess below
    it produces a superset of those constraints. Guards reused within one
    region's covering sequence are skipped, since the covering guards of a
    region reach strictly further along it one after another.
    """

    def __init__(self, ws: Workspace, ig: tuple[int, ...], on_build: Optional[BuildHook] = None):
        self.ws = ws
        self.on_build = on_build
        self.ig = ig
        self.elems = ws.decomposition.elements
        self.vm = VariableMap.from_ig(self.elems, ig)
        self.placed = self.vm.pairs
        self.order = _visit_order(ws)
        self.tried = 0
        self.nodes = 0
        self.og = [0] * len(self.elems)
        self.how: list[tuple[Placed, ...]] = [()] * len(self.elems)

    def feasible(self, cons: list[Constraint]) -> bool:
        self.nodes += 1
        if not _intervals_ok(self.vm.size, self.ws.domain, cons):
            return False
        return solve_csp(CspInstance(self.vm.size, self.ws.domain, cons), strict=False) is not None

    def run(self) -> Optional[tuple[Guess, list[int]]]:
        base = association(self.ws, self.vm) + order(self.ws, self.vm)
        if not self.feasible(base):
            return None
        return self._element(0, base)

    def _element(self, pos: int, cons: list[Constraint]) -> Optional[tuple[Guess, list[int]]]:
        if pos == len(self.order):
            return self._leaf()
        ei = self.order[pos]
        e = self.elems[ei]
        tg = self.ws.targets_in(e)
        if not tg:
            self.og[ei], self.how[ei] = 0, ()
            return self._element(pos + 1, cons)
        if e.reflex:
            for p in self.placed:
                try:
                    extra = sees_target(self.ws, self.vm, e.lo, p)
                except EarlyNo:
                    continue
                if extra and not self.feasible(cons + extra):
                    continue
                self.og[ei], self.how[ei] = 1, (p,)
                found = self._element(pos + 1, cons + extra)
                if found:
                    return found
            return None
        for o in range(1, len(self.placed) + 1):
            found = self._region(pos, ei, e, tg, o, [], cons)
            if found:
                return found
        return None

    def _region(self, pos, ei, C, tg, o, seq: list[Placed], cons):
        t = len(seq)
        if t == o:
            try:
                extra = sees_target(self.ws, self.vm, tg[-1], seq[-1])
            except EarlyNo:
                return None
            if extra and not self.feasible(cons + extra):
                return None
            self.og[ei], self.how[ei] = o, tuple(seq)
            return self._element(pos + 1, cons + extra)
        for p in self.placed:
            if p in seq:
                continue
            try:
                if t == 0:
                    extra = sees_target(self.ws, self.vm, tg[0], p)
                else:
                    extra = middle(self.ws, self.vm, C, seq[-1], p)
            except EarlyNo:
                continue
            if extra and not self.feasible(cons + extra):
                continue
            found = self._region(pos, ei, C, tg, o, seq + [p], cons + extra)
            if found:
                return found
        return None

    def _leaf(self) -> Optional[tuple[Guess, list[int]]]:
        guess = Guess(self.elems, self.ig, tuple(self.og), tuple(self.how))
        self.tried += 1
        outcome = build(self.ws, guess)
        if not isinstance(outcome, Built):
            return None
        values = solve_csp(outcome.instance)
        if self.on_build:
            self.on_build(guess, outcome.instance, values is not None)
        if values is None:
            return None
        return guess, values


@dataclass
class BlockResult:
    ig: tuple[int, ...]
    tried: int
    nodes: int
    found: Optional[tuple[Guess, list[int]]]


def search_block(ws: Workspace, ig: tuple[int, ...], on_build: Optional[BuildHook] = None) -> BlockResult:
    s = _Search(ws, ig, on_build)
    found = s.run()
    return BlockResult(ig, s.tried, s.nodes, found)


_WORKER_WS: Optional[Workspace] = None


def _init_worker(ws: Workspace) -> None:
    global _WORKER_WS
    _WORKER_WS = ws


def _worker(ig: tuple[int, ...]) -> BlockResult:
    assert _WORKER_WS is not None
    return search_block(_WORKER_WS, ig)


Progress = Callable[[int, int, int], None]  # (guesses tried so far, blocks done, blocks total)


def search(
    ws: Workspace,
    k: int,
    threads: int = 1,
    progress: Optional[Progress] = None,
    on_build: Optional[BuildHook] = None,
) -> tuple[Optional[tuple[Guess, list[int]]], int]:
    """Earliest satisfiable guess in canonical order, and the number of guesses dispatched.

    Blocks (one per ``ig`` vector) run in worker processes when ``threads > 1``;
    results are consumed in block order, so the answer and the count do not
    depend on scheduling. ``on_build`` forces a single process.
    """
    blocks = list(_ig_vectors(ws, k))
    tried = 0
    if threads <= 1 or len(blocks) <= 1 or on_build is not None:
        for n, ig in enumerate(blocks, 1):
            res = search_block(ws, ig, on_build)
            tried += res.tried
            if progress:
                progress(tried, n, len(blocks))
            if res.found:
                return res.found, tried
        return None, tried
    with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker, initargs=(ws,)) as pool:
        for n, res in enumerate(pool.map(_worker, blocks), 1):
            tried += res.tried
            if progress:
                progress(tried, n, len(blocks))
            if res.found:
                pool.shutdown(wait=True, cancel_futures=True)
                return res.found, tried
    return None, tried


# ---------------------------------------------------------------------------
# drivers


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("GALLERY_THREADS", "1")))
    except ValueError:
        return 1


def _solution(problem: Problem, guards: Sequence[int], **extra) -> GuardSolution:
    guards = tuple(sorted(guards))
    return GuardSolution(guards, tuple(problem.polygon.point(g) for g in guards), **extra)


def solve_problem(
    problem: Problem,
    k: int,
    threads: int = 1,
    progress: Optional[Progress] = None,
    on_build: Optional[BuildHook] = None,
) -> SolveResult:
    if k < 0:
        raise ValueError("k must be non-negative")
    W = problem.polygon
    if not W.reflex:
        if k >= 1:
            sol = _solution(problem, [problem.candidates[0]])
            if not certify(problem, sol.guards):
                raise InternalError("a single vertex of a convex polygon failed to see everything")
            return SolveResult(True, k, problem, sol, route="convex")
        return SolveResult(False, k, problem, route="convex")
    if k >= W.r and W.reflex <= set(problem.candidates):
        sol = _solution(problem, sorted(W.reflex))
        if not certify(problem, sol.guards):
            raise InternalError("the reflex vertices failed to see every target")
        return SolveResult(True, k, problem, sol, route="reflex")

    ws = build_workspace(W, problem.candidates, problem.targets, problem.vis)
    found, tried = search(ws, min(k, W.r - 1), threads, progress, on_build)
    if found is None:
        return SolveResult(False, k, problem, guesses_tried=tried)
    guess, values = found
    guards = [ws.vertex(v) for v in values]
    if len(set(guards)) != len(guards) or not certify(problem, guards):
        raise InternalError(f"guess {guess.describe()} produced an invalid guard set {guards}")
    sol = _solution(problem, guards, witness=guess, assignment=values)
    return SolveResult(True, k, problem, sol, guesses_tried=tried)


def solve(P: Polygon, k: int, variant: Variant | str = Variant.VV, threads: int = 1,
          progress: Optional[Progress] = None, on_build: Optional[BuildHook] = None) -> SolveResult:
    return solve_problem(make_problem(P, variant), k, threads, progress, on_build)


def solve_vb(P: Polygon, k: int, **kw) -> SolveResult:
    return solve(P, k, Variant.VB, **kw)


def solve_bv(P: Polygon, k: int, **kw) -> SolveResult:
    return solve(P, k, Variant.BV, **kw)


def evaluate_guess(ws: Workspace, guess: Guess) -> Optional[list[int]]:
    """Assignment for a single guess, or ``None`` when it is rejected or unsatisfiable."""
    outcome = build(ws, GuessView(guess.ig, guess.og, guess.how))
    if not isinstance(outcome, Built):
        return None
    return solve_csp(outcome.instance)
