"""Brute-force reference solvers and random polygons for testing the pipeline."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .geom import GeometryError, Polygon, validate_polygon
from .regions import Element
from .structured import Guess, Problem, Variant, make_problem


class TooLarge(ValueError):
    pass


class GenerationFailed(RuntimeError):
    pass


@dataclass
class OracleResult:
    answer: bool
    witness: Optional[tuple[int, ...]]
    explored: int


def brute_force_problem(problem: Problem, k: int, max_candidates: int = 24, max_k: int = 5) -> OracleResult:
    """Try every candidate subset of size ``0..k`` (smaller sizes first, then lexicographic)."""
    cands = problem.candidates
    k = min(k, len(cands))
    if len(cands) > max_candidates or k > max_k:
        raise TooLarge(f"{len(cands)} candidates with k={k} exceeds the oracle limits")
    target_bits = {t: 1 << i for i, t in enumerate(sorted(problem.targets))}
    full = (1 << len(target_bits)) - 1
    masks = []
    for g in cands:
        m = 0
        for t, bit in target_bits.items():
            if problem.vis[g, t]:
                m |= bit
        masks.append(m)
    explored = 0
    for size in range(k + 1):
        for combo in itertools.combinations(range(len(cands)), size):
            explored += 1
            m = 0
            for i in combo:
                m |= masks[i]
            if m == full:
                return OracleResult(True, tuple(cands[i] for i in combo), explored)
    return OracleResult(False, None, explored)


def brute_force(P: Polygon, k: int, variant: Variant | str = Variant.VV, **caps) -> OracleResult:
    return brute_force_problem(make_problem(P, variant), k, **caps)


# ---------------------------------------------------------------------------


def _first_last(problem: Problem, v: int, C: Element) -> tuple[Optional[int], Optional[int]]:
    seen = [t for t in C.vertices if problem.vis[v, t]]
    return (seen[0], seen[-1]) if seen else (None, None)


def check_structured_conditions(problem: Problem, guess: Guess, S: Sequence[int], k: int) -> bool:
    """Whether ``S`` realizes ``guess``, checked straight from the visibility matrix.

    Only targets are required to be covered: each region's covering sequence
    starts at its smallest target, each next guard picks up at the first
    target after the previous guard's last visible vertex, and the final
    guard reaches the largest target.
    """
    S = sorted(set(S))
    if len(S) > k or any(s not in problem.candidates for s in S):
        return False
    elems = guess.elements
    placed: dict[tuple[int, int], int] = {}
    for ei, e in enumerate(elems):
        inside = [s for s in S if e.lo <= s <= e.hi]
        if len(inside) != guess.ig[ei]:
            return False
        for i, s in enumerate(inside, 1):
            placed[ei, i] = s
    if sum(guess.ig) != len(S):
        return False
    for ei, e in enumerate(elems):
        targets = [t for t in e.vertices if t in problem.targets]
        how = guess.how[ei]
        if any(p not in placed for p in how):
            return False
        if not targets:
            continue
        if not how:
            return False
        guards = [placed[p] for p in how]
        if e.reflex:
            if not problem.vis[guards[0], e.lo]:
                return False
            continue
        if not problem.vis[guards[0], targets[0]] or not problem.vis[guards[-1], targets[-1]]:
            return False
        for g, g2 in zip(guards, guards[1:]):
            _, a = _first_last(problem, g, e)
            if a is None:
                return False
            nxt = [t for t in targets if t > a]
            if not nxt:
                return False
            f2, l2 = _first_last(problem, g2, e)
            if f2 is None or not (f2 <= nxt[0] <= l2):
                return False
    return True


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolygonSpec:
    n: int
    seed: int
    reflex: Optional[int] = None

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError("a polygon needs at least 3 vertices")


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _crosses(a, b, c, d) -> bool:
    return _cross(c, d, a) * _cross(c, d, b) < 0 and _cross(a, b, c) * _cross(a, b, d) < 0


def _untangle(pts: list[tuple[int, int]], max_rounds: int = 1000) -> Optional[list[tuple[int, int]]]:
    """Reverse the chain between any two properly crossing edges until none cross.

    Each reversal shortens the tour, so this terminates; the round cap only
    guards against pathological inputs.
    """
    n = len(pts)
    P = list(pts)
    for _ in range(max_rounds):
        changed = False
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                if _crosses(P[i], P[i + 1], P[j], P[(j + 1) % n]):
                    P[i + 1:j + 1] = reversed(P[i + 1:j + 1])
                    changed = True
        if not changed:
            return P
    return None


def _reflex_count(pts: list[tuple[int, int]]) -> int:
    n = len(pts)
    area2 = sum(pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1] for i in range(n))
    sign = 1 if area2 > 0 else -1
    return sum(1 for i in range(n) if sign * _cross(pts[i - 1], pts[i], pts[(i + 1) % n]) < 0)


def _draw(rng: random.Random, n: int, grid: int, reflex: Optional[int]) -> Optional[Polygon]:
    pts = set()
    while len(pts) < n:
        pts.add((2 * rng.randrange(grid) + 1, 2 * rng.randrange(grid) + 1))
    order = sorted(pts)
    rng.shuffle(order)
    untangled = _untangle(order)
    if untangled is None:
        return None
    if reflex is not None and _reflex_count(untangled) != reflex:
        return None
    try:
        return validate_polygon(untangled)
    except GeometryError:
        return None


def random_polygon(spec: PolygonSpec, attempts: int = 400) -> Polygon:
    """A simple polygon on a small odd-coordinate grid, reproducible from the seed.

    Random points are joined in random order and crossing edges are swapped
    out (2-opt) until the boundary is simple. With ``spec.reflex`` set, draws
    are repeated until that many reflex vertices appear, keeping the closest
    one otherwise.
    """
    rng = random.Random(spec.seed)
    grid = max(4, spec.n)
    for _ in range(attempts):
        P = _draw(rng, spec.n, grid, spec.reflex)
        if P is not None:
            return P
    # fall back to any simple polygon, closest reflex count first
    best: Optional[Polygon] = None
    for _ in range(attempts):
        P = _draw(rng, spec.n, grid, None)
        if P is None:
            continue
        if spec.reflex is None or best is None or abs(P.r - spec.reflex) < abs(best.r - spec.reflex):
            best = P
        if spec.reflex is None:
            break
    if best is None:
        raise GenerationFailed(f"no simple polygon for {spec}")
    return best


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusCase:
    seed: int
    n: int
    k: int
    variant: Variant
    expected: bool

    def line(self) -> str:
        return f"{self.seed} {self.n} {self.k} {self.variant.value} {'yes' if self.expected else 'no'}"


def parse_manifest(text: str) -> list[CorpusCase]:
    cases = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        seed, n, k, variant, ans = ln.split()
        if ans not in ("yes", "no"):
            raise ValueError(f"bad answer field {ans!r}")
        cases.append(CorpusCase(int(seed), int(n), int(k), Variant(variant), ans == "yes"))
    return cases


def format_manifest(cases: Sequence[CorpusCase]) -> str:
    return "".join(c.line() + "\n" for c in cases)


def load_manifest(path: str | Path) -> list[CorpusCase]:
    return parse_manifest(Path(path).read_text())


def save_manifest(cases: Sequence[CorpusCase], path: str | Path) -> None:
    Path(path).write_text(format_manifest(cases))
