"""Monotone 2-CSP solved through 2-SAT.

Variables take values in ``0..N``. A constraint is either ``x <= beta`` /
``x >= beta`` or ``x <= f(y)`` / ``x >= f(y)`` with ``f`` a monotone table
over ``0..N``. The encoding introduces one boolean ``x[d]`` per variable and
level ``d`` in ``0..N+1`` meaning ``x >= d``; the resulting 2-CNF is solved
with the strongly-connected-components method and the value of ``x`` is read
back as the highest true level.

Variables are numbered from 0.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from .regions import ND, NI, Orientation

LE = "le"
GE = "ge"


class InvalidInstance(ValueError):
    pass


class MalformedModel(ValueError):
    pass


@dataclass(frozen=True)
class Const:
    var: int
    cmp: str
    beta: int

    def holds(self, values: Sequence[int]) -> bool:
        v = values[self.var]
        return v <= self.beta if self.cmp == LE else v >= self.beta


@dataclass(frozen=True)
class Fn:
    var: int
    cmp: str
    arg: int
    table: tuple[int, ...]
    direction: Orientation

    def holds(self, values: Sequence[int]) -> bool:
        v, w = values[self.var], self.table[values[self.arg]]
        return v <= w if self.cmp == LE else v >= w


Constraint = Union[Const, Fn]


def check_monotone(table: Sequence[int]) -> Optional[Orientation]:
    """Classify a table as non-decreasing, non-increasing, or neither (``None``).

    Constant tables report non-decreasing.
    """
    if all(a <= b for a, b in zip(table, table[1:])):
        return ND
    if all(a >= b for a, b in zip(table, table[1:])):
        return NI
    return None


def is_monotone(table: Sequence[int], direction: Orientation) -> bool:
    if direction is ND:
        return all(a <= b for a, b in zip(table, table[1:]))
    return all(a >= b for a, b in zip(table, table[1:]))


@dataclass
class CspInstance:
    nvars: int
    N: int
    constraints: list[Constraint] = field(default_factory=list)

    def check(self) -> None:
        """Raise :class:`InvalidInstance` unless every constraint is well formed."""
        if self.N < 0 or self.nvars < 0:
            raise InvalidInstance("negative size")
        for c in self.constraints:
            if c.cmp not in (LE, GE):
                raise InvalidInstance(f"bad comparison {c.cmp!r}")
            if not 0 <= c.var < self.nvars:
                raise InvalidInstance(f"variable {c.var} out of range")
            if isinstance(c, Const):
                if not 0 <= c.beta <= self.N + 1:
                    raise InvalidInstance(f"constant {c.beta} out of range")
                continue
            if not 0 <= c.arg < self.nvars or c.arg == c.var:
                raise InvalidInstance(f"bad argument variable in {c}")
            if len(c.table) != self.N + 1:
                raise InvalidInstance(f"table length {len(c.table)} != N+1")
            if any(not 0 <= t <= self.N for t in c.table):
                raise InvalidInstance("table value out of range")
            if not is_monotone(c.table, c.direction):
                raise InvalidInstance(f"table is not {c.direction}: {c.table}")

    def satisfied_by(self, values: Sequence[int]) -> bool:
        return all(0 <= v <= self.N for v in values) and all(c.holds(values) for c in self.constraints)


# ---------------------------------------------------------------------------
# 2-SAT

# literal encoding: 2*v is the positive literal of boolean v, 2*v + 1 its negation


def pos(v: int) -> int:
    return 2 * v


def neg(v: int) -> int:
    return 2 * v + 1


@dataclass
class TwoSatInstance:
    nbool: int
    clauses: list[tuple[int, ...]]
    trivially_unsat: bool = False


def _lvl(inst: CspInstance, x: int, d: int) -> int:
    return x * (inst.N + 2) + d


def encode(inst: CspInstance) -> TwoSatInstance:
    N = inst.N
    clauses: list[tuple[int, ...]] = []
    unsat = False
    for x in range(inst.nvars):
        clauses.append((pos(_lvl(inst, x, 0)),))
        clauses.append((neg(_lvl(inst, x, N + 1)),))
        for d in range(1, N + 2):
            # x[d] -> x[d-1]
            clauses.append((neg(_lvl(inst, x, d)), pos(_lvl(inst, x, d - 1))))
    for c in inst.constraints:
        xi = c.var
        if isinstance(c, Const):
            if c.cmp == LE:
                clauses.append((neg(_lvl(inst, xi, c.beta + 1)),) if c.beta <= N else ())
            elif c.beta > N:
                unsat = True
            else:
                clauses.append((pos(_lvl(inst, xi, c.beta)),))
            continue
        xj, f = c.arg, c.table
        for d in range(N + 1):
            if c.cmp == GE and c.direction is ND:
                # x_j >= d  ->  x_i >= f(d)
                clauses.append((neg(_lvl(inst, xj, d)), pos(_lvl(inst, xi, f[d]))))
            elif c.cmp == GE:
                # x_j <= d  ->  x_i >= f(d)
                clauses.append((pos(_lvl(inst, xj, d + 1)), pos(_lvl(inst, xi, f[d]))))
            elif c.direction is ND:
                # x_j <= d  ->  x_i <= f(d)
                clauses.append((pos(_lvl(inst, xj, d + 1)), neg(_lvl(inst, xi, f[d] + 1))))
            else:
                # x_j >= d  ->  x_i <= f(d)
                clauses.append((neg(_lvl(inst, xj, d)), neg(_lvl(inst, xi, f[d] + 1))))
    clauses = [cl for cl in clauses if cl]
    return TwoSatInstance(inst.nvars * (N + 2), clauses, unsat)


def solve_2sat(ts: TwoSatInstance) -> Optional[list[bool]]:
    """Return a satisfying truth assignment, or ``None`` if unsatisfiable.

    Tarjan's algorithm on the implication graph; negative literals are
    explored first, which biases free variables towards false.
    """
    if ts.trivially_unsat:
        return None
    nlit = 2 * ts.nbool
    adj: list[list[int]] = [[] for _ in range(nlit)]
    for cl in ts.clauses:
        if len(cl) == 1:
            a = cl[0]
            adj[a ^ 1].append(a)
        else:
            a, b = cl
            adj[a ^ 1].append(b)
            adj[b ^ 1].append(a)

    index = [-1] * nlit
    low = [0] * nlit
    comp = [-1] * nlit
    on_stack = [False] * nlit
    stack: list[int] = []
    counter = 0
    ncomp = 0
    order = [2 * v + 1 for v in range(ts.nbool)] + [2 * v for v in range(ts.nbool)]
    for root in order:
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            node, i = work[-1]
            succ = adj[node]
            if i < len(succ):
                work[-1] = (node, i + 1)
                w = succ[i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[node]:
                    low[node] = index[w]
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[node] < low[parent]:
                    low[parent] = low[node]
            if low[node] == index[node]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == node:
                        break
                ncomp += 1

    model = []
    for v in range(ts.nbool):
        if comp[2 * v] == comp[2 * v + 1]:
            return None
        # components are numbered in reverse topological order
        model.append(comp[2 * v] < comp[2 * v + 1])
    return model


def extract(inst: CspInstance, model: Sequence[bool]) -> list[int]:
    values = []
    width = inst.N + 2
    for x in range(inst.nvars):
        levels = model[x * width:(x + 1) * width]
        d = max((i for i, b in enumerate(levels) if b), default=-1)
        if d < 0 or d > inst.N or not all(levels[: d + 1]):
            raise MalformedModel(f"levels of variable {x} are not a proper prefix")
        values.append(d)
    return values


def solve_csp(inst: CspInstance, strict: bool = True) -> Optional[list[int]]:
    """Satisfying assignment (list indexed by variable) or ``None``."""
    if strict:
        inst.check()
    model = solve_2sat(encode(inst))
    if model is None:
        return None
    return extract(inst, model)


def clause_bound(inst: CspInstance) -> int:
    """Exact clause count of :func:`encode` before dropping empty clauses."""
    nconst = sum(isinstance(c, Const) for c in inst.constraints)
    nfn = len(inst.constraints) - nconst
    return inst.nvars * (inst.N + 3) + nconst + nfn * (inst.N + 1)


# ---------------------------------------------------------------------------
# text format


def format_instance(inst: CspInstance) -> str:
    lines = [f"csp {inst.nvars} {inst.N}"]
    for c in inst.constraints:
        if isinstance(c, Const):
            lines.append(f"const {c.var} {c.cmp} {c.beta}")
        else:
            lines.append(f"fn {c.var} {c.cmp} {c.arg} " + " ".join(map(str, c.table)))
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> CspInstance:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0][0] != "csp" or len(lines[0]) != 3:
        raise InvalidInstance("missing 'csp <varCount> <N>' header")
    try:
        inst = CspInstance(int(lines[0][1]), int(lines[0][2]))
        for fields in lines[1:]:
            kind = fields[0]
            if kind == "const" and len(fields) == 4:
                inst.constraints.append(Const(int(fields[1]), fields[2], int(fields[3])))
            elif kind == "fn" and len(fields) == 5 + inst.N:
                table = tuple(int(t) for t in fields[4:])
                direction = check_monotone(table)
                if direction is None:
                    raise InvalidInstance(f"table is not monotone: {' '.join(fields[4:])}")
                inst.constraints.append(Fn(int(fields[1]), fields[2], int(fields[3]), table, direction))
            else:
                raise InvalidInstance(f"malformed line: {' '.join(fields)}")
    except ValueError as exc:
        if isinstance(exc, InvalidInstance):
            raise
        raise InvalidInstance(str(exc)) from None
    inst.check()
    return inst


def load_instance(path: str | Path) -> CspInstance:
    return parse_instance(Path(path).read_text())


def save_instance(inst: CspInstance, path: str | Path) -> None:
    Path(path).write_text(format_instance(inst))


sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))
