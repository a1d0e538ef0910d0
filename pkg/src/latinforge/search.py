"""Backtracking enumeration of squares under a rule set.

Cells are filled row-major with symbols tried in ascending order, so the
first leaf reached is the lexicographically earliest solution. Monotone rules
(Latin, (non-)consecutive, anti-piece) prune on every placement. A
require-piece cell is checked as soon as it and all its targets are filled;
strict-piece connectivity is checked on complete squares.
"""

from __future__ import annotations

import enum
import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from latinforge.grid import (
    NumberLine,
    Piece,
    Square,
    Topology,
    consecutive,
    target_indices,
)
from latinforge.rules import (
    AntiPiece,
    Consecutive,
    Latin,
    NonConsecutive,
    RequirePiece,
    RuleSet,
    StrictPiece,
    _components,
    batch_passes,
    detect_cyclic,
)

DEFAULT_BUDGET = 10**9


class BudgetExceeded(RuntimeError):
    def __init__(self, budget: int, nodes: int, partial_count: int):
        super().__init__(f"node budget {budget} exceeded after {nodes} nodes "
                         f"({partial_count} solutions so far)")
        self.budget = budget
        self.nodes = nodes
        self.partial_count = partial_count

    def __reduce__(self):  # survive the trip back from a worker process
        return (type(self), (self.budget, self.nodes, self.partial_count))


class OracleTooCostly(ValueError):
    pass


class Mode(enum.Enum):
    COUNT = "count"
    COLLECT = "collect"
    LEX_EARLIEST = "earliest"


class Engine(enum.Enum):
    PRUNED = "pruned"
    ORACLE = "oracle"


FirstRow = Union[None, str, Sequence[int]]


@dataclass(frozen=True)
class SearchOptions:
    fix_first_row: FirstRow = None
    limit: Optional[int] = None
    mode: Mode = Mode.COUNT
    engine: Engine = Engine.PRUNED
    budget: int = DEFAULT_BUDGET
    workers: int = 1
    allow_costly_oracle: bool = False

    def first_row(self, n: int) -> Optional[tuple[int, ...]]:
        fixed = self.fix_first_row
        if fixed is None:
            return None
        if isinstance(fixed, str):
            if fixed != "identity":
                raise ValueError(f"unknown first-row spec {fixed!r}")
            return tuple(range(1, n + 1))
        row = tuple(int(v) for v in fixed)
        if len(row) != n or not all(1 <= v <= n for v in row):
            raise ValueError(f"first row {row} does not fit order {n}")
        return row


@dataclass
class SearchReport:
    count: int
    squares: list[Square] = field(default_factory=list)
    nodes_explored: int = 0
    wall_time: float = 0.0
    truncated: bool = False


# --- search plan -----------------------------------------------------------

def _cons_table(n: int, line: NumberLine) -> tuple[int, ...]:
    """``table[v]`` is the bitmask of symbols consecutive to ``v``."""
    table = [0] * (n + 1)
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if consecutive(a, b, n, line):
                table[a] |= 1 << b
    return tuple(table)


@dataclass(frozen=True)
class _Plan:
    n: int
    latin: bool
    differ: tuple            # per cell: earlier cells that must hold another symbol
    avoid: tuple             # per cell: (earlier cell, table) -> forbid table[v]
    need: tuple              # per cell: (earlier cell, table) -> allow only table[v]
    exist: tuple             # per cell: (owner, targets) checks that close here
    strict: tuple            # target lists for leaf connectivity checks


@lru_cache(maxsize=128)
def _plan(n: int, rules: RuleSet) -> _Plan:
    N = n * n
    differ = [set() for _ in range(N)]
    avoid = [set() for _ in range(N)]
    need = [set() for _ in range(N)]
    exist = [[] for _ in range(N)]
    strict = []

    def earlier(piece, topology):
        for i, ts in enumerate(target_indices(piece, n, topology)):
            yield i, [j for j in ts if j < i]

    require = []
    for rule in rules:
        if isinstance(rule, AntiPiece):
            for i, js in earlier(rule.piece, rule.topology):
                differ[i].update(js)
        elif isinstance(rule, NonConsecutive):
            table = _cons_table(n, rule.line)
            for i, js in earlier(rule.adjacency, rule.topology):
                avoid[i].update((j, table) for j in js)
        elif isinstance(rule, Consecutive):
            table = _cons_table(n, rule.line)
            for i, js in earlier(Piece.ORTHOGONAL_STEP, rule.topology):
                need[i].update((j, table) for j in js)
        elif isinstance(rule, RequirePiece):
            require.append((rule.piece, rule.topology))
        elif isinstance(rule, StrictPiece):
            strict.append(target_indices(rule.piece, n, rule.topology))
            # each symbol occurs n >= 2 times in a Latin square, so a connected
            # occurrence set forces every cell to see a twin
            if Latin() in rules and n > 1:
                require.append((rule.piece, rule.topology))
    if Latin() in rules:
        for i in range(N):
            r, c = divmod(i, n)
            differ[i] -= {r * n + c2 for c2 in range(c)} | {r2 * n + c for r2 in range(r)}
    for piece, topology in dict.fromkeys(require):
        for a, ts in enumerate(target_indices(piece, n, topology)):
            closes = max((a,) + ts)
            exist[closes].append((a, ts))
    return _Plan(
        n=n,
        latin=Latin() in rules,
        differ=tuple(tuple(sorted(d)) for d in differ),
        avoid=tuple(tuple(sorted(a, key=lambda x: x[0])) for a in avoid),
        need=tuple(tuple(sorted(a, key=lambda x: x[0])) for a in need),
        exist=tuple(tuple(e) for e in exist),
        strict=tuple(strict),
    )


class _Stop(Exception):
    pass


def _run(plan: _Plan, forced: Sequence[int], depth: int, limit: Optional[int],
         collect: bool, budget: int):
    """Depth-first search from the empty grid down to ``depth`` cells.

    ``forced[i]`` pins cell i when nonzero. Returns (count, leaves, nodes);
    leaves are full value tuples (or prefixes when ``depth`` < n*n).
    """
    n = plan.n
    N = n * n
    full = ((1 << (n + 1)) - 1) & ~1
    differ, avoid, need, exist, strict = (plan.differ, plan.avoid, plan.need,
                                          plan.exist, plan.strict)
    latin = plan.latin
    vals = [0] * N
    rows = [0] * n
    cols = [0] * n
    leaves: list[tuple[int, ...]] = []
    state = [0, 0]  # count, nodes
    forced = list(forced) + [0] * (N - len(forced))

    def leaf_ok() -> bool:
        for targets in strict:
            by_symbol: dict[int, list[int]] = {}
            for i, v in enumerate(vals):
                by_symbol.setdefault(v, []).append(i)
            for occ in by_symbol.values():
                if len(_components(occ, targets)) > 1:
                    return False
        return True

    def rec(i: int) -> None:
        if i == depth:
            if depth == N and strict and not leaf_ok():
                return
            state[0] += 1
            if collect:
                leaves.append(tuple(vals[:depth]))
            if limit is not None and state[0] >= limit:
                raise _Stop
            return
        r, c = divmod(i, n)
        if latin:
            allowed = full & ~(rows[r] | cols[c])
        else:
            allowed = full
        if forced[i]:
            allowed &= 1 << forced[i]
        for j in differ[i]:
            allowed &= ~(1 << vals[j])
        for j, table in avoid[i]:
            allowed &= ~table[vals[j]]
        for j, table in need[i]:
            allowed &= table[vals[j]]
        checks = exist[i]
        while allowed:
            low = allowed & -allowed
            allowed ^= low
            v = low.bit_length() - 1
            state[1] += 1
            if state[1] > budget:
                raise BudgetExceeded(budget, state[1], state[0])
            vals[i] = v
            if checks:
                ok = True
                for a, ts in checks:
                    va = vals[a]
                    for t in ts:
                        if vals[t] == va:
                            break
                    else:
                        ok = False
                        break
                if not ok:
                    continue
            if latin:
                rows[r] |= low
                cols[c] |= low
                rec(i + 1)
                rows[r] ^= low
                cols[c] ^= low
            else:
                rec(i + 1)
        vals[i] = 0

    try:
        rec(0)
    except _Stop:
        pass
    return state[0], leaves, state[1]


def _task(args):
    n, rules, forced, limit, collect, budget = args
    return _run(_plan(n, rules), forced, n * n, limit, collect, budget)


def _pruned(n: int, rules: RuleSet, opts: SearchOptions) -> SearchReport:
    plan = _plan(n, rules)
    N = n * n
    first = opts.first_row(n)
    forced = list(first) if first else []
    limit = 1 if opts.mode is Mode.LEX_EARLIEST else opts.limit
    collect = opts.mode is not Mode.COUNT

    if opts.workers <= 1 or n == 1:
        count, leaves, nodes = _run(plan, forced, N, limit, collect, opts.budget)
    else:
        split = (1 if first else 0) + 1
        _, prefixes, nodes = _run(plan, forced, split * n, None, True, opts.budget)
        tasks = [(n, rules, p, limit, collect, opts.budget - nodes) for p in prefixes]
        count, leaves = 0, []
        with ProcessPoolExecutor(max_workers=opts.workers) as pool:
            for c, ls, nd in pool.map(_task, tasks):
                count += c
                leaves.extend(ls)
                nodes += nd
                if nodes > opts.budget:
                    raise BudgetExceeded(opts.budget, nodes, count)
                if limit is not None and count >= limit:
                    break
        leaves.sort()
        if limit is not None:
            count = min(count, limit)
            leaves = leaves[:limit]
    squares = [Square(n, leaf) for leaf in leaves]
    truncated = limit is not None and count >= limit and opts.mode is not Mode.LEX_EARLIEST
    return SearchReport(count, squares, nodes, truncated=truncated)


# --- naive oracle ----------------------------------------------------------

@lru_cache(maxsize=8)
def all_latin_squares(n: int) -> np.ndarray:
    """Every Latin square of order n in lexicographic order, one per row.

    Rows are stacked from ``itertools.permutations``, keeping only candidates
    that clash with no placed row in any column, so this stays independent of the pruned engine.
    """
    out: list[tuple[int, ...]] = []

    def extend(prefix: tuple, candidates: list) -> None:
        if len(prefix) == n * n:
            out.append(prefix)
            return
        for p in candidates:
            rest = [q for q in candidates if all(a != b for a, b in zip(p, q))]
            extend(prefix + p, rest)

    extend((), list(itertools.permutations(range(1, n + 1))))
    return np.array(out, dtype=np.int8).reshape(-1, n * n)


def _all_grids(n: int) -> np.ndarray:
    grids = itertools.product(range(1, n + 1), repeat=n * n)
    return np.array(list(grids), dtype=np.int8).reshape(-1, n * n)


def _oracle(n: int, rules: RuleSet, opts: SearchOptions) -> SearchReport:
    limit_n = 5 if rules.has_latin else 3
    if n > limit_n and not opts.allow_costly_oracle:
        raise OracleTooCostly(f"naive oracle limited to n <= {limit_n} for these rules")
    cands = all_latin_squares(n) if rules.has_latin else _all_grids(n)
    first = opts.first_row(n)
    if first:
        cands = cands[(cands[:, :n] == np.array(first)).all(axis=1)]
    mask = batch_passes(cands, n, rules)
    hits = cands[mask]
    limit = 1 if opts.mode is Mode.LEX_EARLIEST else opts.limit
    truncated = limit is not None and len(hits) >= limit and opts.mode is not Mode.LEX_EARLIEST
    if limit is not None:
        hits = hits[:limit]
    squares = []
    if opts.mode is not Mode.COUNT:
        squares = [Square(n, tuple(int(v) for v in row)) for row in hits]
    return SearchReport(len(hits), squares, len(cands), truncated=truncated)


def enumerate_squares(n: int, rules: RuleSet,
                      opts: Optional[SearchOptions] = None) -> SearchReport:
    """Exact enumeration of order-n squares passing ``rules``.

    Raises :class:`BudgetExceeded` rather than returning a truncated count.
    """
    if n < 1:
        raise ValueError("order must be positive")
    if not isinstance(rules, RuleSet):
        rules = RuleSet(tuple(rules))
    opts = opts or SearchOptions()
    t0 = time.perf_counter()
    if opts.engine is Engine.ORACLE:
        report = _oracle(n, rules, opts)
    else:
        report = _pruned(n, rules, opts)
    report.wall_time = time.perf_counter() - t0
    return report


def count(n: int, rules: RuleSet, **kw) -> int:
    return enumerate_squares(n, rules, SearchOptions(mode=Mode.COUNT, **kw)).count


def collect(n: int, rules: RuleSet, **kw) -> list[Square]:
    return enumerate_squares(n, rules, SearchOptions(mode=Mode.COLLECT, **kw)).squares


def lex_earliest(n: int, rules: RuleSet, **kw) -> Optional[Square]:
    rep = enumerate_squares(n, rules, SearchOptions(mode=Mode.LEX_EARLIEST, **kw))
    return rep.squares[0] if rep.squares else None


# --- permutation level -----------------------------------------------------

def nc_permutations(n: int, line: NumberLine = NumberLine.LINEAR,
                    cyclable_only: bool = False):
    """Yield non-consecutive permutations of 1..n in lexicographic order."""
    perm: list[int] = []
    used = [False] * (n + 1)

    def rec():
        if len(perm) == n:
            if not cyclable_only or n == 1 or not consecutive(perm[-1], perm[0], n, line):
                yield tuple(perm)
            return
        for v in range(1, n + 1):
            if used[v] or (perm and consecutive(perm[-1], v, n, line)):
                continue
            used[v] = True
            perm.append(v)
            yield from rec()
            perm.pop()
            used[v] = False

    yield from rec()


def count_nc_permutations(n: int, line: NumberLine = NumberLine.LINEAR,
                          cyclable_only: bool = False) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    return sum(1 for _ in nc_permutations(n, line, cyclable_only))


# --- named classifications -------------------------------------------------

@dataclass
class ModularConsecutiveClasses:
    n: int
    squares: list[Square]
    cyclic: list[Square]
    noncyclic: list[Square]
    shifts: dict[int, int]

    @property
    def total(self) -> int:
        return len(self.squares)

    @property
    def cyclic_count(self) -> int:
        return len(self.cyclic)

    @property
    def noncyclic_count(self) -> int:
        return len(self.noncyclic)


def classify_modular_consecutive(n: int, fix_first_row: FirstRow = None,
                                 budget: int = DEFAULT_BUDGET) -> ModularConsecutiveClasses:
    """Split the modular consecutive Latin squares by cyclic shift."""
    if n < 3:
        raise ValueError("classification needs n >= 3")
    rules = RuleSet.of(Latin(), Consecutive(Topology.FLAT, NumberLine.MODULAR))
    opts = SearchOptions(fix_first_row=fix_first_row, mode=Mode.COLLECT, budget=budget)
    squares = enumerate_squares(n, rules, opts).squares
    cyclic, noncyclic, shifts = [], [], {}
    for sq in squares:
        k = detect_cyclic(sq)
        if k in (1, n - 1):
            cyclic.append(sq)
        else:
            noncyclic.append(sq)
        shifts[k] = shifts.get(k, 0) + 1
    return ModularConsecutiveClasses(n, squares, cyclic, noncyclic, shifts)


def third_row_forced(n: int = 4, first_row: Optional[Sequence[int]] = None) -> bool:
    """Do all order-4 anti-knight squares with this first row share a third row?"""
    if n != 4:
        raise ValueError("only defined for order 4")
    rules = RuleSet.of(Latin(), AntiPiece(Piece.KNIGHT))
    squares = collect(4, rules, fix_first_row=first_row or "identity")
    return bool(squares) and len({sq.rows[2] for sq in squares}) == 1
