"""Rule catalog and the square verifier."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from latinforge.grid import (
    Coord,
    NumberLine,
    Piece,
    Square,
    Topology,
    consecutive,
    line_array,
    relation_array,
    target_indices,
)


class NotLatin(ValueError):
    pass


class NotAPermutation(ValueError):
    pass


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class Latin:
    def __str__(self) -> str:
        return "latin"


@dataclass(frozen=True)
class NonConsecutive:
    """No two neighbours (rook steps, or king steps) hold consecutive symbols."""

    adjacency: Piece = Piece.ORTHOGONAL_STEP
    topology: Topology = Topology.FLAT
    line: NumberLine = NumberLine.LINEAR

    def __post_init__(self):
        if self.adjacency not in (Piece.ORTHOGONAL_STEP, Piece.KING):
            raise RuleError(f"non-consecutive adjacency must be orthogonal or king, "
                            f"not {self.adjacency.value}")

    def __str__(self) -> str:
        return (f"nonconsecutive:{self.adjacency.value}:"
                f"{self.topology.value}:{self.line.value}")


@dataclass(frozen=True)
class Consecutive:
    """Every pair of orthogonal neighbours holds consecutive symbols."""

    topology: Topology = Topology.FLAT
    line: NumberLine = NumberLine.LINEAR

    def __str__(self) -> str:
        return f"consecutive:{self.topology.value}:{self.line.value}"


@dataclass(frozen=True)
class AntiPiece:
    piece: Piece
    topology: Topology = Topology.FLAT

    def __str__(self) -> str:
        return f"anti:{self.piece.value}:{self.topology.value}"


@dataclass(frozen=True)
class RequirePiece:
    """Every cell sees an equal symbol one piece move away."""

    piece: Piece
    topology: Topology = Topology.FLAT

    def __str__(self) -> str:
        return f"require:{self.piece.value}:{self.topology.value}"


@dataclass(frozen=True)
class StrictPiece:
    """All occurrences of each symbol are connected by piece moves.

    A rider's slide counts as one move regardless of what lies in between.
    """

    piece: Piece
    topology: Topology = Topology.FLAT

    def __str__(self) -> str:
        return f"strict:{self.piece.value}:{self.topology.value}"


Rule = Union[Latin, NonConsecutive, Consecutive, AntiPiece, RequirePiece, StrictPiece]
MONOTONE = (Latin, NonConsecutive, Consecutive, AntiPiece)
EXISTENTIAL = (RequirePiece, StrictPiece)


def parse_rule(token: str) -> Rule:
    """Inverse of ``str(rule)``."""
    parts = token.strip().split(":")
    kind, args = parts[0], parts[1:]
    try:
        if kind == "latin" and not args:
            return Latin()
        if kind == "nonconsecutive" and len(args) == 3:
            return NonConsecutive(Piece(args[0]), Topology(args[1]), NumberLine(args[2]))
        if kind == "consecutive" and len(args) == 2:
            return Consecutive(Topology(args[0]), NumberLine(args[1]))
        cls = {"anti": AntiPiece, "require": RequirePiece, "strict": StrictPiece}.get(kind)
        if cls is not None and len(args) == 2:
            return cls(Piece(args[0]), Topology(args[1]))
    except ValueError as exc:
        raise RuleError(f"bad rule {token!r}: {exc}") from None
    raise RuleError(f"bad rule {token!r}")


@dataclass(frozen=True)
class RuleSet:
    """Ordered, duplicate-free collection of rules. Latin is not implied."""

    rules: tuple = ()

    def __post_init__(self):
        rules = tuple(self.rules)
        if len(set(rules)) != len(rules):
            raise RuleError(f"duplicate rule in {[str(r) for r in rules]}")
        object.__setattr__(self, "rules", rules)

    @classmethod
    def of(cls, *rules: Rule) -> "RuleSet":
        return cls(tuple(rules))

    @classmethod
    def parse(cls, tokens: Iterable[str]) -> "RuleSet":
        return cls(tuple(parse_rule(t) for t in tokens))

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __contains__(self, rule) -> bool:
        return rule in self.rules

    @property
    def has_latin(self) -> bool:
        return Latin() in self.rules

    @property
    def relabel_invariant(self) -> bool:
        return not any(isinstance(r, (NonConsecutive, Consecutive)) for r in self.rules)

    def tokens(self) -> list[str]:
        return [str(r) for r in self.rules]

    def __str__(self) -> str:
        return "{" + ", ".join(self.tokens()) + "}"


@dataclass(frozen=True)
class Violation:
    rule: Rule
    cells: tuple[Coord, ...]
    symbols: tuple[int, ...]
    note: str

    def key(self) -> tuple:
        return (self.cells, self.symbols, self.note)

    def to_dict(self) -> dict:
        return {
            "rule": str(self.rule),
            "cells": [[c.row + 1, c.col + 1] for c in self.cells],
            "symbols": list(self.symbols),
            "note": self.note,
        }

    def __str__(self) -> str:
        where = " ".join(c.human() for c in self.cells)
        syms = ",".join(map(str, self.symbols))
        return f"{self.rule}: {self.note} at {where} [{syms}]"


def _pair_arrays(kind: str, piece: Optional[Piece], n: int,
                 topology: Optional[Topology]) -> tuple[np.ndarray, np.ndarray]:
    if kind == "latin":
        return line_array(n)
    return relation_array(piece, n, topology)


def _consecutive_mask(a: np.ndarray, b: np.ndarray, n: int,
                      line: NumberLine) -> np.ndarray:
    d = np.abs(a - b)
    mask = d == 1
    if line is NumberLine.MODULAR and n > 2:
        mask |= d == n - 1
    return mask


def _coord(i: int, n: int) -> Coord:
    return Coord(*divmod(i, n))


def _pairwise_hits(rule: Rule, cells: np.ndarray, n: int):
    """Indices ``(I, J)`` of violating unordered pairs, plus a note per pair."""
    if isinstance(rule, Latin):
        I, J = _pair_arrays("latin", None, n, None)
        hit = cells[I] == cells[J]
        I, J = I[hit], J[hit]
        notes = np.where(I // n == J // n, "latin.row", "latin.column")
        return I, J, notes
    if isinstance(rule, NonConsecutive):
        I, J = _pair_arrays("piece", rule.adjacency, n, rule.topology)
        hit = _consecutive_mask(cells[I], cells[J], n, rule.line)
        note = "nonconsecutive.adjacent"
    elif isinstance(rule, Consecutive):
        I, J = _pair_arrays("piece", Piece.ORTHOGONAL_STEP, n, rule.topology)
        hit = ~_consecutive_mask(cells[I], cells[J], n, rule.line)
        note = "consecutive.gap"
    else:
        I, J = _pair_arrays("piece", rule.piece, n, rule.topology)
        hit = cells[I] == cells[J]
        note = "anti.equal"
    I, J = I[hit], J[hit]
    return I, J, np.full(len(I), note)


def _components(occurrences: Sequence[int], targets) -> list[list[int]]:
    members = set(occurrences)
    seen: set[int] = set()
    comps = []
    for start in occurrences:
        if start in seen:
            continue
        seen.add(start)
        stack, comp = [start], [start]
        while stack:
            i = stack.pop()
            for j in targets[i]:
                if j in members and j not in seen:
                    seen.add(j)
                    stack.append(j)
                    comp.append(j)
        comps.append(sorted(comp))
    comps.sort()
    return comps


def _rule_violations(rule: Rule, square: Square) -> list[Violation]:
    n = square.order
    vals = square.cells
    out: list[Violation] = []
    if isinstance(rule, MONOTONE):
        cells = np.asarray(vals, dtype=np.int64)
        I, J, notes = _pairwise_hits(rule, cells, n)
        for i, j, note in zip(I.tolist(), J.tolist(), notes.tolist()):
            out.append(Violation(rule, (_coord(i, n), _coord(j, n)),
                                 (vals[i], vals[j]), note))
        return out
    targets = target_indices(rule.piece, n, rule.topology)
    if isinstance(rule, RequirePiece):
        for i, v in enumerate(vals):
            if not any(vals[t] == v for t in targets[i]):
                out.append(Violation(rule, (_coord(i, n),), (v,), "require.unmatched"))
        return out
    # StrictPiece
    by_symbol: dict[int, list[int]] = {}
    for i, v in enumerate(vals):
        by_symbol.setdefault(v, []).append(i)
    for v in sorted(by_symbol):
        comps = _components(by_symbol[v], targets)
        if len(comps) > 1:
            out.append(Violation(rule, (_coord(comps[0][0], n), _coord(comps[1][0], n)),
                                 (v,), "strict.disconnected"))
    return out


def verify(square: Square, rules: Union[RuleSet, Iterable[Rule]]) -> list[Violation]:
    """Every violated (rule, cell-pair) instance, in rule order then cell order.

    An empty list means the square passes.
    """
    if not isinstance(rules, RuleSet):
        rules = RuleSet(tuple(rules))
    out: list[Violation] = []
    for rule in rules:
        out.extend(_rule_violations(rule, square))
    return out


def passes(square: Square, rules: Union[RuleSet, Iterable[Rule]]) -> bool:
    return not verify(square, rules)


def is_latin(square: Square) -> bool:
    n = square.order
    full = set(range(1, n + 1))
    return (all(set(row) == full for row in square.rows)
            and all(set(col) == full for col in square.columns))


def batch_passes(cells: np.ndarray, n: int, rules: RuleSet) -> np.ndarray:
    """Boolean mask over a stack of squares (shape ``(count, n*n)``)."""
    cells = np.asarray(cells, dtype=np.int64)
    ok = np.ones(len(cells), dtype=bool)
    deferred = []
    for rule in rules:
        if isinstance(rule, Latin):
            I, J = _pair_arrays("latin", None, n, None)
            bad = cells[:, I] == cells[:, J]
        elif isinstance(rule, NonConsecutive):
            I, J = _pair_arrays("piece", rule.adjacency, n, rule.topology)
            bad = _consecutive_mask(cells[:, I], cells[:, J], n, rule.line)
        elif isinstance(rule, Consecutive):
            I, J = _pair_arrays("piece", Piece.ORTHOGONAL_STEP, n, rule.topology)
            bad = ~_consecutive_mask(cells[:, I], cells[:, J], n, rule.line)
        elif isinstance(rule, AntiPiece):
            I, J = _pair_arrays("piece", rule.piece, n, rule.topology)
            bad = cells[:, I] == cells[:, J]
        elif isinstance(rule, RequirePiece):
            targets = target_indices(rule.piece, n, rule.topology)
            for i, ts in enumerate(targets):
                if ts:
                    ok &= (cells[:, list(ts)] == cells[:, [i]]).any(axis=1)
                else:
                    ok[:] = False
            continue
        else:
            deferred.append(rule)
            continue
        if bad.shape[1]:
            ok &= ~bad.any(axis=1)
    for rule in deferred:
        for idx in np.flatnonzero(ok):
            sq = Square(n, tuple(int(v) for v in cells[idx]))
            if _rule_violations(rule, sq):
                ok[idx] = False
    return ok


def detect_cyclic(square: Square) -> Optional[int]:
    """Uniform right shift k (1..n-1) between successive rows, or ``None``.

    A left-cyclic square reports ``k = n - 1``.
    """
    if not is_latin(square):
        raise NotLatin("detect_cyclic needs a Latin square")
    n = square.order
    if n == 1:
        return None
    rows = square.rows
    first, second = rows[0], rows[1]
    # right shift by k: next[c] = prev[c - k]
    k = (second.index(first[0])) % n
    for prev, nxt in zip(rows, rows[1:]):
        if any(nxt[c] != prev[(c - k) % n] for c in range(n)):
            return None
    return k


def _check_perm(perm: Sequence[int]) -> tuple[int, ...]:
    perm = tuple(int(v) for v in perm)
    if sorted(perm) != list(range(1, len(perm) + 1)):
        raise NotAPermutation(f"{perm!r} is not a permutation of 1..{len(perm)}")
    return perm


def nonconsecutive_perm(perm: Sequence[int],
                        line: NumberLine = NumberLine.LINEAR) -> bool:
    p = _check_perm(perm)
    n = len(p)
    return not any(consecutive(a, b, n, line) for a, b in zip(p, p[1:]))


def cyclable(perm: Sequence[int], line: NumberLine = NumberLine.LINEAR) -> bool:
    """Non-consecutive, and the wrap-around pair (last, first) is too."""
    p = _check_perm(perm)
    return nonconsecutive_perm(p, line) and not (
        len(p) > 1 and consecutive(p[-1], p[0], len(p), line))
