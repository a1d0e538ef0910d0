"""Squares, coordinates, topologies and chess-piece move generation."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

import numpy as np


class SquareError(ValueError):
    pass


class WrongLength(SquareError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"expected {expected} entries, got {got}")
        self.expected = expected
        self.got = got


class SymbolOutOfRange(SquareError):
    def __init__(self, coord: "Coord", value: int, n: int):
        super().__init__(
            f"symbol {value} at row {coord.row + 1}, column {coord.col + 1} "
            f"is outside 1..{n}"
        )
        self.coord = coord
        self.value = value


class BadPermutation(SquareError):
    pass


class Coord(NamedTuple):
    row: int
    col: int

    def human(self) -> str:
        return f"({self.row + 1},{self.col + 1})"


class Topology(enum.Enum):
    FLAT = "flat"
    TOROIDAL = "toroidal"


class NumberLine(enum.Enum):
    LINEAR = "linear"
    MODULAR = "modular"


class Piece(enum.Enum):
    KNIGHT = "knight"
    KING = "king"
    BISHOP = "bishop"
    QUEEN = "queen"
    ORTHOGONAL_STEP = "orthogonal"

    @property
    def is_rider(self) -> bool:
        return self in (Piece.BISHOP, Piece.QUEEN)


@dataclass(frozen=True)
class Square:
    """An order-n grid of symbols 1..n stored row-major.

    Latin-ness is not enforced here; use :func:`latinforge.rules.is_latin`.
    Construct through :func:`make_square` to get validation.
    """

    order: int
    cells: tuple[int, ...]

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.cells[r * self.order + c]

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        n = self.order
        return tuple(self.cells[r * n:(r + 1) * n] for r in range(n))

    @property
    def columns(self) -> tuple[tuple[int, ...], ...]:
        n = self.order
        return tuple(self.cells[c::n] for c in range(n))

    def word(self) -> tuple[int, ...]:
        return self.cells

    def __lt__(self, other: "Square") -> bool:
        return (self.order, self.cells) < (other.order, other.cells)

    def __str__(self) -> str:
        return "\n".join(" ".join(map(str, row)) for row in self.rows)


def make_square(n: int, entries: Iterable[int]) -> Square:
    if n < 1:
        raise SquareError(f"order must be positive, got {n}")
    cells = tuple(int(v) for v in entries)
    if len(cells) != n * n:
        raise WrongLength(n * n, len(cells))
    for i, v in enumerate(cells):
        if not 1 <= v <= n:
            raise SymbolOutOfRange(Coord(*divmod(i, n)), v, n)
    return Square(n, cells)


def from_rows(rows: Sequence[Sequence[int]]) -> Square:
    return make_square(len(rows), [v for row in rows for v in row])


def from_strings(*rows: str) -> Square:
    """Build a square from compact digit rows like ``"1234"`` (orders below 10)."""
    return from_rows([[int(ch) for ch in row] for row in rows])


_STEPS = {
    Piece.KNIGHT: ((1, 2), (2, 1), (2, -1), (1, -2),
                   (-1, -2), (-2, -1), (-2, 1), (-1, 2)),
    Piece.KING: ((0, 1), (1, 1), (1, 0), (1, -1),
                 (0, -1), (-1, -1), (-1, 0), (-1, 1)),
    Piece.ORTHOGONAL_STEP: ((0, 1), (1, 0), (0, -1), (-1, 0)),
    Piece.BISHOP: ((1, 1), (1, -1), (-1, 1), (-1, -1)),
    Piece.QUEEN: ((0, 1), (1, 1), (1, 0), (1, -1),
                  (0, -1), (-1, -1), (-1, 0), (-1, 1)),
}


def piece_targets(piece: Piece, origin: tuple[int, int], n: int,
                  topology: Topology = Topology.FLAT) -> frozenset[Coord]:
    """Cells reachable from ``origin`` by one move of ``piece``.

    Riders (bishop, queen) see their whole line; the origin itself is never a
    target, even when a toroidal line wraps back onto it.
    """
    r0, c0 = origin
    if not (0 <= r0 < n and 0 <= c0 < n):
        raise ValueError(f"origin {origin} outside an order-{n} board")
    return _targets(piece, r0, c0, n, topology)


@lru_cache(maxsize=None)
def _targets(piece: Piece, r0: int, c0: int, n: int,
             topology: Topology) -> frozenset[Coord]:
    reach = range(1, n) if piece.is_rider else (1,)
    wrap = topology is Topology.TOROIDAL
    out = set()
    for dr, dc in _STEPS[piece]:
        for t in reach:
            r, c = r0 + t * dr, c0 + t * dc
            if wrap:
                r, c = r % n, c % n
            elif not (0 <= r < n and 0 <= c < n):
                break
            if (r, c) != (r0, c0):
                out.add(Coord(r, c))
    return frozenset(out)


@lru_cache(maxsize=64)
def relation_array(piece: Piece, n: int,
                   topology: Topology) -> tuple[np.ndarray, np.ndarray]:
    """Unordered related cell pairs as sorted row-major index arrays ``I < J``."""
    N = n * n
    idx = np.arange(N)
    r, c = np.divmod(idx, n)
    reach = range(1, n) if piece.is_rider else (1,)
    keys = []
    for dr, dc in _STEPS[piece]:
        for t in reach:
            rr, cc = r + t * dr, c + t * dc
            if topology is Topology.TOROIDAL:
                rr, cc = rr % n, cc % n
                inside = np.ones(N, dtype=bool)
            else:
                inside = (rr >= 0) & (rr < n) & (cc >= 0) & (cc < n)
            j = rr * n + cc
            sel = inside & (j != idx)
            a, b = idx[sel], j[sel]
            keys.append(np.minimum(a, b) * N + np.maximum(a, b))
    key = np.unique(np.concatenate(keys)) if keys else np.zeros(0, dtype=np.int64)
    I, J = np.divmod(key, N)
    return I.astype(np.int64), J.astype(np.int64)


@lru_cache(maxsize=64)
def line_array(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Pairs of cells sharing a row or a column, sorted, ``I < J``."""
    a, b = np.triu_indices(n, 1)
    line = np.arange(n)[:, None]
    row_i, row_j = (line * n + a).ravel(), (line * n + b).ravel()
    col_i, col_j = (a * n + line).ravel(), (b * n + line).ravel()
    key = np.concatenate([row_i * n * n + row_j, col_i * n * n + col_j])
    key.sort()
    I, J = np.divmod(key, n * n)
    return I.astype(np.int64), J.astype(np.int64)


@lru_cache(maxsize=None)
def target_indices(piece: Piece, n: int,
                   topology: Topology) -> tuple[tuple[int, ...], ...]:
    """Per-cell sorted row-major target indices."""
    return tuple(
        tuple(sorted(t.row * n + t.col
                     for t in _targets(piece, i // n, i % n, n, topology)))
        for i in range(n * n)
    )


def consecutive(a: int, b: int, n: int,
                line: NumberLine = NumberLine.LINEAR) -> bool:
    d = abs(a - b)
    if d == 1:
        return True
    # n <= 2: 1 and n are already adjacent (or identical), nothing extra to wrap.
    return line is NumberLine.MODULAR and n > 2 and d == n - 1


class Transform(enum.Enum):
    TRANSPOSE = "transpose"
    REFLECT_H = "reflect_h"
    REFLECT_V = "reflect_v"
    ROTATE90 = "rotate90"


class Relabel(NamedTuple):
    """Symbol map ``v -> mapping[v]``; a dict or a sequence indexed from symbol 1."""

    mapping: Union[Mapping[int, int], Sequence[int]]


def _as_permutation(mapping, n: int) -> dict[int, int]:
    if isinstance(mapping, Mapping):
        perm = {int(k): int(v) for k, v in mapping.items()}
    else:
        perm = {i + 1: int(v) for i, v in enumerate(mapping)}
    symbols = set(range(1, n + 1))
    if set(perm) != symbols or set(perm.values()) != symbols:
        raise BadPermutation(f"not a bijection on 1..{n}: {mapping!r}")
    return perm


def transform(square: Square, op: Union[Transform, Relabel, str]) -> Square:
    n = square.order
    rows = square.rows
    if isinstance(op, Relabel):
        perm = _as_permutation(op.mapping, n)
        return Square(n, tuple(perm[v] for v in square.cells))
    op = Transform(op)
    if op is Transform.TRANSPOSE:
        new = [rows[c][r] for r in range(n) for c in range(n)]
    elif op is Transform.REFLECT_H:
        new = [v for row in reversed(rows) for v in row]
    elif op is Transform.REFLECT_V:
        new = [v for row in rows for v in reversed(row)]
    else:
        # clockwise: new[r][c] = old[n-1-c][r]
        new = [rows[n - 1 - c][r] for r in range(n) for c in range(n)]
    return Square(n, tuple(new))


def relabel(square: Square, mapping) -> Square:
    return transform(square, Relabel(mapping))


def geometric_images(square: Square) -> Iterator[Square]:
    """The eight images of ``square`` under the dihedral group of the board."""
    s = square
    for _ in range(4):
        yield s
        yield transform(s, Transform.TRANSPOSE)
        s = transform(s, Transform.ROTATE90)


def normalize_first_row(square: Square) -> Square:
    """Relabel so the first row reads 1..n."""
    first = square.rows[0]
    return relabel(square, {v: i + 1 for i, v in enumerate(first)})


def equivalent(a: Square, b: Square) -> bool:
    """True if ``b`` is a relabeled dihedral image of ``a``."""
    if a.order != b.order:
        return False
    target = normalize_first_row(b)
    return any(normalize_first_row(img) == target for img in geometric_images(a))
