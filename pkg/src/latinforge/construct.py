"""Generators for the existence constructions: cyclic squares, products and
the parameter families that witness each variant."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

from latinforge import rules as R
from latinforge.grid import NumberLine, Piece, Square, Topology, make_square
from latinforge.rules import is_latin


class ConstructionError(ValueError):
    pass


class ShiftNotCoprime(ConstructionError):
    def __init__(self, n: int, k: int):
        super().__init__(f"shift {k} is not coprime with order {n}")
        self.n = n
        self.k = k


class OperandNotLatin(ConstructionError):
    pass


class OrderUnsupported(ConstructionError):
    def __init__(self, n: int, why: str = ""):
        super().__init__(f"order {n} unsupported" + (f": {why}" if why else ""))
        self.n = n


class InvalidParams(ConstructionError):
    pass


class NoParams(ConstructionError):
    pass


class InvalidPQ(ConstructionError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def smallest_prime_factor(n: int) -> int:
    f = 2
    while f * f <= n:
        if n % f == 0:
            return f
        f += 1
    return n


@dataclass(frozen=True)
class ShiftSpec:
    """Row-to-row right shift ``k``, taken modulo the order."""

    k: int

    def coprime_with(self, n: int) -> bool:
        return gcd(n, self.k % n) == 1 if n > 1 else True


@dataclass(frozen=True)
class PQSpec:
    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if not (is_prime(p) and is_prime(q) and p % 2 and q % 2 and p < q):
            raise InvalidPQ(f"need distinct odd primes p < q, got p={p}, q={q}")

    @property
    def c(self) -> int:
        return (self.p + self.q) // 2

    @property
    def n(self) -> int:
        return self.p * self.q


def _shifted(first_row: Sequence[int], k: int) -> list[list[int]]:
    n = len(first_row)
    return [[first_row[(c - r * k) % n] for c in range(n)] for r in range(n)]


def cyclic_square(first_row: Sequence[int], k: int) -> Square:
    """Each row is the previous one rotated right by ``k`` (negative = left)."""
    row = [int(v) for v in first_row]
    n = len(row)
    if sorted(row) != list(range(1, n + 1)):
        raise ConstructionError(f"first row {row} is not a permutation of 1..{n}")
    if not ShiftSpec(k).coprime_with(n):
        raise ShiftNotCoprime(n, k)
    return make_square(n, [v for r in _shifted(row, k) for v in r])


def shifted_grid(first_row: Sequence[int], k: int) -> Square:
    """Same as :func:`cyclic_square` but without the coprimality guard."""
    row = [int(v) for v in first_row]
    return make_square(len(row), [v for r in _shifted(row, k) for v in r])


def step_row(n: int, step: int, start: int = 1) -> list[int]:
    """``start, start+step, start+2*step, ...`` reduced into 1..n."""
    return [(start - 1 + i * step) % n + 1 for i in range(n)]


def kronecker(L: Square, B: Square) -> Square:
    """Block product: block ``(a, c)`` holds ``B`` offset by ``(L[a, c] - 1) * n``."""
    if not is_latin(L) or not is_latin(B):
        raise OperandNotLatin("both product operands must be Latin squares")
    m, n = L.order, B.order
    N = m * n
    cells = [0] * (N * N)
    for a in range(m):
        for c in range(m):
            base = (L[a, c] - 1) * n
            for b in range(n):
                for d in range(n):
                    cells[(a * n + b) * N + c * n + d] = base + B[b, d]
    return Square(N, tuple(cells))


def modular_consecutive(n: int, start: int = 1, row_dir: int = 1, k: int = 1) -> Square:
    if row_dir not in (1, -1) or k not in (1, -1):
        raise InvalidParams("row_dir and k must be +1 or -1")
    if not 1 <= start <= n:
        raise InvalidParams(f"start must lie in 1..{n}")
    return cyclic_square(step_row(n, row_dir, start), k)


def all_modular_consecutive(n: int) -> list[Square]:
    """The 4n parameter combinations, sorted, duplicates removed."""
    out = {modular_consecutive(n, s, d, k)
           for s in range(1, n + 1) for d in (1, -1) for k in (1, -1)}
    return sorted(out)


def nc_king_odd(n: int, anti_king: bool = False) -> Square:
    """First row steps by +2; rows shift right by 1, or left by 2 for anti-king."""
    if n % 2 == 0:
        raise OrderUnsupported(n, "odd orders only")
    if n < 7 or (anti_king and n < 9):
        raise OrderUnsupported(n, "needs n >= 7, or n >= 9 with anti-king")
    return cyclic_square(step_row(n, 2), -2 if anti_king else 1)


def _even_king_conditions(n: int, k: int, m: int, anti_king: bool) -> Optional[str]:
    if n % 2:
        return f"order {n} is odd"
    if gcd(k % n, n) != 1 or gcd(m % n, n) != 1:
        return "k and m must be coprime with n"
    units = {1, n - 1}
    if k % n in units:
        return "k must not be +-1 mod n"
    if (m * k) % n in units:
        return "m*k must not be +-1 mod n"
    if anti_king and m % n in units:
        return "anti-king needs m != +-1 mod n"
    return None


def nc_king_even(n: int, k: int, m: int, anti_king: bool = False) -> Square:
    """First row adds ``k`` modulo n; each row is the previous shifted right by ``m``.

    The neighbourhood differences are k, m*k and m*k +- k; the last two are
    even and so never +-1 for even n.
    """
    why = _even_king_conditions(n, k, m, anti_king)
    if why:
        raise InvalidParams(why)
    return cyclic_square(step_row(n, k), m)


def nc_king_even_params(n: int, anti_king: bool = False) -> tuple[int, int]:
    """Valid ``(k, m)`` with ``(m, k)`` lexicographically least."""
    if n % 2:
        raise InvalidParams(f"order {n} is odd")
    for m in range(1, n):
        for k in range(1, n):
            if _even_king_conditions(n, k, m, anti_king) is None:
                return k, m
    raise NoParams(f"no (m, k) for order {n}" + (" with anti-king" if anti_king else ""))


def anti_queen_shift_valid(n: int, k: int) -> bool:
    if not 1 <= k < n:
        raise ValueError(f"shift must lie in 1..{n - 1}")
    return gcd(n, k) == 1 and gcd(n, k - 1) == 1 and gcd(n, k + 1) == 1


def anti_queen_shifts(n: int) -> list[int]:
    return [k for k in range(1, n) if anti_queen_shift_valid(n, k)]


def anti_king_not_queen_shift(n: int) -> int:
    if n <= 6 or is_prime(n):
        raise OrderUnsupported(n, "needs a composite order above 6")
    if n % 2 == 0:
        return next(k for k in range(3, n - 2) if gcd(k, n) == 1)
    return smallest_prime_factor(n) + 1


def anti_king_not_queen(n: int, first_row: Optional[Sequence[int]] = None) -> Square:
    k = anti_king_not_queen_shift(n)
    return cyclic_square(first_row or range(1, n + 1), k)


def bishop_even(n: int) -> Square:
    if n < 2 or n % 2:
        raise OrderUnsupported(n, "even orders only")
    return cyclic_square(range(1, n + 1), 1)


def king_even(n: int) -> Square:
    if n < 2 or n % 2:
        raise OrderUnsupported(n, "even orders only")
    half = cyclic_square(range(1, n // 2 + 1), 1)
    return kronecker(half, make_square(2, [1, 2, 2, 1]))


def bishop_odd_pq(spec: PQSpec) -> Square:
    """Cell ``(r, c)`` holds ``((c - p) * col + c * row) mod n + 1`` with c the
    prime average: south-east steps add q, south-west steps add p."""
    n, c, p = spec.n, spec.c, spec.p
    return make_square(n, [((c - p) * col + c * row) % n + 1
                           for row in range(n) for col in range(n)])


def chiece_scale(multiplier: Square, chiece: Square) -> Square:
    """Blow a chiece square up by a Latin multiplier; each block copies it."""
    return kronecker(multiplier, chiece)


def anti_knight(n: int) -> Square:
    """Shift-by-one cyclic square; twins always sit on one diagonal colour."""
    if n < 4:
        raise OrderUnsupported(n, "needs n >= 4")
    return cyclic_square(range(1, n + 1), 1)


# --- family registry --------------------------------------------------------

@dataclass(frozen=True)
class Member:
    family: str
    params: dict
    square: Square
    passes: tuple      # rules the square is advertised to satisfy
    fails: tuple = ()  # rules it is advertised to violate


def family_members(family: str, max_n: int = 30, orders: Optional[Sequence[int]] = None,
                   shifts: Optional[Sequence[int]] = None):
    """Yield every member of a construction family over its supported orders.

    ``shifts`` restricts the anti-queen family to the given row shifts.
    """
    L = R.Latin()
    nck = R.NonConsecutive(Piece.KING)
    ak = R.AntiPiece(Piece.KING)
    ns = list(orders) if orders is not None else list(range(1, max_n + 1))
    if family == "cyclic":
        for n in ns:
            for k in range(n):
                if gcd(n, k) == 1:
                    yield Member(family, {"n": n, "k": k},
                                 cyclic_square(range(1, n + 1), k), (L,))
    elif family == "modular-consecutive":
        rules = (L, R.Consecutive(Topology.FLAT, NumberLine.MODULAR),
                 R.Consecutive(Topology.TOROIDAL, NumberLine.MODULAR))
        for n in ns:
            for s in range(1, n + 1):
                for d in (1, -1):
                    for k in (1, -1):
                        yield Member(family, {"n": n, "start": s, "row_dir": d, "k": k},
                                     modular_consecutive(n, s, d, k), rules)
    elif family == "nc-king-odd":
        for n in ns:
            if n % 2 and n >= 7:
                yield Member(family, {"n": n, "anti_king": False}, nc_king_odd(n), (L, nck))
            if n % 2 and n >= 9:
                yield Member(family, {"n": n, "anti_king": True},
                             nc_king_odd(n, True), (L, nck, ak))
    elif family == "nc-king-even":
        for n in ns:
            for anti in (False, True):
                if n % 2 or n <= (12 if anti else 6):
                    continue
                k, m = nc_king_even_params(n, anti)
                rules = (L, nck, ak) if anti else (L, nck)
                yield Member(family, {"n": n, "k": k, "m": m, "anti_king": anti},
                             nc_king_even(n, k, m, anti), rules)
    elif family == "anti-queen":
        aq = R.AntiPiece(Piece.QUEEN, Topology.TOROIDAL)
        for n in ns:
            for k in anti_queen_shifts(n) if n > 1 else ():
                if shifts is not None and k not in shifts:
                    continue
                yield Member(family, {"n": n, "k": k},
                             cyclic_square(range(1, n + 1), k), (L, aq, ak))
    elif family == "anti-king-not-queen":
        for n in ns:
            if n > 6 and not is_prime(n):
                yield Member(family, {"n": n, "k": anti_king_not_queen_shift(n)},
                             anti_king_not_queen(n), (L, ak),
                             (R.AntiPiece(Piece.QUEEN),))
    elif family == "anti-knight":
        for n in ns:
            if n >= 4:
                yield Member(family, {"n": n}, anti_knight(n),
                             (L, R.AntiPiece(Piece.KNIGHT),
                              R.AntiPiece(Piece.KNIGHT, Topology.TOROIDAL)))
    elif family == "bishop-even":
        for n in ns:
            if n >= 2 and n % 2 == 0:
                yield Member(family, {"n": n}, bishop_even(n),
                             (L, R.RequirePiece(Piece.BISHOP), R.StrictPiece(Piece.BISHOP)))
    elif family == "king-even":
        for n in ns:
            if n >= 2 and n % 2 == 0:
                yield Member(family, {"n": n}, king_even(n),
                             (L, R.RequirePiece(Piece.KING)))
    elif family == "bishop-pq":
        for n in ns:
            for p in range(3, n):
                if n % p == 0 and is_prime(p) and is_prime(n // p) and p < n // p:
                    spec = PQSpec(p, n // p)
                    yield Member(family, {"p": p, "q": n // p}, bishop_odd_pq(spec),
                                 (L, R.RequirePiece(Piece.BISHOP)))
    else:
        raise KeyError(f"unknown construction family {family!r}")


FAMILIES = ("cyclic", "modular-consecutive", "nc-king-odd", "nc-king-even",
            "anti-queen", "anti-king-not-queen", "anti-knight", "bishop-even",
            "king-even", "bishop-pq")
