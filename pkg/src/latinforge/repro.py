"""Named reproduction checks: the acceptance table plus figure identities.

Each check returns ``(passed, detail)``; :func:`run` adds the wall time and
compares it to the check's time limit. Expected values are literals here and
are never computed by the code under test.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from latinforge import catalog as C
from latinforge import construct
from latinforge.grid import (
    NumberLine,
    Piece,
    Square,
    Topology,
    Transform,
    equivalent,
    from_strings,
    relabel,
    transform,
)
from latinforge.rules import (
    AntiPiece,
    Consecutive,
    Latin,
    NonConsecutive,
    RequirePiece,
    RuleSet,
    StrictPiece,
    detect_cyclic,
    is_latin,
    passes,
    verify,
)
from latinforge.search import (
    Engine,
    all_latin_squares,
    classify_modular_consecutive,
    collect,
    count,
    count_nc_permutations,
    lex_earliest,
    third_row_forced,
)

FLAT, TORUS = Topology.FLAT, Topology.TOROIDAL
LINEAR, MODULAR = NumberLine.LINEAR, NumberLine.MODULAR


@dataclass(frozen=True)
class Check:
    name: str
    title: str
    limit: float
    func: Callable[[], tuple[bool, str]]


@dataclass
class Outcome:
    name: str
    title: str
    passed: bool
    detail: str
    seconds: float
    limit: float

    @property
    def in_time(self) -> bool:
        return self.seconds <= self.limit

    @property
    def ok(self) -> bool:
        return self.passed and self.in_time

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        late = "" if self.in_time else f" (over the {self.limit:g}s limit)"
        return f"{status} {self.name}: {self.title} [{self.seconds:.1f}s{late}] {self.detail}"


class _Tally:
    """Collects mismatches so a check reports every failure, not just the first."""

    def __init__(self):
        self.bad: list[str] = []

    def expect(self, label: str, got, want) -> None:
        if got != want:
            self.bad.append(f"{label}: got {got}, want {want}")

    def result(self, summary: str) -> tuple[bool, str]:
        if self.bad:
            return False, "; ".join(self.bad)
        return True, summary


def _latin(*more) -> RuleSet:
    return RuleSet.of(Latin(), *more)


def _order2_and_3() -> list:
    out = []
    for n in (2, 3):
        out += [Square(n, tuple(int(v) for v in row)) for row in all_latin_squares(n)]
    return out


# --- acceptance rows --------------------------------------------------------

def latin_counts() -> tuple[bool, str]:
    t = _Tally()
    for n, want in zip(range(1, 6), (1, 2, 12, 576, 161280)):
        t.expect(f"n={n}", count(n, _latin()), want)
    return t.result("1, 2, 12, 576, 161280")


def nc_permutation_counts() -> tuple[bool, str]:
    want = [1, 0, 0, 2, 14, 90, 646, 5242]
    got = [count_nc_permutations(n) for n in range(1, 9)]
    t = _Tally()
    t.expect("n=1..8", got, want)
    return t.result(", ".join(map(str, got)))


def anti_knight_counts() -> tuple[bool, str]:
    rules = _latin(AntiPiece(Piece.KNIGHT))
    t = _Tally()
    fixed4 = collect(4, rules, fix_first_row="identity")
    t.expect("n=4 fixed set", set(fixed4), set(C.ANTI_KNIGHT_4_FIXED))
    t.expect("n=4 total", count(4, rules), 96)
    t.expect("n=5 fixed", count(5, rules, fix_first_row="identity"), 2)
    t.expect("n=5 total", count(5, rules), 240)
    return t.result("n=4: 4 fixed / 96 total; n=5: 2 fixed / 240 total")


def anti_queen() -> tuple[bool, str]:
    t = _Tally()
    fixed5 = collect(5, _latin(AntiPiece(Piece.QUEEN)), fix_first_row="identity")
    t.expect("n=5 fixed set", set(fixed5), set(C.ANTI_QUEEN_5))
    t.expect("n=4", count(4, _latin(AntiPiece(Piece.QUEEN))), 0)
    rules = _latin(AntiPiece(Piece.QUEEN, TORUS))
    pairs = 0
    for n in range(1, 21):
        for k in range(1, n):
            grid = construct.shifted_grid(range(1, n + 1), k)
            t.expect(f"shift n={n} k={k}", construct.anti_queen_shift_valid(n, k),
                     passes(grid, rules))
            pairs += 1
    return t.result(f"reference squares matched, n=4 empty, {pairs} (n, k) pairs agree")


NONEXISTENCE = (
    ("consecutive", _latin(Consecutive(FLAT, LINEAR)), (3, 4, 5, 6)),
    ("non-consecutive", _latin(NonConsecutive()), (2, 3, 4)),
    ("nc-king", _latin(NonConsecutive(Piece.KING)), (5, 6)),
    ("anti-king", _latin(AntiPiece(Piece.KING)), (2, 3, 4)),
    ("bishop", _latin(RequirePiece(Piece.BISHOP)), (3, 5)),
    ("king", _latin(RequirePiece(Piece.KING)), (3, 5)),
    ("knight", _latin(RequirePiece(Piece.KNIGHT)), (3,)),
)


def nonexistence() -> tuple[bool, str]:
    t = _Tally()
    cases = 0
    for label, rules, orders in NONEXISTENCE:
        for n in orders:
            t.expect(f"{label} n={n}", count(n, rules), 0)
            cases += 1
    return t.result(f"{cases} cases, all empty")


def modular_consecutive() -> tuple[bool, str]:
    t = _Tally()
    for n in (5, 6, 7):
        cls = classify_modular_consecutive(n)
        t.expect(f"n={n} total", cls.total, 4 * n)
        t.expect(f"n={n} shifts", set(cls.shifts), {1, n - 1})
        t.expect(f"n={n} via detect_cyclic",
                 all(detect_cyclic(s) in (1, n - 1) for s in cls.squares), True)
    four = classify_modular_consecutive(4, fix_first_row="identity")
    t.expect("n=4 fixed noncyclic", set(four.noncyclic), set(C.MODULAR_CONSECUTIVE_NONCYCLIC_4))
    return t.result("4n squares for n=5,6,7, all shift +-1; n=4 fixed: 2 noncyclic")


def _member_ok(member) -> bool:
    if verify(member.square, member.passes):
        return False
    return all(verify(member.square, (rule,)) for rule in member.fails)


def constructions() -> tuple[bool, str]:
    t = _Tally()
    total = 0
    for family in construct.FAMILIES:
        for m in construct.family_members(family, max_n=30):
            total += 1
            if not _member_ok(m):
                t.bad.append(f"{family} {m.params}")
    spots = [
        *construct.family_members("nc-king-odd", orders=[101]),
        *construct.family_members("anti-queen", orders=[101], shifts=[2]),
    ]
    t.expect("n=101 spot checks", [_member_ok(m) for m in spots], [True] * 3)
    return t.result(f"{total} members up to n=30 plus {len(spots)} at n=101 verified")


def products() -> tuple[bool, str]:
    t = _Tally()
    small = _order2_and_3()
    operands = [construct.cyclic_square([1], 0)] + small + [
        C.LEX_EARLIEST_4, C.MIXED_SHIFT_4, *C.ANTI_KNIGHT_4_FIXED]
    bad = sum(not is_latin(construct.kronecker(a, b)) for a in operands for b in operands)
    t.expect("kronecker non-Latin products", bad, 0)

    nc_torus = RuleSet.of(NonConsecutive(Piece.ORTHOGONAL_STEP, TORUS, LINEAR))
    t.expect("NC operand is modular toroidal NC",
             passes(C.NC_EARLIEST_5, RuleSet.of(NonConsecutive(Piece.ORTHOGONAL_STEP, TORUS, MODULAR))),
             True)
    bad = [str(m.rows[0]) for m in small
           if not passes(construct.kronecker(m, C.NC_EARLIEST_5), nc_torus)]
    t.expect("NC products", bad, [])

    order2 = from_strings("12", "21")
    chieces = [(Piece.KNIGHT, C.MIXED_SHIFT_4), (Piece.KNIGHT, C.STRICT_KNIGHT_5),
               (Piece.KING, order2), (Piece.BISHOP, order2)]
    multipliers = [construct.cyclic_square([1], 0)] + small
    for piece, chiece in chieces:
        req = RuleSet.of(RequirePiece(piece))
        t.expect(f"{piece.value} order {chiece.order} operand", passes(chiece, req), True)
        bad = sum(not passes(construct.chiece_scale(m, chiece), req) for m in multipliers)
        t.expect(f"{piece.value} order {chiece.order} scaled", bad, 0)
    return t.result(f"{len(operands) ** 2} Latin products, {len(small)} NC products, "
                    f"{4 * len(multipliers)} scaled chiece squares")


def order5_structure() -> tuple[bool, str]:
    t = _Tally()
    shy = collect(5, _latin(NonConsecutive()))
    both = RuleSet.of(NonConsecutive(Piece.ORTHOGONAL_STEP, TORUS, MODULAR),
                      AntiPiece(Piece.KNIGHT))
    t.expect("NC count", len(shy), 20)
    t.expect("NC squares failing torus/modular/anti-knight",
             [str(s) for s in shy if not passes(s, both)], [])
    knights = collect(5, _latin(RequirePiece(Piece.KNIGHT)))
    strict = RuleSet.of(StrictPiece(Piece.KNIGHT))
    t.expect("knight squares failing strict", sum(not passes(s, strict) for s in knights), 0)
    shy_torus = collect(5, _latin(NonConsecutive(Piece.ORTHOGONAL_STEP, TORUS, MODULAR)))
    nosy_torus = collect(5, _latin(Consecutive(TORUS, MODULAR)))
    image = {relabel(s, C.RELABEL_12345_TO_13524) for s in shy_torus}
    t.expect("relabel image", image == set(nosy_torus), True)
    t.expect("relabel injective", len(image), len(shy_torus))
    return t.result(f"{len(shy)} NC, {len(knights)} knight, "
                    f"{len(shy_torus)} shy <-> {len(nosy_torus)} nosy toroidal")


_POOL = (
    [NonConsecutive(a, tp, ln) for a in (Piece.ORTHOGONAL_STEP, Piece.KING)
     for tp in Topology for ln in NumberLine]
    + [Consecutive(tp, ln) for tp in Topology for ln in NumberLine]
    + [AntiPiece(p, tp) for p in (Piece.KNIGHT, Piece.KING, Piece.BISHOP, Piece.QUEEN)
       for tp in Topology]
    + [RequirePiece(p, tp) for p in (Piece.KNIGHT, Piece.KING, Piece.BISHOP, Piece.QUEEN)
       for tp in Topology]
    + [StrictPiece(p, tp) for p in (Piece.KNIGHT, Piece.BISHOP, Piece.KING) for tp in Topology]
)


def random_rule_sets(k: int = 25, seed: int = 20240229) -> list[tuple[int, RuleSet]]:
    """``k`` reproducible (order, rule set) samples within the naive oracle's reach."""
    rng = random.Random(seed)
    out = []
    for _ in range(k):
        n = rng.randint(1, 5)
        extra = rng.sample(_POOL, rng.randint(1, 2))
        latin = n >= 4 or rng.random() < 0.5
        out.append((n, RuleSet(((Latin(),) if latin else ()) + tuple(extra))))
    return out


def oracle_equivalence() -> tuple[bool, str]:
    t = _Tally()
    samples = random_rule_sets()
    for n, rules in samples:
        t.expect(f"n={n} {rules}", count(n, rules), count(n, rules, engine=Engine.ORACLE))
    threaded = [(5, _latin(AntiPiece(Piece.KNIGHT))), (5, _latin(RequirePiece(Piece.KNIGHT))),
                (4, _latin())]
    for n, rules in threaded:
        counts = [count(n, rules, workers=w) for w in (1, 2, 8)]
        t.expect(f"threads n={n} {rules}", len(set(counts)), 1)
        earliest = [lex_earliest(n, rules, workers=w) for w in (1, 2, 8)]
        t.expect(f"threads earliest n={n} {rules}", len(set(earliest)), 1)
    return t.result(f"{len(samples)} rule sets agree; {len(threaded)} agree over 1/2/8 workers")


# --- figure identities outside the numbered table ---------------------------

def figure_examples() -> tuple[bool, str]:
    t = _Tally()
    t.expect("earliest Latin 4", lex_earliest(4, _latin()), C.LEX_EARLIEST_4)
    t.expect("earliest NC 5", lex_earliest(5, _latin(NonConsecutive())), C.NC_EARLIEST_5)
    t.expect("earliest knight 4", lex_earliest(4, _latin(RequirePiece(Piece.KNIGHT))),
             C.KNIGHT_EARLIEST_4)
    t.expect("right cyclic 3", construct.cyclic_square([1, 2, 3], 1), C.RIGHT_CYCLIC_3)
    t.expect("left cyclic 3", construct.cyclic_square([1, 2, 3], 2), C.LEFT_CYCLIC_3)
    t.expect("NC 5 as left shift", construct.cyclic_square([1, 3, 5, 2, 4], 4), C.NC_EARLIEST_5)
    t.expect("product 3x2", construct.kronecker(C.PRODUCT_LEFT_3, C.PRODUCT_RIGHT_2),
             C.PRODUCT_3_BY_2)
    t.expect("product 2x3", construct.kronecker(C.PRODUCT_RIGHT_2, C.PRODUCT_LEFT_3),
             C.PRODUCT_2_BY_3)
    t.expect("king square 4", construct.king_even(4), C.LEX_EARLIEST_4)
    t.expect("nc king 8", construct.nc_king_even(8, 3, 1), C.NC_KING_8)
    t.expect("nc king 7 up to symmetry", equivalent(construct.nc_king_odd(7), C.NC_KING_7), True)
    t.expect("nc king 9 anti-king up to symmetry",
             equivalent(construct.nc_king_odd(9, True), C.NC_KING_ANTI_KING_9), True)
    t.expect("third row forced", third_row_forced(), True)
    t.expect("order-4 anti-knight sudoku", passes(C.ANTI_KNIGHT_SUDOKU_4,
                                                  _latin(AntiPiece(Piece.KNIGHT))), True)
    t.expect("mixed shifts not anti-knight",
             passes(C.MIXED_SHIFT_4, RuleSet.of(AntiPiece(Piece.KNIGHT))), False)
    knight = _latin(RequirePiece(Piece.KNIGHT))
    swapped = from_strings("1234", "3412", "4123", "2341")
    t.expect("cyclic-rows 4 and its row swap are knight",
             (passes(C.MIXED_SHIFT_4, knight), passes(swapped, knight)), (True, True))
    for label, sq in (("9", C.ANTI_KING_NOT_QUEEN_9), ("6", C.ANTI_KING_NOT_QUEEN_6)):
        t.expect(f"anti-king not queen {label}",
                 (passes(sq, _latin(AntiPiece(Piece.KING))),
                  passes(sq, RuleSet.of(AntiPiece(Piece.QUEEN)))), (True, False))
    strict = _latin(StrictPiece(Piece.KNIGHT))
    t.expect("strict knight 5", passes(C.STRICT_KNIGHT_5, strict), True)
    t.expect("strict knight 5 diagonal", passes(C.STRICT_KNIGHT_5_DIAGONAL, strict), True)
    t.expect("knight not strict 10",
             (passes(C.KNIGHT_NOT_STRICT_10, _latin(RequirePiece(Piece.KNIGHT))),
              passes(C.KNIGHT_NOT_STRICT_10, strict)), (True, False))
    t.expect("transpose of earliest 4", transform(C.LEX_EARLIEST_4, Transform.TRANSPOSE),
             C.LEX_EARLIEST_4)
    return t.result("all figure squares reproduced")


CHECKS: tuple[Check, ...] = (
    Check("latin-counts", "Latin square counts n=1..5", 60, latin_counts),
    Check("nc-permutations", "non-consecutive permutation counts n=1..8", 5,
          nc_permutation_counts),
    Check("anti-knight", "anti-knight counts n=4,5", 30, anti_knight_counts),
    Check("anti-queen", "anti-queen squares and the shifting theorem", 60, anti_queen),
    Check("nonexistence", "nonexistence suite", 600, nonexistence),
    Check("modular-consecutive", "modular consecutive classification", 60,
          modular_consecutive),
    Check("constructions", "construction re-verification", 120, constructions),
    Check("products", "product theorems", 60, products),
    Check("order5-structure", "order-5 structure theorems", 120, order5_structure),
    Check("oracle-equivalence", "pruned vs naive engine and thread independence", 300,
          oracle_equivalence),
)
EXTRA: tuple[Check, ...] = (
    Check("figures", "figure squares and small identities", 60, figure_examples),
)


def by_name(name: str) -> Check:
    for check in CHECKS + EXTRA:
        if check.name == name:
            return check
    raise KeyError(name)


def run(check: Check) -> Outcome:
    t0 = time.perf_counter()
    try:
        passed, detail = check.func()
    except Exception as exc:  # a crash is a failed row, reported like any mismatch
        passed, detail = False, f"error: {type(exc).__name__}: {exc}"
    return Outcome(check.name, check.title, passed, detail,
                   time.perf_counter() - t0, check.limit)


def run_all(names: Optional[Iterable[str]] = None) -> list[Outcome]:
    checks = CHECKS + EXTRA if names is None else [by_name(n) for n in names]
    return [run(c) for c in checks]
