from __future__ import annotations

import itertools
import random
from math import gcd

import pytest

from latinforge import catalog as C
from latinforge import construct
from latinforge.construct import (
    InvalidParams,
    InvalidPQ,
    NoParams,
    OperandNotLatin,
    OrderUnsupported,
    PQSpec,
    ShiftNotCoprime,
)
from latinforge.grid import NumberLine, Piece, Square, Topology, equivalent, from_strings
from latinforge.rules import (
    AntiPiece,
    Consecutive,
    Latin,
    NonConsecutive,
    RequirePiece,
    RuleSet,
    StrictPiece,
    is_latin,
    passes,
    verify,
)
from latinforge.search import all_latin_squares

FLAT, TORUS = Topology.FLAT, Topology.TOROIDAL
NC_KING = RuleSet.of(Latin(), NonConsecutive(Piece.KING))
ANTI_KING = RuleSet.of(AntiPiece(Piece.KING))


def latin_of(n):
    return [Square(n, tuple(int(v) for v in row)) for row in all_latin_squares(n)]


# --- cyclic -----------------------------------------------------------------

def test_right_cyclic_order3():
    assert construct.cyclic_square([1, 2, 3], 1) == C.RIGHT_CYCLIC_3


def test_left_shift_of_13524_is_earliest_nc_square():
    assert construct.cyclic_square([1, 3, 5, 2, 4], 4) == C.NC_EARLIEST_5


def test_non_coprime_shift_refused():
    with pytest.raises(ShiftNotCoprime):
        construct.cyclic_square([1, 2, 3, 4], 2)


def test_cyclic_latin_iff_coprime():
    rng = random.Random(11)
    for n in range(1, 13):
        rows = [list(range(1, n + 1))] + [rng.sample(range(1, n + 1), n) for _ in range(3)]
        for k in range(n):
            for row in rows:
                assert is_latin(construct.shifted_grid(row, k)) == (gcd(n, k) == 1)


def test_cyclic_rejects_non_permutation():
    with pytest.raises(construct.ConstructionError):
        construct.cyclic_square([1, 1, 2], 1)


# --- kronecker --------------------------------------------------------------

def test_kronecker_figures():
    assert construct.kronecker(C.PRODUCT_LEFT_3, C.PRODUCT_RIGHT_2) == C.PRODUCT_3_BY_2
    assert construct.kronecker(C.PRODUCT_RIGHT_2, C.PRODUCT_LEFT_3) == C.PRODUCT_2_BY_3
    assert C.PRODUCT_3_BY_2 != C.PRODUCT_2_BY_3


def test_kronecker_cell_formula():
    L, B = C.LEFT_CYCLIC_3, C.LEX_EARLIEST_4
    P = construct.kronecker(L, B)
    for a, c, b, d in itertools.product(range(3), range(3), range(4), range(4)):
        assert P[a * 4 + b, c * 4 + d] == (L[a, c] - 1) * 4 + B[b, d]


def test_kronecker_identity_block():
    one = construct.cyclic_square([1], 0)
    assert construct.kronecker(one, C.NC_EARLIEST_5) == C.NC_EARLIEST_5


def test_kronecker_needs_latin_operands():
    with pytest.raises(OperandNotLatin):
        construct.kronecker(from_strings("11", "22"), C.PRODUCT_RIGHT_2)


def test_kronecker_preserves_latin_over_catalog():
    catalog = latin_of(1) + latin_of(2) + latin_of(3) + latin_of(4)[::24]
    for a in catalog:
        for b in catalog:
            assert is_latin(construct.kronecker(a, b))


def test_nc_product_is_toroidal_nc():
    torus_nc = RuleSet.of(NonConsecutive(Piece.ORTHOGONAL_STEP, TORUS))
    for m in latin_of(2) + latin_of(3):
        assert passes(construct.kronecker(m, C.NC_EARLIEST_5), torus_nc)


@pytest.mark.parametrize("piece,chiece", [
    (Piece.KNIGHT, C.MIXED_SHIFT_4), (Piece.KNIGHT, C.STRICT_KNIGHT_5),
    (Piece.KING, from_strings("12", "21")), (Piece.BISHOP, from_strings("12", "21")),
])
def test_chiece_scaling(piece, chiece):
    rule = RuleSet.of(RequirePiece(piece))
    assert passes(chiece, rule)
    for m in latin_of(1) + latin_of(2) + latin_of(3):
        assert passes(construct.chiece_scale(m, chiece), rule)


# --- modular consecutive ----------------------------------------------------

def test_modular_consecutive_examples():
    rules = RuleSet.of(Latin(), Consecutive(FLAT, NumberLine.MODULAR))
    assert passes(construct.modular_consecutive(5, 1, 1, -1), rules)
    assert construct.modular_consecutive(3, 1, 1, 1) == C.RIGHT_CYCLIC_3
    assert passes(C.RIGHT_CYCLIC_3, rules)


def test_modular_consecutive_4n_distinct_at_6():
    squares = construct.all_modular_consecutive(6)
    assert len(squares) == len(set(squares)) == 24
    rules = RuleSet.of(Latin(), Consecutive(FLAT, NumberLine.MODULAR))
    assert all(passes(s, rules) for s in squares)


# --- king families ----------------------------------------------------------

def test_nc_king_odd_order7_matches_figure_up_to_symmetry():
    sq = construct.nc_king_odd(7)
    assert passes(sq, NC_KING)
    assert equivalent(sq, C.NC_KING_7)


def test_nc_king_odd_order9_anti_king():
    sq = construct.nc_king_odd(9, anti_king=True)
    assert passes(sq, NC_KING) and passes(sq, ANTI_KING)
    assert equivalent(sq, C.NC_KING_ANTI_KING_9)


@pytest.mark.parametrize("n,anti", [(7, True), (5, False), (8, False), (3, False)])
def test_nc_king_odd_unsupported(n, anti):
    with pytest.raises(OrderUnsupported):
        construct.nc_king_odd(n, anti)


def test_nc_king_even_order8():
    sq = construct.nc_king_even(8, 3, 1)
    assert sq == C.NC_KING_8
    assert passes(sq, NC_KING) and not passes(sq, ANTI_KING)


def test_nc_king_even_params():
    assert construct.nc_king_even_params(8) == (3, 1)
    k, m = construct.nc_king_even_params(14, anti_king=True)
    sq = construct.nc_king_even(14, k, m, anti_king=True)
    assert passes(sq, NC_KING) and passes(sq, ANTI_KING)


@pytest.mark.parametrize("n,anti", [(6, False), (4, False), (12, True), (10, True)])
def test_nc_king_even_no_params(n, anti):
    with pytest.raises(NoParams):
        construct.nc_king_even_params(n, anti)


def test_nc_king_even_invalid_params():
    with pytest.raises(InvalidParams):
        construct.nc_king_even(8, 1, 1)
    with pytest.raises(InvalidParams):
        construct.nc_king_even(8, 3, 1, anti_king=True)


def test_nc_king_even_params_are_least():
    # brute force over the stated conditions, ordered by (m, k)
    for n in range(8, 31, 2):
        for anti in (False, True):
            def ok(k, m):
                bad = {1, n - 1}
                return (gcd(k, n) == 1 and gcd(m, n) == 1 and k % n not in bad
                        and (m * k) % n not in bad and (not anti or m % n not in bad))
            want = next(((k, m) for m in range(1, n) for k in range(1, n) if ok(k, m)), None)
            if want is None:
                with pytest.raises(NoParams):
                    construct.nc_king_even_params(n, anti)
            else:
                assert construct.nc_king_even_params(n, anti) == want


# --- anti-queen -------------------------------------------------------------

def test_anti_queen_shift_examples():
    assert construct.anti_queen_shift_valid(5, 2)
    assert not any(construct.anti_queen_shift_valid(6, k) for k in range(1, 6))
    assert construct.anti_queen_shift_valid(7, 3)
    sq = construct.cyclic_square(range(1, 8), 3)
    assert passes(sq, RuleSet.of(Latin(), AntiPiece(Piece.QUEEN, TORUS)))


def test_anti_queen_pair_are_shift_two_instances():
    assert set(C.ANTI_QUEEN_5) == {construct.cyclic_square(range(1, 6), 2),
                                   construct.cyclic_square(range(1, 6), 3)}


def test_anti_queen_shift_theorem_exhaustive():
    rules = RuleSet.of(Latin(), AntiPiece(Piece.QUEEN, TORUS))
    for n in range(1, 21):
        for k in range(1, n):
            grid = construct.shifted_grid(range(1, n + 1), k)
            assert construct.anti_queen_shift_valid(n, k) == passes(grid, rules), (n, k)


def test_anti_queen_exists_iff_coprime_with_6():
    for n in range(2, 40):
        assert bool(construct.anti_queen_shifts(n)) == (gcd(n, 6) == 1)


def test_anti_queen_constructions_are_anti_king():
    for n in range(5, 10):
        for k in construct.anti_queen_shifts(n):
            sq = construct.cyclic_square(range(1, n + 1), k)
            for topology in Topology:
                assert passes(sq, RuleSet.of(AntiPiece(Piece.KING, topology)))


# --- anti-king, not anti-queen ----------------------------------------------

def test_anti_king_not_queen_order9():
    assert construct.anti_king_not_queen_shift(9) == 4
    sq = construct.anti_king_not_queen(9)
    assert passes(sq, RuleSet.of(Latin(), AntiPiece(Piece.KING)))
    assert verify(sq, RuleSet.of(AntiPiece(Piece.QUEEN)))


def test_anti_king_not_queen_order8():
    assert construct.anti_king_not_queen_shift(8) == 3
    sq = construct.anti_king_not_queen(8)
    assert passes(sq, RuleSet.of(Latin(), AntiPiece(Piece.KING)))
    assert not passes(sq, RuleSet.of(AntiPiece(Piece.QUEEN)))


@pytest.mark.parametrize("n", [7, 11, 4, 6, 1])
def test_anti_king_not_queen_unsupported(n):
    with pytest.raises(OrderUnsupported):
        construct.anti_king_not_queen(n)


def test_figure_witnesses_anti_king_not_queen():
    for sq in (C.ANTI_KING_NOT_QUEEN_9, C.ANTI_KING_NOT_QUEEN_6):
        assert passes(sq, RuleSet.of(Latin(), AntiPiece(Piece.KING)))
        assert not passes(sq, RuleSet.of(AntiPiece(Piece.QUEEN)))


# --- chiece families --------------------------------------------------------

def test_bishop_even():
    sq = construct.bishop_even(4)
    assert passes(sq, RuleSet.of(Latin(), RequirePiece(Piece.BISHOP), StrictPiece(Piece.BISHOP)))
    assert passes(construct.bishop_even(2), RuleSet.of(Latin(), RequirePiece(Piece.BISHOP)))


def test_every_order2_square_is_bishop():
    for sq in latin_of(2):
        assert passes(sq, RuleSet.of(RequirePiece(Piece.BISHOP)))


def test_king_even_order4_is_earliest_latin():
    sq = construct.king_even(4)
    assert sq == C.LEX_EARLIEST_4
    assert passes(sq, RuleSet.of(Latin(), RequirePiece(Piece.KING), RequirePiece(Piece.BISHOP)))


@pytest.mark.parametrize("fn", [construct.bishop_even, construct.king_even])
def test_even_families_reject_odd(fn):
    with pytest.raises(OrderUnsupported):
        fn(5)


@pytest.mark.parametrize("p,q", [(3, 5), (3, 7), (5, 7)])
def test_bishop_pq(p, q):
    sq = construct.bishop_odd_pq(PQSpec(p, q))
    assert sq.order == p * q
    assert passes(sq, RuleSet.of(Latin(), RequirePiece(Piece.BISHOP)))


def test_bishop_pq_diagonal_increments():
    # a SE step adds 2c - p = q; a SW step adds p (mod n)
    spec = PQSpec(3, 5)
    sq, n = construct.bishop_odd_pq(spec), 15
    for r in range(n - 1):
        for c in range(n):
            if c + 1 < n:
                assert (sq[r + 1, c + 1] - sq[r, c]) % n == spec.q
            if c >= 1:
                assert (sq[r + 1, c - 1] - sq[r, c]) % n == spec.p


@pytest.mark.parametrize("p,q", [(3, 9), (5, 3), (3, 3), (2, 5)])
def test_bishop_pq_invalid(p, q):
    with pytest.raises(InvalidPQ):
        PQSpec(p, q)


def test_anti_knight_generator():
    for n in range(4, 12):
        sq = construct.anti_knight(n)
        assert passes(sq, RuleSet.of(Latin(), AntiPiece(Piece.KNIGHT)))


# --- registry ---------------------------------------------------------------

@pytest.mark.parametrize("family", construct.FAMILIES)
def test_family_members_pass_advertised_rules(family):
    members = list(construct.family_members(family, max_n=16))
    assert members
    for m in members:
        assert verify(m.square, m.passes) == [], (family, m.params)
        for rule in m.fails:
            assert verify(m.square, (rule,)), (family, m.params, rule)


def test_unknown_family():
    with pytest.raises(KeyError):
        list(construct.family_members("rook"))
