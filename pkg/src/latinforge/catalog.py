"""Reference squares used by the reproduction table and the tests."""

from __future__ import annotations

from latinforge.grid import from_rows, from_strings

LEX_EARLIEST_4 = from_strings("1234", "2143", "3412", "4321")

# rows shifted by +2, -1, +1 relative to the first row: not cyclic, not
# anti-knight, but a knight square
MIXED_SHIFT_4 = from_strings("1234", "3412", "2341", "4123")

LEFT_CYCLIC_3 = from_strings("123", "231", "312")
RIGHT_CYCLIC_3 = from_strings("123", "312", "231")

PRODUCT_LEFT_3 = from_strings("123", "231", "312")
PRODUCT_RIGHT_2 = from_strings("12", "21")
PRODUCT_3_BY_2 = from_rows([
    [1, 2, 3, 4, 5, 6],
    [2, 1, 4, 3, 6, 5],
    [3, 4, 5, 6, 1, 2],
    [4, 3, 6, 5, 2, 1],
    [5, 6, 1, 2, 3, 4],
    [6, 5, 2, 1, 4, 3],
])
PRODUCT_2_BY_3 = from_rows([
    [1, 2, 3, 4, 5, 6],
    [2, 3, 1, 5, 6, 4],
    [3, 1, 2, 6, 4, 5],
    [4, 5, 6, 1, 2, 3],
    [5, 6, 4, 2, 3, 1],
    [6, 4, 5, 3, 1, 2],
])

NC_EARLIEST_5 = from_strings("13524", "35241", "52413", "24135", "41352")

# offered as non-consecutive on the flat board only (row 2 wraps 3..2, row 4
# holds 6 next to 1); as printed it also has flat consecutive neighbours
NC_FIGURE_6 = from_strings(
    "135246", "351462", "513624", "246135", "462351", "624513")

NC_KING_7 = from_strings(
    "1357246", "3572461", "5724613", "7246135",
    "2461357", "4613572", "6135724")
NC_KING_ANTI_KING_9 = from_strings(
    "186429753", "531864297", "975318642", "429753186", "864297531",
    "318642975", "753186429", "297531864", "642975318")
NC_KING_8 = from_strings(
    "14725836", "61472583", "36147258", "83614725",
    "58361472", "25836147", "72583614", "47258361")

MODULAR_CONSECUTIVE_NONCYCLIC_4 = (
    from_strings("1234", "4321", "3412", "2143"),
    from_strings("1234", "2143", "3412", "4321"),
)

ANTI_KNIGHT_SUDOKU_4 = from_strings("1234", "4321", "3412", "2143")
ANTI_KNIGHT_4_FIXED = (
    from_strings("1234", "2143", "3412", "4321"),
    from_strings("1234", "4123", "3412", "2341"),
    from_strings("1234", "2341", "3412", "4123"),
    from_strings("1234", "4321", "3412", "2143"),
)
ANTI_KNIGHT_5 = from_strings("12345", "23451", "34512", "45123", "51234")

ANTI_QUEEN_5 = (
    from_strings("12345", "34512", "51234", "23451", "45123"),
    from_strings("12345", "45123", "23451", "51234", "34512"),
)

ANTI_KING_NOT_QUEEN_9 = from_strings(
    "123456789", "891234567", "678912345", "456789123", "234567891",
    "912345678", "789123456", "567891234", "345678912")
ANTI_KING_NOT_QUEEN_6 = from_strings(
    "123456", "345612", "561234", "234561", "456123", "612345")

STRICT_KNIGHT_5_DIAGONAL = from_strings("12345", "54132", "43251", "25413", "31524")
STRICT_KNIGHT_5 = from_strings("12345", "45123", "23451", "51234", "34512")

KNIGHT_NOT_STRICT_10 = from_rows([
    [1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
    [5, 4, 1, 3, 2, 10, 9, 6, 8, 7],
    [4, 3, 2, 5, 1, 9, 8, 7, 10, 6],
    [2, 5, 4, 1, 3, 7, 10, 9, 6, 8],
    [3, 1, 5, 2, 4, 8, 6, 10, 7, 9],
    [6, 7, 8, 9, 10, 1, 2, 3, 4, 5],
    [10, 9, 6, 8, 7, 5, 4, 1, 3, 2],
    [9, 8, 7, 10, 6, 4, 3, 2, 5, 1],
    [7, 10, 9, 6, 8, 2, 5, 4, 1, 3],
    [8, 6, 10, 7, 9, 3, 1, 5, 2, 4],
])

# earliest order-4 knight square by exhaustive search; it precedes MIXED_SHIFT_4
KNIGHT_EARLIEST_4 = from_strings("1234", "3412", "2143", "4321")

# relabeling that sends the row 12345 to 13524 (v -> 2v - 1 mod 5); it doubles
# every symbol difference, so it swaps the shy and nosy modular toroidal squares
RELABEL_12345_TO_13524 = {1: 1, 2: 3, 3: 5, 4: 2, 5: 4}
