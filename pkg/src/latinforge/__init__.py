"""Constrained Latin squares: rules, constructions and exhaustive enumeration."""

from __future__ import annotations

__version__ = "0.1.0"

from latinforge.grid import (  # noqa: E402
    Coord,
    NumberLine,
    Piece,
    Square,
    Topology,
    from_rows,
    from_strings,
    make_square,
    piece_targets,
    transform,
)
from latinforge.rules import (  # noqa: E402
    AntiPiece,
    Consecutive,
    Latin,
    NonConsecutive,
    RequirePiece,
    RuleSet,
    StrictPiece,
    Violation,
    detect_cyclic,
    passes,
    verify,
)
from latinforge.search import (  # noqa: E402
    BudgetExceeded,
    SearchOptions,
    count,
    enumerate_squares,
    lex_earliest,
)

__all__ = [
    "AntiPiece", "BudgetExceeded", "Consecutive", "Coord", "Latin", "NonConsecutive",
    "NumberLine", "Piece", "RequirePiece", "RuleSet", "SearchOptions", "Square",
    "StrictPiece", "Topology", "Violation", "count", "detect_cyclic", "enumerate_squares",
    "from_rows", "from_strings", "lex_earliest", "make_square", "passes", "piece_targets",
    "transform", "verify", "__version__",
]
