"""Text and JSON square documents, JSON-lines catalogs and run manifests."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any, Iterable, Iterator, Optional

import jsonschema

from latinforge import __version__
from latinforge.grid import Square, make_square


class ParseError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("latinforge").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(payload: Any, schema: str) -> None:
    jsonschema.validate(payload, load_schema(schema))


@dataclass
class SquareDocument:
    order: int
    rows: list[list[int]]
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_square(cls, square: Square, **metadata) -> "SquareDocument":
        return cls(square.order, [list(r) for r in square.rows],
                   {k: v for k, v in metadata.items() if v is not None})

    def to_square(self) -> Square:
        return make_square(self.order, [v for row in self.rows for v in row])

    def to_dict(self) -> dict:
        out: dict = {"order": self.order, "rows": self.rows}
        if self.metadata:
            out["metadata"] = self.metadata
        return out


def format_square(square: Square, style: str = "ascii", **metadata) -> str:
    if style == "ascii":
        return f"{square.order}\n{square}\n"
    if style == "json":
        return json.dumps(SquareDocument.from_square(square, **metadata).to_dict()) + "\n"
    raise ValueError(f"unknown style {style!r}")


def parse_document(text: str) -> SquareDocument:
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            payload = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.lineno, exc.msg) from None
        try:
            validate(payload, "square_document")
        except jsonschema.ValidationError as exc:
            raise ParseError(1, exc.message) from None
        doc = SquareDocument(payload["order"], payload["rows"], payload.get("metadata", {}))
        if len(doc.rows) != doc.order:
            raise ParseError(1, f"expected {doc.order} rows, got {len(doc.rows)}")
        for i, row in enumerate(doc.rows, start=1):
            if len(row) != doc.order:
                raise ParseError(1, f"row {i}: wrong arity {len(row)}, expected {doc.order}")
        doc.to_square()
        return doc
    return SquareDocument.from_square(_parse_ascii(text))


def _parse_ascii(text: str) -> Square:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError(1, "empty input")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise ParseError(1, f"expected the order, got {lines[0]!r}") from None
    if n < 1:
        raise ParseError(1, f"order must be positive, got {n}")
    entries: list[int] = []
    for r in range(n):
        lineno = r + 2
        if lineno > len(lines):
            raise ParseError(lineno, f"missing row {r + 1} of {n}")
        fields = lines[lineno - 1].split()
        if len(fields) != n:
            raise ParseError(lineno, f"wrong arity: {len(fields)} values, expected {n}")
        try:
            entries += [int(f) for f in fields]
        except ValueError:
            raise ParseError(lineno, "non-integer entry") from None
    if len(lines) > n + 1:
        raise ParseError(n + 2, "trailing content after the last row")
    return make_square(n, entries)


def parse_square(text: str) -> Square:
    """Read either the ``n`` + rows text format or a JSON square document."""
    return parse_document(text).to_square()


def write_catalog(squares: Iterable[Square], **metadata) -> str:
    return "".join(format_square(s, "json", **metadata) for s in squares)


def read_catalog(text: str) -> Iterator[Square]:
    for line in text.splitlines():
        if line.strip():
            yield parse_square(line)


def squares_digest(squares: Iterable[Square], count: Optional[int] = None) -> str:
    h = hashlib.sha256()
    if count is not None:
        h.update(f"count={count}\n".encode())
    for sq in squares:
        h.update((" ".join(map(str, sq.cells)) + "\n").encode())
    return h.hexdigest()


def payload_digest(payload: Any) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    rules: list[str]
    options: dict
    engine: str
    count: Optional[int]
    digest: str
    nodes: Optional[int]
    wall_time: float
    version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)

    def write(self, path) -> None:
        payload = self.to_dict()
        validate(payload, "run_manifest")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read(cls, path) -> "RunManifest":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        validate(payload, "run_manifest")
        return cls(**payload)
