"""Command-line interface.

Exit codes: 0 pass, 1 rule violation or failed reproduction, 2 usage or input
error, 3 node budget exceeded. Diagnostics go to stderr; stdout carries only
results, so it can be piped between subcommands.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Optional, Sequence

import jsonschema

from latinforge import construct, repro
from latinforge.formats import (
    ParseError,
    RunManifest,
    SquareDocument,
    format_square,
    parse_square,
    squares_digest,
    validate,
    write_catalog,
)
from latinforge.grid import NumberLine, Piece, SquareError, Topology
from latinforge.rules import (
    AntiPiece,
    Consecutive,
    Latin,
    NonConsecutive,
    RequirePiece,
    RuleError,
    RuleSet,
    StrictPiece,
    verify,
)
from latinforge.search import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    Engine,
    Mode,
    OracleTooCostly,
    SearchOptions,
    count_nc_permutations,
    enumerate_squares,
    nc_permutations,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
BUDGET_ENV = "LATINFORGE_BUDGET"


GENERATORS = ("cyclic", "modular-consecutive", "nc-king-odd", "nc-king-even", "anti-queen",
              "anti-king-not-queen", "anti-knight", "bishop-even", "king-even", "bishop-pq")


class UsageError(Exception):
    pass


# --- argument parsing -------------------------------------------------------

def _rule_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("rules")
    g.add_argument("--latin", action="store_true",
                   help="rows and columns are permutations (the default)")
    g.add_argument("--no-latin", action="store_true", help="drop the Latin rule")
    g.add_argument("--nonconsecutive", nargs="?", const="orthogonal",
                   choices=("orthogonal", "king"), metavar="king",
                   help="no consecutive neighbours; '=king' adds diagonal neighbours")
    g.add_argument("--consecutive", action="store_true",
                   help="orthogonal neighbours are always consecutive")
    g.add_argument("--toroidal", action="store_true",
                   help="wrap every adjacency and piece move around the board")
    g.add_argument("--modular", action="store_true", help="1 and n count as consecutive")
    g.add_argument("--anti", action="append", default=[],
                   choices=("knight", "king", "queen", "bishop"))
    g.add_argument("--require", action="append", default=[],
                   choices=("knight", "king", "bishop", "queen"))
    g.add_argument("--strict", action="append", default=[],
                   choices=("knight", "bishop", "king"))
    return p


def _output_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    return p


def _search_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("search")
    g.add_argument("-n", "--order", type=int, required=True)
    g.add_argument("--fix-first-row", nargs="?", const="identity", metavar="PERM",
                   help="fix the first row (identity, or e.g. 13524 / 1,3,5,2,4)")
    g.add_argument("--limit", type=int)
    g.add_argument("--engine", choices=[e.value for e in Engine], default="pruned")
    g.add_argument("--budget", type=int, help=f"node budget (env {BUDGET_ENV})")
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--manifest", metavar="PATH", help="write a run manifest here")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latinforge",
                                     description="Constrained Latin squares.")
    sub = parser.add_subparsers(dest="command", required=True)
    rules, out, search = _rule_flags(), _output_flags(), _search_flags()

    p = sub.add_parser("check", parents=[rules, out], help="verify a square file")
    p.add_argument("file", nargs="?", default="-")

    p = sub.add_parser("gen", parents=[out], help="build a square by construction")
    p.add_argument("name", choices=GENERATORS)
    p.add_argument("-n", "--n", "--order", dest="n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--start", type=int, default=1)
    p.add_argument("--row-dir", type=int, choices=(1, -1), default=1)
    p.add_argument("--first-row", help="first row for 'cyclic', e.g. 13524")
    p.add_argument("--anti-king", action="store_true")

    for name, help_ in (("count", "count solutions"), ("list", "list solutions"),
                        ("earliest", "lexicographically earliest solution")):
        sub.add_parser(name, parents=[rules, search, out], help=help_)

    p = sub.add_parser("product", parents=[out], help="Kronecker product of two squares")
    p.add_argument("left")
    p.add_argument("right")

    p = sub.add_parser("perms", parents=[out], help="non-consecutive permutation counts")
    p.add_argument("-n", "--order", type=int, action="append",
                   help="order (repeatable); default 1..8")
    p.add_argument("--modular", action="store_true")
    p.add_argument("--cyclable", action="store_true")
    p.add_argument("--list", action="store_true", help="also list the permutations")

    p = sub.add_parser("repro", parents=[out], help="run the reproduction table")
    p.add_argument("names", nargs="*", help="rows to run (default: all)")
    p.add_argument("--list", action="store_true", help="list row names and exit")

    p = sub.add_parser("replay", help="re-run a manifest and compare the result")
    p.add_argument("manifest")
    return parser


def rules_from_args(args) -> RuleSet:
    topo = Topology.TOROIDAL if args.toroidal else Topology.FLAT
    line = NumberLine.MODULAR if args.modular else NumberLine.LINEAR
    out: list = []
    if args.latin and args.no_latin:
        raise UsageError("--latin and --no-latin are mutually exclusive")
    if not args.no_latin:
        out.append(Latin())
    if args.nonconsecutive:
        adjacency = Piece.KING if args.nonconsecutive == "king" else Piece.ORTHOGONAL_STEP
        out.append(NonConsecutive(adjacency, topo, line))
    if args.consecutive:
        out.append(Consecutive(topo, line))
    for flag, cls in (("anti", AntiPiece), ("require", RequirePiece), ("strict", StrictPiece)):
        for piece in getattr(args, flag):
            rule = cls(Piece(piece), topo)
            if rule not in out:
                out.append(rule)
    return RuleSet(tuple(out))


def _first_row(spec: Optional[str]):
    if spec is None or spec == "identity":
        return spec
    parts = spec.replace(",", " ").split()
    if len(parts) == 1:
        parts = list(parts[0])
    try:
        return tuple(int(v) for v in parts)
    except ValueError:
        raise UsageError(f"bad first row {spec!r}") from None


def _budget(args) -> int:
    if args.budget is not None:
        return args.budget
    env = os.environ.get(BUDGET_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{BUDGET_ENV}={env!r} is not an integer") from None
    return DEFAULT_BUDGET


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit_json(payload, schema: Optional[str] = None) -> None:
    if schema:
        validate(payload, schema)
    print(json.dumps(payload, sort_keys=True))


# --- subcommands ------------------------------------------------------------

def cmd_check(args) -> int:
    square = parse_square(_read(args.file))
    rules = rules_from_args(args)
    violations = verify(square, rules)
    if args.json:
        _emit_json({"pass": not violations, "order": square.order, "rules": rules.tokens(),
                    "violations": [v.to_dict() for v in violations]}, "check_report")
    elif violations:
        for v in violations:
            print(v)
        print(f"FAIL: {len(violations)} violation(s)")
    else:
        print(f"PASS {rules}")
    return EXIT_FAIL if violations else EXIT_OK


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"gen {args.name} needs {' '.join(missing)}")


def _gen(args):
    """Return ``(square, params)`` for the requested construction."""
    name = args.name
    if name == "bishop-pq":
        _need(args, "p", "q")
        return construct.bishop_odd_pq(construct.PQSpec(args.p, args.q)), {"p": args.p, "q": args.q}
    if name == "cyclic" and args.first_row:
        row = _first_row(args.first_row)
        _need(args, "k")
        return construct.cyclic_square(row, args.k), {"first_row": list(row), "k": args.k}
    _need(args, "n")
    n = args.n
    if name == "cyclic":
        _need(args, "k")
        return construct.cyclic_square(range(1, n + 1), args.k), {"n": n, "k": args.k}
    if name == "modular-consecutive":
        k = args.k if args.k is not None else 1
        if k not in (1, -1):
            raise UsageError("modular-consecutive needs --k 1 or --k -1")
        return (construct.modular_consecutive(n, args.start, args.row_dir, k),
                {"n": n, "start": args.start, "row_dir": args.row_dir, "k": k})
    if name == "nc-king-odd":
        return construct.nc_king_odd(n, args.anti_king), {"n": n, "anti_king": args.anti_king}
    if name == "nc-king-even":
        if args.k is None or args.m is None:
            k, m = construct.nc_king_even_params(n, args.anti_king)
        else:
            k, m = args.k, args.m
        return (construct.nc_king_even(n, k, m, args.anti_king),
                {"n": n, "k": k, "m": m, "anti_king": args.anti_king})
    if name == "anti-queen":
        k = args.k if args.k is not None else 2
        if not construct.anti_queen_shift_valid(n, k):
            raise UsageError(f"shift {k} does not give a toroidal anti-queen square of order {n}")
        return construct.cyclic_square(range(1, n + 1), k), {"n": n, "k": k}
    if name == "anti-king-not-queen":
        return (construct.anti_king_not_queen(n),
                {"n": n, "k": construct.anti_king_not_queen_shift(n)})
    simple = {"anti-knight": construct.anti_knight, "bishop-even": construct.bishop_even,
              "king-even": construct.king_even}
    return simple[name](n), {"n": n}


def cmd_gen(args) -> int:
    square, params = _gen(args)
    style = "json" if args.json else "ascii"
    sys.stdout.write(format_square(square, style, construction=args.name, parameters=params))
    return EXIT_OK


def _search(args, argv: Sequence[str]) -> int:
    n = args.order
    if n < 1:
        raise UsageError("-n must be positive")
    rules = rules_from_args(args)
    mode = {"count": Mode.COUNT, "list": Mode.COLLECT, "earliest": Mode.LEX_EARLIEST}[args.command]
    opts = SearchOptions(fix_first_row=_first_row(args.fix_first_row), limit=args.limit,
                         mode=mode, engine=Engine(args.engine), budget=_budget(args),
                         workers=max(1, args.threads))
    report = enumerate_squares(n, rules, opts)
    first = opts.first_row(n)

    if args.command == "list":
        if args.json:
            sys.stdout.write(write_catalog(report.squares, rules=rules.tokens()))
        else:
            print("\n\n".join(str(s) for s in report.squares))
    elif args.json:
        payload = {"command": args.command, "order": n, "rules": rules.tokens(),
                   "engine": opts.engine.value,
                   "fix_first_row": list(first) if first else None,
                   "count": report.count, "nodes": report.nodes_explored,
                   "wall_time": report.wall_time, "truncated": report.truncated}
        if args.command == "earliest":
            payload["square"] = (SquareDocument.from_square(report.squares[0]).to_dict()
                                 if report.squares else None)
        _emit_json(payload, "search_report")
    elif args.command == "count":
        print(report.count)
    elif report.squares:
        print(report.squares[0])
    else:
        print("none")

    if args.manifest:
        options = {"order": n, "fix_first_row": list(first) if first else None,
                   "limit": args.limit, "budget": opts.budget, "threads": opts.workers}
        RunManifest(command=args.command, argv=list(argv), rules=rules.tokens(),
                    options=options, engine=opts.engine.value, count=report.count,
                    digest=squares_digest(report.squares, report.count),
                    nodes=report.nodes_explored, wall_time=report.wall_time).write(args.manifest)
    if args.command == "earliest" and not report.squares:
        return EXIT_FAIL
    return EXIT_OK


def cmd_product(args) -> int:
    left, right = parse_square(_read(args.left)), parse_square(_read(args.right))
    square = construct.kronecker(left, right)
    sys.stdout.write(format_square(square, "json" if args.json else "ascii",
                                   construction="kronecker"))
    return EXIT_OK


def cmd_perms(args) -> int:
    orders = args.order or list(range(1, 9))
    if any(n < 1 for n in orders):
        raise UsageError("orders must be positive")
    line = NumberLine.MODULAR if args.modular else NumberLine.LINEAR
    counts = [{"n": n, "count": count_nc_permutations(n, line, args.cyclable)} for n in orders]
    perms = ([list(p) for n in orders for p in nc_permutations(n, line, args.cyclable)]
             if args.list else None)
    if args.json:
        payload = {"line": line.value, "cyclable_only": args.cyclable, "counts": counts}
        if perms is not None:
            payload["permutations"] = perms
        _emit_json(payload, "perms_report")
    else:
        print("n\tcount")
        for row in counts:
            print(f"{row['n']}\t{row['count']}")
        for p in perms or ():
            print("".join(map(str, p)) if len(p) < 10 else " ".join(map(str, p)))
    return EXIT_OK


def cmd_repro(args) -> int:
    if args.list:
        for c in repro.CHECKS + repro.EXTRA:
            print(f"{c.name}\t{c.title} (limit {c.limit:g}s)")
        return EXIT_OK
    try:
        checks = [repro.by_name(n) for n in args.names] if args.names else None
    except KeyError as exc:
        raise UsageError(f"unknown repro row {exc.args[0]!r}") from None
    outcomes = []
    for check in checks or repro.CHECKS + repro.EXTRA:
        outcome = repro.run(check)
        outcomes.append(outcome)
        if not args.json:
            print(outcome.line(), flush=True)
    passed = all(o.ok for o in outcomes)
    if args.json:
        _emit_json({"passed": passed,
                    "rows": [{"name": o.name, "passed": o.ok, "detail": o.detail,
                              "seconds": o.seconds} for o in outcomes]}, "repro_report")
    else:
        print(f"{sum(o.ok for o in outcomes)}/{len(outcomes)} rows passed")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_replay(args) -> int:
    try:
        manifest = RunManifest.read(args.manifest)
    except (OSError, ValueError, jsonschema.ValidationError) as exc:
        msg = getattr(exc, "message", exc)
        raise UsageError(f"cannot read manifest: {msg}") from None
    argv = [a for i, a in enumerate(manifest.argv)
            if a != "--manifest" and (i == 0 or manifest.argv[i - 1] != "--manifest")
            and not a.startswith("--manifest=")]
    args = build_parser().parse_args(argv)
    args.manifest = None
    rules = rules_from_args(args)
    opts = SearchOptions(
        fix_first_row=_first_row(args.fix_first_row), limit=args.limit,
        mode={"count": Mode.COUNT, "list": Mode.COLLECT,
              "earliest": Mode.LEX_EARLIEST}[args.command],
        engine=Engine(args.engine), budget=manifest.options.get("budget", DEFAULT_BUDGET),
        workers=max(1, args.threads))
    t0 = time.perf_counter()
    report = enumerate_squares(args.order, rules, opts)
    digest = squares_digest(report.squares, report.count)
    same = report.count == manifest.count and digest == manifest.digest
    status = "MATCH" if same else "MISMATCH"
    print(f"{status} count={report.count} (recorded {manifest.count}) "
          f"digest={digest[:12]} (recorded {manifest.digest[:12]}) "
          f"[{time.perf_counter() - t0:.2f}s]")
    return EXIT_OK if same else EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    handlers = {"check": cmd_check, "gen": cmd_gen, "product": cmd_product,
                "perms": cmd_perms, "repro": cmd_repro, "replay": cmd_replay}
    try:
        if args.command in ("count", "list", "earliest"):
            return _search(args, argv)
        return handlers[args.command](args)
    except BudgetExceeded as exc:
        print(f"latinforge: budget exceeded: {exc.nodes} nodes explored against a budget "
              f"of {exc.budget}; partial count {exc.partial_count} (not a result)",
              file=sys.stderr)
        return EXIT_BUDGET
    except ParseError as exc:
        print(f"latinforge: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, SquareError, RuleError, OracleTooCostly,
            construct.ConstructionError, ValueError) as exc:
        print(f"latinforge: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
