"""Command-line front end.

Commands: sieve, sum, abel, claim-run, claim-list, run-all.  Stdout is
machine-readable only (CSV or JSON); anything human goes to stderr.
Exit codes: 0 success (no violated verdicts), 1 a claim was violated,
2 usage error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import claims
from .asymptotics import VIOLATED, report_to_dict, report_to_json, reports_to_json
from .errors import (
    DomainError,
    RangeError,
    ShapeError,
    SizingError,
    UnknownClaimError,
    UsageError,
)
from .sieves import DEFAULT_SEGMENT_SIZE, build_named_table
from .summation import (
    CheckpointGrid,
    abel_decompose,
    format_number,
    partial_sums,
    weighted_sums,
)

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="absum",
        description="Exact summatory functions, Abel decomposition, claim checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, nmax_default=None):
        p.add_argument("--nmax", type=int, default=nmax_default)
        p.add_argument("--segment-size", type=int, default=DEFAULT_SEGMENT_SIZE)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--out", default=None)

    def grid_flags(p):
        p.add_argument("--grid", type=int, default=None, metavar="N",
                       help="number of geometric checkpoints")
        p.add_argument("--at", default=None, metavar="X1,X2,...",
                       help="explicit checkpoint list")

    p = sub.add_parser("sieve", help="build a table and export it")
    p.add_argument("--function", required=True)
    common(p)

    p = sub.add_parser("sum", help="summatory values at checkpoints")
    p.add_argument("--function", required=True)
    p.add_argument("--k", type=int, default=0)
    grid_flags(p)
    common(p)

    p = sub.add_parser("abel", help="boundary/integral/total decomposition")
    p.add_argument("--function", required=True)
    grid_flags(p)
    common(p)

    p = sub.add_parser("claim-run", help="run one claim from the catalog")
    p.add_argument("claim_id")
    grid_flags(p)
    common(p)

    p = sub.add_parser("claim-list", help="list the claim catalog")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("run-all", help="run the whole catalog")
    grid_flags(p)
    common(p)
    return parser


def _parse_grid(args, n_max: int) -> CheckpointGrid:
    if getattr(args, "at", None):
        try:
            points = tuple(float(tok) for tok in args.at.split(","))
        except ValueError:
            raise UsageError(f"malformed --at list: {args.at!r}") from None
        return CheckpointGrid(points)
    count = getattr(args, "grid", None) or claims.DEFAULT_GRID_POINTS
    return CheckpointGrid.geometric(min(claims.DEFAULT_GRID_X_MIN, n_max), n_max, count)


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _series_csv(grid, values) -> str:
    lines = ["x,value"]
    for x, v in zip(grid.points, values):
        lines.append(f"{format_number(x)},{format_number(v)}")
    return "\n".join(lines) + "\n"


def _check_nmax(n_max) -> int:
    if n_max is None:
        return claims.DEFAULT_N_MAX
    if n_max < 2:
        raise UsageError(f"--nmax must be >= 2, got {n_max}")
    return n_max


def _cmd_sieve(args) -> int:
    n_max = _check_nmax(args.nmax)
    table = build_named_table(args.function, n_max, args.segment_size, args.threads)
    values = table.values.tolist()
    if (args.format or "csv") == "csv":
        lines = ["x,value"]
        lines.extend(f"{n},{format_number(v)}" for n, v in enumerate(values, start=1))
        _emit("\n".join(lines) + "\n", args.out)
    else:
        payload = {
            "name": table.name,
            "n_max": table.n_max,
            "kind": table.kind,
            "values": values,
        }
        _emit(json.dumps(payload) + "\n", args.out)
    return EXIT_OK


def _cmd_sum(args) -> int:
    n_max = _check_nmax(args.nmax)
    table = build_named_table(args.function, n_max, args.segment_size, args.threads)
    grid = _parse_grid(args, n_max)
    if args.k == 0:
        series = partial_sums(table, grid)
    else:
        series = weighted_sums(table, args.k, grid)
    if (args.format or "csv") == "csv":
        _emit(_series_csv(grid, series.sums), args.out)
    else:
        payload = {
            "source": series.source,
            "weight_exponent": series.weight_exponent,
            "grid": list(grid.points),
            "sums": series.sums,
        }
        _emit(json.dumps(payload) + "\n", args.out)
    return EXIT_OK


def _cmd_abel(args) -> int:
    n_max = _check_nmax(args.nmax)
    table = build_named_table(args.function, n_max, args.segment_size, args.threads)
    grid = _parse_grid(args, n_max)
    dec = abel_decompose(table, grid)
    if (args.format or "csv") == "csv":
        lines = ["x,boundary,integral,total"]
        for x, b, i, t in zip(grid.points, dec.boundary, dec.integral, dec.total):
            lines.append(
                f"{format_number(x)},{format_number(b)},"
                f"{format_number(i)},{format_number(t)}"
            )
        _emit("\n".join(lines) + "\n", args.out)
    else:
        payload = {
            "grid": list(grid.points),
            "boundary": dec.boundary,
            "integral": dec.integral,
            "total": dec.total,
        }
        _emit(json.dumps(payload) + "\n", args.out)
    return EXIT_OK


def _cmd_claim_run(args) -> int:
    n_max = _check_nmax(args.nmax)
    claims.get_claim(args.claim_id)
    grid = None
    if getattr(args, "at", None) or getattr(args, "grid", None):
        grid = _parse_grid(args, n_max)
    print(f"running {args.claim_id} at n_max={n_max}", file=sys.stderr)
    report = claims.run_claim(
        args.claim_id, n_max, grid,
        segment_size=args.segment_size, threads=args.threads,
    )
    _emit(report_to_json(report) + "\n", args.out)
    return EXIT_VIOLATED if report.verdict == VIOLATED else EXIT_OK


def _cmd_claim_list(args) -> int:
    catalog = claims.list_claims()
    if (args.format or "json") == "json":
        payload = [
            {"claim_id": s.claim_id, "statement": s.statement, "tables": list(s.tables)}
            for s in catalog
        ]
        _emit(json.dumps(payload) + "\n", args.out)
    else:
        lines = ["claim_id,statement"]
        for s in catalog:
            lines.append(f'{s.claim_id},"{s.statement}"')
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_run_all(args) -> int:
    n_max = _check_nmax(args.nmax)
    grid = None
    if getattr(args, "at", None) or getattr(args, "grid", None):
        grid = _parse_grid(args, n_max)
    reports = claims.run_all(
        n_max, grid,
        segment_size=args.segment_size, threads=args.threads,
        progress=lambda cid: print(f"running {cid}", file=sys.stderr),
    )
    _emit(reports_to_json(reports) + "\n", args.out)
    if any(r.verdict == VIOLATED for r in reports):
        return EXIT_VIOLATED
    return EXIT_OK


_COMMANDS = {
    "sieve": _cmd_sieve,
    "sum": _cmd_sum,
    "abel": _cmd_abel,
    "claim-run": _cmd_claim_run,
    "claim-list": _cmd_claim_list,
    "run-all": _cmd_run_all,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the diagnostic
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, UnknownClaimError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"absum: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (RangeError, DomainError, ShapeError, SizingError, ArithmeticError) as exc:
        print(f"absum: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
