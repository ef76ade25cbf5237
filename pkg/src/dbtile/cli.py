"""Command-line entry point: ``dbtile <command> ...``.

Data goes to stdout, diagnostics to stderr. Exit status is 0 on success,
2 when a tile or tiling fails validation and 1 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction

from . import asymptotics, tilefile
from .graphs import Kind, build_host, latin_square, parse_kind, to_dot
from .stratification import TileGraph, TileStructureError, validate_tile
from .tilesearch import exact_optimal_tile, greedy_tile, lower_bound, score_tile
from .tiling import (
    ObstructionError,
    TilingParameterError,
    build_tiling,
    dumps_tiling,
    export_netlist,
    loads_tiling,
    tiling_to_dot,
    verify_tiling,
)

log = logging.getLogger("dbtile")

THREADS_ENV = "DBTILE_THREADS"
EXIT_OK, EXIT_USAGE, EXIT_INVALID = 0, 1, 2


class UsageError(Exception):
    pass


class ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def int_range(text: str) -> list[int]:
    """``"2-6"``, ``"2,4,8"`` or a single integer."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return out


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _host(args):
    kind = parse_kind(args.kind)
    if kind.generalized:
        if args.V is None:
            raise UsageError(f"--kind {kind.value} needs -V")
        return build_host(kind, args.K, args.V)
    if args.N is None:
        raise UsageError(f"--kind {kind.value} needs -N")
    return build_host(kind, args.K, args.N)


def _make_tile(args, K: int, generator: str, M: int) -> TileGraph:
    if generator == "score":
        return score_tile(K, M)
    if generator == "greedy":
        return greedy_tile(K, M, seed=args.seed, restarts=args.restarts, threads=args.threads)
    if generator == "exact":
        res = exact_optimal_tile(K, M, level_range=args.level_range, budget_seconds=args.budget_seconds)
        print(f"status={res.status.value} nodes={res.nodes} seconds={res.seconds:.2f}", file=sys.stderr)
        return res.tile
    raise UsageError(f"unknown tile generator {generator!r}")


def _resolve_tile(args, K: int) -> TileGraph:
    spec = args.tile
    head, sep, tail = spec.partition(":")
    if sep and head in ("score", "exact", "greedy"):
        return _make_tile(args, K, head, int(tail))
    tile = tilefile.load(spec)
    if tile.K != K:
        raise UsageError(f"tile file {spec} has K={tile.K}, host has K={K}")
    return tile


# ---------------------------------------------------------------------------
# commands


def cmd_graph(args) -> int:
    host = _host(args)
    if args.format == "report":
        _emit(f"{host} kind={host.kind.value} K={host.K} V={host.V} F={host.F} N={host.N} edges={host.n_edges}\n",
              args.output)
    else:
        _emit(to_dot(host), args.output)
    return EXIT_OK


def cmd_tile(args) -> int:
    tile = _make_tile(args, args.K, args.generator, args.M)
    report = validate_tile(tile)
    if args.format == "report":
        _emit(report.summary() + "\n", args.output)
    else:
        _emit(tilefile.dumps(tile), args.output)
        out = sys.stdout if args.output not in (None, "-") else sys.stderr
        print(report.summary(), file=out)
    return EXIT_OK if report.certified else EXIT_INVALID


def cmd_validate(args) -> int:
    try:
        tile = tilefile.loads(_read(args.path))
        report = validate_tile(tile)
    except (tilefile.TileFileError, TileStructureError) as exc:
        print(f"invalid tile: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(report.summary())
    if report.witness is not None:
        print(f"witness {report.witness}", file=sys.stderr)
    return EXIT_OK if report.certified else EXIT_INVALID


def cmd_bound(args) -> int:
    print(lower_bound(args.K, args.M).summary())
    return EXIT_OK


def cmd_tiling_build(args) -> int:
    host = _host(args)
    tile = _resolve_tile(args, host.K)
    latin = latin_square(args.latin, host.K)
    try:
        t = build_tiling(host, tile, latin, force=args.force)
    except ObstructionError as exc:
        print(f"obstruction: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.format == "dot":
        _emit(tiling_to_dot(t), args.output)
    elif args.format == "netlist":
        _emit(export_netlist(t), args.output)
    else:
        _emit(dumps_tiling(t), args.output)
    return EXIT_OK


def cmd_tiling_verify(args) -> int:
    report = verify_tiling(loads_tiling(_read(args.path)))
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_tiling_netlist(args) -> int:
    t = loads_tiling(_read(args.path))
    _emit(export_netlist(t), args.output)
    return EXIT_OK


def cmd_table_score(args) -> int:
    rows = asymptotics.score_table(args.K_range, args.M_range)
    _emit(asymptotics.score_table_csv(rows), args.output)
    return EXIT_OK


def cmd_table_optimal(args) -> int:
    lines = [asymptotics.CSV_HEADER + ",status"]
    for K in args.K_range:
        for M in args.M_range:
            res = exact_optimal_tile(K, M, level_range=args.level_range, budget_seconds=args.budget_seconds)
            row = asymptotics.ScoreRow(K, M, res.tile.n_edges, res.tile.broken)
            lines.append(f"{K},{M},{row.internal},{row.broken},{row.fraction:.8f},{2 / M:.8f},"
                         f"{row.bound_fraction:.8f},{res.status.value}")
            print(f"K={K} M={M} edges={row.internal} {res.status.value} {res.seconds:.2f}s", file=sys.stderr)
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_ideal_exact(args) -> int:
    M, T = args.M, args.T
    partial = asymptotics.partial_break_sum(M, T)
    tail = Fraction(2, T + 2)
    exact = asymptotics.exact_break_frequency(M)
    ok = partial + tail == exact
    print(f"M={M} T={T} partial={partial} tail={tail} exact={exact} identity={str(ok).lower()}")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_ideal_simulate(args) -> int:
    try:
        res = asymptotics.simulate_ideal(args.M, args.steps, seed=args.seed)
    except asymptotics.TieError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    print(res.summary())
    return EXIT_OK


def cmd_series(args) -> int:
    rows = asymptotics.asymptote_series(args.K, args.M_range)
    _emit(asymptotics.series_tsv(rows), args.output)
    if args.K != 2:
        print("note: the log-corrected column is a heuristic outside K=2", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_search(p):
    p.add_argument("--budget-seconds", type=float, default=60.0, help="exact search time budget")
    p.add_argument("--level-range", type=_positive, default=None, help="exact search level span L (default 2M+1)")
    p.add_argument("--seed", type=int, default=0, help="greedy seed")
    p.add_argument("--restarts", type=_positive, default=8, help="greedy restarts")


def _add_host(p):
    p.add_argument("--kind", default="debruijn", choices=[k.value for k in Kind], help="host family")
    p.add_argument("-K", type=int, required=True, help="degree")
    p.add_argument("-N", type=int, help="word length (Kautz: diameter)")
    p.add_argument("-V", type=int, help="vertex count for the generalized kinds")


def build_parser() -> ArgParser:
    parser = ArgParser(prog="dbtile", description="Tilings of de Bruijn and Kautz graphs.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr")
    parser.add_argument("--threads", type=_positive, default=_default_threads(),
                        help=f"worker threads (default ${THREADS_ENV} or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph", help="build a host graph")
    _add_host(p)
    p.add_argument("--format", choices=["dot", "report"], default="dot")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("tile", help="generate a tile")
    p.add_argument("generator", choices=["score", "exact", "greedy"])
    p.add_argument("-K", type=int, required=True)
    p.add_argument("-M", type=int, required=True)
    p.add_argument("--format", choices=["tilefile", "report"], default="tilefile")
    p.add_argument("-o", "--output")
    _add_search(p)
    p.set_defaults(func=cmd_tile)

    p = sub.add_parser("validate-tile", help="check a tile file")
    p.add_argument("path", nargs="?", default="-")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bound", help="lower bound on broken edges")
    p.add_argument("-K", type=int, required=True)
    p.add_argument("-M", type=int, required=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("tiling", help="build, verify or export tilings")
    tsub = p.add_subparsers(dest="action", required=True)
    b = tsub.add_parser("build")
    _add_host(b)
    b.add_argument("--tile", required=True, help="score:M, exact:M, greedy:M or a tile file")
    b.add_argument("--latin", default="f1", help="f1, f2 or a file with a K x K table")
    b.add_argument("--force", action="store_true", help="try tiles with loops higher than M")
    b.add_argument("--format", choices=["dump", "dot", "netlist"], default="dump")
    b.add_argument("-o", "--output")
    _add_search(b)
    b.set_defaults(func=cmd_tiling_build)
    b = tsub.add_parser("verify")
    b.add_argument("path", nargs="?", default="-")
    b.set_defaults(func=cmd_tiling_verify)
    b = tsub.add_parser("netlist")
    b.add_argument("path", nargs="?", default="-")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_tiling_netlist)

    p = sub.add_parser("table", help="CSV tables of internal and broken edges")
    tsub = p.add_subparsers(dest="which", required=True)
    b = tsub.add_parser("score")
    b.add_argument("--K-range", type=int_range, default=int_range("2-5"))
    b.add_argument("--M-range", type=int_range, default=int_range("2-6"))
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_table_score)
    b = tsub.add_parser("optimal")
    b.add_argument("--K-range", type=int_range, default=int_range("2"))
    b.add_argument("--M-range", type=int_range, default=int_range("2-3"))
    b.add_argument("-o", "--output")
    _add_search(b)
    b.set_defaults(func=cmd_table_optimal)

    p = sub.add_parser("ideal", help="idealized break-frequency model")
    tsub = p.add_subparsers(dest="which", required=True)
    b = tsub.add_parser("exact")
    b.add_argument("-M", type=_positive, required=True)
    b.add_argument("-T", type=int, default=10_000, help="last term of the partial sum")
    b.set_defaults(func=cmd_ideal_exact)
    b = tsub.add_parser("simulate")
    b.add_argument("-M", type=_positive, required=True)
    b.add_argument("--steps", type=int, default=1_000_000)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_ideal_simulate)

    p = sub.add_parser("series", help="TSV broken-fraction series against asymptotes")
    p.add_argument("-K", type=int, default=2)
    p.add_argument("--M-range", type=int_range, default=int_range("2-20"))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_series)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "T", None) is not None and args.T < args.M:
        parser.error("-T must be >= -M")
    try:
        return args.func(args)
    except (tilefile.TileFileError, TileStructureError) as exc:
        print(f"dbtile: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (UsageError, TilingParameterError, ValueError, OSError) as exc:
        print(f"dbtile: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
