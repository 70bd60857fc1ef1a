"""Command-line surface.

Subcommands: analyze (one state file -> JSON report), sample (random
states -> s,c,m CSV), scan (random states -> classified grid CSV),
curves (reference curve table CSV), settings (optimal CHSH directions
for one state -> JSON).

A state file is a JSON document holding exactly one 4x4 matrix as a
nested array of [re, im] pairs, row-major, basis |00>, |01>, |10>, |11>.

Exit codes: 0 success, 2 usage or parse failure, 3 the input matrix is
not a valid density matrix (the message names the violated invariant).
CSV output uses 9 significant digits, '.' decimal separator, and '\\n'
line endings, and is byte-stable for fixed seed and flags.
"""

import argparse
import json
import sys

import numpy as np

from . import atlas, families, measures, qstate
from .atlas import CellClass, GridSpec
from .kernel import NoConvergence, NotHermitian, NotPSD
from .qstate import TraceNotOne
from .sampling import GENERATORS, SamplerConfig

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID_STATE = 3


class _ParseFailure(Exception):
    """Input document could not be turned into a 4x4 complex matrix."""


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def read_state_file(path: str) -> np.ndarray:
    """Parse a state file into a 4x4 complex matrix (no physics checks)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise _ParseFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _ParseFailure(f"{path} is not valid JSON: {exc}") from exc
    try:
        arr = np.asarray(doc, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise _ParseFailure(
            f"{path}: expected a 4x4 array of [re, im] pairs"
        ) from exc
    if arr.shape != (4, 4, 2):
        raise _ParseFailure(
            f"{path}: expected shape 4x4x2 ([re, im] pairs), got {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise _ParseFailure(f"{path}: matrix entries must be finite")
    return arr[..., 0] + 1j * arr[..., 1]


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _write_rows(out_path, header: str, rows) -> None:
    fh, close = _open_out(out_path)
    try:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")
    finally:
        if close:
            fh.close()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellplane",
        description=(
            "Two-qubit entanglement vs CHSH-violation numerics: analyze "
            "states, sample ensembles, and map the entropy-concurrence plane."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser(
        "analyze", help="report s, c, m, fidelity for one state file"
    )
    p_analyze.add_argument("path", help="JSON state file (4x4 of [re, im] pairs)")

    def add_sampler_flags(p):
        p.add_argument(
            "--gen",
            required=True,
            choices=GENERATORS,
            help="state generator",
        )
        p.add_argument(
            "-n", "--count", type=int, required=True, help="number of samples"
        )
        p.add_argument("--seed", type=int, default=0, help="stream seed (default 0)")
        p.add_argument(
            "--epsilon",
            type=float,
            default=None,
            help="boundary proximity scale; only valid with --gen boundary",
        )
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p_sample = sub.add_parser("sample", help="emit sampled (s, c, m) rows as CSV")
    add_sampler_flags(p_sample)

    p_scan = sub.add_parser(
        "scan", help="bin samples over the (s, c) plane and classify cells"
    )
    add_sampler_flags(p_scan)
    p_scan.add_argument(
        "--grid",
        default="100x100",
        help="grid resolution as SxC, e.g. 100x100 (default)",
    )
    p_scan.add_argument(
        "--threads",
        type=int,
        default=None,
        help="parallel workers for the measure pipeline; output is identical for any value",
    )

    p_curves = sub.add_parser(
        "curves", help="tabulate the reference curves over s in [0, 2/3]"
    )
    p_curves.add_argument(
        "--points", type=int, default=256, help="grid points (default 256)"
    )
    p_curves.add_argument("--out", default=None, help="output path (default stdout)")

    p_settings = sub.add_parser(
        "settings", help="optimal CHSH measurement directions for one state file"
    )
    p_settings.add_argument("path", help="JSON state file (4x4 of [re, im] pairs)")

    return parser


def _sampler_config(parser, args) -> SamplerConfig:
    if args.epsilon is not None and args.gen != "boundary":
        parser.error("--epsilon is only valid with --gen boundary")
    kwargs = {"seed": args.seed, "generator": args.gen, "count": args.count}
    if args.epsilon is not None:
        kwargs["epsilon"] = args.epsilon
    try:
        return SamplerConfig(**kwargs)
    except ValueError as exc:
        parser.error(str(exc))


def _cmd_analyze(args) -> int:
    mat = read_state_file(args.path)
    state = qstate.validate(mat)
    trip = measures.state_triple(state)
    report = {
        "s": trip.s,
        "c": trip.c,
        "m": trip.m,
        "fidelity": measures.fidelity(state),
        "violates": trip.m > 1.0,
        "bell_max": 2.0 * np.sqrt(max(trip.m, 0.0)),
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK


def _cmd_settings(args) -> int:
    mat = read_state_file(args.path)
    state = qstate.validate(mat)
    settings, value = measures.optimal_settings(state)
    report = {
        "a": list(settings.a),
        "a_prime": list(settings.a_prime),
        "b": list(settings.b),
        "b_prime": list(settings.b_prime),
        "value": value,
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK


def _cmd_sample(parser, args) -> int:
    from . import sampling

    config = _sampler_config(parser, args)

    def rows():
        for block in sampling.sample_blocks(config):
            trip = measures.batch_triples(block)
            for s, c, m in trip:
                yield f"{_fmt(s)},{_fmt(c)},{_fmt(m)}"

    _write_rows(args.out, "s,c,m", rows())
    return EXIT_OK


def _parse_grid(parser, text: str) -> GridSpec:
    parts = text.lower().split("x")
    if len(parts) != 2:
        parser.error(f"--grid expects SxC, e.g. 100x100; got {text!r}")
    try:
        s_bins, c_bins = int(parts[0]), int(parts[1])
        return GridSpec(s_bins=s_bins, c_bins=c_bins)
    except ValueError as exc:
        parser.error(f"--grid expects SxC, e.g. 100x100; got {text!r} ({exc})")


def _cmd_scan(parser, args) -> int:
    config = _sampler_config(parser, args)
    spec = _parse_grid(parser, args.grid)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be >= 1")
    grid = atlas.scan(config, spec, threads=args.threads)

    def rows():
        for cell in atlas.export_grid(grid):
            mn = "" if cell.min_m is None else _fmt(cell.min_m)
            mx = "" if cell.max_m is None else _fmt(cell.max_m)
            yield (
                f"{_fmt(cell.s_center)},{_fmt(cell.c_center)},"
                f"{cell.cell_class.value},{cell.n},{cell.n_violating},{mn},{mx}"
            )

    _write_rows(
        args.out, "s_center,c_center,class,n,n_violating,min_m,max_m", rows()
    )
    counts = grid.summary()
    print(
        "cells: "
        + " ".join(f"{cls.value}={counts[cls]}" for cls in CellClass),
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_curves(parser, args) -> int:
    if args.points < 2:
        parser.error("--points must be >= 2")
    grid = np.linspace(0.0, families.CURVE_DOMAIN_MAX, args.points)
    table = families.reference_curves(grid)

    def rows():
        for k in range(args.points):
            yield ",".join(
                _fmt(table[col][k])
                for col in ("s", "m_werner", "m_mems", "m_mvb", "c_werner", "c_mvb")
            )

    _write_rows(args.out, "s,m_werner,m_mems,m_mvb,c_werner,c_mvb", rows())
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "settings":
            return _cmd_settings(args)
        if args.command == "sample":
            return _cmd_sample(parser, args)
        if args.command == "scan":
            return _cmd_scan(parser, args)
        if args.command == "curves":
            return _cmd_curves(parser, args)
        parser.error(f"unknown command {args.command!r}")
    except _ParseFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # Covers malformed matrices that never reach physics validation
        # (wrong shape, non-finite entries) and bad config values.
        if isinstance(exc, (NotHermitian, NotPSD, TraceNotOne)):
            print(f"invalid state: {exc}", file=sys.stderr)
            return EXIT_INVALID_STATE
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoConvergence as exc:
        print(f"invalid state: {exc}", file=sys.stderr)
        return EXIT_INVALID_STATE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
