"""Command line entry point (``fewnomials``)."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bounds
from .census import DEFAULT_GRID, GridSpec, census
from .errors import FewnomialError
from .geometry import hull_and_classify, newton_dimension
from .harness import echo_violations, random_census, verify_paper
from .io import REPORT_COLUMNS, format_contours, format_fewnomial, format_report, parse_fewnomial_file
from .transform import normalize_to_standard_form, restrict_to_curve

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

REPORT_HELP = (
    "CSV columns: " + ", ".join(REPORT_COLUMNS) + ".  For n = 3 the 'non' column holds the "
    "slice estimate and 'tot'/'comp' are empty.  Exponents are drawn from [-5, 5]; scale "
    "--window along if you change that range.  Violation rows are also written to stderr.  "
    "FEWNOMIAL_THREADS caps the number of worker processes."
)


def _grid(args) -> GridSpec:
    return GridSpec(args.window, args.res, args.doublings)


def _add_grid(p):
    p.add_argument("--window", type=float, default=DEFAULT_GRID.half_width,
                   help="half-width W of the log window [-W, W]^n")
    p.add_argument("--res", type=int, default=DEFAULT_GRID.resolution,
                   help="cells per axis (power of two, at least 16)")
    p.add_argument("--doublings", type=int, default=DEFAULT_GRID.max_doublings,
                   help="maximum number of window doublings")


def cmd_verify_paper(args) -> int:
    rows = verify_paper()
    for r in rows:
        print(r.line())
    failed = sum(not r.passed for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_random_census(args) -> int:
    rows = random_census(args.n, args.m, args.count, args.seed, _grid(args),
                         special_cases=not args.no_special_cases)
    text = format_report(rows)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    echo_violations(rows)
    return EXIT_FAIL if any(r["violation"] for r in rows) else EXIT_OK


def cmd_bound(args) -> int:
    res = bounds.bound(args.quantity, args.n, args.m, special_cases=not args.no_special_cases)
    print(res.value)
    print(res.describe())
    return EXIT_OK


def cmd_newton(args) -> int:
    f = parse_fewnomial_file(args.file)
    print(f"newton_dimension {newton_dimension(f)}")
    if f.nvars == 2:
        summary, quad = hull_and_classify(f)
        for v, sgn in zip(summary.hull_vertices, summary.vertex_signs):
            print(f"vertex {' '.join(format(a, 'g') for a in v)} sign {'+' if sgn > 0 else '-'}")
        for pnt in summary.interior_or_edge_points:
            print(f"other {' '.join(format(a, 'g') for a in pnt)}")
        print(f"quadrilateral {quad.is_quadrilateral}")
        print(f"parallel_opposite_sides {quad.has_parallel_opposite_sides}")
        print(f"alternating_signs {quad.adjacent_signs_opposite}")
        print(f"normal_form_hypotheses {quad.equiv_hypotheses_met}")
    return EXIT_OK


def cmd_normalize(args) -> int:
    nf = normalize_to_standard_form(parse_fewnomial_file(args.file))
    print(f"A {nf.A!r}")
    print(f"c {nf.c!r}")
    print(f"d {nf.d!r}")
    for row in np.asarray(nf.transform.matrix):
        print("matrix " + " ".join(repr(float(v)) for v in row))
    print("rescale " + " ".join(repr(float(v)) for v in nf.rescale))
    print(f"pivot {nf.pivot_constant}")
    return EXIT_OK


def cmd_restrict(args) -> int:
    f = parse_fewnomial_file(args.file)
    r = restrict_to_curve(f, args.point, args.direction)
    sys.stdout.write(format_fewnomial(r.restricted))
    return EXIT_OK


def cmd_count(args) -> int:
    f = parse_fewnomial_file(args.file)
    c = census(f, _grid(args), **({"with_contours": True} if f.nvars == 2 else {}))
    print(f"tot {c.tot} comp {c.comp} non {c.non} converged {c.converged} "
          f"window {c.window_used.half_width:g} res {c.window_used.resolution}")
    if args.contours and f.nvars == 2:
        Path(args.contours).write_text(format_contours(c.contours))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fewnomials",
        description="Component counts and bounds for real zero sets of fewnomials.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-paper", help="recompute the built-in witness counts and bounds")
    p.set_defaults(func=cmd_verify_paper)

    p = sub.add_parser("random-census", help="census of random instances", epilog=REPORT_HELP)
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.add_argument("--no-special-cases", action="store_true")
    _add_grid(p)
    p.set_defaults(func=cmd_random_census)

    p = sub.add_parser("bound", help="best bound with its derivation")
    p.add_argument("quantity", choices=["P", "P_comp", "P_non", "Kprime",
                                        "Tot_fulldim", "Non_fulldim"])
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--no-special-cases", action="store_true")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("newton", help="Newton polytope summary")
    p.add_argument("file")
    p.set_defaults(func=cmd_newton)

    p = sub.add_parser("normalize", help="normal form 1 - x1 - x2 + A x1^c x2^d")
    p.add_argument("file")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("restrict", help="restriction to the curve x^u = p^u")
    p.add_argument("file")
    p.add_argument("--point", type=float, nargs="+", required=True)
    p.add_argument("--direction", type=float, nargs="+", required=True)
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("count", help="stabilised census of one fewnomial")
    p.add_argument("file")
    p.add_argument("--contours", help="write contour polylines here (two variables)")
    _add_grid(p)
    p.set_defaults(func=cmd_count)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FewnomialError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
