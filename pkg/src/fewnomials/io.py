"""Flat-file formats: fewnomial files, contour exports and CSV reports.

A fewnomial file looks like::

    # f3
    fewnomial 2 4
    1   0 0
    -2  1 0
    -1  0 1
    1   1 1

Line 1 (after comments and blank lines) is the header, then one line per
term holding the coefficient and the ``nvars`` exponents.
"""
from __future__ import annotations

import csv
import io as _io
from pathlib import Path

import numpy as np

from .core import Fewnomial, build
from .errors import (
    EmptyAfterRegroup,
    FewnomialSyntaxError,
    FileZeroCoefficient,
    InconsistentHeader,
)

REPORT_COLUMNS = ("instance", "n", "m", "newton_dim", "tot", "comp", "non",
                  "bound", "bound_source", "violation", "converged")


def _number(token, lineno):
    try:
        return float(token)
    except ValueError:
        raise FewnomialSyntaxError(f"not a number: {token!r}", lineno) from None


def parse_fewnomial(text: str) -> Fewnomial:
    header = None
    raw = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].split()
        if not body:
            continue
        if header is None:
            if len(body) != 3 or body[0] != "fewnomial":
                raise FewnomialSyntaxError("expected header 'fewnomial <nvars> <nterms>'", lineno)
            try:
                nvars, nterms = int(body[1]), int(body[2])
            except ValueError:
                raise FewnomialSyntaxError("header counts must be integers", lineno) from None
            if nvars < 1 or nterms < 0:
                raise InconsistentHeader("header counts out of range", lineno)
            header = (nvars, nterms, lineno)
            continue
        nvars = header[0]
        if len(body) != nvars + 1:
            raise FewnomialSyntaxError(
                f"expected {nvars + 1} numbers, found {len(body)}", lineno)
        vals = [_number(t, lineno) for t in body]
        if vals[0] == 0:
            raise FileZeroCoefficient("coefficient is zero", lineno)
        raw.append((vals[0], vals[1:]))
    if header is None:
        raise FewnomialSyntaxError("missing header", 1)
    nvars, nterms, hline = header
    if nterms == 0 or len(raw) != nterms:
        raise InconsistentHeader(
            f"header announces {nterms} terms, found {len(raw)}", hline)
    try:
        return build(nvars, raw)
    except EmptyAfterRegroup as exc:
        raise InconsistentHeader(str(exc), hline) from None


def parse_fewnomial_file(path) -> Fewnomial:
    return parse_fewnomial(Path(path).read_text())


def _g17(v) -> str:
    s = format(float(v), ".17g")
    return "0" if s == "-0" else s


def format_fewnomial(f: Fewnomial, comment: str | None = None) -> str:
    """Canonical text form; reparses to an equal fewnomial."""
    lines = [f"# {comment}"] if comment else []
    lines.append(f"fewnomial {f.nvars} {f.m}")
    for t in f.terms:
        lines.append(" ".join(_g17(v) for v in (t.coefficient, *t.exponent)))
    return "\n".join(lines) + "\n"


def write_fewnomial_file(f: Fewnomial, path, comment=None):
    Path(path).write_text(format_fewnomial(f, comment))


def format_contours(contours) -> str:
    out = []
    for c in contours:
        kind = "compact" if c.compact else "noncompact"
        pts = " ".join(f"{_g17(p[0])},{_g17(p[1])}" for p in np.asarray(c.points))
        out.append(f"component {c.component} {kind}: {pts}")
    return "".join(line + "\n" for line in out)


def parse_contours(text: str):
    """Inverse of :func:`format_contours`: list of ``(id, compact, points)``."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        head, _, body = line.partition(":")
        parts = head.split()
        if len(parts) != 3 or parts[0] != "component" or parts[2] not in ("compact", "noncompact"):
            raise FewnomialSyntaxError("bad contour header", lineno)
        pts = [tuple(_number(v, lineno) for v in pair.split(",")) for pair in body.split()]
        out.append((int(parts[1]), parts[2] == "compact", np.array(pts).reshape(-1, 2)))
    return out


def format_report(rows) -> str:
    """CSV text with the fixed :data:`REPORT_COLUMNS`."""
    buf = _io.StringIO()
    w = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: row[k] for k in REPORT_COLUMNS})
    return buf.getvalue()
