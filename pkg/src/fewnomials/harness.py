"""Built-in verification registry and random-instance sweeps."""
from __future__ import annotations

import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .bounds import DEFAULT_TABLE, BoundEngine, RuleTable, descartes_bound, replay
from .census import DEFAULT_GRID, GridSpec, census_1d, census_stabilized, noncompact_census_3d
from .core import build
from .errors import UnsupportedDimension
from .generators import instance_stream
from .geometry import newton_dimension

WITNESSES = {
    "f1": (build(2, [(1, [0, 2]), (-4, [3, 1]), (1, [8, 0]), (3, [4, 0])]), (1, 1, 0)),
    "f2": (build(2, [(1, [3, 0]), (-6, [2, 0]), (11, [1, 0]), (-6, [0, 0])]), (3, 0, 3)),
    "f3": (build(2, [(1, [1, 1]), (-2, [1, 0]), (-1, [0, 1]), (1, [0, 0])]), (2, 0, 2)),
}


@dataclass(frozen=True)
class Row:
    name: str
    expected: object
    observed: object
    passed: bool
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{tag}  {self.name}: expected {self.expected}, observed {self.observed}{extra}"


def _bound_row(name, result, expected, reference):
    ok_replay = replay(result, reference)
    detail = "" if ok_replay else "trace replay failed"
    return Row(name, expected, result.value, result.value == expected and ok_replay, detail)


def verify_paper(witnesses=None, table: RuleTable = DEFAULT_TABLE,
                 grid: GridSpec = DEFAULT_GRID, reference: RuleTable = DEFAULT_TABLE) -> list:
    """Recompute the registered witness censuses and bound values.

    Bound traces are computed with ``table`` and replayed against
    ``reference``, so a tampered table shows up as a replay failure.
    """
    rows = []
    for name, (f, expected) in (WITNESSES if witnesses is None else witnesses).items():
        c = census_stabilized(f, grid)
        rows.append(Row(f"census {name}", expected, c.counts(),
                        c.counts() == tuple(expected) and c.converged,
                        "" if c.converged else "not converged"))

    eng = BoundEngine(table, special_cases=True)
    legacy = BoundEngine(table, special_cases=False)
    rows.append(_bound_row("K'(2,4) best", eng.kprime(2, 4), 5, reference))
    rows.append(_bound_row("K'(2,4) Khovanski", eng.khovanski(2, 4), 216, reference))
    rows.append(_bound_row("K'(2,5) Khovanski", eng.khovanski(2, 5), 5184, reference))
    rows.append(_bound_row("P(2,4) explicit", eng.explicit_total(2, 4), 432, reference))
    rows.append(_bound_row("P(2,5) explicit", eng.explicit_total(2, 5), 10368, reference))
    rows.append(_bound_row("P(2,4) legacy chain", legacy.p(2, 4), 10, reference))
    rows.append(_bound_row("P_non(3,5) legacy chain", legacy.p_non(3, 5), 10384, reference))
    for n in range(1, 11):
        rows.append(_bound_row(f"P({n},4)", eng.p(n, 4), 3, reference))
    rows.append(_bound_row("Non(3,5) slices", eng.slices(3, 5)[0], 18, reference))
    rows.append(_bound_row("Non(3,5) refined slices", eng.slices(3, 5, refine=True)[0], 12,
                           reference))
    return rows


# --------------------------------------------------------------------------
# random sweeps


def _source(result) -> str:
    top = result.trace[-1]
    return f"{top.rule}:{top.quantity}({top.n},{top.m})"


def census_row(job):
    """One report row; top-level so that worker processes can run it."""
    ident, f, grid, special_cases = job
    eng = BoundEngine(DEFAULT_TABLE, special_cases)
    n, m = f.nvars, f.m
    d = newton_dimension(f)
    row = {"instance": ident, "n": n, "m": m, "newton_dim": d}
    if n == 1:
        c = census_1d(f, grid)
        b = descartes_bound(f)
        row.update(tot=c.tot, comp=c.comp, non=c.non, bound=b, bound_source="descartes",
                   violation=c.tot > b, converged=c.converged)
    elif n == 2:
        c = census_stabilized(f, grid)
        res = eng.by_dimension(n, m, d)
        over = c.tot > res.value
        if res.implies:
            over = over or c.comp > res.implies["Comp"] or c.non > res.implies["Non"]
        row.update(tot=c.tot, comp=c.comp, non=c.non, bound=res.value,
                   bound_source=_source(res), violation=over, converged=c.converged)
    else:
        sc = noncompact_census_3d(f, grid)
        res = eng.non_fulldim(n, m, conditional=special_cases)
        row.update(tot="", comp="", non=sc.estimate, bound=res.value,
                   bound_source=_source(res) + " (harness estimate)",
                   violation=sc.estimate > res.value, converged=sc.converged)
    return row


def worker_count() -> int:
    cap = os.environ.get("FEWNOMIAL_THREADS")
    cpus = os.cpu_count() or 1
    if cap:
        try:
            return max(1, min(cpus, int(cap)))
        except ValueError:
            pass
    return cpus


def random_census(n: int, m: int, count: int, seed: int, grid: GridSpec = DEFAULT_GRID,
                  special_cases: bool = True, workers: int | None = None) -> list:
    """Rows for ``count`` random instances, ordered by instance id.

    Three-variable sweeps draw full-dimensional supports only, since the
    slice harness needs them.
    """
    if n not in (1, 2, 3):
        raise UnsupportedDimension(f"random census supports n in 1..3, got {n}")
    if m < 2:
        raise ValueError("need at least two terms")
    fs = instance_stream(seed, n, m, count, full_dimensional=(n == 3))
    jobs = [(i, f, grid, special_cases) for i, f in enumerate(fs)]
    workers = worker_count() if workers is None else workers
    if workers <= 1 or count <= 1:
        return [census_row(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(census_row, jobs, chunksize=max(1, count // (4 * workers))))


def echo_violations(rows, stream=None):
    stream = sys.stderr if stream is None else stream
    for r in rows:
        if r["violation"]:
            print("violation: " + ",".join(str(r[k]) for k in r), file=stream)
