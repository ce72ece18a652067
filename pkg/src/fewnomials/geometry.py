"""Newton polytope dimension, planar hulls and the quadrilateral test."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Fewnomial
from .errors import DimensionMismatch

RANK_TOL = 1e-10
PARALLEL_TOL = 1e-10
COLLINEAR_TOL = 1e-12


@dataclass(frozen=True)
class NewtonSummary:
    dimension: int
    hull_vertices: list = field(default_factory=list)
    vertex_signs: list = field(default_factory=list)
    interior_or_edge_points: list = field(default_factory=list)
    vertex_terms: list = field(default_factory=list)


@dataclass(frozen=True)
class QuadClassification:
    is_quadrilateral: bool
    has_parallel_opposite_sides: bool
    adjacent_signs_opposite: bool
    equiv_hypotheses_met: bool


def matrix_rank(rows, rel_tol: float = RANK_TOL) -> int:
    """Rank by Gaussian elimination with partial pivoting.

    A pivot counts as zero when ``|pivot| <= rel_tol * max|entry|``.
    """
    a = np.array(rows, dtype=float)
    if a.size == 0:
        return 0
    scale = np.abs(a).max()
    if scale == 0:
        return 0
    thresh = rel_tol * scale
    nrows, ncols = a.shape
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        piv = rank + int(np.argmax(np.abs(a[rank:, col])))
        if abs(a[piv, col]) <= thresh:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        a[rank + 1:] -= np.outer(a[rank + 1:, col] / a[rank, col], a[rank])
        rank += 1
    return rank


def newton_dimension(f: Fewnomial) -> int:
    exps = f.exponents
    return matrix_rank(exps[1:] - exps[0])


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_indices(points) -> list:
    """Indices of the strictly convex hull vertices, counter-clockwise.

    Monotone chain; points on an edge are not vertices.  Degenerate inputs
    (all points equal or collinear) return the one or two extreme points.
    """
    pts = [tuple(map(float, p)) for p in points]
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    if len(order) <= 2:
        return order
    span = max(max(abs(c) for c in p) for p in pts) or 1.0
    eps = COLLINEAR_TOL * span * span

    def chain(idx):
        out = []
        for i in idx:
            while len(out) >= 2 and _cross(pts[out[-2]], pts[out[-1]], pts[i]) <= eps:
                out.pop()
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(reversed(order))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and pts[hull[0]] == pts[hull[1]]:
        return hull[:1]
    return hull


def hull_and_classify(f: Fewnomial):
    """Newton summary and quadrilateral classification of a bivariate fewnomial."""
    if f.nvars != 2:
        raise DimensionMismatch("hull_and_classify needs two variables")
    exps = f.exponents
    coefs = f.coefficients
    dim = newton_dimension(f)
    hull = convex_hull_indices(exps) if dim == 2 else _segment_ends(exps, dim)
    rest = [tuple(exps[i]) for i in range(f.m) if i not in hull]
    summary = NewtonSummary(
        dimension=dim,
        hull_vertices=[tuple(exps[i]) for i in hull],
        vertex_signs=[1 if coefs[i] > 0 else -1 for i in hull],
        interior_or_edge_points=rest,
        vertex_terms=list(hull),
    )
    return summary, classify_quadrilateral(summary, coefs)


def _segment_ends(exps, dim):
    if dim == 0:
        return [0]
    d = exps[-1] - exps[0]
    proj = (exps - exps[0]) @ d
    return [int(np.argmin(proj)), int(np.argmax(proj))]


def classify_quadrilateral(summary: NewtonSummary, coefs) -> QuadClassification:
    verts = [np.asarray(v) for v in summary.hull_vertices]
    is_quad = summary.dimension == 2 and len(verts) == 4
    parallel = False
    if is_quad:
        edges = [verts[(k + 1) % 4] - verts[k] for k in range(4)]
        for e, g in ((edges[0], edges[2]), (edges[1], edges[3])):
            cr = abs(e[0] * g[1] - e[1] * g[0])
            if cr <= PARALLEL_TOL * np.linalg.norm(e) * np.linalg.norm(g):
                parallel = True
    signs = summary.vertex_signs
    k = len(signs)
    alternating = k >= 2 and all(signs[i] != signs[(i + 1) % k] for i in range(k))
    npos = int(np.sum(np.asarray(coefs) > 0))
    two_two = len(coefs) == 4 and npos == 2
    met = is_quad and not parallel and alternating and two_two
    return QuadClassification(is_quad, parallel, alternating, met)
