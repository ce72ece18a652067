"""Numerical census of zero-set components in the positive orthant.

Everything runs in log coordinates ``u = log x`` on the window
``[-W, W]**n``.  A component is compact in the open orthant exactly when it
is bounded in log coordinates, so in a large enough window the
non-compact components are the ones reaching the window boundary.

The counts are heuristic: zero-set pieces thinner than a grid cell are
missed, and a window that is too small can clip an oval or split a branch.
``census_stabilized`` enlarges the window until two rounds agree.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import optimize, spatial, special

from .core import Fewnomial, build, scaled_log, sign_changes
from .errors import DimensionMismatch, NotFullDimensional, UnsupportedDimension
from .geometry import newton_dimension
from .transform import slice_reduction

log = logging.getLogger(__name__)

BISECT_WIDTH = 1e-12
CRITICAL_TOL = 1e-8
SEED_THRESHOLD = 0.05
MAX_SEEDS = 32
CHUNK_NODES = 1 << 21
BLOCK = 16
MAX_RESOLUTION_2D = 1 << 16
ISLAND_CELLS = 8
MAX_ISLANDS = 64
MAX_TRACE_STEPS = 20000
PINCH_CELLS = 3.0
MAX_BOX_CELLS = 64
MAX_REFINE = 256
MAX_RESOLUTION_1D = 1 << 22


@dataclass(frozen=True)
class GridSpec:
    half_width: float = 12.0
    resolution: int = 512
    max_doublings: int = 4

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        r = self.resolution
        if r < 16 or r & (r - 1):
            raise ValueError("resolution must be a power of two >= 16")
        if self.max_doublings < 0:
            raise ValueError("max_doublings must be non-negative")

    @property
    def cell(self) -> float:
        return 2 * self.half_width / self.resolution

    def doubled(self, times: int = 1) -> "GridSpec":
        k = 2 ** times
        return replace(self, half_width=self.half_width * k, resolution=self.resolution * k)

    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.resolution + 1)


DEFAULT_GRID = GridSpec()


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    sign_flip: bool = True

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True)
class Contour:
    component: int
    compact: bool
    points: np.ndarray


@dataclass(frozen=True)
class Census:
    tot: int
    comp: int
    non: int
    converged: bool
    window_used: GridSpec
    contours: tuple = ()
    critical_points: tuple = ()
    rounds: tuple = field(default_factory=tuple)

    def counts(self):
        return (self.tot, self.comp, self.non)


class UnionFind:
    """Disjoint sets over ``0..size-1`` with path halving and union by size."""

    def __init__(self, size):
        self.parent = list(range(size))
        self.size = [1] * size

    def find(self, a):
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return ra

    def roots(self):
        return [self.find(i) for i in range(len(self.parent))]


# --------------------------------------------------------------------------
# evaluation helpers


def _sign_grid(f: Fewnomial, axes):
    """Boolean ``f >= 0`` on the tensor grid spanned by ``axes`` (chunked)."""
    exps = f.exponents
    coefs = f.coefficients
    shape = tuple(len(a) for a in axes)
    out = np.empty(shape, dtype=bool)
    rows = max(1, CHUNK_NODES // max(1, int(np.prod(shape[1:]))))
    for start in range(0, shape[0], rows):
        sl = slice(start, min(start + rows, shape[0]))
        mesh = np.meshgrid(axes[0][sl], *axes[1:], indexing="ij")
        z = [sum(e[j] * mesh[j] for j in range(len(axes))) for e in exps]
        s = np.maximum.reduce(z) if len(z) > 1 else z[0]
        acc = np.zeros_like(s)
        for c, zi in zip(coefs, z):
            acc += c * np.exp(zi - s)
        out[sl] = acc >= 0
    return out


def window_floor(f: Fewnomial) -> float:
    """Half-width beyond which the zero set is expected to consist of rays only.

    Zeros need two terms of comparable magnitude, so away from the points
    where three or more terms tie for the maximum (the tropical vertices)
    the zero set follows straight asymptotes.  The floor is the largest
    vertex norm plus a margin of ``log(m)`` over the smallest exponent gap.
    """
    exps = f.exponents
    logc = np.log(np.abs(f.coefficients))
    m, n = exps.shape
    if m < 2:
        return 0.0
    gaps = [np.linalg.norm(exps[i] - exps[j]) for i in range(m) for j in range(i)]
    margin = math.log(m) / max(min(gaps), 1e-12)
    pts = []
    for idx in itertools.combinations(range(m), n + 1):
        mat = exps[list(idx[1:])] - exps[idx[0]]
        rhs = logc[idx[0]] - logc[list(idx[1:])]
        try:
            u = np.linalg.solve(mat, rhs)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(u)):
            continue
        vals = logc + exps @ u
        if vals[idx[0]] >= vals.max() - 1e-9 * (1 + abs(vals.max())):
            pts.append(np.max(np.abs(u)))
    if not pts:
        # collinear support: ties between pairs sit on parallel hyperplanes
        for i in range(m):
            for j in range(i):
                d = exps[i] - exps[j]
                pts.append(abs(logc[j] - logc[i]) / np.linalg.norm(d))
    return 1.25 * max(pts, default=0.0) + 2 * margin


def _schedule(initial: GridSpec, floor: float, max_resolution: int) -> list:
    """Doubling exponents ``k`` for the refinement rounds.

    A round pair only counts once the later window reaches ``floor``, so
    the sequence starts one round below that; ``max_doublings`` further
    rounds follow, none finer than ``max_resolution``.
    """
    top = max(0, int(math.log2(max_resolution // initial.resolution)))
    need = 0
    while initial.half_width * 2 ** (need + 1) < floor and need + 1 < top:
        need += 1
    start = min(need, max(0, top - 1))
    return list(range(start, min(start + initial.max_doublings, top) + 1))


def _scaled(f, u):
    return scaled_log(f, u)[0]


def _normalized_residual(f: Fewnomial, u):
    """``(F, G)`` = value and log-gradient of ``f`` divided by the term scale."""
    u = np.asarray(u, dtype=float)
    exps, coefs = f.exponents, f.coefficients
    z = u @ exps.T
    w = np.exp(z - z.max(axis=-1, keepdims=True))
    s = w @ np.abs(coefs)
    cw = w * coefs
    return cw.sum(axis=-1) / s, (cw @ exps) / s[..., None]


def _residual_jacobian(f, u):
    exps, coefs = f.exponents, f.coefficients
    z = exps @ u
    w = np.exp(z - z.max())
    s = w @ np.abs(coefs)
    cw = w * coefs
    p = cw.sum()
    q = cw @ exps
    t = (w * np.abs(coefs)) @ exps
    res = np.concatenate([[p / s], q / s])
    jac = np.empty((1 + f.nvars, f.nvars))
    jac[0] = q / s - p * t / s ** 2
    jac[1:] = (exps.T * cw) @ exps / s - np.outer(q, t) / s ** 2
    return res, jac


def _bisect(f, lo, hi, width=BISECT_WIDTH, max_iter=80):
    """Vectorised bisection between points ``lo`` and ``hi`` (arrays ``(k, n)``)."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.size == 0:
        return lo
    slo = _scaled(f, lo) >= 0
    for _ in range(max_iter):
        if np.max(np.abs(hi - lo)) <= width:
            break
        mid = 0.5 * (lo + hi)
        smid = _scaled(f, mid) >= 0
        same = smid == slo
        lo[same] = mid[same]
        hi[~same] = mid[~same]
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# one variable


def isolate_roots_1d(f: Fewnomial, grid: GridSpec = DEFAULT_GRID) -> list:
    """Bracket every sign change of ``f`` on ``[-W, W]`` and bisect it tight."""
    if f.nvars != 1:
        raise DimensionMismatch("isolate_roots_1d needs a univariate fewnomial")
    u = grid.axis()
    pos = _sign_grid(f, [u])
    idx = np.nonzero(pos[:-1] != pos[1:])[0]
    lo = u[idx][:, None].copy()
    hi = u[idx + 1][:, None].copy()
    slo = pos[idx]
    for _ in range(80):
        if lo.size == 0 or np.max(hi - lo) <= BISECT_WIDTH:
            break
        mid = 0.5 * (lo + hi)
        smid = _scaled(f, mid) >= 0
        same = smid == slo
        lo[same] = mid[same]
        hi[~same] = mid[~same]
    brackets = [RootBracket(float(a), float(b)) for a, b in zip(lo[:, 0], hi[:, 0])]
    if len(brackets) > sign_changes(f):
        log.warning("%d brackets exceed %d sign changes; result not certified",
                    len(brackets), sign_changes(f))
    return brackets


def roots_stabilized(f: Fewnomial, initial: GridSpec = DEFAULT_GRID):
    """Brackets from the first window at which the count stops changing.

    Rounds narrower than :func:`window_floor` never count as converged.
    """
    floor = window_floor(f)
    prev = None
    rounds = []
    for k in _schedule(initial, floor, MAX_RESOLUTION_1D):
        grid = initial.doubled(k)
        br = isolate_roots_1d(f, grid)
        rounds.append(len(br))
        if prev is not None and len(br) == len(prev) and grid.half_width >= floor:
            return br, True, grid, tuple(rounds)
        prev = br
    return prev, False, grid, tuple(rounds)


def census_1d(f: Fewnomial, initial: GridSpec = DEFAULT_GRID) -> Census:
    """Positive roots of a univariate fewnomial; points are compact components."""
    br, ok, grid, rounds = roots_stabilized(f, initial)
    k = len(br)
    return Census(k, k, 0, ok, grid, rounds=rounds)


# --------------------------------------------------------------------------
# two variables


@dataclass
class _Extraction:
    grid: GridSpec
    edge_ids: np.ndarray      # crossing edge ids (sorted)
    points: np.ndarray        # crossing points in log coordinates, aligned with edge_ids
    boundary: np.ndarray      # bool, edge lies on the window boundary
    pairs: np.ndarray         # (k, 2) indices into edge_ids joined inside a cell
    blocks: np.ndarray        # (b, 2) blocks of BLOCK cells that may meet the zero set


def _uncertified(f: Fewnomial, grid: GridSpec, size: int, idx: np.ndarray) -> np.ndarray:
    """Mask of the blocks ``idx`` (of ``size x size`` cells) on which the sign
    of ``f`` may change.

    On a block with centre ``c`` and half-width ``r`` the term ``i`` has log
    magnitude within ``|a_i|_1 r`` of its value at ``c``.  The sign is
    constant when the smallest possible sum of the positive terms beats the
    largest possible sum of the negative ones, or the other way round.
    """
    r = size * grid.cell / 2
    exps = f.exponents
    logc = np.log(np.abs(f.coefficients))
    rho = np.abs(exps).sum(1) * r
    positive = f.coefficients > 0
    out = np.empty(len(idx), bool)
    step = max(1, CHUNK_NODES // f.m)
    for k in range(0, len(idx), step):
        centres = -grid.half_width + (idx[k:k + step] + 0.5) * 2 * r
        z = centres @ exps.T + logc
        low, high = z - rho, z + rho
        lo_pos = special.logsumexp(np.where(positive, low, -np.inf), axis=-1)
        hi_pos = special.logsumexp(np.where(positive, high, -np.inf), axis=-1)
        lo_neg = special.logsumexp(np.where(positive, -np.inf, low), axis=-1)
        hi_neg = special.logsumexp(np.where(positive, -np.inf, high), axis=-1)
        out[k:k + step] = (lo_pos <= hi_neg + 1e-9) & (lo_neg <= hi_pos + 1e-9)
    return out


def _dominated_blocks(f: Fewnomial, grid: GridSpec, size: int) -> np.ndarray:
    """Indices ``(bi, bj)`` of blocks of ``size x size`` cells that may meet the zero set.

    Blocks are certified coarse to fine; a block that passes covers all
    its sub-blocks, since they see tighter term ranges.
    """
    level = size
    while grid.resolution // (2 * level) >= 64:
        level *= 2
    nb = grid.resolution // level
    idx = np.stack(np.meshgrid(np.arange(nb), np.arange(nb), indexing="ij"), -1).reshape(-1, 2)
    while True:
        idx = idx[_uncertified(f, grid, level, idx)]
        if level == size or not len(idx):
            break
        level //= 2
        idx = (2 * idx[:, None, :] + np.array([[0, 0], [0, 1], [1, 0], [1, 1]])).reshape(-1, 2)
    if level != size:
        return np.empty((0, 2), int)
    return idx[np.lexsort((idx[:, 1], idx[:, 0]))]


def _extract(f: Fewnomial, grid: GridSpec) -> _Extraction:
    u = grid.axis()
    n = len(u)
    hv = n * (n - 1)
    size = min(BLOCK, grid.resolution)
    blocks = _dominated_blocks(f, grid, size)
    loc = np.arange(size + 1)
    rows = blocks[:, :1] * size + loc
    cols = blocks[:, 1:] * size + loc
    pos = np.empty((len(blocks), size + 1, size + 1), bool)
    step = max(1, CHUNK_NODES // (size + 1) ** 2)
    for k in range(0, len(blocks), step):
        sl = slice(k, k + step)
        mesh = np.stack(np.broadcast_arrays(u[rows[sl]][:, :, None],
                                            u[cols[sl]][:, None, :]), -1)
        pos[sl] = _scaled(f, mesh) >= 0

    # per-cell edges a = H(i, j), b = H(i+1, j), c = V(i, j), d = V(i, j+1)
    # where H(i, j) joins nodes (i, j)-(i, j+1) and V(i, j) joins (i, j)-(i+1, j)
    h_cross = pos[:, :, :-1] != pos[:, :, 1:]
    v_cross = pos[:, :-1, :] != pos[:, 1:, :]
    busy = h_cross[:, :-1, :] | h_cross[:, 1:, :] | v_cross[:, :, :-1] | v_cross[:, :, 1:]
    kb, li, lj = np.nonzero(busy)
    ci, cj = rows[kb, li], cols[kb, lj]
    flags = np.stack([h_cross[kb, li, lj], h_cross[kb, li + 1, lj],
                      v_cross[kb, li, lj], v_cross[kb, li, lj + 1]], -1)
    ids = np.stack([ci * (n - 1) + cj, (ci + 1) * (n - 1) + cj,
                    hv + ci * n + cj, hv + ci * n + cj + 1], -1)
    count = flags.sum(-1)
    two = count == 2
    pairs = ids[two][flags[two]].reshape(-1, 2)

    four = np.nonzero(count == 4)[0]
    if len(four):
        si, sj = ci[four], cj[four]
        centers = np.column_stack([u[si], u[sj]]) + grid.cell / 2
        cpos = _scaled(f, centers) >= 0
        sid = ids[four]
        # corners (0,0) and (1,1) connect through the centre
        join_diag = cpos == pos[kb[four], li[four], lj[four]]
        p1 = np.where(join_diag[:, None], sid[:, [0, 3]], sid[:, [0, 2]])
        p2 = np.where(join_diag[:, None], sid[:, [1, 2]], sid[:, [1, 3]])
        pairs = np.concatenate([pairs, p1, p2])

    hk, hi_, hj_ = np.nonzero(h_cross)
    vk, vi_, vj_ = np.nonzero(v_cross)
    hi, hj = rows[hk, hi_], cols[hk, hj_]
    vi, vj = rows[vk, vi_], cols[vk, vj_]
    edge_ids = np.concatenate([hi * (n - 1) + hj, hv + vi * n + vj])
    edge_ids, first = np.unique(edge_ids, return_index=True)
    ei = np.concatenate([hi, vi])[first]
    ej = np.concatenate([hj, vj])[first]
    horiz = first < len(hi)
    lo_pts = np.column_stack([u[ei], u[ej]])
    hi_pts = np.column_stack([u[ei + ~horiz], u[ej + horiz]])
    boundary = np.where(horiz, (ei == 0) | (ei == n - 1), (ej == 0) | (ej == n - 1))
    points = _bisect(f, lo_pts, hi_pts) if len(edge_ids) else np.empty((0, 2))
    local = np.searchsorted(edge_ids, pairs) if len(pairs) else np.empty((0, 2), int)
    return _Extraction(grid, edge_ids, points, boundary, local, blocks)


def _components(ext: _Extraction, keep=None):
    uf = UnionFind(len(ext.edge_ids))
    pairs = ext.pairs if keep is None else ext.pairs[keep]
    for a, b in pairs.tolist():
        uf.union(a, b)
    return uf


def _seeds(f, grid, ext):
    """Candidate starts: per-block minima of the residual on a stride-2
    subsample of the blocks that may meet the zero set, and crossing points."""
    size = min(BLOCK, grid.resolution)
    blocks = ext.blocks
    loc = np.arange(0, size + 1, 2)
    u = grid.axis()
    pts, vals = [], []
    step = max(1, CHUNK_NODES // len(loc) ** 2)
    for k in range(0, len(blocks), step):
        bl = blocks[k:k + step]
        mesh = np.stack(np.broadcast_arrays(u[bl[:, :1] * size + loc][:, :, None],
                                            u[bl[:, 1:] * size + loc][:, None, :]), -1)
        mesh = mesh.reshape(len(bl), -1, 2)
        F, G = _normalized_residual(f, mesh)
        R = F ** 2 + (G ** 2).sum(-1)
        best = np.argmin(R, axis=1)
        pts.append(mesh[np.arange(len(bl)), best])
        vals.append(R[np.arange(len(bl)), best])
    if len(ext.points):
        F, G = _normalized_residual(f, ext.points)
        pts.append(ext.points)
        vals.append(F ** 2 + (G ** 2).sum(-1))
    if not pts:
        return np.empty((0, 2))
    pts, vals = np.concatenate(pts), np.concatenate(vals)
    keep = vals < SEED_THRESHOLD
    pts, vals = pts[keep], vals[keep]
    chosen = []
    for i in np.argsort(vals, kind="stable"):
        if all(np.max(np.abs(pts[i] - q)) > 2 * grid.cell for q in chosen):
            chosen.append(pts[i])
            if len(chosen) == MAX_SEEDS:
                break
    return np.array(chosen).reshape(-1, 2)


def find_critical_zeros(f: Fewnomial, grid: GridSpec = DEFAULT_GRID,
                        tol: float = CRITICAL_TOL, ext=None) -> list:
    """Log coordinates of critical zeros found by multistart least squares.

    ``F`` and ``G`` are the value and log-gradient of ``f`` divided by the
    local term scale; seeds are points near the zero set where
    ``F**2 + |G|**2`` is small.  A point is accepted when both normalised
    residuals are below ``tol``.
    """
    if f.nvars != 2:
        raise DimensionMismatch("critical zero search needs two variables")
    if ext is None:
        ext = _extract(f, grid)
    found = []
    for x0 in _seeds(f, grid, ext):
        sol = optimize.least_squares(
            lambda v: _residual_jacobian(f, v)[0], x0,
            jac=lambda v: _residual_jacobian(f, v)[1],
            method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
        res = _residual_jacobian(f, sol.x)[0]
        if np.max(np.abs(res)) < tol and np.all(np.abs(sol.x) <= grid.half_width):
            if all(np.linalg.norm(sol.x - p) > 1e-6 for p in found):
                found.append(sol.x)
    return found


@dataclass(frozen=True)
class _Box:
    centre: np.ndarray     # a grid node
    half_cells: int        # power of two
    refine: int            # fine cells per coarse cell, power of two

    def contains(self, pts, grid, closed=True):
        r = self.half_cells * grid.cell * (1 + 1e-12)
        d = np.max(np.abs(np.asarray(pts) - self.centre), axis=-1)
        return d <= r if closed else d < self.half_cells * grid.cell * (1 - 1e-12)


def _pow2(x, lo, hi):
    return int(min(hi, max(lo, 2 ** math.ceil(math.log2(max(x, 1.0))))))


def _pinch_boxes(f, grid, ext, tol=CRITICAL_TOL) -> list:
    """Boxes around critical points of ``f`` whose value is small but not zero.

    Near such a point the zero set consists of two close branches (saddle)
    or a tiny oval (extremum).  With the quadratic model
    ``F + (l1 s**2 + l2 t**2) / 2`` the branches sit ``d = sqrt(2|F|/|l|)``
    from the point; when ``2d`` is only a few cells the grid may join or
    miss them, and the box covers the stretch where they stay that close.
    """
    boxes = []
    done = []
    for x0 in _seeds(f, grid, ext):
        sol = optimize.least_squares(
            lambda v: _residual_jacobian(f, v)[0][1:], x0,
            jac=lambda v: _residual_jacobian(f, v)[1][1:],
            method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
        res, jac = _residual_jacobian(f, sol.x)
        if np.max(np.abs(res[1:])) > tol or abs(res[0]) < tol:
            continue
        if any(np.linalg.norm(sol.x - q) < 1e-6 for q in done):
            continue
        done.append(sol.x)
        # Hessian of f / S at a critical point of f
        lam, _ = np.linalg.eigh(jac[1:])
        F = res[0]
        opposite = lam[np.sign(lam) == -np.sign(F)]
        if not len(opposite):
            continue
        lo_ = np.max(np.abs(opposite))
        if 2 * abs(F) > lo_ * (PINCH_CELLS * grid.cell / 2) ** 2:
            continue
        d = math.sqrt(2 * abs(F) / lo_)
        same = lam[np.sign(lam) == np.sign(F)]
        extent = d
        if len(same) and np.max(np.abs(same)) > 0:
            reach = (lo_ * grid.cell ** 2 - 2 * abs(F)) / np.min(np.abs(same))
            extent = max(d, math.sqrt(max(reach, 0.0)))
        half = _pow2(extent / grid.cell + 2, 2, MAX_BOX_CELLS)
        refine = _pow2(4 * grid.cell / d, 8, MAX_REFINE)
        node = np.rint((sol.x + grid.half_width) / grid.cell)
        centre = node * grid.cell - grid.half_width
        boxes.append(_Box(centre, half, refine))
    return boxes


def _translate(f: Fewnomial, centre) -> Fewnomial:
    """``v -> f(exp(centre + v))`` up to a positive constant factor."""
    z = f.exponents @ centre + np.log(np.abs(f.coefficients))
    w = np.exp(z - z.max())
    keep = w > 0
    return build(f.nvars, zip((np.sign(f.coefficients) * w)[keep], f.exponents[keep]))


def _splice(f, grid, ext, uf, box):
    """Rebuild the connectivity inside ``box`` from a finer local grid.

    Returns ``(extra compact components, suspect)``.
    """
    fgrid = GridSpec(box.half_cells * grid.cell, 2 * box.half_cells * box.refine, 0)
    fext = _extract(_translate(f, box.centre), fgrid)
    if not len(fext.edge_ids):
        return 0, False
    fuf = _components(fext)
    froots = np.array(fuf.roots(), dtype=int)
    inside = np.nonzero(box.contains(ext.points, grid))[0]
    owner = {}
    suspect = False
    if len(inside):
        tree = spatial.cKDTree(fext.points)
        dist, near = tree.query(ext.points[inside] - box.centre)
        suspect = bool(np.any(dist > fgrid.cell))
        for k, j in zip(inside.tolist(), near.tolist()):
            r = int(froots[j])
            if r in owner:
                uf.union(owner[r], k)
            else:
                owner[r] = k
    extra = 0
    for r in np.unique(froots).tolist():
        if r in owner:
            continue
        if np.any(fext.boundary[froots == r]):
            suspect = True
        else:
            extra += 1
    return extra, suspect


def critical_zero_search(f: Fewnomial, grid: GridSpec = DEFAULT_GRID) -> Optional[np.ndarray]:
    """A positive point where ``f`` and its gradient vanish, or ``None``."""
    found = find_critical_zeros(f, grid)
    if not found:
        return None
    return np.exp(found[0])


def _log_hessian(f, u):
    exps, coefs = f.exponents, f.coefficients
    w = coefs * np.exp(exps @ u)
    return (exps.T * w) @ exps


def _local(f, u):
    """Value and log-gradient of ``f`` scaled by its largest term at ``u``."""
    z = f.exponents @ u
    w = f.coefficients * np.exp(z - z.max())
    return w.sum(), w @ f.exponents, np.abs(w).sum()


def _project(f, q):
    for _ in range(12):
        v, g, scale = _local(f, q)
        gg = g @ g
        if gg == 0:
            return None
        q = q - v * g / gg
        if abs(v) <= 1e-13 * scale:
            return q
    return None


def _crossed_edges(grid, n, a, b):
    """Ids of grid edges met by the segment ``a -> b``, in order of travel."""
    w, h = grid.half_width, grid.cell
    hits = []
    for ax in (0, 1):
        ka, kb = (a[ax] + w) / h, (b[ax] + w) / h
        lo, hi = sorted((ka, kb))
        for k in range(math.floor(lo) + 1, math.floor(hi) + 1):
            if not 0 <= k <= n - 1 or ka == kb:
                continue
            t = (k - ka) / (kb - ka)
            other = (a[1 - ax] + t * (b[1 - ax] - a[1 - ax]) + w) / h
            j = math.floor(other)
            if not 0 <= j < n - 1:
                continue
            # H(i, j) fixes u1 = u_i; V(i, j) fixes u2 = u_j
            eid = k * (n - 1) + j if ax == 0 else n * (n - 1) + j * n + k
            hits.append((t, eid))
    return [e for _, e in sorted(hits)]


def _tangent(f, q, along):
    _, g, _ = _local(f, q)
    norm = np.linalg.norm(g)
    if norm == 0:
        return None
    t = np.array([-g[1], g[0]]) / norm
    return t if t @ along >= 0 else -t


def _trace(f, grid, ext, u, t, stop, h0=None):
    """Follow the zero set from ``u`` in direction ``t`` by continuation.

    Every crossing edge met on the way is collected; the walk ends at an
    edge ``k`` with ``stop(k)`` true, on leaving the window, or on coming
    back to ``u``.  Returns ``(kind, hits)`` with ``kind`` one of
    ``"hit"``, ``"escaped"``, ``"closed"``, ``"lost"``.
    """
    n = grid.resolution + 1
    hmax = grid.cell / 4
    h = hmax if h0 is None else h0
    start = u = np.asarray(u, dtype=float)
    travelled = 0.0
    hits = []
    for _ in range(MAX_TRACE_STEPS):
        q = _project(f, u + h * t)
        tq = None
        if q is not None and np.linalg.norm(q - u - h * t) <= h / 10:
            tq = _tangent(f, q, t)
        if tq is None or tq @ t <= 0.8:
            h /= 2
            if h < 1e-10:
                return "lost", hits
            continue
        if np.max(np.abs(q)) > grid.half_width:
            return "escaped", hits
        for eid in _crossed_edges(grid, n, u, q):
            k = int(np.searchsorted(ext.edge_ids, eid))
            if k < len(ext.edge_ids) and ext.edge_ids[k] == eid:
                hits.append(k)
                if stop(k):
                    return "hit", hits
        travelled += np.linalg.norm(q - u)
        if travelled > 2 * grid.cell and np.linalg.norm(q - start) <= hmax:
            return "closed", hits
        u, t = q, tq
        h = min(1.5 * h, hmax)
    return "lost", hits


def _branch_directions(hess):
    """Unit directions of the four half-branches leaving a saddle zero."""
    lam, q = np.linalg.eigh(hess)
    r = math.sqrt(-lam[0] / lam[1])
    out = []
    for v in (np.array([1.0, r]), np.array([1.0, -r])):
        t = q @ v
        t /= np.linalg.norm(t)
        out += [t, -t]
    return out


def _islands(grid, ext, uf):
    """Labels of components that avoid the boundary and span few cells."""
    roots = np.array(uf.roots(), dtype=int)
    if not len(roots):
        return roots, set()
    labels, inverse = np.unique(roots, return_inverse=True)
    touches = np.zeros(len(labels), bool)
    np.logical_or.at(touches, inverse, ext.boundary)
    lo = np.full((len(labels), 2), np.inf)
    hi = np.full((len(labels), 2), -np.inf)
    np.minimum.at(lo, inverse, ext.points)
    np.maximum.at(hi, inverse, ext.points)
    small = ~touches & (np.max(hi - lo, 1) <= ISLAND_CELLS * grid.cell)
    return roots, set(labels[small].tolist())


class _Tracer:
    """Continuation-based repair of the grid connectivity.

    A strip of one sign thinner than a cell is sampled as a row of tiny
    loops, and near a saddle the grid may cut a branch short.  Walking
    along the true curve joins every crossing edge it meets; walks pass
    through such small islands and stop at the first larger component.
    """

    def __init__(self, f, grid, ext, uf):
        self.f, self.grid, self.ext, self.uf = f, grid, ext, uf
        self.roots, self.small = _islands(grid, ext, uf)
        self.escaped = set()
        self.anchored = []
        self.suspect = False

    def _stop(self, k):
        return int(self.roots[k]) not in self.small

    def _walk(self, u, t, anchor=None, h0=None):
        kind, hits = _trace(self.f, self.grid, self.ext, u, t, self._stop, h0)
        if kind == "lost":
            self.suspect = True
        if anchor is None and hits:
            anchor = hits[0]
        for k in hits:
            self.uf.union(anchor, k)
        if kind == "escaped" and anchor is not None:
            self.escaped.add(anchor)
        if kind == "hit":
            self.anchored.append(anchor)
        return kind, anchor

    def saddle(self, p, hess):
        anchor = None
        for t in _branch_directions(hess):
            _, anchor = self._walk(p, t, anchor, h0=1e-4 * self.grid.cell)

    def islands(self):
        if len(self.small) > MAX_ISLANDS:
            self.suspect = True
            return
        find = self.uf.find
        for lab in sorted(self.small):
            if any(find(a) == find(lab) for a in self.anchored):
                continue  # already joined to a larger component
            start = lab
            _, g, _ = _local(self.f, self.ext.points[start])
            perp = np.array([-g[1], g[0]]) / np.linalg.norm(g)
            for t in (perp, -perp):
                kind, _ = self._walk(self.ext.points[start], t, start)
                if kind == "closed":
                    break

    def noncompact_roots(self):
        return {self.uf.find(i) for i in self.escaped}


def census_grid(f: Fewnomial, grid: GridSpec = DEFAULT_GRID, *, with_contours=False,
                resolve_critical=True) -> Census:
    """Single-window census of a bivariate fewnomial.

    Sign changes on grid edges are joined cell by cell (marching squares,
    saddles decided by the cell centre) and merged with union-find.  A
    component is non-compact iff it reaches the window boundary.  Small
    closed pieces and the branches through saddle-type critical zeros are
    checked by continuation along the curve; an isolated critical zero with
    definite Hessian counts as a compact point.
    """
    if f.nvars != 2:
        raise DimensionMismatch("census_grid needs two variables")
    ext = _extract(f, grid)
    crit, extra_points, suspect = (), 0, False
    boxes = _pinch_boxes(f, grid, ext) if resolve_critical else []
    keep = None
    if boxes and len(ext.pairs):
        mid = ext.points[ext.pairs].mean(axis=1)
        keep = ~np.any([b.contains(mid, grid, closed=False) for b in boxes], axis=0)
    uf = _components(ext, keep)
    for box in boxes:
        extra, bad = _splice(f, grid, ext, uf, box)
        extra_points += extra
        suspect = suspect or bad
    tracer = _Tracer(f, grid, ext, uf)

    if resolve_critical:
        crit = tuple(find_critical_zeros(f, grid, ext=ext))
        for p in crit:
            hess = _log_hessian(f, p)
            eig = np.linalg.eigvalsh(hess)
            scale = np.max(np.abs(eig)) or 1.0
            if np.all(eig > 1e-8 * scale) or np.all(eig < -1e-8 * scale):
                extra_points += 1
            elif eig[0] < -1e-8 * scale and eig[1] > 1e-8 * scale:
                tracer.saddle(p, hess)
            else:
                # degenerate: join whatever passes close by
                near = np.nonzero(np.max(np.abs(ext.points - p), axis=1)
                                  <= 2.5 * grid.cell)[0] if len(ext.points) else []
                suspect = suspect or not len(near)
                for k in near[1:]:
                    uf.union(int(near[0]), int(k))
    tracer.islands()

    roots = np.array(uf.roots(), dtype=int)
    labels, inverse = np.unique(roots, return_inverse=True)
    noncompact = np.zeros(len(labels), bool)
    np.logical_or.at(noncompact, inverse, ext.boundary)
    noncompact |= np.isin(labels, list(tracer.noncompact_roots()))
    non = int(noncompact.sum())
    comp = int(len(labels) - non) + extra_points
    contours = _trace_contours(ext, inverse, noncompact, keep) if with_contours else ()
    return Census(non + comp, comp, non, not (suspect or tracer.suspect), grid, contours,
                  tuple(np.exp(p) for p in crit))


def _trace_contours(ext: _Extraction, labels, noncompact, keep=None):
    """Order the crossing points of each component into polylines."""
    k = len(ext.edge_ids)
    nb = [[] for _ in range(k)]
    for a, b in (ext.pairs if keep is None else ext.pairs[keep]).tolist():
        nb[a].append(b)
        nb[b].append(a)
    seen = np.zeros(k, bool)
    out = []
    starts = [i for i in range(k) if len(nb[i]) <= 1] + list(range(k))
    for s in starts:
        if seen[s]:
            continue
        path = [s]
        seen[s] = True
        cur = s
        while True:
            nxt = [j for j in nb[cur] if not seen[j]]
            if not nxt:
                break
            cur = nxt[0]
            seen[cur] = True
            path.append(cur)
        if len(path) > 2 and s in nb[path[-1]]:
            path.append(s)
        lab = int(labels[s])
        out.append(Contour(lab, not bool(noncompact[lab]), ext.points[path]))
    out.sort(key=lambda c: (c.component, tuple(c.points[0])))
    return tuple(out)


def census_stabilized(f: Fewnomial, initial: GridSpec = DEFAULT_GRID, *,
                      with_contours=False, resolve_critical=True) -> Census:
    """Repeat :func:`census_grid`, doubling window and resolution, until two
    consecutive rounds report the same counts.

    Agreement only counts once the window reaches :func:`window_floor`, so
    an oval clipped by two small windows in a row is not mistaken for an arc.
    """
    if f.nvars != 2:
        raise DimensionMismatch("census_stabilized needs two variables")
    floor = window_floor(f)
    prev = None
    rounds = []
    for k in _schedule(initial, floor, MAX_RESOLUTION_2D):
        grid = initial.doubled(k)
        cur = census_grid(f, grid, with_contours=with_contours,
                          resolve_critical=resolve_critical)
        rounds.append(cur.counts())
        if (prev is not None and cur.counts() == prev.counts()
                and grid.half_width >= floor):
            return replace(cur, converged=cur.converged and prev.converged,
                           rounds=tuple(rounds))
        prev = cur
    return replace(prev, converged=False, rounds=tuple(rounds))


def census(f: Fewnomial, grid: GridSpec = DEFAULT_GRID, **kw) -> Census:
    """Stabilised census in one or two variables."""
    if f.nvars == 1:
        return census_1d(f, grid)
    if f.nvars == 2:
        return census_stabilized(f, grid, **kw)
    raise UnsupportedDimension(f"direct census needs 1 or 2 variables, got {f.nvars}")


# --------------------------------------------------------------------------
# three variables


@dataclass(frozen=True)
class SliceCensus:
    estimate: int
    family: object
    censuses: tuple

    @property
    def converged(self):
        return all(c.converged for c in self.censuses)


def noncompact_census_3d(f: Fewnomial, grid: GridSpec = DEFAULT_GRID) -> SliceCensus:
    """Empirical upper estimate of ``Non`` for a trivariate fewnomial.

    The six hyperplane slices at ``x_j = exp(+-W)`` (after the basis change
    of :func:`slice_reduction`) are censused and their totals summed.  This
    is a harness estimate, not a certificate: the levels come from the
    window rather than from points on the components.
    """
    if f.nvars != 3:
        raise DimensionMismatch("noncompact_census_3d needs three variables")
    if newton_dimension(f) != 3:
        raise NotFullDimensional("Newton polytope is not full-dimensional")
    w = grid.half_width
    family = slice_reduction(f, [(math.exp(-w), math.exp(w))] * 3)
    results = tuple(census(s, grid) for s in family.slices)
    return SliceCensus(sum(c.tot for c in results), family, results)
