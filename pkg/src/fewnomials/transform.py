"""Monomial changes of variables and the reductions built on them.

``h_B(x) = (x**B[:, 0], ..., x**B[:, n-1])`` acts on exponent vectors by
``a -> B a`` and on log coordinates by ``u -> B.T u``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import Fewnomial, build, monomial_normalize
from .errors import (
    DegenerateMinimum,
    DimensionMismatch,
    NoBasisFound,
    NotFullDimensional,
    PrereqNotMet,
    SingularMatrix,
    ZeroDirection,
)
from .geometry import hull_and_classify, newton_dimension

SINGULAR_TOL = 1e-12
AREA_TOL = 1e-10
SNAP_TOL = 1e-12


@dataclass(frozen=True)
class ChangeOfVariables:
    matrix: np.ndarray
    det_abs: float
    trail: tuple = ()

    @classmethod
    def from_matrix(cls, matrix, note=None, trail=()):
        b = np.array(matrix, dtype=float)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise DimensionMismatch("change of variables needs a square matrix")
        det = float(np.linalg.det(b))
        rownorm = float(np.prod(np.linalg.norm(b, axis=1)))
        if rownorm == 0 or abs(det) <= SINGULAR_TOL * rownorm:
            raise SingularMatrix(f"matrix is singular (|det| = {abs(det):.3g})")
        b.setflags(write=False)
        trail = tuple(trail) + ((note,) if note else ())
        return cls(b, abs(det), trail)

    @classmethod
    def identity(cls, n):
        return cls.from_matrix(np.eye(n), f"identity({n})")

    @property
    def n(self):
        return self.matrix.shape[0]

    def inverse(self) -> "ChangeOfVariables":
        return ChangeOfVariables.from_matrix(
            np.linalg.inv(self.matrix), "invert", self.trail)

    def then(self, other: "ChangeOfVariables") -> "ChangeOfVariables":
        """The change ``h_self o h_other`` (apply ``self`` to ``f`` first)."""
        return ChangeOfVariables.from_matrix(
            other.matrix @ self.matrix, None, self.trail + other.trail)

    def map_log(self, u):
        """Log coordinates of ``h_B(exp(u))``."""
        return np.asarray(u, dtype=float) @ self.matrix

    def map_point(self, x):
        return np.exp(self.map_log(np.log(np.asarray(x, dtype=float))))


def as_change(b) -> ChangeOfVariables:
    return b if isinstance(b, ChangeOfVariables) else ChangeOfVariables.from_matrix(b)


def apply_change(f: Fewnomial, b) -> Fewnomial:
    """``f o h_B``: same coefficients, exponents ``B a_i``."""
    b = as_change(b)
    if b.n != f.nvars:
        raise DimensionMismatch(f"{b.n}x{b.n} matrix for {f.nvars} variables")
    if f.exact:
        mat = [[Fraction(float(v)) for v in row] for row in b.matrix]
        raw = [(t.coefficient, [sum(r * a for r, a in zip(row, t.exponent)) for row in mat])
               for t in f.terms]
        return build(f.nvars, raw, exact=True)
    new = snap_exponents(f.exponents @ b.matrix.T)
    return build(f.nvars, zip(f.coefficients, new))


def snap_exponents(exps, tol: float = SNAP_TOL) -> np.ndarray:
    """Round entries within ``tol`` (relative to the row size) of an integer.

    Matrix products leave residues like ``1e-16`` where an exponent should
    vanish; left alone they make a constant look like a monomial.
    """
    exps = np.asarray(exps, dtype=float)
    near = np.rint(exps)
    scale = 1.0 + np.abs(exps).max(axis=-1, keepdims=True)
    return np.where(np.abs(exps - near) <= tol * scale, near, exps) + 0.0


def rescale_variables(f: Fewnomial, scale) -> Fewnomial:
    """``x -> f(x / scale)`` for positive per-variable scales."""
    scale = np.asarray(scale, dtype=float)
    if np.any(scale <= 0):
        raise ValueError("scales must be positive")
    exps = f.exponents
    coefs = f.coefficients * np.exp(-(exps @ np.log(scale)))
    return build(f.nvars, zip(coefs, exps))


# --------------------------------------------------------------------------
# normal form of bivariate 4-nomials


@dataclass(frozen=True)
class NormalForm4:
    A: float
    c: float
    d: float
    transform: ChangeOfVariables
    rescale: tuple
    pivot_constant: tuple

    def polynomial(self) -> Fewnomial:
        return build(2, [(1.0, (0, 0)), (-1.0, (1, 0)), (-1.0, (0, 1)),
                         (self.A, (self.c, self.d))])

    def to_original(self, x):
        """Map a point of the normal-form zero set back to the input's zero set."""
        return self.transform.map_point(np.asarray(x, dtype=float) / np.asarray(self.rescale))


def _area(p, q, r):
    return 0.5 * abs((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))


def normalize_to_standard_form(f: Fewnomial) -> NormalForm4:
    """Change variables so that ``f`` becomes ``1 - x1 - x2 + A x1**c x2**d``.

    The input must be a bivariate 4-nomial with two coefficients of each
    sign whose Newton polygon is a quadrilateral without parallel sides and
    with alternating vertex signs.
    """
    if f.nvars != 2 or f.m != 4:
        raise PrereqNotMet("normal form needs a bivariate 4-nomial")
    summary, quad = hull_and_classify(f)
    if not quad.equiv_hypotheses_met:
        raise PrereqNotMet(f"hypotheses not met: {quad}")
    verts = [np.asarray(v) for v in summary.hull_vertices]
    idx = summary.vertex_terms
    # triangle omitting vertex k is (k+1, k+2, k+3); its middle vertex is opposite k
    areas = [_area(verts[(k + 1) % 4], verts[(k + 2) % 4], verts[(k + 3) % 4])
             for k in range(4)]
    k = int(np.argmin(areas))
    # a2 follows a1 counter-clockwise, so the change keeps orientation
    i1, i2, i3, i4 = (idx[(k + 2) % 4], idx[(k + 3) % 4], idx[(k + 1) % 4], idx[k])
    a = f.exponents
    amin = areas[k]
    tol = AREA_TOL * max(areas)
    if not (_area(a[i1], a[i2], a[i4]) > amin + tol
            and _area(a[i1], a[i3], a[i4]) > amin + tol):
        raise DegenerateMinimum("minimal vertex triangle is not strictly minimal")

    coefs = f.coefficients
    trail = [f"divide by {coefs[i1]:.17g}*x^{tuple(a[i1])}"]
    g = monomial_normalize(f, i1)
    cmat = np.column_stack([a[i2] - a[i1], a[i3] - a[i1]])
    ch = ChangeOfVariables.from_matrix(
        np.linalg.inv(cmat), f"monomial change h_(C^-1), C = {cmat.tolist()}", trail)
    g = apply_change(g, ch)
    r = (abs(coefs[i2] / coefs[i1]), abs(coefs[i3] / coefs[i1]))
    g = rescale_variables(g, r)
    ch = ChangeOfVariables(ch.matrix, ch.det_abs, ch.trail + (f"rescale x -> x / {r}",))

    e = g.exponents
    top = [t for t in range(4) if not (np.allclose(e[t], 0) or np.allclose(e[t], (1, 0))
                                       or np.allclose(e[t], (0, 1)))]
    if len(top) != 1:
        raise DegenerateMinimum("transformed support is not {0, e1, e2, (c, d)}")
    A = float(g.coefficients[top[0]])
    cc, dd = (float(v) for v in e[top[0]])
    if not (A > 0 and cc > 1 and dd > 1):
        raise DegenerateMinimum(f"normal form invalid: A={A}, c={cc}, d={dd}")
    return NormalForm4(A, cc, dd, ch, r, (float(coefs[i1]), tuple(a[i1])))


# --------------------------------------------------------------------------
# restriction to monomial curves


@dataclass(frozen=True)
class CurveRestriction:
    base_point: tuple
    direction: tuple
    restricted: Fewnomial

    def curve(self, t):
        """The point ``h_(p,u)(t)`` on ``{x**u = p**u}``."""
        return curve_point(self.base_point, self.direction, t)


def curve_point(p, u, t):
    p = np.asarray(p, dtype=float)
    u1, u2 = (float(v) for v in u)
    t = np.asarray(t, dtype=float)
    if u2 == 0:
        return np.stack([np.full_like(t, p[0]), t], axis=-1)
    log_pu = u1 * np.log(p[0]) + u2 * np.log(p[1])
    x2 = np.exp(log_pu / u2 - (u1 / u2) * np.log(t))
    return np.stack([t, x2], axis=-1)


def restrict_to_curve(f: Fewnomial, p, u) -> CurveRestriction:
    """Univariate fewnomial ``t -> f(h_(p,u)(t))``, with regrouping."""
    if f.nvars != 2:
        raise DimensionMismatch("curve restriction needs two variables")
    u1, u2 = (float(v) for v in u)
    if u1 == 0 and u2 == 0:
        raise ZeroDirection("direction must be nonzero")
    p = tuple(float(v) for v in p)
    if min(p) <= 0:
        raise ValueError("base point must be positive")
    raw = []
    if u2 != 0:
        log_pu = u1 * np.log(p[0]) + u2 * np.log(p[1])
        for c, (a1, a2) in zip(f.coefficients, f.exponents):
            raw.append((c * np.exp(log_pu * a2 / u2), [a1 - a2 * u1 / u2]))
    else:
        for c, (a1, a2) in zip(f.coefficients, f.exponents):
            raw.append((c * p[0] ** a1, [a2]))
    merged = build(1, raw)
    return CurveRestriction(p, (u1, u2), merged)


# --------------------------------------------------------------------------
# hyperplane slices for counting non-compact components


@dataclass(frozen=True)
class SliceFamily:
    basis_change: ChangeOfVariables
    levels: tuple
    slices: tuple
    reduced: Fewnomial = None
    pivot: int = 0
    basis_terms: tuple = field(default_factory=tuple)


def _choose_basis(vectors, n, max_subsets=5000):
    """Best-conditioned ``n``-subset of ``vectors`` (first one on ties)."""
    k = len(vectors)
    best, best_cond = None, np.inf
    subsets = itertools.combinations(range(k), n)
    ncomb = 1
    for i in range(n):
        ncomb = ncomb * (k - i) // (i + 1)
    if ncomb > max_subsets:
        subsets = [_greedy_basis(vectors, n)]
    for sub in subsets:
        if sub is None:
            continue
        mat = np.column_stack([vectors[i] for i in sub])
        cond = np.linalg.cond(mat)
        if np.isfinite(cond) and cond < best_cond * (1 - 1e-12):
            best, best_cond = sub, cond
    if best is None or best_cond > 1 / SINGULAR_TOL:
        return None, np.inf
    return _diagonal_order(vectors, best), best_cond


def _diagonal_order(vectors, sub):
    """Permute the basis so that column ``j`` has a large ``j``-th entry."""
    n = len(sub)
    if n > 6:
        return sub

    def weight(perm):
        return np.prod([abs(vectors[sub[perm[j]]][j]) for j in range(n)])

    perm = max(itertools.permutations(range(n)), key=weight)
    return tuple(sub[i] for i in perm)


def _greedy_basis(vectors, n):
    rest = np.array(vectors, dtype=float)
    chosen = []
    for _ in range(n):
        norms = np.linalg.norm(rest, axis=1)
        norms[chosen] = -1
        i = int(np.argmax(norms))
        if norms[i] <= 1e-10:
            return None
        chosen.append(i)
        v = rest[i] / norms[i]
        rest = rest - np.outer(rest @ v, v)
    return tuple(sorted(chosen))


def _levels(window, n):
    w = list(window)
    if len(w) == 2 and np.isscalar(w[0]):
        w = [tuple(w)] * n
    if len(w) != n:
        raise DimensionMismatch(f"window has {len(w)} axes, expected {n}")
    out = []
    for lo, hi in w:
        if not 0 < lo < hi:
            raise ValueError(f"window bounds must satisfy 0 < m < M, got {(lo, hi)}")
        out.append((float(lo), float(hi)))
    return out


def fix_variable(f: Fewnomial, axis: int, value: float) -> Fewnomial:
    """Restrict ``f`` to the hyperplane ``x_axis = value`` (positive)."""
    keep = [j for j in range(f.nvars) if j != axis]
    exps = f.exponents
    coefs = f.coefficients * np.exp(np.log(value) * exps[:, axis])
    return build(f.nvars - 1, zip(coefs, exps[:, keep]))


def slice_reduction(f: Fewnomial, window) -> SliceFamily:
    """The ``2n`` hyperplane slices whose totals bound ``Non`` of the zero set.

    ``f`` is divided by one of its terms, a basis of exponent vectors is
    mapped to the coordinate vectors, and each variable is fixed at its lower
    and upper window level in turn.
    """
    n = f.nvars
    if n < 2:
        raise NotFullDimensional("slice reduction needs at least two variables")
    if newton_dimension(f) != n:
        raise NotFullDimensional("Newton polytope is not full-dimensional")
    levels = _levels(window, n)

    zero = [i for i, t in enumerate(f.terms) if all(a == 0 for a in t.exponent)]
    pivots = zero if zero else range(f.m)
    best = None
    for piv in pivots:
        g = monomial_normalize(f, piv)
        e = g.exponents
        others = [i for i in range(g.m) if not np.all(e[i] == 0)]
        sub, cond = _choose_basis([e[i] for i in others], n)
        if sub is not None and (best is None or cond < best[0]):
            best = (cond, piv, g, tuple(others[i] for i in sub))
    if best is None:
        raise NoBasisFound("no nonsingular basis among the exponent vectors")
    _, piv, g, basis = best

    amat = np.column_stack([g.exponents[i] for i in basis])
    ch = ChangeOfVariables.from_matrix(
        np.linalg.inv(amat), f"h_(A^-1), A columns = exponents {list(basis)}",
        (f"divide by term {piv}",))
    reduced = apply_change(g, ch)
    lv, slices = [], []
    for j, (lo, hi) in enumerate(levels):
        for value in (hi, lo):
            lv.append((j, value))
            slices.append(fix_variable(reduced, j, value))
    return SliceFamily(ch, tuple(lv), tuple(slices), reduced, piv, basis)
