"""Deterministic random instances for sweeps and property checks."""
from __future__ import annotations

import numpy as np
from scipy import optimize, special

from .core import Fewnomial, build, multiply_monomial
from .geometry import newton_dimension
from .transform import apply_change

COEF_RANGE = 1.0
EXP_RANGE = 5.0


def as_rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _coefficients(rng, m):
    c = rng.uniform(-COEF_RANGE, COEF_RANGE, m)
    while np.any(c == 0):
        c[c == 0] = rng.uniform(-COEF_RANGE, COEF_RANGE, int(np.sum(c == 0)))
    return c


def random_fewnomial(seed, n: int, m: int, exp_range: float = EXP_RANGE) -> Fewnomial:
    """Coefficients uniform in ``[-1, 1] \\ {0}``, exponents uniform in ``[-r, r]**n``."""
    rng = as_rng(seed)
    return build(n, zip(_coefficients(rng, m), rng.uniform(-exp_range, exp_range, (m, n))))


def random_full_dimensional(seed, n: int, m: int, exp_range: float = EXP_RANGE) -> Fewnomial:
    rng = as_rng(seed)
    while True:
        f = random_fewnomial(rng, n, m, exp_range)
        if f.m == m and newton_dimension(f) == n:
            return f


def instance_stream(seed, n: int, m: int, count: int, full_dimensional=False):
    """``count`` instances drawn from one generator seeded with ``seed``."""
    rng = as_rng(seed)
    make = random_full_dimensional if full_dimensional else random_fewnomial
    return [make(rng, n, m) for _ in range(count)]


def well_conditioned_matrix(seed, n: int = 2, max_cond: float = 10.0,
                            integer: bool = True) -> np.ndarray:
    """A random nonsingular matrix with condition number at most ``max_cond``.

    Integer matrices are unimodular products of elementary shears and
    signed permutations, so integer exponents stay integer.
    """
    rng = as_rng(seed)
    while True:
        if integer:
            b = np.eye(n)
            for _ in range(rng.integers(1, 4)):
                i, j = rng.choice(n, 2, replace=False)
                e = np.eye(n)
                e[i, j] = rng.choice([-2, -1, 1, 2])
                b = e @ b
            b = b[rng.permutation(n)] * rng.choice([-1, 1], n)[:, None]
        else:
            b = rng.normal(size=(n, n))
        if np.linalg.cond(b) <= max_cond:
            return b


def tangency_parameters(c: float, d: float):
    """``(A, point)`` for which ``1 - x1 - x2 + A x1^c x2^d`` has a critical zero.

    At a critical zero ``A x1^c x2^d = x1 / c = x2 / d = s`` and the zero
    condition forces ``s = 1 / (c + d - 1)``.
    """
    s = 1.0 / (c + d - 1.0)
    x1, x2 = c * s, d * s
    return s / (x1 ** c * x2 ** d), np.array([x1, x2])


def normal_form(A: float, c: float, d: float) -> Fewnomial:
    return build(2, [(1, [0, 0]), (-1, [1, 0]), (-1, [0, 1]), (A, [c, d])])


def disguise(f: Fewnomial, seed, max_cond: float = 10.0):
    """Apply a random well-conditioned change and monomial multiplier.

    Returns ``(g, B, (coef, exponent))``; ``g`` has the zero set of ``f``
    moved by the diffeomorphism ``h_B``.
    """
    rng = as_rng(seed)
    b = well_conditioned_matrix(rng, f.nvars, max_cond)
    coef = float(rng.choice([-1, 1]) * rng.uniform(0.5, 4.0))
    shift = rng.integers(-3, 4, f.nvars).astype(float)
    return multiply_monomial(apply_change(f, b), coef, shift), b, (coef, shift)


def disguised_normal_forms(seed, count: int):
    """Normal forms with ``c, d`` in ``(1, 4)`` and ``A`` around the tangency value."""
    rng = as_rng(seed)
    out = []
    for _ in range(count):
        c, d = rng.uniform(1.2, 4.0, 2)
        a_tan, _ = tangency_parameters(c, d)
        A = float(a_tan * np.exp(rng.uniform(-1.5, 1.5)))
        g, b, mult = disguise(normal_form(A, c, d), rng)
        out.append((g, (A, c, d), b))
    return out


def tangency_instances(seed, count: int):
    """Disguised normal forms that have a critical zero by construction."""
    rng = as_rng(seed)
    out = []
    for _ in range(count):
        c, d = rng.uniform(1.2, 4.0, 2)
        A, point = tangency_parameters(c, d)
        g, b, _ = disguise(normal_form(A, c, d), rng)
        out.append((g, point, b))
    return out


def oval_instance(seed, excess: float | None = None) -> Fewnomial:
    """A triangle of positive terms plus one negative interior term.

    The negative coefficient exceeds the minimum of the positive part over
    the interior monomial by the factor ``1 + excess``, so the zero set is a
    single oval.
    """
    rng = as_rng(seed)
    while True:
        verts = rng.integers(-4, 5, (3, 2)).astype(float)
        area = abs(np.linalg.det(np.array([verts[1] - verts[0], verts[2] - verts[0]]))) / 2
        if area >= 2:
            break
    w = rng.dirichlet(np.ones(3) * 2)
    p = w @ verts
    coefs = rng.uniform(0.2, 2.0, 3)
    logc = np.log(coefs)

    def ratio(u):
        return special.logsumexp((verts - p) @ u + logc)

    res = optimize.minimize(ratio, np.zeros(2), method="BFGS")
    eps = rng.uniform(0.05, 1.0) if excess is None else excess
    c0 = float(np.exp(res.fun) * (1 + eps))
    return build(2, [*zip(coefs, verts), (-c0, p)])
