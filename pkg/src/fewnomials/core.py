"""Fewnomials with real exponents on the open positive orthant.

A fewnomial is stored as an immutable, canonically ordered tuple of
:class:`Term` objects.  All evaluation goes through logarithmic coordinates
``u = log x`` so that ``x**a`` never overflows on its own.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyAfterRegroup,
    LengthMismatch,
    NotUnivariate,
    ZeroCoefficient,
)

REGROUP_TOL = 1e-9


@dataclass(frozen=True)
class Term:
    coefficient: float
    exponent: tuple

    def __post_init__(self):
        if self.coefficient == 0:
            raise ZeroCoefficient("term coefficients must be nonzero")


@dataclass(frozen=True)
class Fewnomial:
    """``f(x) = sum_i c_i x**a_i`` over ``nvars`` positive variables."""

    nvars: int
    terms: tuple
    exact: bool = False

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([float(t.coefficient) for t in self.terms])

    @property
    def exponents(self) -> np.ndarray:
        """``(m, nvars)`` float array of exponent vectors."""
        return np.array([[float(a) for a in t.exponent] for t in self.terms],
                        dtype=float).reshape(self.m, self.nvars)

    def raw_terms(self):
        return [(t.coefficient, t.exponent) for t in self.terms]

    def __call__(self, x):
        return evaluate(self, x)

    def __str__(self):
        parts = []
        for t in self.terms:
            mono = "*".join(
                f"x{j + 1}^{_fmt(a)}" if a != 1 else f"x{j + 1}"
                for j, a in enumerate(t.exponent) if a != 0
            )
            c = _fmt(t.coefficient)
            parts.append(f"{c}*{mono}" if mono else c)
        return " + ".join(parts).replace("+ -", "- ")


def _fmt(v):
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def _as_exponent(vec, exact):
    if exact:
        return tuple(Fraction(a) for a in vec)
    return tuple(float(a) + 0.0 for a in vec)


def build(nvars: int, raw_terms: Iterable, *, exact: bool = False,
          tol: float = REGROUP_TOL) -> Fewnomial:
    """Assemble a fewnomial from ``(coefficient, exponent)`` pairs.

    Exponent vectors closer than ``tol`` in the sup norm are merged (exact
    equality when ``exact`` is set), cancelled terms are dropped and the
    result is sorted lexicographically by exponent.
    """
    if nvars < 1:
        raise LengthMismatch("nvars must be positive")
    items = []
    for coef, exp in raw_terms:
        exp = list(np.ravel(exp)) if not exact else list(exp)
        if len(exp) != nvars:
            raise LengthMismatch(
                f"exponent {exp!r} has length {len(exp)}, expected {nvars}")
        if coef == 0:
            raise ZeroCoefficient("input coefficients must be nonzero")
        items.append((Fraction(coef) if exact else float(coef),
                      _as_exponent(exp, exact)))
    return _regroup(nvars, items, exact, tol)


def _regroup(nvars, items, exact, tol):
    items = sorted(items, key=lambda it: it[1])
    groups = []  # [representative exponent, accumulated coefficients]
    for coef, exp in items:
        for g in groups:
            rep = g[0]
            if exact:
                same = rep == exp
            else:
                same = max(abs(a - b) for a, b in zip(rep, exp)) <= tol
            if same:
                g[1].append(coef)
                break
        else:
            groups.append([exp, [coef]])
    terms = []
    for exp, coefs in groups:
        total = sum(coefs) if exact else math.fsum(coefs)
        if total != 0:
            terms.append(Term(total, exp))
    if not terms:
        raise EmptyAfterRegroup("all coefficients cancelled")
    terms.sort(key=lambda t: t.exponent)
    return Fewnomial(nvars, tuple(terms), exact)


def rebuild(f: Fewnomial, raw_terms, nvars=None) -> Fewnomial:
    """``build`` with the same exactness as ``f``; zero coefficients dropped."""
    raw = [(c, e) for c, e in raw_terms if c != 0]
    if not raw:
        raise EmptyAfterRegroup("all coefficients cancelled")
    return build(f.nvars if nvars is None else nvars, raw, exact=f.exact)


def constant(value: float, nvars: int = 1) -> Fewnomial:
    return build(nvars, [(value, [0.0] * nvars)])


def _check_point(f, u):
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != f.nvars:
        raise DimensionMismatch(
            f"point has dimension {u.shape[-1]}, fewnomial has {f.nvars}")
    return u


def evaluate_log(f: Fewnomial, u) -> float | np.ndarray:
    """Value of ``f`` at ``exp(u)``; ``u`` may carry leading batch axes."""
    u = _check_point(f, u)
    vals = f.coefficients * np.exp(u @ f.exponents.T)
    if vals.ndim == 1:
        return math.fsum(sorted(vals, key=abs))
    order = np.argsort(np.abs(vals), axis=-1)
    return np.take_along_axis(vals, order, axis=-1).sum(axis=-1)


def evaluate(f: Fewnomial, x) -> float | np.ndarray:
    x = _check_point(f, x)
    if np.any(x <= 0):
        raise ValueError("fewnomials are only defined on the positive orthant")
    return evaluate_log(f, np.log(x))


def gradient_log(f: Fewnomial, u) -> np.ndarray:
    """Gradient of ``u -> f(exp(u))``; equals ``x * grad f(x)`` componentwise."""
    u = _check_point(f, u)
    weights = f.coefficients * np.exp(u @ f.exponents.T)
    return weights @ f.exponents


def scaled_log(f: Fewnomial, u):
    """Overflow-free ``(f(exp u) / exp(s), s)`` with ``s`` the largest term exponent.

    The returned value has the sign of ``f`` and lies in ``[-m, m]``.
    """
    u = _check_point(f, u)
    z = u @ f.exponents.T
    s = z.max(axis=-1, keepdims=True)
    w = np.exp(z - s)
    return (w * f.coefficients).sum(axis=-1), s[..., 0]


def term_scale_log(f: Fewnomial, u):
    """``sum_i |c_i| exp(<a_i, u>)``, the local magnitude of the terms."""
    u = _check_point(f, u)
    return np.exp(u @ f.exponents.T) @ np.abs(f.coefficients)


def monomial_normalize(f: Fewnomial, pivot: int) -> Fewnomial:
    """Divide ``f`` by its ``pivot`` term so that term becomes the constant 1."""
    if not 0 <= pivot < f.m:
        raise IndexError(f"pivot {pivot} out of range for {f.m} terms")
    p = f.terms[pivot]
    raw = []
    for i, t in enumerate(f.terms):
        exp = [0 * a for a in t.exponent] if i == pivot else [
            a - b for a, b in zip(t.exponent, p.exponent)]
        coef = 1 if i == pivot else t.coefficient / p.coefficient
        raw.append((coef, exp))
    return build(f.nvars, raw, exact=f.exact)


def sign_changes(f: Fewnomial) -> int:
    """Sign alternations of the coefficients ordered by increasing exponent."""
    if f.nvars != 1:
        raise NotUnivariate("sign_changes needs a univariate fewnomial")
    signs = [t.coefficient > 0 for t in f.terms]
    return sum(a != b for a, b in zip(signs, signs[1:]))


def multiply_monomial(f: Fewnomial, coef: float, exponent: Sequence[float]) -> Fewnomial:
    """``coef * x**exponent * f`` (same zero set as ``f``)."""
    if coef == 0:
        raise ZeroCoefficient("multiplier must be nonzero")
    raw = [(coef * t.coefficient, [a + b for a, b in zip(t.exponent, exponent)])
           for t in f.terms]
    return build(f.nvars, raw, exact=f.exact)


def negate(f: Fewnomial) -> Fewnomial:
    return multiply_monomial(f, -1, [0] * f.nvars)
