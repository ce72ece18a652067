"""Upper bounds on component counts of fewnomial zero sets.

Every bound is a :class:`BoundResult` whose ``trace`` lists the rule
applications of the winning derivation in dependency order.  Each step
names its operands by index into the same trace, so the value can be
recomputed from the rule formulas alone (see :func:`replay`).

Quantities::

    P, P_comp, P_non   max Tot / Comp / Non over <= m-nomials in n variables
    Kprime             max non-degenerate positive roots of n x n systems
                       with <= m exponent vectors
    Tot_fulldim,
    Non_fulldim        the same counts restricted to full-dimensional
                       Newton polytopes
    Tot                dimension-aware bound for a given Newton dimension
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .core import Fewnomial, sign_changes
from .errors import BoundOverflow, NotUnivariate

QUANTITIES = ("P", "P_comp", "P_non", "Kprime", "Non_fulldim", "Tot_fulldim", "Tot")
MAX_BITS = 1 << 20


@dataclass(frozen=True)
class SpecialCase:
    quantity: str
    n: int
    m: int
    value: int
    citation: str
    origin: str = "new"         # "prior": literature result kept in legacy mode
    conditional: bool = False   # holds only under an extra hypothesis

    def __post_init__(self):
        if not self.citation.strip():
            raise ValueError("every special case needs a citation")
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")


@dataclass(frozen=True)
class RuleTable:
    special_cases: dict = field(default_factory=dict)
    depth_limit: int = 500

    @classmethod
    def from_cases(cls, cases, depth_limit=500):
        return cls({(c.quantity, c.n, c.m): c for c in cases}, depth_limit)

    def lookup(self, quantity, n, m, legacy=False):
        case = self.special_cases.get((quantity, n, m))
        if case is None or (legacy and case.origin != "prior"):
            return None
        return case

    def with_case(self, case: SpecialCase) -> "RuleTable":
        cases = dict(self.special_cases)
        cases[(case.quantity, case.n, case.m)] = case
        return replace(self, special_cases=cases)


DEFAULT_CASES = (
    SpecialCase("Kprime", 2, 4, 5,
                "Li-Rojas-Wang: a bivariate system with at most four distinct "
                "exponent vectors has at most 5 non-degenerate positive roots",
                origin="prior"),
    SpecialCase("P_comp", 2, 4, 1,
                "bivariate 4-nomials: a compact component is the whole zero set, "
                "so at most one compact component (sharp)"),
    SpecialCase("P_non", 2, 4, 3,
                "bivariate 4-nomials: at most three non-compact components (sharp)"),
    SpecialCase("P", 2, 4, 3,
                "bivariate 4-nomials: at most three components, hence P(n,4) = 3 "
                "for every n (sharp)"),
    SpecialCase("Tot_fulldim", 2, 4, 2,
                "bivariate 4-nomials with two-dimensional Newton polygon: "
                "at most two components (sharp)"),
    SpecialCase("Non_fulldim", 3, 5, 12,
                "trivariate 5-nomials with three-dimensional Newton polytope: "
                "six bivariate 4-nomial slices with at most two components each",
                conditional=True),
)

DEFAULT_TABLE = RuleTable.from_cases(DEFAULT_CASES)


@dataclass(frozen=True)
class TraceStep:
    rule: str
    quantity: str
    n: int
    m: int
    operands: tuple
    value: int
    note: str = ""


@dataclass(frozen=True)
class BoundResult:
    value: int
    quantity: str
    n: int
    m: int
    trace: tuple
    implies: Optional[dict] = None

    def describe(self) -> str:
        lines = [f"{self.quantity}({self.n},{self.m}) <= {self.value}"]
        for i, s in enumerate(self.trace):
            ops = ", ".join(f"#{j}" for j in s.operands)
            lines.append(f"  #{i} {s.rule}: {s.quantity}({s.n},{s.m}) <= {s.value}"
                         + (f"  from {ops}" if ops else "")
                         + (f"  [{s.note}]" if s.note else ""))
        return "\n".join(lines)


def _khovanski(n, m):
    return (n + 1) ** (m - 1) * 2 ** ((m - 1) * (m - 2) // 2)


def _slices_tot(n, ops):
    return sum(2 ** i * math.factorial(n) // math.factorial(n - i) * v
               for i, v in enumerate(ops))


RULES = {
    "khovanski": lambda n, m, ops: _khovanski(n, m),
    "explicit_total": lambda n, m, ops: 2 * _khovanski(n, m),
    "descartes": lambda n, m, ops: m - 1,
    "few_terms": lambda n, m, ops: max(m - 1, 0),
    "points_compact": lambda n, m, ops: 0,
    "fewer_variables": lambda n, m, ops: ops[0],
    "comp_from_kprime": lambda n, m, ops: 2 * (ops[0] // 2),
    "non_from_lower": lambda n, m, ops: 2 * ops[0],
    "split": lambda n, m, ops: ops[0] + ops[1],
    "le_total": lambda n, m, ops: ops[0],
    "slices_non": lambda n, m, ops: 2 * n * ops[0],
    "slices_tot": lambda n, m, ops: _slices_tot(n, ops),
    "low_dimension": lambda n, m, ops: ops[0],
    "simplex_support": lambda n, m, ops: 1,
    "monomial": lambda n, m, ops: 0,
    "full_dimension": lambda n, m, ops: ops[0],
}

CITATIONS = {
    "khovanski": "Khovanski: K'(n,m) <= (n+1)^(m-1) 2^((m-1)(m-2)/2)",
    "explicit_total": "P(n,m) <= (n+1)^(m-1) 2^(1+(m-1)(m-2)/2)",
    "descartes": "Descartes' rule of signs: at most m-1 positive roots",
    "few_terms": "at most m-1 components for m <= 2",
    "points_compact": "univariate zero sets are finite, hence compact",
    "fewer_variables": "P(n,m) <= P(m-2,m) for m >= 3",
    "comp_from_kprime": "Li-Rojas-Wang: P_comp(n,m) <= 2 floor(K'(n,m)/2)",
    "non_from_lower": "Li-Rojas-Wang: P_non(n,m) <= 2 P(n-1,m)",
    "split": "P <= P_comp + P_non",
    "le_total": "Comp, Non <= Tot",
    "slices_non": "full dimension: Non <= 2n P(n-1,m-1) via 2n hyperplane slices",
    "slices_tot": "full dimension: Tot <= sum 2^i n!/(n-i)! P_comp(n-i,m-i)",
    "low_dimension": "Newton dimension d <= n-1: Comp = 0 and Non <= P(d,m)",
    "simplex_support": "Newton dimension d = m-1: Comp = 0 and Non <= 1",
    "monomial": "a single monomial never vanishes on the orthant",
    "full_dimension": "full-dimensional case bounded by the general one",
}


def _check_size(value):
    if value.bit_length() > MAX_BITS:
        raise BoundOverflow(f"bound exceeds {MAX_BITS} bits")
    return value


class BoundEngine:
    """Memoized dispatcher over the rule set.

    ``special_cases=False`` keeps only the ``prior`` entries of the table,
    which reproduces the legacy derivations.
    """

    def __init__(self, table: RuleTable = DEFAULT_TABLE, special_cases: bool = True):
        self.table = table
        self.legacy = not special_cases
        self._memo = {}

    # -- trace plumbing -----------------------------------------------------

    def _leaf(self, rule, quantity, n, m, note=""):
        value = _check_size(RULES[rule](n, m, ()))
        return BoundResult(value, quantity, n, m,
                           (TraceStep(rule, quantity, n, m, (), value, note),))

    def _combine(self, rule, quantity, n, m, parts, note=""):
        trace, ops = [], []
        for part in parts:
            offset = len(trace)
            for s in part.trace:
                trace.append(replace(s, operands=tuple(j + offset for j in s.operands)))
            ops.append(len(trace) - 1)
        value = _check_size(RULES[rule](n, m, [p.value for p in parts]))
        trace.append(TraceStep(rule, quantity, n, m, tuple(ops), value, note))
        return BoundResult(value, quantity, n, m, tuple(trace))

    def _special(self, quantity, n, m):
        case = self.table.lookup(quantity, n, m, self.legacy)
        if case is None or case.conditional:
            return None
        return BoundResult(case.value, quantity, n, m,
                           (TraceStep("special", quantity, n, m, (), case.value,
                                      case.citation),))

    def _cached(self, key, compute):
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo.setdefault(key, compute())
        return hit

    @staticmethod
    def _best(cands):
        cands = [c for c in cands if c is not None]
        return min(cands, key=lambda c: c.value)

    # -- closed forms -------------------------------------------------------

    def khovanski(self, n, m):
        _check_nm(n, m)
        return self._leaf("khovanski", "Kprime", n, m, CITATIONS["khovanski"])

    def explicit_total(self, n, m):
        _check_nm(n, m)
        return self._leaf("explicit_total", "P", n, m, CITATIONS["explicit_total"])

    def kprime(self, n, m):
        _check_nm(n, m)
        return self._cached(("Kprime", n, m), lambda: self._best(
            [self._special("Kprime", n, m), self.khovanski(n, m)]))

    # -- recursive dispatcher -----------------------------------------------

    def p(self, n, m):
        _check_nm(n, m)
        return self._cached(("P", n, m), lambda: self._p(n, m))

    def _p(self, n, m):
        if m <= 2:
            return self._leaf("few_terms", "P", n, m)
        special = self._special("P", n, m)
        if n > m - 2:
            low = self.p(m - 2, m)
            return self._best([special, self._combine("fewer_variables", "P", n, m, [low])])
        cands = [special]
        if n == 1:
            cands.append(self._leaf("descartes", "P", n, m))
        cands.append(self._combine("split", "P", n, m,
                                   [self._p_comp_direct(n, m), self._p_non_direct(n, m)]))
        cands.append(self.explicit_total(n, m))
        return self._best(cands)

    def _p_comp_direct(self, n, m):
        return self._cached(("P_comp*", n, m), lambda: self._best([
            self._special("P_comp", n, m),
            self._combine("comp_from_kprime", "P_comp", n, m, [self.kprime(n, m)]),
        ]))

    def _p_non_direct(self, n, m):
        def compute():
            cands = [self._special("P_non", n, m)]
            if n == 1:
                cands.append(self._leaf("points_compact", "P_non", n, m))
            else:
                cands.append(self._combine("non_from_lower", "P_non", n, m,
                                           [self.p(n - 1, m)]))
            return self._best(cands)
        return self._cached(("P_non*", n, m), compute)

    def p_comp(self, n, m):
        _check_nm(n, m)
        return self._cached(("P_comp", n, m), lambda: self._best([
            self._p_comp_direct(n, m),
            self._combine("le_total", "P_comp", n, m, [self.p(n, m)])]))

    def p_non(self, n, m):
        _check_nm(n, m)
        return self._cached(("P_non", n, m), lambda: self._best([
            self._p_non_direct(n, m),
            self._combine("le_total", "P_non", n, m, [self.p(n, m)])]))

    # -- full-dimensional refinements ---------------------------------------

    def tot_fulldim(self, n, m):
        """Tot bound for ``m``-nomials whose Newton polytope has dimension ``n``."""
        _check_nm(n, m)

        def compute():
            cands = [self._special("Tot_fulldim", n, m),
                     self._combine("full_dimension", "Tot_fulldim", n, m, [self.p(n, m)])]
            if n >= 2 and m >= 2:
                cands.append(self.slices(n, m)[1])
            return self._best(cands)
        return self._cached(("Tot_fulldim", n, m), compute)

    def slices(self, n, m, refine=False):
        """``(Non, Tot)`` bounds for full-dimensional ``m``-nomials in ``n >= 2`` variables.

        With ``refine`` each slice is bounded by the full-dimensional count
        ``Tot_fulldim(n-1, m-1)`` instead of ``P(n-1, m-1)``, since every
        slice keeps a full-dimensional Newton polytope.
        """
        if n < 2 or m < 2:
            raise ValueError("slice bounds need n >= 2 and m >= 2")
        per_slice = self.tot_fulldim(n - 1, m - 1) if refine else self.p(n - 1, m - 1)
        non = self._combine("slices_non", "Non_fulldim", n, m, [per_slice],
                            CITATIONS["slices_non"])
        parts = [self.p_comp(n - i, m - i) if m - i >= 1
                 else self._leaf("few_terms", "P_comp", n - i, 1)
                 for i in range(n)]
        tot = self._combine("slices_tot", "Tot_fulldim", n, m, parts,
                            CITATIONS["slices_tot"])
        return non, tot

    def non_fulldim(self, n, m, conditional=True):
        """Best Non bound for full-dimensional supports, conditional entries included."""
        cands = [self.slices(n, m)[0], self.slices(n, m, refine=True)[0]]
        case = self.table.lookup("Non_fulldim", n, m, self.legacy)
        if case is not None and (conditional or not case.conditional):
            cands.append(BoundResult(case.value, "Non_fulldim", n, m, (
                TraceStep("special", "Non_fulldim", n, m, (), case.value, case.citation),)))
        return self._best(cands)

    def by_dimension(self, n, m, d):
        """Tot bound for an ``m``-nomial in ``n`` variables with Newton dimension ``d``."""
        _check_nm(n, m)
        if not 0 <= d <= min(m - 1, n):
            raise ValueError(f"Newton dimension {d} impossible for n={n}, m={m}")
        if d == 0:
            res = self._leaf("monomial", "Tot", n, m, CITATIONS["monomial"])
            return replace(res, implies={"Comp": 0, "Non": 0})
        cands = []
        if d == m - 1:
            cands.append(self._leaf("simplex_support", "Tot", n, m, CITATIONS["simplex_support"]))
        if d <= n - 1:
            cands.append(self._combine("low_dimension", "Tot", n, m, [self.p(d, m)],
                                       CITATIONS["low_dimension"]))
        if d == n and d < m - 1:
            cands.append(self._combine("full_dimension", "Tot", n, m,
                                       [self.tot_fulldim(n, m)]))
        best = self._best(cands)
        comp_zero = n >= 2 and (d <= n - 1 or d == m - 1)
        implies = {"Comp": 0, "Non": best.value} if comp_zero else None
        return replace(best, implies=implies)


def _check_nm(n, m):
    if n < 1 or m < 1:
        raise ValueError(f"need n >= 1 and m >= 1, got n={n}, m={m}")


def replay(result: BoundResult, table: RuleTable = DEFAULT_TABLE) -> bool:
    """Recompute every trace step; True iff all values and the final value agree."""
    values = []
    for s in result.trace:
        if any(j >= len(values) for j in s.operands):
            return False
        if s.rule == "special":
            case = table.special_cases.get((s.quantity, s.n, s.m))
            expect = None if case is None else case.value
        elif s.rule in RULES:
            expect = RULES[s.rule](s.n, s.m, [values[j] for j in s.operands])
        else:
            return False
        if expect != s.value:
            return False
        values.append(s.value)
    return bool(values) and values[-1] == result.value


# -- module-level conveniences ----------------------------------------------

_ENGINES = {}


def engine(special_cases: bool = True, table: RuleTable = DEFAULT_TABLE) -> BoundEngine:
    key = (id(table), special_cases)
    eng = _ENGINES.get(key)
    if eng is None or eng.table is not table:
        eng = _ENGINES[key] = BoundEngine(table, special_cases)
    return eng


def descartes_bound(f: Fewnomial) -> int:
    if f.nvars != 1:
        raise NotUnivariate("Descartes' rule needs a univariate fewnomial")
    return sign_changes(f)


def descartes_weak(f: Fewnomial) -> int:
    if f.nvars != 1:
        raise NotUnivariate("Descartes' rule needs a univariate fewnomial")
    return f.m - 1


def khovanski_kprime(n, m):
    return engine().khovanski(n, m)


def kprime_best(n, m, special_cases=True):
    return engine(special_cases).kprime(n, m)


def cuenta_final_bound(n, m):
    return engine().explicit_total(n, m)


def p_bound(n, m, special_cases=True):
    return engine(special_cases).p(n, m)


def p_comp_bound(n, m, special_cases=True):
    return engine(special_cases).p_comp(n, m)


def p_non_bound(n, m, special_cases=True):
    return engine(special_cases).p_non(n, m)


def anexo_bounds(n, m, refine=False, special_cases=True):
    return engine(special_cases).slices(n, m, refine)


def dimcorr_dispatch(n, m, d, special_cases=True):
    return engine(special_cases).by_dimension(n, m, d)


def bound(quantity: str, n: int, m: int, special_cases=True) -> BoundResult:
    """Dispatch by quantity name (used by the command line)."""
    eng = engine(special_cases)
    table = {
        "P": eng.p, "P_comp": eng.p_comp, "P_non": eng.p_non, "Kprime": eng.kprime,
        "Tot_fulldim": eng.tot_fulldim,
        "Non_fulldim": lambda n, m: eng.non_fulldim(n, m, conditional=special_cases),
    }
    if quantity not in table:
        raise ValueError(f"unknown quantity {quantity!r}; choose from {sorted(table)}")
    return table[quantity](n, m)
