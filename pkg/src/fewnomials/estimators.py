"""scikit-learn style wrappers over the census, normal form and bound engine.

The "samples" are fewnomials rather than rows of a numeric matrix, so the
estimators take a sequence of :class:`~fewnomials.core.Fewnomial` (or
anything :func:`check_fewnomial` accepts) and return numeric arrays.
Fitting only validates parameters; nothing is learned from data.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import bounds
from .census import GridSpec, census
from .core import Fewnomial, build
from .geometry import hull_and_classify, newton_dimension
from .io import parse_fewnomial
from .transform import normalize_to_standard_form


def check_fewnomial(obj, nvars: int | None = None) -> Fewnomial:
    """Coerce ``obj`` to a :class:`Fewnomial`.

    Accepts a fewnomial, the text of a fewnomial file, or a sequence of
    ``(coefficient, exponent)`` pairs.
    """
    if isinstance(obj, Fewnomial):
        f = obj
    elif isinstance(obj, str):
        f = parse_fewnomial(obj)
    else:
        pairs = list(obj)
        if not pairs:
            raise ValueError("empty term list")
        width = len(np.ravel(pairs[0][1]))
        f = build(width, pairs)
    if nvars is not None and f.nvars != nvars:
        raise ValueError(f"expected {nvars} variables, got {f.nvars}")
    return f


def check_fewnomials(X, nvars: int | None = None) -> list:
    if isinstance(X, (Fewnomial, str)):
        raise TypeError("expected a sequence of fewnomials, got a single one")
    out = [check_fewnomial(x, nvars) for x in X]
    if not out:
        raise ValueError("no fewnomials given")
    return out


class ZeroSetCensus(TransformerMixin, BaseEstimator):
    """Rows ``(tot, comp, non)`` of stabilised censuses in one or two variables."""

    def __init__(self, half_width=12.0, resolution=512, max_doublings=4):
        self.half_width = half_width
        self.resolution = resolution
        self.max_doublings = max_doublings

    def fit(self, X=None, y=None):
        self.grid_ = GridSpec(float(self.half_width), int(self.resolution),
                              int(self.max_doublings))
        if X is not None:
            check_fewnomials(X)
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        fs = check_fewnomials(X)
        results = [census(f, self.grid_) for f in fs]
        self.converged_ = np.array([r.converged for r in results])
        return np.array([r.counts() for r in results], dtype=int).reshape(-1, 3)

    def predict(self, X):
        """Total component counts."""
        return self.transform(X)[:, 0]


class StandardFormNormalizer(TransformerMixin, BaseEstimator):
    """Rows ``(A, c, d)`` of the normal form ``1 - x1 - x2 + A x1^c x2^d``."""

    def fit(self, X=None, y=None):
        self.fitted_ = True
        return self

    def transform(self, X):
        check_is_fitted(self, "fitted_")
        forms = [normalize_to_standard_form(f) for f in check_fewnomials(X, nvars=2)]
        self.forms_ = forms
        return np.array([(nf.A, nf.c, nf.d) for nf in forms], dtype=float).reshape(-1, 3)


class NewtonFeatures(TransformerMixin, BaseEstimator):
    """Support descriptors: ``m``, Newton dimension and, for two variables,
    hull size and the quadrilateral flags (NaN otherwise)."""

    feature_names = ("m", "newton_dim", "hull_vertices", "is_quadrilateral",
                     "parallel_sides", "alternating_signs", "normal_form_ready")

    def fit(self, X=None, y=None):
        self.n_features_out_ = len(self.feature_names)
        return self

    def get_feature_names_out(self, input_features=None):
        return np.array(self.feature_names, dtype=object)

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        rows = []
        for f in check_fewnomials(X):
            row = [f.m, newton_dimension(f)] + [np.nan] * 5
            if f.nvars == 2:
                summary, quad = hull_and_classify(f)
                row[2:] = [len(summary.hull_vertices), quad.is_quadrilateral,
                           quad.has_parallel_opposite_sides,
                           quad.adjacent_signs_opposite, quad.equiv_hypotheses_met]
            rows.append(row)
        return np.array(rows, dtype=float)


class BoundPredictor(BaseEstimator):
    """Predicts the best proven bound on the component count of each input.

    Univariate inputs get the sign-change count; otherwise the bound for
    their number of variables, terms and Newton dimension.
    """

    def __init__(self, special_cases=True):
        self.special_cases = special_cases

    def fit(self, X=None, y=None):
        self.fitted_ = True
        return self

    def predict(self, X):
        check_is_fitted(self, "fitted_")
        out = []
        for f in check_fewnomials(X):
            if f.nvars == 1:
                out.append(bounds.descartes_bound(f))
            else:
                out.append(bounds.dimcorr_dispatch(f.nvars, f.m, newton_dimension(f),
                                                   self.special_cases).value)
        return np.array(out, dtype=object)
