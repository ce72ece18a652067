import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import same_fewnomial
from fewnomials.core import build, evaluate, evaluate_log, multiply_monomial
from fewnomials.census import isolate_roots_1d
from fewnomials.errors import (DimensionMismatch, NotFullDimensional, PrereqNotMet,
                               SingularMatrix, ZeroDirection)
from fewnomials.generators import (disguise, normal_form, random_fewnomial,
                                   random_full_dimensional, well_conditioned_matrix)
from fewnomials.transform import (ChangeOfVariables, apply_change, curve_point,
                                  fix_variable, normalize_to_standard_form,
                                  restrict_to_curve, slice_reduction, snap_exponents)


def test_identity_change(f3):
    assert apply_change(f3, np.eye(2)) == f3


def test_shear_change():
    f = build(2, [(1, [0, 0]), (-1, [1, 1])])
    b = np.column_stack([(1, 1), (0, 1)])
    assert apply_change(f, b) == build(2, [(1, [0, 0]), (-1, [1, 2])])


def test_singular_and_mismatched_changes(f3):
    with pytest.raises(SingularMatrix):
        apply_change(f3, [[1, 2], [2, 4]])
    with pytest.raises(DimensionMismatch):
        apply_change(f3, np.eye(3))


def test_exact_change_keeps_fractions():
    f = build(2, [(1, [0, 0]), (-1, [1, 2])], exact=True)
    g = apply_change(f, [[2, 1], [1, 1]])
    assert g.exact
    assert {t.exponent for t in g.terms} == {(0, 0), (4, 3)}


def test_snapping_removes_roundoff():
    out = snap_exponents([[1e-17, 2.0000000000000004], [0.5, -3 + 1e-9]])
    assert out[0].tolist() == [0.0, 2.0]
    assert out[1].tolist() == [0.5, -3 + 1e-9]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.lists(st.floats(-2, 2), min_size=2, max_size=2))
def test_change_is_composition_with_h_b(seed, u):
    rng = np.random.default_rng(seed)
    f = random_fewnomial(rng, 2, 4, exp_range=2)
    ch = ChangeOfVariables.from_matrix(well_conditioned_matrix(rng, integer=False))
    lhs = evaluate_log(apply_change(f, ch), u)
    rhs = evaluate_log(f, ch.map_log(u))
    scale = np.abs(f.coefficients).sum() * math.exp(np.abs(f.exponents).sum(1).max()
                                                   * np.abs(ch.map_log(u)).max())
    assert lhs == pytest.approx(rhs, abs=1e-10 * scale)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_then_composes_in_application_order(seed):
    rng = np.random.default_rng(seed)
    f = random_fewnomial(rng, 2, 3)
    b = ChangeOfVariables.from_matrix(well_conditioned_matrix(rng))
    c = ChangeOfVariables.from_matrix(well_conditioned_matrix(rng))
    assert same_fewnomial(apply_change(apply_change(f, b), c), apply_change(f, b.then(c)))


def test_normal_form_is_fixed(normal_222):
    nf = normalize_to_standard_form(normal_222)
    assert (nf.A, nf.c, nf.d) == pytest.approx((2, 2, 2))
    assert np.allclose(nf.transform.matrix, np.eye(2))
    assert nf.rescale == pytest.approx((1, 1))


def test_disguised_normal_form_is_recovered(normal_222):
    b = np.array([[2, 1], [1, 1]])
    g = multiply_monomial(apply_change(normal_222, b), 7, [3, -2])
    nf = normalize_to_standard_form(g)
    assert nf.A > 0 and nf.c > 1 and nf.d > 1
    # a point of the normal form's zero set maps onto the zero set of g
    t = np.linspace(0.05, 0.95, 7)
    for x1 in t:
        h = build(1, [(1 - x1, [0]), (-1, [1]), (nf.A * x1 ** nf.c, [nf.d])])
        for br in isolate_roots_1d(h):
            on_nf = np.array([x1, math.exp(br.mid)])
            y = nf.to_original(on_nf)
            assert abs(evaluate(g, y)) <= 1e-7 * np.abs(g.coefficients).max() * max(
                1.0, float(np.max(np.exp(np.log(y) @ g.exponents.T))))


def test_square_support_is_rejected():
    f = build(2, [(1, [0, 0]), (-1, [1, 0]), (1, [1, 1]), (-1, [0, 1])])
    with pytest.raises(PrereqNotMet):
        normalize_to_standard_form(f)


def test_restrict_examples(f3, normal_222):
    r = restrict_to_curve(f3, (2, 3), (0, 1))
    assert same_fewnomial(r.restricted, build(1, [(-2, [0]), (1, [1])]))
    r = restrict_to_curve(f3, (2, 3), (1, 0))
    assert same_fewnomial(r.restricted, build(1, [(-3, [0]), (1, [1])]))
    r = restrict_to_curve(normal_222, (1, 1), (2, 1))
    assert same_fewnomial(r.restricted, build(1, [(1, [-2]), (1, [0]), (-1, [1])]))


def test_restrict_rejects_zero_direction(f3):
    with pytest.raises(ZeroDirection):
        restrict_to_curve(f3, (1, 1), (0, 0))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000),
       st.tuples(st.floats(0.2, 5), st.floats(0.2, 5)),
       st.sampled_from([(0, 1), (1, 0), (1, 1), (2, -1), (-1, 3), (0.5, 1.5), (3, 2)]),
       st.floats(0.2, 5))
def test_restriction_matches_direct_evaluation(seed, p, u, t):
    f = random_fewnomial(seed, 2, 4, exp_range=3)
    r = restrict_to_curve(f, p, u)
    x = r.curve(t)
    direct = evaluate(f, x)
    scale = np.sum(np.abs(f.coefficients) * np.exp(np.log(x) @ f.exponents.T))
    assert evaluate(r.restricted, [t]) == pytest.approx(direct, rel=1e-10, abs=1e-10 * scale)
    # the curve stays on {x^u = p^u}
    if u[1] != 0:
        assert np.dot(u, np.log(x)) == pytest.approx(np.dot(u, np.log(p)), abs=1e-9)


def test_curve_point_on_vertical_line():
    assert curve_point((2, 3), (1, 0), 5.0).tolist() == [2, 5]


def test_slices_of_hyperbola(f3):
    fam = slice_reduction(f3, [(0.5, 3), (0.5, 3)])
    assert len(fam.slices) == 4
    assert np.allclose(fam.basis_change.matrix, np.eye(2))
    slice_x1_3 = fam.slices[fam.levels.index((0, 3.0))]
    assert same_fewnomial(slice_x1_3, build(1, [(-5, [0]), (2, [1])]))


def test_trivariate_five_term_slices():
    f = random_full_dimensional(4, 3, 5)
    fam = slice_reduction(f, [(0.1, 10)] * 3)
    assert len(fam.slices) == 6
    assert all(s.nvars == 2 and s.m <= 4 for s in fam.slices)


def test_slices_need_full_dimension():
    f = build(3, [(1, [0, 0, 0]), (1, [1, 1, 0]), (1, [2, 2, 0]), (-1, [0, 0, 1])])
    with pytest.raises(NotFullDimensional):
        slice_reduction(f, [(0.5, 2)] * 3)


def test_fix_variable():
    f = build(2, [(1, [2, 1]), (-1, [0, 0])])
    assert same_fewnomial(fix_variable(f, 0, 3.0), build(1, [(-1, [0]), (9, [1])]))


def test_disguise_moves_zero_set(normal_222):
    g, b, (coef, shift) = disguise(normal_222, 11)
    u = np.array([0.2, -0.4])
    v = u @ np.asarray(b, dtype=float)
    assert evaluate_log(g, u) == pytest.approx(
        coef * math.exp(np.dot(shift, u)) * evaluate_log(normal_222, v))
