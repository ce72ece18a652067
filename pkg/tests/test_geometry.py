import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fewnomials.core import build
from fewnomials.geometry import (convex_hull_indices, hull_and_classify, matrix_rank,
                                 newton_dimension)


def test_newton_dimension_examples(f2_bi, f3):
    assert newton_dimension(f2_bi) == 1
    assert newton_dimension(f3) == 2
    g = build(3, [(1, [0, 0, 0]), (1, [1, 1, 0]), (1, [2, 2, 0]), (1, [0, 0, 1])])
    assert newton_dimension(g) == 2


def test_single_term_has_dimension_zero():
    assert newton_dimension(build(3, [(2.0, [1, 2, 3])])) == 0


def test_normal_form_support_meets_hypotheses(normal_222):
    _, quad = hull_and_classify(normal_222)
    assert quad.is_quadrilateral
    assert not quad.has_parallel_opposite_sides
    assert quad.adjacent_signs_opposite
    assert quad.equiv_hypotheses_met


def test_unit_square_has_parallel_sides():
    f = build(2, [(1, [0, 0]), (-1, [1, 0]), (1, [1, 1]), (-1, [0, 1])])
    _, quad = hull_and_classify(f)
    assert quad.has_parallel_opposite_sides
    assert not quad.equiv_hypotheses_met


def test_f1_hull_is_a_triangle(f1):
    summary, quad = hull_and_classify(f1)
    verts = {tuple(v) for v in summary.hull_vertices}
    assert verts == {(0, 2), (4, 0), (8, 0)}
    assert [tuple(p) for p in summary.interior_or_edge_points] == [(3, 1)]
    assert not quad.is_quadrilateral


def test_hull_is_counter_clockwise():
    pts = np.array([[0, 0], [2, 0], [2, 2], [0, 2], [1, 1], [1, 0]], dtype=float)
    idx = convex_hull_indices(pts)
    assert sorted(idx) == [0, 1, 2, 3]
    poly = pts[idx]
    area = 0.5 * np.sum(poly[:, 0] * np.roll(poly[:, 1], -1)
                        - np.roll(poly[:, 0], -1) * poly[:, 1])
    assert area == pytest.approx(4)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=3, max_size=12,
                unique=True))
def test_hull_contains_every_point(points):
    pts = np.array(points, dtype=float)
    idx = convex_hull_indices(pts)
    if matrix_rank(pts[1:] - pts[0]) < 2:
        return
    poly = pts[idx]
    for a, b in zip(poly, np.roll(poly, -1, axis=0)):
        cross = (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])
        assert np.all(cross >= -1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_dimension_invariant_under_unimodular_change(seed):
    from fewnomials.generators import random_fewnomial, well_conditioned_matrix
    from fewnomials.transform import apply_change
    rng = np.random.default_rng(seed)
    f = random_fewnomial(rng, 2, int(rng.integers(1, 5)))
    b = well_conditioned_matrix(rng)
    assert newton_dimension(apply_change(f, b)) == newton_dimension(f)
