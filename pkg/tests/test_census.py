import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fewnomials.census import (DEFAULT_GRID, GridSpec, UnionFind, census, census_1d,
                               census_grid, census_stabilized, critical_zero_search,
                               isolate_roots_1d, noncompact_census_3d)
from fewnomials.core import build, scaled_log, sign_changes
from fewnomials.errors import DimensionMismatch, NotFullDimensional, UnsupportedDimension
from fewnomials.generators import normal_form, random_fewnomial, tangency_parameters


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(0.0)
    with pytest.raises(ValueError):
        GridSpec(12.0, 100)
    with pytest.raises(ValueError):
        GridSpec(12.0, 8)
    g = GridSpec(3.0, 64).doubled(2)
    assert (g.half_width, g.resolution) == (12.0, 256)


def test_union_find():
    uf = UnionFind(5)
    uf.union(0, 1)
    uf.union(3, 4)
    uf.union(1, 4)
    assert uf.find(3) == uf.find(0)
    assert uf.find(2) != uf.find(0)


def test_cubic_roots_are_bracketed(f2_uni):
    br = isolate_roots_1d(f2_uni, GridSpec(3.0))
    assert len(br) == 3
    for b, r in zip(br, (1, 2, 3)):
        assert b.lo <= math.log(r) <= b.hi
        assert b.hi - b.lo <= 1e-12 * 4


def test_positive_line_has_no_roots():
    assert isolate_roots_1d(build(1, [(1, [0]), (1, [1])])) == []


def test_irrational_exponent_root():
    br = isolate_roots_1d(build(1, [(1, [0]), (-1, [math.pi])]))
    assert len(br) == 1 and br[0].lo <= 0 <= br[0].hi


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_root_count_respects_descartes(seed, m):
    f = random_fewnomial(seed, 1, m)
    c = census_1d(f)
    assert c.tot <= sign_changes(f)
    assert c.tot == c.comp and c.non == 0


@pytest.mark.parametrize("name,expected", [("f1", (1, 1, 0)), ("f2_bi", (3, 0, 3)),
                                           ("f3", (2, 0, 2))])
def test_witness_censuses(request, name, expected):
    f = request.getfixturevalue(name)
    c = census_stabilized(f)
    assert c.counts() == expected
    assert c.converged
    assert c.tot == c.comp + c.non


def test_single_window_witnesses(f1, f3):
    assert census_grid(f1).counts() == (1, 1, 0)
    assert census_grid(f3).counts() == (2, 0, 2)


def test_clipped_oval_recovers(f1):
    c = census_stabilized(f1, GridSpec(1.0, 64, 6))
    assert c.counts() == (1, 1, 0) and c.converged
    assert c.window_used.half_width > 1.0


def test_quarter_circle_is_noncompact():
    c = census_stabilized(build(2, [(-1, [0, 0]), (1, [2, 0]), (1, [0, 2])]))
    assert c.counts() == (1, 0, 1) and c.converged


def test_empty_zero_set():
    c = census_stabilized(build(2, [(1, [0, 0]), (1, [1, 0]), (1, [0, 1])]))
    assert c.counts() == (0, 0, 0) and c.converged


def test_census_dispatch(f2_uni):
    assert census(f2_uni).counts() == (3, 3, 0)
    with pytest.raises(UnsupportedDimension):
        census(build(3, [(1, [0, 0, 0]), (-1, [1, 1, 1])]))
    with pytest.raises(DimensionMismatch):
        census_grid(f2_uni)


def test_contours_lie_on_the_zero_set(f1, f3):
    for f in (f1, f3):
        c = census_stabilized(f, with_contours=True)
        assert len(c.contours) == c.tot
        assert sorted(k.compact for k in c.contours) == sorted([True] * c.comp + [False] * c.non)
        for k in c.contours:
            pts = np.asarray(k.points)
            value, s = scaled_log(f, pts)
            local = np.abs(f.coefficients) @ np.exp(pts @ f.exponents.T - s[:, None]).T
            assert np.all(np.abs(value) <= 1e-6 * local)


def test_tangent_normal_form_has_critical_zero():
    A, point = tangency_parameters(2.0, 2.0)
    assert A == pytest.approx(27 / 16)
    assert point == pytest.approx([2 / 3, 2 / 3])
    f = normal_form(A, 2.0, 2.0)
    p = critical_zero_search(f)
    assert p is not None
    assert p == pytest.approx([2 / 3, 2 / 3], rel=1e-6)
    assert census_stabilized(f).counts() == (1, 0, 1)


def test_no_critical_zeros(f3):
    assert critical_zero_search(f3) is None
    assert critical_zero_search(build(2, [(1, [0, 0]), (-1, [1, 0])])) is None


def test_trivariate_positive_has_no_slices_crossings():
    f = build(3, [(1, [0, 0, 0]), (1, [1, 0, 0]), (1, [0, 1, 0]), (1, [0, 0, 1]),
                  (1, [1, 1, 1])])
    res = noncompact_census_3d(f)
    assert res.estimate == 0
    assert len(res.censuses) == 6


def test_trivariate_needs_full_dimension():
    f = build(3, [(1, [0, 0, 0]), (-1, [1, 1, 0]), (1, [2, 2, 0]), (-1, [0, 0, 1])])
    with pytest.raises(NotFullDimensional):
        noncompact_census_3d(f)


def test_trivariate_estimate_for_a_plane():
    # x1 + x2 + x3 = 1 is a single non-compact sheet
    f = build(3, [(-1, [0, 0, 0]), (1, [1, 0, 0]), (1, [0, 1, 0]), (1, [0, 0, 1])])
    res = noncompact_census_3d(f)
    assert 1 <= res.estimate <= 6
    assert res.converged


def test_default_grid():
    assert (DEFAULT_GRID.half_width, DEFAULT_GRID.resolution, DEFAULT_GRID.max_doublings) == (
        12.0, 512, 4)
