import numpy as np
import pytest

from fewnomials.core import build


@pytest.fixture
def f1():
    return build(2, [(1, [0, 2]), (-4, [3, 1]), (1, [8, 0]), (3, [4, 0])])


@pytest.fixture
def f2_uni():
    return build(1, [(-6, [0]), (11, [1]), (-6, [2]), (1, [3])])


@pytest.fixture
def f2_bi():
    return build(2, [(1, [3, 0]), (-6, [2, 0]), (11, [1, 0]), (-6, [0, 0])])


@pytest.fixture
def f3():
    return build(2, [(1, [1, 1]), (-2, [1, 0]), (-1, [0, 1]), (1, [0, 0])])


@pytest.fixture
def normal_222():
    return build(2, [(1, [0, 0]), (-1, [1, 0]), (-1, [0, 1]), (2, [2, 2])])


def same_fewnomial(f, g, rel=1e-12):
    """Equal up to roundoff in coefficients and exponents."""
    if f.nvars != g.nvars or f.m != g.m:
        return False
    return (np.allclose(f.exponents, g.exponents, rtol=rel, atol=rel)
            and np.allclose(f.coefficients, g.coefficients, rtol=rel, atol=0))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
