import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fewnomials.census import Contour
from fewnomials.errors import (FewnomialSyntaxError, FileZeroCoefficient, InconsistentHeader,
                               ZeroCoefficient)
from fewnomials.generators import random_fewnomial
from fewnomials.io import (REPORT_COLUMNS, format_contours, format_fewnomial, format_report,
                           parse_contours, parse_fewnomial, parse_fewnomial_file,
                           write_fewnomial_file)

F3_TEXT = """\
# hyperbola
fewnomial 2 4
1   0 0
-2  1 0   # trailing comment
-1  0 1

1   1 1
"""


def test_parse_f3(f3):
    assert parse_fewnomial(F3_TEXT) == f3


def test_empty_term_list():
    with pytest.raises(InconsistentHeader):
        parse_fewnomial("fewnomial 2 0\n")


def test_zero_coefficient_line():
    with pytest.raises(ZeroCoefficient) as err:
        parse_fewnomial("fewnomial 2 1\n0 1 1\n")
    assert isinstance(err.value, FileZeroCoefficient)
    assert err.value.line == 2


@pytest.mark.parametrize("text,line", [
    ("polynomial 2 1\n1 0 0\n", 1),
    ("fewnomial 2 1\n1 0\n", 2),
    ("fewnomial 2 1\n1 x 0\n", 2),
    ("fewnomial 2 2\n1 0 0\n", 1),
    ("", 1),
])
def test_syntax_errors_carry_line_numbers(text, line):
    with pytest.raises(FewnomialSyntaxError) as err:
        parse_fewnomial(text)
    assert err.value.line == line


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 6))
def test_round_trip(seed, n, m):
    f = random_fewnomial(seed, n, m)
    assert parse_fewnomial(format_fewnomial(f, comment="seed")) == f


def test_file_round_trip(tmp_path, f1):
    path = tmp_path / "f1.txt"
    write_fewnomial_file(f1, path)
    assert parse_fewnomial_file(path) == f1


def test_contour_round_trip():
    cs = [Contour(0, True, np.array([[0.1, 0.2], [0.3, 0.25]])),
          Contour(3, False, np.array([[1e-17, -2.5]]))]
    back = parse_contours(format_contours(cs))
    assert [(i, c) for i, c, _ in back] == [(0, True), (3, False)]
    for (_, _, pts), c in zip(back, cs):
        assert np.array_equal(pts, c.points)


def test_bad_contour_line():
    with pytest.raises(FewnomialSyntaxError):
        parse_contours("comp 0 compact: 1,2\n")


def test_report_columns():
    row = dict(zip(REPORT_COLUMNS, range(len(REPORT_COLUMNS))), extra="ignored")
    text = format_report([row])
    lines = text.splitlines()
    assert lines[0] == ",".join(REPORT_COLUMNS)
    assert lines[1] == ",".join(str(i) for i in range(len(REPORT_COLUMNS)))
