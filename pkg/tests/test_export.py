import math
import os

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ndevoi.export import SHORTEST, TRACE, atomic_write_text, csv_text, format_value, write_csv


@given(st.floats(allow_nan=False))
def test_shortest_format_round_trips(v):
    assert float(format_value(v, SHORTEST)) == v


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_trace_format_has_twelve_digits(v):
    assert float(format_value(v, TRACE)) == pytest.approx(v, rel=1e-11, abs=0.0)


def test_special_values():
    assert format_value(math.nan) == "nan"
    assert format_value(-math.inf) == "-inf"
    assert format_value(True) == "1"
    assert format_value(7) == "7"
    assert format_value(np.float64(0.1)) == "0.1"
    assert format_value("aR") == "aR"


def test_csv_text_and_row_length_check():
    assert csv_text(["a", "b"], [(1, 0.5)]) == "a,b\n1,0.5\n"
    with pytest.raises(ValueError):
        csv_text(["a", "b"], [(1,)])


def test_atomic_write_leaves_no_temp_on_failure(tmp_path):
    target = tmp_path / "sub" / "x.csv"
    write_csv(target, ["a"], [(1.0,)])
    assert target.read_text() == "a\n1.0\n"
    with pytest.raises(ValueError):
        write_csv(target, ["a"], [(1.0, 2.0)])
    # the failed write never touched the existing file
    assert target.read_text() == "a\n1.0\n"

    with pytest.raises(TypeError):
        atomic_write_text(target, None)
    assert os.listdir(target.parent) == ["x.csv"]
