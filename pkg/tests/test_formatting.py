import pytest
from hypothesis import given
from hypothesis import strategies as st

from compgap.formatting import fmt, fmt_p, round_display


@pytest.mark.parametrize(
    "x, mode, text",
    [(0.105, "half_away", "0.11"), (-0.105, "half_away", "-0.11"), (0.125, "half_even", "0.12"),
     (0.135, "half_even", "0.14"), (-0.10499999999999998, "half_away", "-0.11"), (2.675, "half_away", "2.68"),
     (-0.001, "half_away", "0.00"), (3.0, "half_even", "3.00")],
)
def test_fmt(x, mode, text):
    assert fmt(x, 2, mode) == text


def test_fmt_none_and_decimals():
    assert fmt(None) == ""
    assert fmt(43.14412, 3) == "43.144"
    assert fmt(1.5, 0) == "2"


def test_fmt_p():
    assert fmt_p(1e-9) == "<0.001"
    assert fmt_p(0.00934) == "0.009"
    assert fmt_p(None) == ""


def test_unknown_mode():
    with pytest.raises(ValueError):
        fmt(1.0, 2, "ceiling")


@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), st.integers(0, 6))
def test_rounding_error_bounded(x, d):
    assert abs(float(round_display(x, d)) - x) <= 0.5 * 10**-d + 1e-9
