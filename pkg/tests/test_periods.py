import pytest
from hypothesis import given, strategies as st

from bank_ews.errors import EmptyWindow
from bank_ews.periods import Period, PeriodRange

periods = st.builds(Period, st.integers(1900, 2100), st.sampled_from([1, 2]))


def test_parse_and_str():
    p = Period.parse("1994-H1")
    assert p == Period(1994, 1)
    assert str(p) == "1994-H1"


@pytest.mark.parametrize("bad", ["1994-H3", "1994H1", "94-H1", "1994-h1", ""])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        Period.parse(bad)


def test_year_boundary():
    assert Period(1993, 2).successor() == Period(1994, 1)
    assert Period(1994, 1).predecessor() == Period(1993, 2)
    assert Period(1994, 1) < Period(1994, 2) < Period(1995, 1)
    assert Period(2000, 2) - Period(2000, 1) == 1


@given(periods, st.integers(-50, 50))
def test_shift_roundtrip(p, k):
    assert p.shift(k).shift(-k) == p
    assert p.shift(k) - p == k
    assert Period.parse(str(p)) == p


@given(periods)
def test_successor_inverse(p):
    assert p.successor().predecessor() == p
    assert p < p.successor()


def test_range():
    r = PeriodRange.parse("1990-H1..1993-H2")
    assert len(r) == 8
    assert list(r)[0] == Period(1990, 1)
    assert list(r)[-1] == Period(1993, 2)
    assert Period(1992, 1) in r
    assert Period(1994, 1) not in r
    assert str(r) == "1990-H1..1993-H2"


def test_range_empty():
    with pytest.raises(EmptyWindow):
        PeriodRange(Period(1994, 1), Period(1993, 2))
