from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from bank_ews.data_model import BankPeriodRecord, MacroPeriodRecord
from bank_ews.errors import DivisionByZero, NonAdjacentPeriods, PeriodMismatch
from bank_ews.indicators import IndicatorVector, assemble, financial_indicators, macro_indicators
from bank_ews.periods import Period

P0, P1 = Period(1992, 2), Period(1993, 1)


def bank(**kw):
    base = dict(bank_id="A", period=P1, other_assets=10.0, total_assets=100.0,
                financial_outflows=80.0, average_total_inflows=100.0, operative_margin=5.0,
                average_assets=200.0, average_equity=50.0, financial_inflows=120.0,
                average_capitalization=30.0)
    base.update(kw)
    return BankPeriodRecord(**base)


def macro(period=P1, **kw):
    base = dict(period=period, active_rate=45.2, passive_rate=30.1, reer_index=110.0,
                m1=100.0, m2=200.0, igaem_index=95.0, reserves_ex_gold=1000.0)
    base.update(kw)
    return MacroPeriodRecord(**base)


def test_financial_examples():
    assert financial_indicators(bank(other_assets=0.0))[0] == 0.0
    assert financial_indicators(bank(financial_inflows=120.0, financial_outflows=80.0))[4] == 150.0
    assert financial_indicators(bank(operative_margin=-5.0, average_equity=50.0))[3] == -10.0
    f = financial_indicators(bank())
    assert f == pytest.approx((10.0, 80.0, 2.5, 10.0, 150.0))


def test_zero_denominator_names_field():
    with pytest.raises(DivisionByZero) as info:
        financial_indicators(bank(average_equity=0.0))
    assert info.value.field == "average_equity"


def test_macro_examples():
    m = macro_indicators(macro(), macro(P0, igaem_index=100.0, reserves_ex_gold=800.0))
    assert m[0] == pytest.approx(15.1)
    assert m[1] == 110.0
    assert m[2] == 2.0
    assert m[3] == pytest.approx(-5.0)
    assert m[4] == pytest.approx(25.0)


def test_macro_zero_change():
    m = macro_indicators(macro(), macro(P0))
    assert m[3] == 0.0 and m[4] == 0.0


def test_non_adjacent():
    with pytest.raises(NonAdjacentPeriods):
        macro_indicators(macro(P1), macro(Period(1992, 1)))


def test_assemble_composition():
    b, mc, mp = bank(), macro(), macro(P0, igaem_index=100.0)
    v = assemble(b, mc, mp)
    assert isinstance(v, IndicatorVector)
    assert tuple(v.as_array()) == financial_indicators(b) + macro_indicators(mc, mp)


def test_assemble_period_mismatch():
    with pytest.raises(PeriodMismatch):
        assemble(bank(period=P0), macro(P1), macro(P0))


def test_macro_shared_across_banks():
    mc, mp = macro(), macro(P0, igaem_index=90.0)
    a = assemble(bank(bank_id="A"), mc, mp)
    b = assemble(bank(bank_id="B", other_assets=3.0, operative_margin=-1.0), mc, mp)
    assert a.as_array()[5:].tolist() == b.as_array()[5:].tolist()
    assert a.as_array()[:5].tolist() != b.as_array()[:5].tolist()


pos = st.floats(1e-3, 1e6)


@given(pos, pos, pos, pos, st.floats(-1e5, 1e5), pos, st.floats(1e-3, 1e6), pos,
       st.floats(1e-3, 1e3))
def test_scale_free(oa, ta, fo, ati, om, aa, ae, fi, c):
    b = bank(other_assets=oa, total_assets=ta, financial_outflows=fo, average_total_inflows=ati,
             operative_margin=om, average_assets=aa, average_equity=ae, financial_inflows=fi)
    scaled = replace(b, other_assets=oa * c, total_assets=ta * c, financial_outflows=fo * c,
                     average_total_inflows=ati * c, operative_margin=om * c,
                     average_assets=aa * c, average_equity=ae * c, financial_inflows=fi * c)
    assert financial_indicators(scaled) == pytest.approx(financial_indicators(b), rel=1e-12, abs=1e-300)


def test_vector_roundtrip():
    v = IndicatorVector.from_array(range(10))
    assert IndicatorVector.from_array(v.as_array()) == v
    with pytest.raises(ValueError):
        IndicatorVector.from_array([1, 2])
