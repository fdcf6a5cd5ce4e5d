import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bank_ews.data_model import BANKS_HEADER, MACRO_HEADER  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def bank_line(bank_id="A", period="1991-H1", other_assets="10", total_assets="100",
              financial_outflows="8", avg_total_inflows="10", operative_margin="2",
              avg_assets="100", avg_equity="10", financial_inflows="12",
              avg_capitalization="50", status="active", intervention_period=""):
    return ",".join([bank_id, period, other_assets, total_assets, financial_outflows,
                     avg_total_inflows, operative_margin, avg_assets, avg_equity,
                     financial_inflows, avg_capitalization, status, intervention_period])


def macro_line(period, active_rate="45.2", passive_rate="30.1", reer_index="110",
               m1="100", m2="200", igaem_index="100", reserves_ex_gold="1000"):
    return ",".join([period, active_rate, passive_rate, reer_index, m1, m2,
                     igaem_index, reserves_ex_gold])


@pytest.fixture
def write_csvs(tmp_path):
    def _write(bank_lines, macro_lines, name=""):
        b = tmp_path / f"banks{name}.csv"
        m = tmp_path / f"macro{name}.csv"
        b.write_text(",".join(BANKS_HEADER) + "\n" + "".join(l + "\n" for l in bank_lines))
        m.write_text(",".join(MACRO_HEADER) + "\n" + "".join(l + "\n" for l in macro_lines))
        return b, m

    return _write
