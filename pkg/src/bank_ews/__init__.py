"""Bank-distress early warning: indicators, Fisher discriminant, probing and evaluation."""

from .periods import Period, PeriodRange
from .data_model import (
    BankPeriodRecord,
    Dataset,
    MacroPeriodRecord,
    filter_complete_banks,
    load_dataset,
    write_dataset,
)
from .indicators import IndicatorVector, assemble, financial_indicators, macro_indicators
from .discriminant import (
    PAPER_THRESHOLD,
    PAPER_WEIGHTS,
    DiscriminantModel,
    Label,
    LabeledVector,
    classify,
    fit,
    fit_arrays,
    load_model,
    paper_model,
    save_model,
    score,
    tune_threshold,
)

__version__ = "0.1.0"
