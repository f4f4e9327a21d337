"""Asymptotic and finite-key rate calculators."""

from .decoy import DecoyBounds, DecoyData, decoy_bounds, synthesize
from .finite import FiniteKey, bb84_finite_key, finite_key_length
from .rates import (
    OverlapC,
    bb84_rate,
    bb84_threshold,
    chsh_guess_bound,
    dw_rate,
    lm05_rate,
    post_selection_adjust,
    sdc_rate,
    uncertainty_hmin_bound,
)
from .report import ABORT_SYMBOL, RateReport, asymptotic_report, report_schema

__all__ = [
    "ABORT_SYMBOL",
    "DecoyBounds",
    "DecoyData",
    "FiniteKey",
    "OverlapC",
    "RateReport",
    "asymptotic_report",
    "bb84_finite_key",
    "bb84_rate",
    "bb84_threshold",
    "chsh_guess_bound",
    "decoy_bounds",
    "dw_rate",
    "finite_key_length",
    "lm05_rate",
    "post_selection_adjust",
    "report_schema",
    "sdc_rate",
    "synthesize",
    "uncertainty_hmin_bound",
]
