"""Binned and cumulative calibration metrics with asymptotic P-values."""

__version__ = "0.1.0"

from .errors import DegenerateScoresError, ValidationError
from .metrics import (
    BinningSpec,
    BinSummary,
    CumulativeCurve,
    Dataset,
    EceReport,
    EcceReport,
    Sample,
    Strategy,
    assign_bins,
    canonicalize,
    cumulative_curve,
    ece,
    ecce,
    max_interval_miscalibration,
    sigma_n,
)
from .pvalues import TailKind, TailResult, expected_null_constants, mc_oracle, tail_maxabs, tail_range

__all__ = [
    "BinSummary",
    "BinningSpec",
    "CumulativeCurve",
    "Dataset",
    "DegenerateScoresError",
    "EceReport",
    "EcceReport",
    "Sample",
    "Strategy",
    "TailKind",
    "TailResult",
    "ValidationError",
    "assign_bins",
    "canonicalize",
    "cumulative_curve",
    "ece",
    "ecce",
    "expected_null_constants",
    "max_interval_miscalibration",
    "mc_oracle",
    "sigma_n",
    "tail_maxabs",
    "tail_range",
]
