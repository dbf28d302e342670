"""Cohort microsimulation of personal income distributions driven by real GDP growth."""
from .binned import BinnedPID, load_binned, save_binned
from .demography import AgePyramid, load_pyramids, stationary_pyramids, synthetic_pyramid
from .economy import GrowthSeries, cumulative_factor, deflator_factor, growth_between, load_growth_series
from .errors import DataError, EmptyTailWarning
from .kernels import BACKEND
from .trajectory import PRESETS, ModelParams, StateIndex, build_context, constant_context, income_at

__version__ = "0.1.0"

__all__ = [
    "AgePyramid", "BACKEND", "BinnedPID", "DataError", "EmptyTailWarning", "GrowthSeries", "ModelParams",
    "PRESETS", "StateIndex", "build_context", "constant_context", "cumulative_factor", "deflator_factor",
    "growth_between", "income_at", "load_binned", "load_growth_series", "load_pyramids", "save_binned",
    "stationary_pyramids", "synthetic_pyramid",
]
