"""Ensemble grammar-induction anomaly detection for univariate time series."""

from .density import AnomalyCandidate, build_density_curve, rank_anomalies
from .discretize import breakpoints, discretize_series, numerosity_reduce, paa
from .ensemble import EnsembleConfig, build_ensemble, detect, ensemble_curve
from .errors import InputTooShortError, NoInformativeRulesError, NonFiniteValueError
from .sequitur import Grammar, expand, induce, rule_spans
from .series import TimeSeries, build_series

__all__ = [
    "AnomalyCandidate", "EnsembleConfig", "Grammar", "InputTooShortError",
    "NoInformativeRulesError", "NonFiniteValueError", "TimeSeries", "breakpoints",
    "build_density_curve", "build_ensemble", "build_series", "detect",
    "discretize_series", "ensemble_curve", "expand", "induce", "numerosity_reduce",
    "paa", "rank_anomalies", "rule_spans",
]
