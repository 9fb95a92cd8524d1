"""Stock-trend classification: indicators, a from-scratch random forest, baselines and evaluation."""

from .indicators import Dataset, IndicatorParams, build_dataset
from .market_data import OhlcvBar, OhlcvSeries, exponential_smooth, parse_ohlcv_csv, validate_series
from .random_forest import ForestParams, RandomForest, fit_forest, oob_error, predict, predict_proba

__version__ = "0.1.0"

__all__ = [
    "Dataset", "ForestParams", "IndicatorParams", "OhlcvBar", "OhlcvSeries", "RandomForest",
    "build_dataset", "exponential_smooth", "fit_forest", "oob_error", "parse_ohlcv_csv",
    "predict", "predict_proba", "validate_series",
]
