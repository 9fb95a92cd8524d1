from .metrics import RocCurve, accuracy, roc_curve
from .geometry import SeparabilityReport, linear_separability_test
from .synthetic import PRESETS, RegimeSpec, generate_synthetic
from .protocol import (EvalReport, ModelMetrics, SweepRow, chronological_split, compare_models,
                       evaluate_forest, oob_sweep, shuffled_split)
from .report import render_report

__all__ = [
    "EvalReport", "ModelMetrics", "PRESETS", "RegimeSpec", "RocCurve", "SeparabilityReport",
    "SweepRow", "accuracy", "chronological_split", "compare_models", "evaluate_forest",
    "generate_synthetic", "linear_separability_test", "oob_sweep", "render_report",
    "roc_curve", "shuffled_split",
]
