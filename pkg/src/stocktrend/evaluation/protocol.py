"""Train/test protocol, model comparison and the OOB sweep."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .. import baselines
from ..errors import InvalidFraction, SplitTooSmall
from ..indicators import Dataset
from ..random_forest import ForestParams, fit_forest, oob_error, predict, predict_proba
from ..rng import SplitMix64, derive_state
from .metrics import accuracy, roc_curve

MODEL_ORDER = ("forest", "logistic", "gda", "qda", "svm")


def _split_sizes(n, train_fraction):
    if not 0.0 < train_fraction < 1.0:
        raise InvalidFraction(f"train fraction must be in (0, 1), got {train_fraction}")
    n_train = int(math.floor(n * train_fraction))
    if n_train < 1 or n - n_train < 1:
        raise SplitTooSmall(f"{n} rows cannot be split {train_fraction:g} / {1 - train_fraction:g}")
    return n_train


def chronological_split(dataset: Dataset, train_fraction: float = 0.8):
    """First ``floor(n * fraction)`` rows train, the rest test."""
    n_train = _split_sizes(len(dataset), train_fraction)
    rows = np.arange(len(dataset))
    return dataset.take(rows[:n_train]), dataset.take(rows[n_train:])


def shuffled_split(dataset: Dataset, train_fraction: float = 0.8, seed: int = 42):
    """Random split; overlapping label windows leak future prices into training."""
    n_train = _split_sizes(len(dataset), train_fraction)
    perm = SplitMix64.from_keys(seed, 0x5B1).permutation(len(dataset))
    return dataset.take(np.sort(perm[:n_train])), dataset.take(np.sort(perm[n_train:]))


def split_dataset(dataset, train_fraction, protocol="chronological", seed=42):
    if protocol == "chronological":
        return chronological_split(dataset, train_fraction)
    if protocol == "shuffled":
        return shuffled_split(dataset, train_fraction, seed)
    raise ValueError(f"unknown split protocol {protocol!r}")


@dataclass(frozen=True)
class ModelMetrics:
    model: str
    accuracy: float
    auc: float
    oob_error: Optional[float] = None


@dataclass(frozen=True)
class EvalReport:
    horizon_d: int
    split: str
    seed: int
    metrics: tuple
    train_rows: int = 0
    test_rows: int = 0
    curves: tuple = field(default=(), compare=False)

    def by_model(self, name: str) -> ModelMetrics:
        for m in self.metrics:
            if m.model == name:
                return m
        raise KeyError(name)


def _auc_or_nan(scores, labels, label):
    if labels.min() == labels.max():
        return math.nan, None
    curve = roc_curve(scores, labels, label)
    return curve.auc, curve


def evaluate_forest(dataset: Dataset, params: ForestParams = ForestParams(), train_fraction=0.8,
                    protocol="chronological", n_jobs=1, forest=None):
    """Fit on the train part (unless ``forest`` is given) and score the test part.

    Returns ``(report, forest)``.
    """
    train, test = split_dataset(dataset, train_fraction, protocol, params.seed)
    if forest is None:
        forest = fit_forest(train, params, n_jobs=n_jobs)
    proba = predict_proba(forest, test.features)
    auc, curve = _auc_or_nan(proba, test.labels, "forest")
    metrics = ModelMetrics("forest", accuracy(predict(forest, test.features), test.labels), auc,
                           oob_error(forest, train))
    report = EvalReport(dataset.horizon_d, _describe(protocol, train_fraction), params.seed,
                        (metrics,), len(train), len(test), (curve,) if curve else ())
    return report, forest


def compare_models(dataset: Dataset, params: ForestParams = ForestParams(), train_fraction=0.8,
                   protocol="chronological", n_jobs=1, baseline_options=None) -> EvalReport:
    """Forest plus the four baselines on one split."""
    baseline_options = baseline_options or {}
    forest_report, _ = evaluate_forest(dataset, params, train_fraction, protocol, n_jobs)
    train, test = split_dataset(dataset, train_fraction, protocol, params.seed)
    metrics = list(forest_report.metrics)
    curves = list(forest_report.curves)
    for name in MODEL_ORDER[1:]:
        kwargs = dict(baseline_options.get(name, {}))
        if name == "svm":
            kwargs.setdefault("seed", params.seed)
        model = baselines.FITTERS[name](train, **kwargs)
        score = np.atleast_1d(baselines.baseline_score(model, test.features))
        pred = (score > 0.5).astype(np.int64)
        auc, curve = _auc_or_nan(score, test.labels, name)
        metrics.append(ModelMetrics(name, accuracy(pred, test.labels), auc))
        if curve:
            curves.append(curve)
    return replace(forest_report, metrics=tuple(metrics), curves=tuple(curves))


def _describe(protocol, fraction):
    return f"{protocol}:{fraction:g}"


@dataclass(frozen=True)
class SweepRow:
    horizon_d: int
    n_trees: int
    sample_size: int
    oob_error: float


def cell_seed(master_seed: int, horizon_d: int, n_trees: int) -> int:
    return derive_state(master_seed, horizon_d, n_trees)


def oob_sweep(datasets, tree_counts, params: ForestParams = ForestParams(), master_seed=None,
              n_jobs=1) -> list:
    """One forest per (horizon, tree count); rows sorted by horizon then count.

    ``datasets`` maps horizon to Dataset. Each cell's seed derives from
    ``(master_seed, horizon, count)``, so cells reproduce independently.
    """
    master = params.seed if master_seed is None else master_seed
    rows = []
    for d in sorted(datasets):
        ds = datasets[d]
        for count in sorted(tree_counts):
            cell = replace(params, n_estimators=int(count), seed=cell_seed(master, d, count))
            forest = fit_forest(ds, cell, n_jobs=n_jobs)
            rows.append(SweepRow(d, int(count), len(ds), oob_error(forest, ds)))
    return rows
