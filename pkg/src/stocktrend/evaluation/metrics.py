"""Accuracy and ROC/AUC."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyInput, LengthMismatch, SingleClassLabels


@dataclass(frozen=True)
class RocCurve:
    """ROC points from (0, 0) to (1, 1).

    ``thresholds[i]`` is the score cut producing point ``i`` (predict positive
    when ``score >= threshold``); the origin carries ``inf``.
    """

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float
    label: str = ""

    @property
    def points(self):
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


def accuracy(predicted, actual) -> float:
    p = np.asarray(predicted)
    a = np.asarray(actual)
    if p.shape != a.shape:
        raise LengthMismatch(f"{p.size} predictions for {a.size} labels")
    if p.size == 0:
        raise EmptyInput("accuracy of empty lists")
    return float(np.mean(p == a))


def trapezoid_area(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) * 0.5))


def roc_curve(scores, labels, label: str = "") -> RocCurve:
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if s.shape != y.shape:
        raise LengthMismatch(f"{s.size} scores for {y.size} labels")
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise SingleClassLabels("ROC needs both classes")

    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    # last index of each run of equal scores
    ends = np.r_[np.flatnonzero(np.diff(s) != 0), y.size - 1]
    tps = np.cumsum(y)[ends]
    fps = ends + 1 - tps
    fpr = np.r_[0.0, fps / n_neg]
    tpr = np.r_[0.0, tps / n_pos]
    thresholds = np.r_[np.inf, s[ends]]
    return RocCurve(fpr, tpr, thresholds, trapezoid_area(fpr, tpr), label)
