"""CART trees and a bagged random-forest classifier with out-of-bag error.

Randomness is drawn from one SplitMix64 stream per tree, keyed by
``(seed, tree_index)``. The stream first yields the tree's bootstrap draws
(``train_size`` values) and then, in preorder, one size-``mtry`` feature
subset for every node that attempts a split. A node attempts a split unless
it is pure, at the depth cap, or smaller than ``2 * min_samples_leaf``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from . import _tree_kernel as kernel
from .errors import (EmptyNode, EmptyTrainingSet, InvalidParams, NoOobCoverage,
                     UntrainedModel)
from .indicators import FEATURE_NAMES, Dataset
from .rng import SplitMix64


@dataclass(frozen=True)
class ForestParams:
    n_estimators: int = 65
    max_depth: Optional[int] = None
    min_samples_leaf: int = 1
    mtry: int = 2
    seed: int = 42

    def check(self, n_features: int) -> None:
        if self.n_estimators < 1:
            raise InvalidParams("n_estimators must be >= 1")
        if not 1 <= self.mtry <= n_features:
            raise InvalidParams(f"mtry must be in [1, {n_features}], got {self.mtry}")
        if self.min_samples_leaf < 1:
            raise InvalidParams("min_samples_leaf must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise InvalidParams("max_depth must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidParams("seed must fit in 64 bits")


def default_mtry(n_features: int) -> int:
    return max(1, math.isqrt(n_features))


class Leaf(NamedTuple):
    class_counts: tuple


class Internal(NamedTuple):
    feature_index: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class Tree:
    """A fitted tree as preorder node arrays; ``feature == -1`` marks a leaf.

    Routing: ``x[feature] <= threshold`` goes left.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depths[self.left[i]] = depths[self.right[i]] = depths[i] + 1
        return int(depths.max())

    def apply(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        return kernel.apply_tree(self.feature, self.threshold, self.left, self.right, X)

    def proba(self, X) -> np.ndarray:
        c = self.counts[self.apply(X)]
        return c[:, 1] / c.sum(axis=1)

    def votes(self, X, tie_class: int) -> np.ndarray:
        c = self.counts[self.apply(X)]
        return np.where(c[:, 1] > c[:, 0], 1, np.where(c[:, 1] < c[:, 0], 0, tie_class))

    def to_node(self, i: int = 0) -> TreeNode:
        if self.feature[i] < 0:
            return Leaf(tuple(int(v) for v in self.counts[i]))
        return Internal(int(self.feature[i]), float(self.threshold[i]),
                        self.to_node(int(self.left[i])), self.to_node(int(self.right[i])))

    @classmethod
    def from_node(cls, root: TreeNode) -> "Tree":
        feature, threshold, left, right, counts = [], [], [], [], []

        def visit(node):
            i = len(feature)
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            counts.append([0, 0])
            if isinstance(node, Leaf):
                counts[i] = list(node.class_counts)
            else:
                feature[i] = node.feature_index
                threshold[i] = node.threshold
                left[i] = visit(node.left)
                right[i] = visit(node.right)
                counts[i] = [counts[left[i]][k] + counts[right[i]][k] for k in (0, 1)]
            return i

        visit(root)
        return cls(np.array(feature, dtype=np.int64), np.array(threshold, dtype=np.float64),
                   np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
                   np.array(counts, dtype=np.int64).reshape(-1, 2))


@dataclass(frozen=True)
class RandomForest:
    trees: tuple
    bootstrap_indices: tuple
    params: ForestParams
    train_size: int
    tie_class: int = 0
    feature_names: tuple = FEATURE_NAMES


class Split(NamedTuple):
    feature_index: int
    threshold: float
    impurity: float


def bootstrap_sample(n: int, rng: SplitMix64) -> np.ndarray:
    """``n`` row indices drawn uniformly with replacement from ``0..n-1``."""
    if n < 1:
        raise EmptyTrainingSet("bootstrap of an empty training set")
    return rng.integers(n, n)


def gini_impurity(class_counts) -> float:
    counts = [float(c) for c in class_counts]
    total = sum(counts)
    if total <= 0:
        raise EmptyNode("Gini impurity of an empty node")
    return 1.0 - sum((c / total) ** 2 for c in counts)


def _as_xy(rows, labels):
    X = np.ascontiguousarray(rows, dtype=np.float64)
    y = np.ascontiguousarray(labels, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise ValueError("rows must be 2-D with one label per row")
    return X, y


def best_split(rows, labels, feature_subset, min_samples_leaf: int = 1) -> Optional[Split]:
    """Gini-optimal split over the listed features, or ``None``.

    Candidate thresholds are midpoints between consecutive distinct values.
    Ties go to the lowest feature index, then the smallest threshold.
    """
    X, y = _as_xy(rows, labels)
    if X.shape[0] == 0:
        raise EmptyNode("no rows to split")
    if y.min() == y.max():
        return None
    features = np.array(sorted(set(int(f) for f in feature_subset)), dtype=np.int64)
    f, t, g = kernel.best_split_kernel(X, y, np.arange(X.shape[0]), features, min_samples_leaf)
    if f < 0:
        return None
    return Split(int(f), float(t), float(g))


def _grow(X, y, sample, params: ForestParams, rng: SplitMix64) -> Tree:
    state = np.array([rng.state], dtype=np.uint64)
    max_depth = -1 if params.max_depth is None else params.max_depth
    arrays = kernel.grow_tree(X, y, np.ascontiguousarray(sample, dtype=np.int64), params.mtry,
                              max_depth, params.min_samples_leaf, state)
    rng.state = int(state[0])
    return Tree(*arrays)


def fit_tree(rows, labels, params: ForestParams, rng: SplitMix64) -> Tree:
    """Grow one unpruned CART tree on all given rows."""
    X, y = _as_xy(rows, labels)
    if X.shape[0] == 0:
        raise EmptyTrainingSet("cannot fit a tree on zero rows")
    params.check(X.shape[1])
    return _grow(X, y, np.arange(X.shape[0]), params, rng)


def _fit_member(X, y, params: ForestParams, k: int):
    rng = SplitMix64.from_keys(params.seed, k)
    sample = bootstrap_sample(X.shape[0], rng)
    return _grow(X, y, sample, params, rng), sample


def _fit_members(args):
    X, y, params, ks = args
    return [_fit_member(X, y, params, k) for k in ks]


def fit_forest(dataset: Dataset, params: ForestParams = ForestParams(), n_jobs: int = 1) -> RandomForest:
    """Fit ``params.n_estimators`` trees on bootstrap samples of ``dataset``.

    Tree ``k`` depends only on ``(seed, k)``, so any ``n_jobs`` gives the same model.
    """
    X, y = _as_xy(dataset.features, dataset.labels)
    if X.shape[0] == 0:
        raise EmptyTrainingSet("cannot fit a forest on an empty dataset")
    params.check(X.shape[1])

    ks = list(range(params.n_estimators))
    if n_jobs > 1 and len(ks) > 1:
        chunks = [ks[i::n_jobs] for i in range(n_jobs)]
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(_fit_members, [(X, y, params, c) for c in chunks if c]))
        by_k = {}
        for chunk, part in zip([c for c in chunks if c], parts):
            by_k.update(zip(chunk, part))
        members = [by_k[k] for k in ks]
    else:
        members = [_fit_member(X, y, params, k) for k in ks]

    n1 = int(y.sum())
    tie_class = 1 if n1 > X.shape[0] - n1 else 0
    return RandomForest(
        trees=tuple(m[0] for m in members),
        bootstrap_indices=tuple(m[1] for m in members),
        params=params,
        train_size=int(X.shape[0]),
        tie_class=tie_class,
        feature_names=tuple(dataset.feature_names),
    )


def _matrix(X):
    arr = np.asarray(X, dtype=np.float64)
    return arr.reshape(1, -1) if arr.ndim == 1 else arr


def predict_proba(forest: RandomForest, X):
    """Mean over trees of the leaf's class-1 fraction. Scalar for a single row."""
    if not forest.trees:
        raise UntrainedModel("forest has no trees")
    M = _matrix(X)
    p = np.mean([t.proba(M) for t in forest.trees], axis=0)
    return float(p[0]) if np.ndim(X) == 1 else p


def _threshold(p, tie_class):
    return np.where(p > 0.5, 1, np.where(p < 0.5, 0, tie_class))


def predict(forest: RandomForest, X):
    """Class 1 iff probability > 0.5; exactly 0.5 goes to the majority training class."""
    p = predict_proba(forest, X)
    out = _threshold(np.atleast_1d(p), forest.tie_class)
    return int(out[0]) if np.ndim(X) == 1 else out.astype(np.int64)


def oob_votes(forest: RandomForest, features) -> tuple:
    """Per-row (class-1 votes, OOB tree count) from trees that never saw the row."""
    X = np.asarray(features, dtype=np.float64)
    n = forest.train_size
    ones = np.zeros(n, dtype=np.int64)
    total = np.zeros(n, dtype=np.int64)
    for tree, sample in zip(forest.trees, forest.bootstrap_indices):
        oob = np.flatnonzero(np.bincount(sample, minlength=n) == 0)
        if oob.size == 0:
            continue
        ones[oob] += tree.votes(X[oob], forest.tie_class)
        total[oob] += 1
    return ones, total


def oob_error(forest: RandomForest, dataset: Dataset) -> float:
    """Majority-vote misclassification rate over rows with at least one OOB tree."""
    if not forest.trees:
        raise UntrainedModel("forest has no trees")
    if len(dataset) != forest.train_size:
        raise ValueError("dataset does not match the forest's training set")
    ones, total = oob_votes(forest, dataset.features)
    covered = total > 0
    if not covered.any():
        raise NoOobCoverage("every row is in-bag for every tree")
    zeros = total - ones
    pred = np.where(ones > zeros, 1, np.where(ones < zeros, 0, forest.tie_class))
    wrong = (pred != dataset.labels) & covered
    return float(wrong.sum() / covered.sum())
