import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (RefSplitMix64, exhaustive_best_split, reference_predict_fraction,
                     reference_tree)
from stocktrend.errors import EmptyNode, EmptyTrainingSet, InvalidParams, NoOobCoverage
from stocktrend.indicators import Dataset
from stocktrend.random_forest import (ForestParams, Internal, Leaf, RandomForest, Tree,
                                      best_split, bootstrap_sample, fit_forest, fit_tree,
                                      gini_impurity, oob_error, predict, predict_proba)
from stocktrend.rng import SplitMix64
from stocktrend.serialization import dumps


def make_dataset(X, y):
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    names = tuple(f"f{i}" for i in range(X.shape[1]))
    return Dataset(dates=tuple(range(n)), features=X, labels=np.asarray(y, dtype=np.int64),
                   horizon_d=1, index=np.arange(n), feature_names=names)


def noisy_threshold(rs, n, noise=0.1):
    X = rs.uniform(-1, 1, size=(n, 6))
    y = (X[:, 0] + 0.5 * X[:, 1] > 0).astype(int)
    flip = rs.uniform(size=n) < noise
    return X, np.where(flip, 1 - y, y)


def node_to_dict(node):
    if isinstance(node, Leaf):
        return {"counts": tuple(node.class_counts)}
    return {"counts": None, "feature": node.feature_index, "threshold": node.threshold,
            "left": node_to_dict(node.left), "right": node_to_dict(node.right)}


def strip_internal_counts(d):
    if "feature" in d:
        return {"feature": d["feature"], "threshold": d["threshold"],
                "left": strip_internal_counts(d["left"]), "right": strip_internal_counts(d["right"])}
    return {"counts": d["counts"]}


# bootstrap

def test_bootstrap_matches_reference_stream():
    rng = SplitMix64.from_keys(42, 3)
    ref = RefSplitMix64.keyed(42, 3)
    got = bootstrap_sample(500, rng)
    assert got.tolist() == [ref.below(500) for _ in range(500)]


def test_bootstrap_distinct_fraction():
    s = bootstrap_sample(1000, SplitMix64.from_keys(1, 0))
    assert s.min() >= 0 and s.max() < 1000
    assert abs(np.unique(s).size / 1000 - (1 - 1 / math.e)) <= 0.03


def test_bootstrap_edge_cases():
    assert bootstrap_sample(1, SplitMix64(5)).tolist() == [0]
    with pytest.raises(EmptyTrainingSet):
        bootstrap_sample(0, SplitMix64(5))


# gini

def test_gini_values():
    assert gini_impurity((5, 5)) == 0.5
    assert gini_impurity((10, 0)) == 0.0
    assert gini_impurity((0, 3)) == 0.0
    assert gini_impurity((1, 3)) == pytest.approx(0.375)
    with pytest.raises(EmptyNode):
        gini_impurity((0, 0))


# best split

def test_best_split_simple():
    X = [[1.0], [2.0], [3.0], [4.0]]
    s = best_split(X, [0, 0, 1, 1], [0])
    assert (s.feature_index, s.threshold, s.impurity) == (0, 2.5, 0.0)
    assert best_split(X, [1, 1, 1, 1], [0]) is None
    assert best_split([[1.0], [1.0]], [0, 1], [0]) is None


def test_best_split_tie_prefers_lowest_feature():
    X = [[1.0, 1.0], [2.0, 2.0], [3.0, 3.0], [4.0, 4.0]]
    s = best_split(X, [0, 0, 1, 1], [1, 0])
    assert s.feature_index == 0


def test_best_split_tie_prefers_smallest_threshold():
    # splitting after row 0 or before row 3 gives the same impurity
    X = [[0.0], [1.0], [2.0], [3.0]]
    y = [0, 1, 1, 0]
    s = best_split(X, y, [0])
    assert s.threshold == 0.5


@given(st.integers(2, 64), st.integers(1, 4), st.integers(0, 2 ** 31 - 1), st.booleans())
@settings(max_examples=60, deadline=None)
def test_best_split_matches_exhaustive(n, p, seed, coarse):
    rs = np.random.default_rng(seed)
    X = rs.integers(0, 5, size=(n, p)).astype(float) if coarse else rs.normal(size=(n, p))
    y = rs.integers(0, 2, size=n)
    feats = list(range(p))
    got = best_split(X, y, feats)
    want = exhaustive_best_split(X, y, feats)
    if want is None:
        assert got is None
    else:
        assert (got.feature_index, got.threshold) == (want[0], want[1])
        assert abs(got.impurity - float(want[2])) < 1e-12


def test_best_split_min_leaf_respected(rs):
    X = rs.normal(size=(30, 3))
    y = rs.integers(0, 2, 30)
    for m in (1, 3, 7):
        got = best_split(X, y, [0, 1, 2], m)
        want = exhaustive_best_split(X, y, [0, 1, 2], m)
        assert (got is None) == (want is None)
        if got:
            assert (got.feature_index, got.threshold) == want[:2]


# trees

def test_single_class_is_leaf():
    tree = fit_tree(np.arange(12.0).reshape(6, 2), [1] * 6, ForestParams(mtry=2), SplitMix64(0))
    assert tree.n_nodes == 1
    assert tree.to_node() == Leaf((0, 6))


def test_xor_needs_depth_two():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 1, 1, 0])
    tree = fit_tree(X, y, ForestParams(mtry=2), SplitMix64(0))
    assert np.array_equal((tree.proba(X) > 0.5).astype(int), y)
    assert tree.depth() >= 2
    # no single threshold on either feature fits all four rows
    for f, t, left_cls, right_cls in product((0, 1), (0.5,), (0, 1), (0, 1)):
        pred = np.where(X[:, f] <= t, left_cls, right_cls)
        assert not np.array_equal(pred, y)


def test_depth_cap_and_min_leaf(rs):
    X, y = noisy_threshold(rs, 300, 0.3)
    t = fit_tree(X, y, ForestParams(max_depth=3, mtry=6), SplitMix64(1))
    assert t.depth() <= 3
    t = fit_tree(X, y, ForestParams(min_samples_leaf=10, mtry=6), SplitMix64(1))
    leaves = t.counts[t.feature < 0]
    assert leaves.sum(axis=1).min() >= 10
    t0 = fit_tree(X, y, ForestParams(max_depth=0, mtry=6), SplitMix64(1))
    assert t0.n_nodes == 1


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_tree_matches_reference_builder(seed):
    rs = np.random.default_rng(seed)
    X = rs.integers(0, 6, size=(20, 4)).astype(float)
    y = rs.integers(0, 2, size=20)
    params = ForestParams(n_estimators=1, mtry=2, seed=seed)
    forest = fit_forest(make_dataset(X, y), params)
    ref_rng = RefSplitMix64.keyed(seed, 0)
    sample = [ref_rng.below(20) for _ in range(20)]
    assert forest.bootstrap_indices[0].tolist() == sample
    ref = reference_tree(X, y, sample, 2, ref_rng)
    assert strip_internal_counts(node_to_dict(forest.trees[0].to_node())) == strip_internal_counts(ref)
    for x in X:
        assert predict_proba(forest, x) == reference_predict_fraction(ref, x)


def test_tree_node_roundtrip(rs):
    X, y = noisy_threshold(rs, 80)
    t = fit_tree(X, y, ForestParams(mtry=3), SplitMix64(2))
    back = Tree.from_node(t.to_node())
    for a, b in zip((t.feature, t.threshold, t.left, t.right, t.counts),
                    (back.feature, back.threshold, back.left, back.right, back.counts)):
        assert np.array_equal(a, b)


# forest

def test_forest_shape_and_determinism(rs):
    X, y = noisy_threshold(rs, 200)
    ds = make_dataset(X, y)
    params = ForestParams(n_estimators=10, seed=42)
    a = fit_forest(ds, params)
    b = fit_forest(ds, params)
    assert len(a.trees) == 10
    assert dumps(a) == dumps(b)
    c = fit_forest(ds, ForestParams(n_estimators=10, seed=43))
    assert dumps(a) != dumps(c)


def test_forest_prefix_is_stable(rs):
    X, y = noisy_threshold(rs, 150)
    ds = make_dataset(X, y)
    small = fit_forest(ds, ForestParams(n_estimators=5, seed=9))
    big = fit_forest(ds, ForestParams(n_estimators=12, seed=9))
    for s, b in zip(small.trees, big.trees):
        assert np.array_equal(s.threshold, b.threshold)


def test_parallel_equals_serial(rs):
    X, y = noisy_threshold(rs, 200)
    ds = make_dataset(X, y)
    params = ForestParams(n_estimators=7, seed=5)
    assert dumps(fit_forest(ds, params, n_jobs=2)) == dumps(fit_forest(ds, params, n_jobs=1))


def test_noisy_threshold_generalizes():
    rs = np.random.default_rng(11)
    X, y = noisy_threshold(rs, 1000)
    Xt, yt = noisy_threshold(rs, 1000)
    forest = fit_forest(make_dataset(X, y), ForestParams(n_estimators=65, seed=1))
    assert np.mean(predict(forest, Xt) == yt) >= 0.85


def test_predict_scalar_and_batch(rs):
    X, y = noisy_threshold(rs, 100)
    forest = fit_forest(make_dataset(X, y), ForestParams(n_estimators=5))
    p = predict_proba(forest, X)
    assert p.shape == (100,)
    assert predict_proba(forest, X[3]) == p[3]
    assert isinstance(predict(forest, X[3]), int)
    assert np.all((p >= 0) & (p <= 1))



def test_hand_built_forest_average_and_tie():
    trees = tuple(Tree.from_node(Leaf(c)) for c in [(0, 4), (2, 2), (3, 0)])
    boots = tuple(np.zeros(1, dtype=np.int64) for _ in trees)
    x = np.zeros(2)
    for tie in (0, 1):
        f = RandomForest(trees, boots, ForestParams(n_estimators=3), 1, tie_class=tie)
        assert predict_proba(f, x) == 0.5
        assert predict(f, x) == tie


def test_hand_built_split_tree():
    root = Internal(1, 0.0, Leaf((3, 1)), Leaf((0, 2)))
    t = Tree.from_node(root)
    assert t.proba(np.array([[5.0, 0.0], [5.0, 0.1]])).tolist() == [0.25, 1.0]


def test_tie_class_is_training_majority(rs):
    X = rs.normal(size=(30, 2))
    f = fit_forest(make_dataset(X, [1] * 20 + [0] * 10), ForestParams(n_estimators=2))
    assert f.tie_class == 1
    f = fit_forest(make_dataset(X, [1] * 15 + [0] * 15), ForestParams(n_estimators=2))
    assert f.tie_class == 0


def oob_recompute(forest, X, y):
    n = len(y)
    wrong = covered = 0
    for i in range(n):
        votes = []
        for tree, sample in zip(forest.trees, forest.bootstrap_indices):
            if i in set(sample.tolist()):
                continue
            c0, c1 = tree.counts[tree.apply(X[i:i + 1])[0]]
            votes.append(1 if c1 > c0 else 0 if c1 < c0 else forest.tie_class)
        if not votes:
            continue
        ones = sum(votes)
        zeros = len(votes) - ones
        pred = 1 if ones > zeros else 0 if ones < zeros else forest.tie_class
        covered += 1
        wrong += pred != y[i]
    return wrong / covered


@pytest.mark.parametrize("n_trees", [1, 4, 15])
def test_oob_error_matches_recomputation(rs, n_trees):
    X, y = noisy_threshold(rs, 60, 0.2)
    ds = make_dataset(X, y)
    forest = fit_forest(ds, ForestParams(n_estimators=n_trees, seed=n_trees))
    assert oob_error(forest, ds) == pytest.approx(oob_recompute(forest, X, y), abs=1e-15)


def test_no_oob_coverage():
    # one row: every bootstrap sample is [0]
    ds = make_dataset([[1.0, 2.0]], [1])
    forest = fit_forest(ds, ForestParams(n_estimators=3))
    with pytest.raises(NoOobCoverage):
        oob_error(forest, ds)


def test_scale_invariance(rs):
    X, y = noisy_threshold(rs, 150)
    scale = np.array([1e-3, 7.0, 1.0, 250.0, 0.5, 3.0])
    p = ForestParams(n_estimators=8, seed=3)
    a = fit_forest(make_dataset(X, y), p)
    b = fit_forest(make_dataset(X * scale, y), p)
    assert np.array_equal(predict(a, X), predict(b, X * scale))


def test_invalid_params(rs):
    ds = make_dataset(rs.normal(size=(10, 6)), [0, 1] * 5)
    for bad in (ForestParams(n_estimators=0), ForestParams(mtry=0), ForestParams(mtry=7),
                ForestParams(min_samples_leaf=0), ForestParams(max_depth=-1)):
        with pytest.raises(InvalidParams):
            fit_forest(ds, bad)
    with pytest.raises(EmptyTrainingSet):
        fit_forest(make_dataset(np.zeros((0, 6)), []), ForestParams())
