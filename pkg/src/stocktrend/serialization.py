"""Versioned JSON model documents.

Keys are emitted in a fixed order and floats in shortest round-trip form, so
equal models serialize to identical bytes.
"""

import json

import numpy as np

from .errors import ModelFormatError, SchemaVersionError

SCHEMA_VERSION = 1


def _forest_doc(forest):
    p = forest.params
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "random_forest",
        "params": {
            "n_estimators": p.n_estimators,
            "max_depth": p.max_depth,
            "min_samples_leaf": p.min_samples_leaf,
            "mtry": p.mtry,
            "seed": p.seed,
        },
        "feature_names": list(forest.feature_names),
        "train_size": forest.train_size,
        "tie_class": forest.tie_class,
        "trees": [
            {
                "feature": tree.feature.tolist(),
                "threshold": tree.threshold.tolist(),
                "left": tree.left.tolist(),
                "right": tree.right.tolist(),
                "counts": tree.counts.tolist(),
                "bootstrap": sample.tolist(),
            }
            for tree, sample in zip(forest.trees, forest.bootstrap_indices)
        ],
    }


def _forest_from_doc(doc):
    from .random_forest import ForestParams, RandomForest, Tree

    trees, samples = [], []
    for t in doc["trees"]:
        trees.append(Tree(
            np.array(t["feature"], dtype=np.int64),
            np.array(t["threshold"], dtype=np.float64),
            np.array(t["left"], dtype=np.int64),
            np.array(t["right"], dtype=np.int64),
            np.array(t["counts"], dtype=np.int64).reshape(-1, 2),
        ))
        samples.append(np.array(t["bootstrap"], dtype=np.int64))
    return RandomForest(
        trees=tuple(trees),
        bootstrap_indices=tuple(samples),
        params=ForestParams(**doc["params"]),
        train_size=doc["train_size"],
        tie_class=doc["tie_class"],
        feature_names=tuple(doc["feature_names"]),
    )


def _baseline_doc(model):
    from .baselines import GaussianModel, LinearModel

    doc = {"schema_version": SCHEMA_VERSION}
    if isinstance(model, LinearModel):
        doc.update({
            "kind": model.kind,
            "weights": model.weights.tolist(),
            "bias": model.bias,
            "mean": model.mean.tolist(),
            "scale": model.scale.tolist(),
        })
    elif isinstance(model, GaussianModel):
        doc.update({
            "kind": model.kind,
            "class_priors": list(model.class_priors),
            "class_means": [m.tolist() for m in model.class_means],
            "covariances": [c.tolist() for c in model.covariances],
            "mean": model.mean.tolist(),
            "scale": model.scale.tolist(),
        })
    else:
        raise ModelFormatError(f"cannot serialize {type(model).__name__}")
    return doc


def _baseline_from_doc(doc):
    from .baselines import GaussianModel, LinearModel

    if doc["kind"] in ("logistic", "svm"):
        return LinearModel(
            kind=doc["kind"],
            weights=np.array(doc["weights"]),
            bias=float(doc["bias"]),
            mean=np.array(doc["mean"]),
            scale=np.array(doc["scale"]),
        )
    return GaussianModel(
        kind=doc["kind"],
        class_priors=tuple(doc["class_priors"]),
        class_means=tuple(np.array(m) for m in doc["class_means"]),
        covariances=tuple(np.array(c) for c in doc["covariances"]),
        mean=np.array(doc["mean"]),
        scale=np.array(doc["scale"]),
    )


def dumps(model) -> str:
    from .random_forest import RandomForest

    doc = _forest_doc(model) if isinstance(model, RandomForest) else _baseline_doc(model)
    return json.dumps(doc, separators=(",", ":"), allow_nan=False) + "\n"


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "schema_version" not in doc or "kind" not in doc:
        raise ModelFormatError("model document lacks schema_version/kind")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"model schema_version {doc['schema_version']} != supported {SCHEMA_VERSION}")
    kind = doc["kind"]
    try:
        if kind == "random_forest":
            return _forest_from_doc(doc)
        if kind in ("logistic", "svm", "gda", "qda"):
            return _baseline_from_doc(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed {kind} document: {exc}") from None
    raise ModelFormatError(f"unknown model kind {kind!r}")
