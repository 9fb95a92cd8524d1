"""Comparison classifiers: logistic regression, GDA (shared covariance), QDA, linear SVM.

Every model z-scores its inputs with statistics from the training rows and
reuses them verbatim at prediction time. Fit functions accept either a
``Dataset`` or an ``(X, y)`` pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import expit, log_expit

from .errors import SingleClassData, TooFewSamples, UntrainedModel
from .rng import SplitMix64


@dataclass(frozen=True)
class LinearModel:
    kind: str  # "logistic" or "svm"
    weights: np.ndarray
    bias: float
    mean: np.ndarray
    scale: np.ndarray
    trace: tuple = field(default=(), compare=False, repr=False)

    def margin(self, X) -> np.ndarray:
        return standardize(X, self.mean, self.scale) @ self.weights + self.bias


@dataclass(frozen=True)
class GaussianModel:
    kind: str  # "gda" or "qda"
    class_priors: tuple
    class_means: tuple
    covariances: tuple  # one shared matrix for gda, one per class for qda
    mean: np.ndarray
    scale: np.ndarray

    def class_covariance(self, k: int) -> np.ndarray:
        return self.covariances[0] if len(self.covariances) == 1 else self.covariances[k]

    def log_joint(self, X) -> np.ndarray:
        """``log p(x | k) + log p(k)`` for both classes, shape ``(n, 2)``."""
        Z = standardize(X, self.mean, self.scale)
        out = np.empty((Z.shape[0], 2))
        for k in (0, 1):
            chol = np.linalg.cholesky(self.class_covariance(k))
            diff = solve_triangular(chol, (Z - self.class_means[k]).T, lower=True)
            logdet = 2.0 * np.log(np.diag(chol)).sum()
            out[:, k] = (-0.5 * (diff ** 2).sum(axis=0) - 0.5 * logdet
                         - 0.5 * Z.shape[1] * np.log(2 * np.pi) + np.log(self.class_priors[k]))
        return out

    def log_odds(self, X) -> np.ndarray:
        lj = self.log_joint(X)
        return lj[:, 1] - lj[:, 0]


def _xy(data, labels=None):
    if labels is None:
        X, y = data.features, data.labels
    else:
        X, y = data, labels
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[0] != y.size:
        raise ValueError("one label per row required")
    if y.size == 0 or y.min() == y.max():
        raise SingleClassData("both classes must be present in the training data")
    return X, y


def fit_standardizer(X):
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    return mean, scale


def standardize(X, mean, scale):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1) if X.size == mean.size else X.reshape(-1, 1)
    return (X - mean) / scale


# logistic regression

def logistic_loss_and_grad(w, b, Z, y, l2):
    """Mean log loss plus ``l2/2 * |w|^2`` and its gradient ``(dw, db)``."""
    z = Z @ w + b
    loss = np.mean(-y * log_expit(z) - (1 - y) * log_expit(-z)) + 0.5 * l2 * (w @ w)
    resid = expit(z) - y
    return loss, Z.T @ resid / y.size + l2 * w, resid.mean()


def fit_logistic(data, labels=None, learning_rate=0.1, epochs=500, l2=1e-4) -> LinearModel:
    """Full-batch gradient descent on the L2-regularized log loss."""
    X, y = _xy(data, labels)
    mean, scale = fit_standardizer(X)
    Z = (X - mean) / scale
    w = np.zeros(Z.shape[1])
    b = 0.0
    trace = []
    for _ in range(epochs):
        loss, gw, gb = logistic_loss_and_grad(w, b, Z, y, l2)
        trace.append(float(loss))
        w = w - learning_rate * gw
        b = b - learning_rate * gb
    trace.append(float(logistic_loss_and_grad(w, b, Z, y, l2)[0]))
    return LinearModel("logistic", w, float(b), mean, scale, tuple(trace))


# linear SVM

def svm_objective(w_aug, Z_aug, s, l2):
    margins = s * (Z_aug @ w_aug)
    return 0.5 * l2 * (w_aug @ w_aug) + np.maximum(0.0, 1.0 - margins).mean()


def fit_linear_svm(data, labels=None, l2=1e-4, epochs=50, seed=42) -> LinearModel:
    """Pegasos: stochastic subgradient steps ``1 / (l2 * t)`` on the hinge objective.

    The bias is a constant input column and is regularized with the weights.
    Each epoch visits the rows in a fresh SplitMix64 permutation and its
    iterates are averaged. A subgradient method is not a descent method, so the
    lowest-objective epoch average seen so far is kept; it is the returned
    model, and ``trace`` holds its objective after each epoch.
    """
    X, y = _xy(data, labels)
    mean, scale = fit_standardizer(X)
    Z = np.column_stack([(X - mean) / scale, np.ones(X.shape[0])])
    s = np.where(y == 1, 1.0, -1.0)
    n, p = Z.shape
    rng = SplitMix64.from_keys(seed, 0x5F3)
    radius = 1.0 / np.sqrt(l2)

    rows = [Z[i] for i in range(n)]
    w = np.zeros(p)
    t = 0
    trace = []
    best, best_obj = np.zeros(p), np.inf
    for _ in range(epochs):
        avg = np.zeros(p)
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (l2 * t)
            x = rows[i]
            violated = s[i] * (w @ x) < 1.0
            w = w * (1.0 - eta * l2)
            if violated:
                w = w + (eta * s[i]) * x
            norm = np.sqrt(w @ w)
            if norm > radius:
                w = w * (radius / norm)
            avg += w
        avg /= n
        obj = float(svm_objective(avg, Z, s, l2))
        if obj < best_obj:
            best, best_obj = avg, obj
        trace.append(best_obj)
    return LinearModel("svm", best[:-1].copy(), float(best[-1]), mean, scale, tuple(trace))


# Gaussian discriminants

def _ridge(cov):
    p = cov.shape[0]
    eps = 1e-6 * np.trace(cov) / p
    if eps <= 0:
        eps = 1e-6
    return cov + eps * np.eye(p)


def _fit_gaussian(data, labels, kind, min_per_class):
    X, y = _xy(data, labels)
    counts = np.bincount(y, minlength=2)
    if counts.min() < min_per_class:
        raise TooFewSamples(f"{kind} needs at least {min_per_class} rows per class, got {counts.tolist()}")
    mean, scale = fit_standardizer(X)
    Z = (X - mean) / scale
    groups = [Z[y == k] for k in (0, 1)]
    means = tuple(g.mean(axis=0) for g in groups)
    priors = tuple(float(c / y.size) for c in counts)
    if kind == "gda":
        scatter = sum((g - m).T @ (g - m) for g, m in zip(groups, means))
        covs = (_ridge(scatter / (y.size - 2)),)
    else:
        covs = tuple(_ridge(np.cov(g, rowvar=False, ddof=1).reshape(Z.shape[1], -1)) for g in groups)
    return GaussianModel(kind, priors, means, covs, mean, scale)


def fit_gda(data, labels=None) -> GaussianModel:
    """Gaussian discriminant analysis with a pooled (shared) covariance."""
    return _fit_gaussian(data, labels, "gda", 2)


def fit_qda(data, labels=None) -> GaussianModel:
    """Quadratic discriminant analysis: one covariance per class."""
    X, _ = _xy(data, labels)
    return _fit_gaussian(data, labels, "qda", X.shape[1] + 1)


# scoring

def squash(margin):
    """Monotone map of a real margin into (0, 1) that keeps distinct margins distinct."""
    margin = np.asarray(margin, dtype=np.float64)
    return 0.5 + 0.5 * margin / (1.0 + np.abs(margin))


def baseline_score(model, X):
    """Class-1 score; higher means more likely class 1."""
    if model is None:
        raise UntrainedModel("no model")
    single = np.ndim(X) == 1 and np.size(X) == model.mean.size
    if isinstance(model, LinearModel):
        m = model.margin(X)
        score = expit(m) if model.kind == "logistic" else squash(m)
    else:
        score = expit(model.log_odds(X))
    return float(score[0]) if single else score


def baseline_predict(model, X):
    score = np.atleast_1d(baseline_score(model, X))
    return (score > 0.5).astype(np.int64)


FITTERS = {
    "logistic": fit_logistic,
    "gda": fit_gda,
    "qda": fit_qda,
    "svm": fit_linear_svm,
}
