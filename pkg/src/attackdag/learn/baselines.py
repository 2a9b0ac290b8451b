"""Baseline classifiers: k-NN, Gaussian naive Bayes, CART tree, SGD linear SVM.

All from scratch on numpy, all deterministic.  Tie-breaking rules are part
of the contract: k-NN breaks distance ties toward the lower sample index
and vote ties toward -1 (a tie is not evidence of feasibility), the tree
breaks equal-gain splits toward the lowest feature index then the lowest
threshold, and equal class scores fall back to -1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..model import BranchSample
from .svm import NonFiniteFeature, as_arrays


class EmptyData(ValueError):
    pass


def _check_labeled(samples: Sequence[BranchSample]) -> tuple[np.ndarray, np.ndarray]:
    if not samples:
        raise EmptyData("no training samples")
    for s in samples:
        if s.label not in (1, -1):
            raise ValueError(f"unlabeled sample ({s.origin}, {s.dest})")
    x, y = as_arrays(samples)
    if not np.isfinite(x).all():
        raise NonFiniteFeature("features contain NaN or infinity")
    return x, y


# --- k nearest neighbors ------------------------------------------------------


def knn_predict(samples: Sequence[BranchSample], features: Sequence[float], k: int) -> int:
    x, y = _check_labeled(samples)
    if not 1 <= k <= len(samples):
        raise ValueError(f"k={k} outside 1..{len(samples)}")
    probe = np.asarray(features, dtype=float)
    dists = np.sqrt(np.sum((x - probe) ** 2, axis=1))
    order = sorted(range(len(samples)), key=lambda i: (dists[i], i))
    votes = sum(int(y[i]) for i in order[:k])
    if votes > 0:
        return 1
    return -1


# --- Gaussian naive Bayes ------------------------------------------------------

VAR_FLOOR = 1e-9


@dataclass(frozen=True)
class GaussianNbModel:
    log_priors: dict[int, float]
    means: dict[int, np.ndarray]
    variances: dict[int, np.ndarray]

    def log_posterior(self, features: Sequence[float], label: int) -> float:
        x = np.asarray(features, dtype=float)
        mu = self.means[label]
        var = self.variances[label]
        dens = -0.5 * (np.log(2.0 * np.pi * var) + (x - mu) ** 2 / var)
        return self.log_priors[label] + float(np.sum(dens))

    def predict(self, features: Sequence[float]) -> int:
        pos = self.log_posterior(features, 1)
        neg = self.log_posterior(features, -1)
        return 1 if pos > neg else -1


def train_gnb(samples: Sequence[BranchSample]) -> GaussianNbModel:
    x, y = _check_labeled(samples)
    log_priors: dict[int, float] = {}
    means: dict[int, np.ndarray] = {}
    variances: dict[int, np.ndarray] = {}
    for label in (1, -1):
        mask = y == label
        if not mask.any():
            raise EmptyData(f"no samples with label {label:+d}")
        rows = x[mask]
        log_priors[label] = float(np.log(mask.sum() / len(y)))
        means[label] = rows.mean(axis=0)
        variances[label] = np.maximum(rows.var(axis=0), VAR_FLOOR)
    return GaussianNbModel(log_priors=log_priors, means=means, variances=variances)


# --- CART decision tree --------------------------------------------------------


@dataclass(frozen=True)
class TreeModel:
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    label: int = 0
    left: "TreeModel | None" = None
    right: "TreeModel | None" = None

    def predict(self, features: Sequence[float]) -> int:
        node = self
        x = np.asarray(features, dtype=float)
        while node.feature >= 0:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.label

    def depth(self) -> int:
        if self.feature < 0:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())


def _gini(y: np.ndarray) -> float:
    if len(y) == 0:
        return 0.0
    p = np.mean(y == 1)
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _majority(y: np.ndarray) -> int:
    pos = int(np.sum(y == 1))
    neg = len(y) - pos
    if pos > neg:
        return 1
    return -1


def train_tree(samples: Sequence[BranchSample]) -> TreeModel:
    """Gini-impurity CART with midpoint thresholds and no depth limit.

    Growth stops at pure nodes or when no split improves impurity.
    """
    x, y = _check_labeled(samples)

    def build(idx: np.ndarray) -> TreeModel:
        labels = y[idx]
        if np.all(labels == labels[0]):
            return TreeModel(label=int(labels[0]))
        parent = _gini(labels) * len(idx)
        best: tuple[float, int, float] | None = None  # (weighted gini, feature, threshold)
        for f in range(x.shape[1]):
            values = np.unique(x[idx, f])
            for lo, hi in zip(values[:-1], values[1:]):
                thr = (lo + hi) / 2.0
                mask = x[idx, f] <= thr
                weighted = _gini(labels[mask]) * mask.sum() + _gini(labels[~mask]) * (~mask).sum()
                if best is None or weighted < best[0] - 1e-12:
                    best = (weighted, f, thr)
        if best is None or best[0] >= parent - 1e-12:
            return TreeModel(label=_majority(labels))
        _, f, thr = best
        mask = x[idx, f] <= thr
        return TreeModel(
            feature=f,
            threshold=thr,
            left=build(idx[mask]),
            right=build(idx[~mask]),
        )

    return build(np.arange(len(y)))


# --- SGD linear SVM -------------------------------------------------------------


@dataclass(frozen=True)
class SgdSvmModel:
    weights: np.ndarray
    bias: float

    def decision_value(self, features: Sequence[float]) -> float:
        return float(self.weights @ np.asarray(features, dtype=float) + self.bias)

    def predict(self, features: Sequence[float]) -> int:
        return 1 if self.decision_value(features) >= 0.0 else -1


def train_sgd_svm(
    samples: Sequence[BranchSample],
    epochs: int = 20,
    c: float = 1.0,
    seed: int = 0,
) -> SgdSvmModel:
    """Hinge loss + L2, lambda = 1/(c*n), step 1/(lambda*t), shuffled epochs."""
    x, y = _check_labeled(samples)
    n = len(y)
    lam = 1.0 / (c * n)
    w = np.zeros(x.shape[1])
    b = 0.0
    t = 0
    rng = random.Random(seed)
    order = list(range(n))
    for _ in range(epochs):
        rng.shuffle(order)
        for i in order:
            t += 1
            step = 1.0 / (lam * t)
            if y[i] * (w @ x[i] + b) < 1.0:
                w = (1.0 - step * lam) * w + step * y[i] * x[i]
                b += step * y[i]
            else:
                w = (1.0 - step * lam) * w
    return SgdSvmModel(weights=w, bias=b)


def hinge_objective(
    weights: np.ndarray, bias: float, samples: Sequence[BranchSample], c: float = 1.0
) -> float:
    """Regularized mean hinge loss the SGD trainer descends."""
    x, y = _check_labeled(samples)
    lam = 1.0 / (c * len(y))
    margins = 1.0 - y * (x @ weights + bias)
    return float(lam / 2.0 * (weights @ weights) + np.mean(np.maximum(margins, 0.0)))
