"""Generator classification: random forest and multinomial logistic
regression, repeated stratified holdouts, and feature-subset sweeps.

Class labels are ordered alphabetically; every tie (vote ties, equal
logits) breaks toward the lowest class index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .dataset import Dataset
from .errors import ConvergenceError
from .rng import derived_stream, graph_rng

MODEL_KINDS = ("random_forest", "logistic")


def _resolve_features(dataset: Dataset, feature_subset: Optional[Sequence[str]]
                      ) -> Tuple[List[str], np.ndarray]:
    names = list(feature_subset) if feature_subset is not None \
        else list(dataset.feature_names)
    return names, dataset.select(names)


@dataclass
class RandomForestModel:
    kind = "random_forest"

    feature_names: List[str]
    classes: List[str]
    feat: np.ndarray
    thr: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf: np.ndarray

    def predict_indices(self, X) -> np.ndarray:
        X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
        return _kernels.forest_predict(self.feat, self.thr, self.left,
                                       self.right, self.leaf,
                                       len(self.classes), X)

    def predict(self, X) -> List[str]:
        return [self.classes[i] for i in self.predict_indices(X)]


def _fit_forest_arrays(X: np.ndarray, y: np.ndarray, n_classes: int,
                       trees: int, seed: int) -> tuple:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int32)
    max_features = math.ceil(math.sqrt(X.shape[1]))
    return _kernels.forest_fit(X, y, n_classes, trees, max_features,
                               np.uint64(seed & ((1 << 64) - 1)))


def fit_random_forest(dataset: Dataset, trees: int = 100, seed: int = 0,
                      feature_subset: Optional[Sequence[str]] = None
                      ) -> RandomForestModel:
    """Bagged CART forest: Gini impurity, ceil(sqrt(d)) candidate features
    per split, trees grown to purity (min leaf 1), majority vote."""
    if trees < 1:
        raise ValueError("need at least one tree")
    names, X = _resolve_features(dataset, feature_subset)
    classes = dataset.class_names()
    y = dataset.label_indices()
    feat, thr, left, right, leaf = _fit_forest_arrays(
        X, y, len(classes), trees, seed)
    return RandomForestModel(feature_names=names, classes=classes, feat=feat,
                             thr=thr, left=left, right=right, leaf=leaf)


@dataclass
class LogisticModel:
    kind = "logistic"

    feature_names: List[str]
    classes: List[str]
    weights: np.ndarray       # (d + 1, classes); row 0 is the bias
    mean: np.ndarray
    std: np.ndarray

    def _logits(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        z = (X - self.mean) / self.std
        return self.weights[0] + z @ self.weights[1:]

    def predict_indices(self, X) -> np.ndarray:
        return np.argmax(self._logits(X), axis=1).astype(np.int32)

    def predict(self, X) -> List[str]:
        return [self.classes[i] for i in self.predict_indices(X)]

    def predict_proba(self, X) -> np.ndarray:
        logits = self._logits(X)
        logits -= logits.max(axis=1, keepdims=True)
        p = np.exp(logits)
        return p / p.sum(axis=1, keepdims=True)


def _softmax_loss_grad(w: np.ndarray, xb: np.ndarray, y: np.ndarray,
                       n_classes: int, l2: float):
    n = xb.shape[0]
    logits = xb @ w
    shifted = logits - logits.max(axis=1, keepdims=True)
    expz = np.exp(shifted)
    denom = expz.sum(axis=1)
    logprob = shifted[np.arange(n), y] - np.log(denom)
    loss = -float(np.mean(logprob)) + 0.5 * l2 * float(np.sum(w[1:] ** 2))
    p = expz / denom[:, None]
    p[np.arange(n), y] -= 1.0
    grad = xb.T @ p / n
    grad[1:] += l2 * w[1:]
    return loss, grad


def fit_logistic(dataset: Dataset, l2: float = 1e-4, iterations: int = 2000,
                 feature_subset: Optional[Sequence[str]] = None
                 ) -> LogisticModel:
    """Multinomial softmax regression on internally z-scored features,
    trained by full-batch gradient descent whose step is halved whenever
    the loss would increase."""
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    names, X = _resolve_features(dataset, feature_subset)
    classes = dataset.class_names()
    y = dataset.label_indices().astype(np.int64)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    z = (X - mean) / std
    xb = np.concatenate([np.ones((z.shape[0], 1)), z], axis=1)

    w = np.zeros((xb.shape[1], len(classes)))
    loss, grad = _softmax_loss_grad(w, xb, y, len(classes), l2)
    step = 1.0
    for _ in range(iterations):
        candidate = w - step * grad
        new_loss, new_grad = _softmax_loss_grad(candidate, xb, y,
                                                len(classes), l2)
        if not np.isfinite(new_loss):
            raise ConvergenceError("logistic regression loss diverged")
        if new_loss > loss:
            step *= 0.5
            if step < 1e-20:
                break
            continue
        w, loss, grad = candidate, new_loss, new_grad
    return LogisticModel(feature_names=names, classes=classes, weights=w,
                         mean=mean, std=std)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _fit(dataset: Dataset, model_kind: str, feature_subset, seed: int,
         trees: int, l2: float, iterations: int):
    if model_kind == "random_forest":
        return fit_random_forest(dataset, trees=trees, seed=seed,
                                 feature_subset=feature_subset)
    if model_kind == "logistic":
        return fit_logistic(dataset, l2=l2, iterations=iterations,
                            feature_subset=feature_subset)
    raise ValueError(f"model kind must be one of {MODEL_KINDS}")


def stratified_split(labels: Sequence[str], train_fraction: float,
                     rng: np.random.Generator
                     ) -> Tuple[np.ndarray, np.ndarray]:
    """Per-class shuffled split; returns (train indices, test indices)."""
    labels = np.asarray(labels)
    train: List[np.ndarray] = []
    test: List[np.ndarray] = []
    for cls in sorted(set(labels.tolist())):
        idx = np.flatnonzero(labels == cls)
        perm = idx[rng.permutation(idx.shape[0])]
        cut = int(train_fraction * idx.shape[0])
        train.append(perm[:cut])
        test.append(perm[cut:])
    return np.concatenate(train), np.concatenate(test)


@dataclass
class HoldoutResult:
    model_kind: str
    feature_names: List[str]
    accuracies: List[float]

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std_accuracy(self) -> float:
        return float(np.std(self.accuracies))


def repeated_holdout_accuracy(dataset: Dataset, model_kind: str,
                              feature_subset: Optional[Sequence[str]] = None,
                              repeats: int = 10, seed: int = 0,
                              trees: int = 100, l2: float = 1e-4,
                              iterations: int = 2000) -> HoldoutResult:
    """Mean test accuracy over seeded stratified 80/20 holdout splits."""
    if repeats < 1:
        raise ValueError("repeats must be positive")
    if dataset.labels is None:
        raise ValueError("dataset has no labels")
    names, X = _resolve_features(dataset, feature_subset)
    labels = np.asarray(dataset.labels)
    accs = []
    for k in range(repeats):
        rng = graph_rng(seed, k)
        train_idx, test_idx = stratified_split(dataset.labels, 0.8, rng)
        train_ds = Dataset(features=X[train_idx],
                           labels=list(labels[train_idx]),
                           feature_names=names)
        model = _fit(train_ds, model_kind, None,
                     seed=derived_stream(seed, 0x5EED + k), trees=trees,
                     l2=l2, iterations=iterations)
        pred = model.predict_indices(X[test_idx])
        classes = {c: i for i, c in enumerate(model.classes)}
        truth = np.array([classes[l] for l in labels[test_idx]])
        accs.append(float(np.mean(pred == truth)))
    return HoldoutResult(model_kind=model_kind, feature_names=names,
                         accuracies=accs)


@dataclass
class SweepRow:
    features: Tuple[str, ...]
    accuracies: Dict[str, float]


@dataclass
class SweepResult:
    subset_size: int
    rows: List[SweepRow]    # ranked by random-forest accuracy, descending


def subset_sweep(dataset: Dataset, model_kinds: Sequence[str] =
                 ("random_forest",), subset_size: int = 2,
                 repeats: int = 10, seed: int = 0, trees: int = 100,
                 subsets: Optional[Sequence[Sequence[str]]] = None
                 ) -> SweepResult:
    """Evaluate feature subsets (all of the given size by default) with
    repeated holdouts and rank them by forest accuracy."""
    if subset_size not in (2, 3):
        raise ValueError("subset sweeps cover pairs and triples")
    for kind in model_kinds:
        if kind not in MODEL_KINDS:
            raise ValueError(f"model kind must be one of {MODEL_KINDS}")
    if subsets is None:
        subsets = list(combinations(dataset.feature_names, subset_size))
    rows = []
    for subset in subsets:
        accs = {kind: repeated_holdout_accuracy(
            dataset, kind, feature_subset=subset, repeats=repeats,
            seed=seed, trees=trees).mean_accuracy for kind in model_kinds}
        rows.append(SweepRow(features=tuple(subset), accuracies=accs))
    rank_kind = "random_forest" if "random_forest" in model_kinds \
        else model_kinds[0]
    rows.sort(key=lambda r: (-r.accuracies[rank_kind], r.features))
    return SweepResult(subset_size=subset_size, rows=rows)
