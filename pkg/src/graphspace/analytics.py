"""Correlation structure, stability, collisions, prediction, feature
selection and classical MDS over property-vector datasets."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .dataset import Dataset
from .errors import SamplingError, SizeLimitError
from .generators import GeneratorSpec
from .graphs import Graph, are_isomorphic
from .numerics import RegressionFit, least_squares_fit, pearson, symmetric_eigen
from .properties import PROPERTY_NAMES, compute_property_vector
from .rng import graph_rng
from .sampling import connected_graph, sample_connected_vectors

ArrayLike = Union[Dataset, np.ndarray]


def _features_of(data: ArrayLike) -> np.ndarray:
    if isinstance(data, Dataset):
        return data.features
    return np.asarray(data, dtype=np.float64)


# ---------------------------------------------------------------------------
# correlations
# ---------------------------------------------------------------------------

def correlation_matrix(data: ArrayLike) -> np.ndarray:
    """Pearson correlation between every column pair; symmetric with unit
    diagonal, NaN where a column is degenerate (zero variance)."""
    x = _features_of(data)
    if x.shape[0] < 2:
        raise ValueError("need at least two rows")
    k = x.shape[1]
    out = np.empty((k, k))
    degenerate = np.array([float(np.ptp(x[:, i])) == 0.0 for i in range(k)])
    for i in range(k):
        out[i, i] = np.nan if degenerate[i] else 1.0
        for j in range(i + 1, k):
            if degenerate[i] or degenerate[j]:
                out[i, j] = out[j, i] = np.nan
                continue
            r = pearson(x[:, i], x[:, j])
            out[i, j] = out[j, i] = np.nan if r is None else r
    return out


@dataclass
class StabilityResult:
    """Correlation matrices per (sample size, repeat) and their spreads.

    Spreads are taken over the repeats in which an entry was defined
    (a correlation can be NaN when a property was constant in a sample);
    entries defined in no repeat spread to NaN, and a single defined
    repeat has spread 0.
    """

    sizes: List[int]
    repeats: int
    matrices: Dict[int, List[np.ndarray]]

    def _spread(self, size: int, nanreducer) -> np.ndarray:
        stack = np.stack(self.matrices[size])           # (repeats, 12, 12)
        counts = (~np.isnan(stack)).sum(axis=0)
        with np.errstate(all="ignore"), warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = nanreducer(stack, axis=0)
        out[counts < 1] = np.nan
        return out

    def spread_std(self, size: int) -> np.ndarray:
        return self._spread(size, np.nanstd)

    def spread_min(self, size: int) -> np.ndarray:
        return self._spread(size, np.nanmin)

    def spread_max(self, size: int) -> np.ndarray:
        return self._spread(size, np.nanmax)


def stability_test(spec: GeneratorSpec, sizes: Sequence[int], repeats: int,
                   seed: int = 0, workers: int = 1) -> StabilityResult:
    """For each sample size, draw ``repeats`` independent samples of
    connected graphs, compute each sample's correlation matrix, and
    record the per-entry spread across repeats."""
    sizes = list(sizes)
    if not sizes:
        raise ValueError("sizes must be non-empty")
    if repeats < 1:
        raise ValueError("repeats must be positive")
    matrices: Dict[int, List[np.ndarray]] = {}
    for i, size in enumerate(sizes):
        per_repeat = []
        for k in range(repeats):
            base = (i * repeats + k) << 32
            features, _ = sample_connected_vectors(
                spec, size, seed, base_stream=base, workers=workers)
            per_repeat.append(correlation_matrix(features))
        matrices[size] = per_repeat
    return StabilityResult(sizes=sizes, repeats=repeats, matrices=matrices)


# ---------------------------------------------------------------------------
# collisions
# ---------------------------------------------------------------------------

def round_half_away(x: np.ndarray, decimals: int) -> np.ndarray:
    """Round half away from zero to a fixed number of decimals."""
    scale = 10.0 ** decimals
    return np.sign(x) * np.floor(np.abs(x) * scale + 0.5) / scale


@dataclass(frozen=True)
class PairVerdict:
    i: int
    j: int
    verdict: str    # identical | different-degrees | isomorphic |
    #                 non-isomorphic | same-degrees | unverified


@dataclass
class CollisionReport:
    decimals: int
    groups: List[List[int]]      # row indices per rounded-vector class (>= 2)
    pair_count: int
    triple_count: int
    quadruple_count: int
    pair_verdicts: List[PairVerdict]


def _pair_verdict(a: Optional[Graph], b: Optional[Graph], iso_cap: int) -> str:
    if a is None or b is None:
        return "unverified"
    if a == b:
        return "identical"
    if a.degree_sequence() != b.degree_sequence():
        return "different-degrees"
    if a.n <= iso_cap:
        try:
            return "isomorphic" if are_isomorphic(a, b, max_n=iso_cap) \
                else "non-isomorphic"
        except SizeLimitError:
            return "same-degrees"
    return "same-degrees"


def find_collisions(data: ArrayLike, decimals: int,
                    graphs: Optional[Sequence[Graph]] = None,
                    iso_cap: int = 12) -> CollisionReport:
    """Group rows whose property vectors agree after rounding, count the
    resulting pairs/triples/quadruples, and screen every colliding pair
    (degree-sequence comparison, full isomorphism up to ``iso_cap``)."""
    if decimals < 0:
        raise ValueError("decimals must be >= 0")
    x = _features_of(data)
    rounded = round_half_away(x, decimals)
    groups: Dict[bytes, List[int]] = {}
    for i in range(rounded.shape[0]):
        groups.setdefault(rounded[i].tobytes(), []).append(i)

    colliding = [members for members in groups.values() if len(members) >= 2]
    pair_count = sum(math.comb(len(m), 2) for m in colliding)
    triple_count = sum(math.comb(len(m), 3) for m in colliding)
    quadruple_count = sum(math.comb(len(m), 4) for m in colliding)

    verdicts = []
    for members in colliding:
        for i, j in combinations(members, 2):
            ga = graphs[i] if graphs is not None else None
            gb = graphs[j] if graphs is not None else None
            verdicts.append(PairVerdict(i, j, _pair_verdict(ga, gb, iso_cap)))
    return CollisionReport(decimals=decimals, groups=colliding,
                           pair_count=pair_count, triple_count=triple_count,
                           quadruple_count=quadruple_count,
                           pair_verdicts=verdicts)


def collision_search_until_pair(spec: GeneratorSpec, decimals: int, seed: int,
                                hard_cap: int = 100_000,
                                base_stream: int = 0) -> int:
    """Generate connected graphs one at a time until two share a rounded
    property vector; returns the number generated (the collider included).

    Raises SamplingError when ``hard_cap`` graphs fail to produce one.
    """
    if decimals < 0:
        raise ValueError("decimals must be >= 0")
    seen: Dict[bytes, int] = {}
    for j in range(hard_cap):
        g = connected_graph(spec, seed, base_stream, j)
        key = round_half_away(compute_property_vector(g).as_array(),
                              decimals).tobytes()
        if key in seen:
            return j + 1
        seen[key] = j
    raise SamplingError(
        f"no rounded-vector collision within {hard_cap} graphs",
        attempts=hard_cap)


# ---------------------------------------------------------------------------
# prediction
# ---------------------------------------------------------------------------

PREDICTION_MODES = ("mean", "linear", "nonlinear")


def expand_nonlinear_features(rows: np.ndarray) -> np.ndarray:
    """Augment predictors with second-order products, square roots and
    logarithms: k raw + k(k+1)/2 products x_i * x_j (i <= j) +
    k sqrt(|x|) + k log(1 + |x|). For the 11 base predictors this yields
    99 features, in that fixed order."""
    x = np.asarray(rows, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    k = x.shape[1]
    parts = [x]
    parts += [x[:, i:i + 1] * x[:, i:] for i in range(k)]
    parts.append(np.sqrt(np.abs(x)))
    parts.append(np.log1p(np.abs(x)))
    out = np.concatenate(parts, axis=1)
    return out[0] if single else out


def expand_nonlinear_feature_names(names: Sequence[str]) -> List[str]:
    names = list(names)
    out = list(names)
    for i, a in enumerate(names):
        out += [f"{a}*{b}" for b in names[i:]]
    out += [f"sqrt|{a}|" for a in names]
    out += [f"log1p|{a}|" for a in names]
    return out


def split_indices(count: int, split_seed: int
                  ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Seeded shuffle into 80% train / 10% dev / 10% test index arrays."""
    perm = graph_rng(split_seed).permutation(count)
    n_train = int(0.8 * count)
    n_dev = int(0.1 * count)
    return (perm[:n_train], perm[n_train:n_train + n_dev],
            perm[n_train + n_dev:])


@dataclass
class PredictionResult:
    target: str
    mode: str
    test_loss: float
    model: Union[float, RegressionFit]
    split_seed: int

    def predict(self, other_features: np.ndarray) -> np.ndarray:
        if self.mode == "mean":
            rows = np.atleast_2d(other_features).shape[0]
            return np.full(rows, self.model)
        if self.mode == "nonlinear":
            other_features = expand_nonlinear_features(other_features)
        return self.model.predict(other_features)


def _training_mean(y: np.ndarray) -> float:
    # exact for constant targets; the mean of identical values is that value
    if np.all(y == y[0]):
        return float(y[0])
    return float(np.mean(y))


def train_predictors(dataset: Dataset, target: str, mode: str,
                     split_seed: int = 0) -> PredictionResult:
    """Fit one predictor for ``target`` from the other eleven properties
    and report its mean absolute error on the held-out test split.

    Modes: "mean" (training-target mean), "linear" (least squares on the
    other properties), "nonlinear" (least squares on the expanded
    features). The seeded 80/10/10 split is shared by all modes for a
    given ``split_seed``.
    """
    if mode not in PREDICTION_MODES:
        raise ValueError(f"mode must be one of {PREDICTION_MODES}")
    if len(dataset) < 100:
        raise ValueError("prediction experiments need at least 100 rows")
    t = dataset.column_index(target)
    others = [name for name in dataset.feature_names if name != target]
    y = dataset.features[:, t]
    X = dataset.select(others)
    train, _, test = split_indices(len(dataset), split_seed)

    if mode == "mean":
        model: Union[float, RegressionFit] = _training_mean(y[train])
        pred = np.full(test.shape[0], model)
    elif mode == "linear":
        model = least_squares_fit(X[train], y[train], others)
        pred = model.predict(X[test])
    else:
        names = expand_nonlinear_feature_names(others)
        model = least_squares_fit(expand_nonlinear_features(X[train]),
                                  y[train], names)
        pred = model.predict(expand_nonlinear_features(X[test]))
    loss = float(np.mean(np.abs(pred - y[test])))
    return PredictionResult(target=target, mode=mode, test_loss=loss,
                            model=model, split_seed=split_seed)


# ---------------------------------------------------------------------------
# feature selection
# ---------------------------------------------------------------------------

@dataclass
class ImportanceMatrix:
    """counts[t][c]: number of base pairs for which adding property c cut
    the linear test loss on target t by at least the threshold."""

    counts: np.ndarray
    threshold: float
    feature_names: Sequence[str] = PROPERTY_NAMES


def importance_matrix(dataset: Dataset, threshold: float = 0.20,
                      split_seed: int = 0) -> ImportanceMatrix:
    """For each target t, each pair {a, b} of the other properties and
    each candidate c outside {t, a, b}: fit linear models on {a, b} and
    {a, b, c} (same split) and count c as important when
    loss({a,b,c}) <= (1 - threshold) * loss({a,b})."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    if len(dataset) < 100:
        raise ValueError("feature selection needs at least 100 rows")
    names = list(dataset.feature_names)
    k = len(names)
    train, _, test = split_indices(len(dataset), split_seed)
    counts = np.zeros((k, k), dtype=np.int64)

    def test_loss(cols: Tuple[int, ...], y: np.ndarray) -> float:
        X = dataset.features[:, list(cols)]
        fit = least_squares_fit(X[train], y[train],
                                [names[c] for c in cols])
        return float(np.mean(np.abs(fit.predict(X[test]) - y[test])))

    for t in range(k):
        y = dataset.features[:, t]
        others = [c for c in range(k) if c != t]
        for a, b in combinations(others, 2):
            base_loss = test_loss((a, b), y)
            for c in others:
                if c == a or c == b:
                    continue
                if test_loss((a, b, c), y) <= (1.0 - threshold) * base_loss:
                    counts[t, c] += 1
    return ImportanceMatrix(counts=counts, threshold=threshold,
                            feature_names=tuple(names))


# ---------------------------------------------------------------------------
# classical MDS
# ---------------------------------------------------------------------------

_MDS_DENSE_LIMIT = 1500


def classical_mds(data: ArrayLike, dims: int = 2) -> np.ndarray:
    """Classical (Torgerson) MDS of z-scored rows into ``dims`` dimensions.

    Small inputs take the textbook route: double-center the squared
    Euclidean distance matrix and take the top eigenpairs (negative
    eigenvalues clamped to zero). Large inputs use the algebraically
    identical Gram-side reduction: because the distances come from the
    centered feature rows Z, the double-centered matrix equals Z Z^T, so
    the embedding is Z times the top eigenvectors of Z^T Z.
    """
    x = _features_of(data)
    rows = x.shape[0]
    if rows < dims + 1:
        raise ValueError(f"need at least {dims + 1} rows for {dims} dims")
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    z = np.where(sd > 0, (x - mu) / np.where(sd > 0, sd, 1.0), 0.0)

    if rows <= _MDS_DENSE_LIMIT:
        sq = np.sum(z * z, axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (z @ z.T)
        jmat = np.eye(rows) - np.full((rows, rows), 1.0 / rows)
        b = -0.5 * jmat @ d2 @ jmat
        b = 0.5 * (b + b.T)
        w, v = symmetric_eigen(b)
        lam = np.maximum(w[:dims], 0.0)
        coords = v[:, :dims] * np.sqrt(lam)
    else:
        c = z.T @ z
        _, v = symmetric_eigen(c)
        coords = z @ v[:, :dims]

    for d in range(coords.shape[1]):
        i = int(np.argmax(np.abs(coords[:, d])))
        if coords[i, d] < 0:
            coords[:, d] = -coords[:, d]
    return coords
