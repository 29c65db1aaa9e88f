"""Experiment runners behind the CLI.

Every experiment is a pure function of (config, seed): reruns with the
same config produce byte-identical output files. Output files carry a
provenance header (library/numpy/numba versions, seed, config hash) and
are never overwritten unless ``force`` is set. All files land inside the
configured output directory.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import __version__
from .analytics import (classical_mds, collision_search_until_pair,
                        correlation_matrix, find_collisions,
                        importance_matrix, stability_test, train_predictors,
                        PREDICTION_MODES)
from .classifiers import repeated_holdout_accuracy, subset_sweep
from .dataset import Dataset, fmt, read_dataset_csv, write_dataset_csv
from .enumeration import scan_labeled_space
from .generators import GeneratorSpec, generate
from .graphs import is_connected
from .properties import PROPERTY_NAMES
from .rng import graph_rng
from .sampling import sample_banded_vectors, sample_connected_vectors

EXPERIMENTS = ("trends", "connectivity", "groundtruth", "correlations",
               "stability", "collisions", "collision-hunt", "predict",
               "importance", "classify", "sweep", "embed")

DENSITY_BAND = (0.47, 0.52)
CLASS_LABELS = ("er", "sbm2", "sbm3", "sbm4", "sbm5", "geometric", "ws", "ba")

SUMMARY_COLUMNS = ("count", "mean", "std", "min",
                   "q05", "q25", "q50", "q75", "q95", "max")


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    out: str
    fmt: str = "csv"
    force: bool = False
    threads: int = 1
    params: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.seed is None:
            raise ValueError("a seed is mandatory")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------

def _provenance(cfg: ExperimentConfig) -> List[str]:
    import numba
    blob = json.dumps({"experiment": cfg.experiment, "seed": cfg.seed,
                       "params": cfg.params}, sort_keys=True, default=str)
    digest = hashlib.sha256(blob.encode("ascii")).hexdigest()[:16]
    return [
        f"graphspace={__version__} numpy={np.__version__} "
        f"numba={numba.__version__}",
        f"experiment={cfg.experiment} seed={cfg.seed} config={digest}",
    ]


def _target(cfg: ExperimentConfig, name: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, name)
    if os.path.exists(path) and not cfg.force:
        raise FileExistsError(
            f"{path} exists; pass --force to overwrite")
    return path


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    return "nan" if math.isnan(v) else fmt(v)


def write_csv(cfg: ExperimentConfig, name: str, header: Sequence[str],
              rows: Sequence[Sequence]) -> str:
    path = _target(cfg, name)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for line in _provenance(cfg):
            fh.write(f"# {line}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(c) for c in row) + "\n")
    return path


def write_json(cfg: ExperimentConfig, name: str, payload) -> str:
    path = _target(cfg, name)
    doc = {"provenance": _provenance(cfg), "data": payload}
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_matrix_csv(cfg: ExperimentConfig, name: str, matrix: np.ndarray,
                     labels: Sequence[str]) -> str:
    header = ["property"] + list(labels)
    rows = [[labels[i]] + list(matrix[i]) for i in range(len(labels))]
    return write_csv(cfg, name, header, rows)


def summary_row(values: np.ndarray) -> List[float]:
    qs = np.quantile(values, [0.05, 0.25, 0.5, 0.75, 0.95])
    return [int(values.shape[0]), float(values.mean()), float(values.std()),
            float(values.min()), *[float(q) for q in qs],
            float(values.max())]


# ---------------------------------------------------------------------------
# shared builders
# ---------------------------------------------------------------------------

def er_spec(n: int, p: float) -> GeneratorSpec:
    return GeneratorSpec("er", n, {"p": p})


def resolve_p(p_arg, n: int) -> float:
    """--p accepts a float or the literal 'log' for log(n)/n."""
    if isinstance(p_arg, str) and p_arg.strip().lower() == "log":
        return math.log(n) / n
    return float(p_arg)


def default_class_specs(n: int, band: Tuple[float, float], seed: int,
                        count: int = 1000
                        ) -> List[Tuple[str, GeneratorSpec, int]]:
    """The eight generator classes: ER(1/2), SBM with 2..5 equal blocks
    (20 probability matrices per class, diagonal entries uniform on
    [0.65, 0.85], off-diagonals solved for the band center), geometric,
    Newman-Watts and preferential attachment. Free density parameters are
    retargeted inside the band sampler; the values here are seeds for
    that tuning."""
    center = 0.5 * (band[0] + band[1])
    specs: List[Tuple[str, GeneratorSpec, int]] = []
    specs.append(("er", er_spec(n, center), count))

    matrices_per_class = 20
    per_matrix, remainder = divmod(count, matrices_per_class)
    for blocks in (2, 3, 4, 5):
        rng = graph_rng(seed, 0xB10C0000 + blocks)
        for j in range(matrices_per_class):
            diag = rng.uniform(0.65, 0.85, size=blocks)
            probs = np.full((blocks, blocks), center)
            np.fill_diagonal(probs, diag)
            spec = GeneratorSpec("sbm", n, {"blocks": blocks,
                                            "probs": probs.tolist()})
            c = per_matrix + (1 if j < remainder else 0)
            if c:
                specs.append((f"sbm{blocks}", spec, c))

    specs.append(("geometric",
                  GeneratorSpec("geometric", n, {"radius": 0.5}), count))
    # ring degree chosen so the solved shortcut probability lands mid-range
    k = max(2, 2 * round(center * (n - 1) / (2 * 1.45)))
    if k >= n:
        k = (n - 1) if (n - 1) % 2 == 0 else n - 2
    specs.append(("ws", GeneratorSpec("nws", n, {"k": k, "p_s": 0.5}), count))
    specs.append(("ba", GeneratorSpec("ba", n, {"m": max(1, n // 2)}), count))
    return specs


def build_er_dataset(n: int, p: float, count: int, seed: int,
                     workers: int = 1, keep_graphs: bool = False,
                     base_stream: int = 0):
    """Connected ER draws with property vectors."""
    features, graphs = sample_connected_vectors(
        er_spec(n, p), count, seed, base_stream=base_stream, workers=workers,
        keep_graphs=keep_graphs)
    ds = Dataset(features=features, labels=None,
                 seeds=np.full(count, seed, dtype=np.int64),
                 ns=np.full(count, n, dtype=np.int32))
    return ds, graphs


def build_class_dataset(specs: Sequence[Tuple[str, GeneratorSpec, int]],
                        band: Tuple[float, float], seed: int,
                        workers: int = 1, max_tries: int = 512
                        ) -> Dataset:
    """Banded, connected draws for every (label, spec, count) triple.

    Zero-count specs are skipped. Batch b gets stream base ``b << 40``.
    """
    features_parts: List[np.ndarray] = []
    labels: List[str] = []
    for b, (label, spec, count) in enumerate(specs):
        if count == 0:
            continue
        feats, _ = sample_banded_vectors(spec, count, band, seed,
                                         base_stream=b << 40,
                                         workers=workers,
                                         max_tries=max_tries)
        features_parts.append(feats)
        labels.extend([label] * count)
    if not features_parts:
        raise ValueError("no non-empty generator specs given")
    features = np.concatenate(features_parts)
    n = specs[0][1].n
    return Dataset(features=features, labels=labels,
                   seeds=np.full(len(labels), seed, dtype=np.int64),
                   ns=np.full(len(labels), n, dtype=np.int32))


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def run_trends(cfg: ExperimentConfig) -> List[str]:
    p_arg = cfg.params.get("p", 0.5)
    ns = cfg.params.get("ns") or list(range(5, 101, int(cfg.params.get(
        "step", 5))))
    samples = int(cfg.params.get("samples", 1000))
    rows = []
    for i, n in enumerate(ns):
        p = resolve_p(p_arg, n)
        feats, _ = sample_connected_vectors(
            er_spec(n, p), samples, cfg.seed, base_stream=i << 32,
            workers=cfg.threads)
        for j, prop in enumerate(PROPERTY_NAMES):
            rows.append([str(p_arg), n, prop] + summary_row(feats[:, j]))
    header = ["p", "n", "property"] + list(SUMMARY_COLUMNS)
    if cfg.fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        return [write_json(cfg, "trends.json", payload)]
    return [write_csv(cfg, "trends.csv", header, rows)]


def run_connectivity(cfg: ExperimentConfig) -> List[str]:
    p_arg = cfg.params.get("p", 0.5)
    ns = cfg.params.get("ns") or list(range(5, 16))
    samples = int(cfg.params.get("samples", 10_000))
    rows = []
    for i, n in enumerate(ns):
        p = resolve_p(p_arg, n)
        spec = er_spec(n, p)
        connected = 0
        for j in range(samples):
            g = generate(spec, cfg.seed, (i << 32) ^ j)
            if is_connected(g):
                connected += 1
        rows.append([str(p_arg), n, samples, connected / samples])
    header = ["p", "n", "samples", "connected_fraction"]
    if cfg.fmt == "json":
        return [write_json(cfg, "connectivity.json",
                           [dict(zip(header, row)) for row in rows])]
    return [write_csv(cfg, "connectivity.csv", header, rows)]


def run_groundtruth(cfg: ExperimentConfig) -> List[str]:
    ns = cfg.params.get("ns") or [4, 5, 6, 7]
    samples = int(cfg.params.get("samples", 1000))
    rows = []
    for i, n in enumerate(ns):
        scan = scan_labeled_space(n, workers=cfg.threads)
        for j, prop in enumerate(PROPERTY_NAMES):
            col = scan.values[:, j].astype(np.float64)
            rows.append(["exact", n, prop] + summary_row(col))
        for r, (label, p) in enumerate((("er_half", 0.5), ("er_third",
                                                           1.0 / 3.0))):
            feats, _ = sample_connected_vectors(
                er_spec(n, p), samples, cfg.seed,
                base_stream=(2 * i + r) << 32, workers=cfg.threads)
            for j, prop in enumerate(PROPERTY_NAMES):
                rows.append([label, n, prop] + summary_row(feats[:, j]))
    header = ["source", "n", "property"] + list(SUMMARY_COLUMNS)
    if cfg.fmt == "json":
        return [write_json(cfg, "groundtruth.json",
                           [dict(zip(header, row)) for row in rows])]
    return [write_csv(cfg, "groundtruth.csv", header, rows)]


def run_correlations(cfg: ExperimentConfig) -> List[str]:
    ns = cfg.params.get("ns") or [4, 5, 6, 7]
    samples = int(cfg.params.get("samples", 1000))
    include_exact = bool(cfg.params.get("exact", True))
    written = []
    for i, n in enumerate(ns):
        if include_exact and 4 <= n <= 7:
            exact = scan_labeled_space(n, workers=cfg.threads)
            written.append(write_matrix_csv(
                cfg, f"exact_corr_n{n}.csv", exact.correlation_matrix(),
                PROPERTY_NAMES))
        feats, _ = sample_connected_vectors(
            er_spec(n, 0.5), samples, cfg.seed, base_stream=i << 32,
            workers=cfg.threads)
        written.append(write_matrix_csv(
            cfg, f"sample_corr_n{n}.csv", correlation_matrix(feats),
            PROPERTY_NAMES))
    return written


def run_stability(cfg: ExperimentConfig) -> List[str]:
    n = int(cfg.params.get("n", 100))
    p = resolve_p(cfg.params.get("p", 0.5), n)
    sizes = cfg.params.get("sizes") or [100, 200, 400, 800, 1600]
    repeats = int(cfg.params.get("repeats", 10))
    result = stability_test(er_spec(n, p), sizes, repeats, seed=cfg.seed,
                            workers=cfg.threads)
    rows = []
    for size in sizes:
        std = result.spread_std(size)
        mn = result.spread_min(size)
        mx = result.spread_max(size)
        stack = np.stack(result.matrices[size])
        defined = (~np.isnan(stack)).sum(axis=0)
        for i in range(len(PROPERTY_NAMES)):
            for j in range(i + 1, len(PROPERTY_NAMES)):
                rows.append([size, PROPERTY_NAMES[i], PROPERTY_NAMES[j],
                             int(defined[i, j]), std[i, j], mn[i, j],
                             mx[i, j]])
    header = ["size", "prop_i", "prop_j", "defined_repeats", "std", "min",
              "max"]
    if cfg.fmt == "json":
        return [write_json(cfg, "stability.json",
                           [dict(zip(header, row)) for row in rows])]
    return [write_csv(cfg, "stability.csv", header, rows)]


def run_collisions(cfg: ExperimentConfig) -> List[str]:
    n = int(cfg.params.get("n", 100))
    p = resolve_p(cfg.params.get("p", 0.5), n)
    samples = int(cfg.params.get("samples", 1000))
    decimals = int(cfg.params.get("decimals", 2))
    ds, graphs = build_er_dataset(n, p, samples, cfg.seed,
                                  workers=cfg.threads, keep_graphs=True)
    report = find_collisions(ds, decimals, graphs=graphs)
    summary = {"rows": samples, "decimals": decimals,
               "pairs": report.pair_count, "triples": report.triple_count,
               "quadruples": report.quadruple_count}
    written = []
    if cfg.fmt == "json":
        payload = dict(summary)
        payload["pair_verdicts"] = [
            {"i": v.i, "j": v.j, "verdict": v.verdict}
            for v in report.pair_verdicts]
        written.append(write_json(cfg, "collisions.json", payload))
    else:
        written.append(write_csv(cfg, "collisions_summary.csv",
                                 list(summary.keys()),
                                 [list(summary.values())]))
        written.append(write_csv(
            cfg, "collision_pairs.csv", ["i", "j", "verdict"],
            [[v.i, v.j, v.verdict] for v in report.pair_verdicts]))
    return written


def run_collision_hunt(cfg: ExperimentConfig) -> List[str]:
    ns = cfg.params.get("ns") or [50, 100]
    runs = int(cfg.params.get("runs", 10))
    decimals = int(cfg.params.get("decimals", 2))
    hard_cap = int(cfg.params.get("hard_cap", 100_000))
    rows = []
    for i, n in enumerate(ns):
        spec = er_spec(n, resolve_p(cfg.params.get("p", 0.5), n))
        for r in range(runs):
            needed = collision_search_until_pair(
                spec, decimals, cfg.seed, hard_cap=hard_cap,
                base_stream=(i * runs + r) << 32)
            rows.append([n, r, needed])
    header = ["n", "run", "graphs_generated"]
    if cfg.fmt == "json":
        return [write_json(cfg, "collision_hunt.json",
                           [dict(zip(header, row)) for row in rows])]
    return [write_csv(cfg, "collision_hunt.csv", header, rows)]


def _load_or_build_er(cfg: ExperimentConfig) -> Dataset:
    if cfg.params.get("dataset"):
        return read_dataset_csv(cfg.params["dataset"])
    n = int(cfg.params.get("n", 100))
    p = resolve_p(cfg.params.get("p", 0.5), n)
    samples = int(cfg.params.get("samples", 5000))
    ds, _ = build_er_dataset(n, p, samples, cfg.seed, workers=cfg.threads)
    return ds


def run_predict(cfg: ExperimentConfig) -> List[str]:
    ds = _load_or_build_er(cfg)
    repeats = int(cfg.params.get("repeats", 5))
    rows = []
    for target in PROPERTY_NAMES:
        for mode in PREDICTION_MODES:
            for r in range(repeats):
                res = train_predictors(ds, target, mode,
                                       split_seed=cfg.seed + r)
                rows.append([target, mode, cfg.seed + r, res.test_loss])
    header = ["target", "mode", "split_seed", "test_l1_loss"]
    if cfg.fmt == "json":
        return [write_json(cfg, "predict.json",
                           [dict(zip(header, row)) for row in rows])]
    return [write_csv(cfg, "predict.csv", header, rows)]


def run_importance(cfg: ExperimentConfig) -> List[str]:
    ds = _load_or_build_er(cfg)
    threshold = float(cfg.params.get("threshold", 0.20))
    imp = importance_matrix(ds, threshold=threshold, split_seed=cfg.seed)
    return [write_matrix_csv(cfg, "importance.csv",
                             imp.counts.astype(np.float64), PROPERTY_NAMES)]


def _load_or_build_classes(cfg: ExperimentConfig) -> Dataset:
    if cfg.params.get("dataset"):
        return read_dataset_csv(cfg.params["dataset"])
    n = int(cfg.params.get("n", 100))
    count = int(cfg.params.get("count", 1000))
    band = tuple(cfg.params.get("band", DENSITY_BAND))
    specs = default_class_specs(n, band, cfg.seed, count=count)
    ds = build_class_dataset(specs, band, cfg.seed, workers=cfg.threads)
    out = _target(cfg, "dataset.csv")
    write_dataset_csv(ds, out, header_lines=_provenance(cfg))
    return ds


def run_classify(cfg: ExperimentConfig) -> List[str]:
    ds = _load_or_build_classes(cfg)
    repeats = int(cfg.params.get("repeats", 10))
    trees = int(cfg.params.get("trees", 100))
    rows = []
    for kind in ("random_forest", "logistic"):
        res = repeated_holdout_accuracy(ds, kind, repeats=repeats,
                                        seed=cfg.seed, trees=trees)
        rows.append([kind, "all12", res.mean_accuracy, res.std_accuracy] +
                    res.accuracies)
    header = ["model", "features", "mean_accuracy", "std_accuracy"] + \
        [f"acc{r}" for r in range(repeats)]
    if cfg.fmt == "json":
        return [write_json(cfg, "classify.json",
                           [dict(zip(header, row)) for row in rows])]
    return [write_csv(cfg, "classify.csv", header, rows)]


def run_sweep(cfg: ExperimentConfig) -> List[str]:
    ds = _load_or_build_classes(cfg)
    subset_size = int(cfg.params.get("subset_size", 2))
    repeats = int(cfg.params.get("repeats", 10))
    trees = int(cfg.params.get("trees", 100))
    kinds = tuple(cfg.params.get("model_kinds", ("random_forest",)))
    subsets = None
    contains = cfg.params.get("contains")
    extra = int(cfg.params.get("random_extra", 0))
    if contains:
        from itertools import combinations
        all_subsets = [s for s in combinations(PROPERTY_NAMES, subset_size)]
        chosen = [s for s in all_subsets if contains in s]
        rest = [s for s in all_subsets if contains not in s]
        if extra:
            rng = graph_rng(cfg.seed, 0x5FEE9)
            picks = rng.permutation(len(rest))[:extra]
            chosen += [rest[i] for i in sorted(picks.tolist())]
        subsets = chosen
    result = subset_sweep(ds, model_kinds=kinds, subset_size=subset_size,
                          repeats=repeats, seed=cfg.seed, trees=trees,
                          subsets=subsets)
    header = ["features"] + [f"{kind}_accuracy" for kind in kinds]
    rows = [["+".join(row.features)] + [row.accuracies[k] for k in kinds]
            for row in result.rows]
    name = f"sweep_size{subset_size}"
    if cfg.fmt == "json":
        return [write_json(cfg, f"{name}.json",
                           [dict(zip(header, row)) for row in rows])]
    return [write_csv(cfg, f"{name}.csv", header, rows)]


def run_embed(cfg: ExperimentConfig) -> List[str]:
    ds = _load_or_build_classes(cfg)
    dims = int(cfg.params.get("dims", 2))
    coords = classical_mds(ds, dims=dims)
    labels = ds.labels or [""] * len(ds)
    rows = [[labels[i]] + list(coords[i]) for i in range(len(ds))]
    header = ["label"] + [chr(ord("x") + d) for d in range(dims)]
    if cfg.fmt == "json":
        return [write_json(cfg, "embed.json",
                           [dict(zip(header, row)) for row in rows])]
    return [write_csv(cfg, "embed.csv", header, rows)]


RUNNERS = {
    "trends": run_trends,
    "connectivity": run_connectivity,
    "groundtruth": run_groundtruth,
    "correlations": run_correlations,
    "stability": run_stability,
    "collisions": run_collisions,
    "collision-hunt": run_collision_hunt,
    "predict": run_predict,
    "importance": run_importance,
    "classify": run_classify,
    "sweep": run_sweep,
    "embed": run_embed,
}


def run_experiment(cfg: ExperimentConfig) -> List[str]:
    if cfg.experiment not in RUNNERS:
        raise ValueError(f"unknown experiment {cfg.experiment!r}; "
                         f"choose from {EXPERIMENTS}")
    return RUNNERS[cfg.experiment](cfg)


# ---------------------------------------------------------------------------
# dataset build
# ---------------------------------------------------------------------------

def dataset_build(cfg: ExperimentConfig) -> List[str]:
    """Build a labeled property-vector dataset from generator specs.

    ``params["specs"]`` holds (label, GeneratorSpec, count) triples or
    the parsed JSON equivalent; zero-count entries are skipped with a
    warning on stdout.
    """
    band = tuple(cfg.params.get("band", DENSITY_BAND))
    raw = cfg.params.get("specs")
    if raw is None:
        n = int(cfg.params.get("n", 100))
        count = int(cfg.params.get("count", 1000))
        specs = default_class_specs(n, band, cfg.seed, count=count)
    else:
        specs = []
        for entry in raw:
            if isinstance(entry, tuple):
                specs.append(entry)
            else:
                specs.append((entry["label"],
                              GeneratorSpec.from_config(entry["spec"]),
                              int(entry["count"])))
    for label, _, count in specs:
        if count == 0:
            print(f"warning: spec {label!r} has count 0 and is omitted")
    ds = build_class_dataset([s for s in specs if s[2] > 0], band, cfg.seed,
                             workers=cfg.threads)
    path = _target(cfg, cfg.params.get("name", "dataset.csv"))
    write_dataset_csv(ds, path, header_lines=_provenance(cfg))
    return [path]
