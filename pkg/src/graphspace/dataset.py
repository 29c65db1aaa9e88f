"""Property-vector datasets and their CSV form.

CSV schema (one row per graph, floats at 17 significant digits):

    generator,seed,n,gcc,ascc,apl,r,den,diam,ce,cc,cb,cei,rg,rho
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .properties import PROPERTY_NAMES, PropertyVector

CSV_HEADER = ("generator", "seed", "n") + PROPERTY_NAMES


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class Dataset:
    """Rectangular table of property vectors with optional provenance."""

    features: np.ndarray                       # float64 (rows, 12)
    labels: Optional[List[str]] = None         # generator class per row
    seeds: Optional[np.ndarray] = None
    ns: Optional[np.ndarray] = None
    feature_names: Sequence[str] = field(default=PROPERTY_NAMES)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 2:
            raise ValueError("features must be 2-d")
        if self.features.shape[1] != len(self.feature_names):
            raise ValueError("feature count does not match feature names")
        if self.labels is not None and len(self.labels) != len(self):
            raise ValueError("labels length must match row count")

    def __len__(self) -> int:
        return self.features.shape[0]

    def column_index(self, name: str) -> int:
        try:
            return list(self.feature_names).index(name)
        except ValueError:
            raise KeyError(f"unknown property {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.features[:, self.column_index(name)]

    def select(self, names: Sequence[str]) -> np.ndarray:
        idx = [self.column_index(n) for n in names]
        return self.features[:, idx]

    def class_names(self) -> List[str]:
        if self.labels is None:
            raise ValueError("dataset has no labels")
        return sorted(set(self.labels))

    def label_indices(self) -> np.ndarray:
        classes = {c: i for i, c in enumerate(self.class_names())}
        return np.array([classes[l] for l in self.labels], dtype=np.int32)


def dataset_from_vectors(vectors: Sequence[PropertyVector],
                         labels: Optional[Sequence[str]] = None,
                         seeds: Optional[Sequence[int]] = None) -> Dataset:
    features = np.array([v.as_array() for v in vectors])
    ns = np.array([v.n for v in vectors], dtype=np.int32)
    return Dataset(
        features=features,
        labels=list(labels) if labels is not None else None,
        seeds=np.asarray(seeds, dtype=np.int64) if seeds is not None else None,
        ns=ns,
    )


def write_dataset_csv(dataset: Dataset, path, header_lines: Sequence[str] = ()
                      ) -> None:
    labels = dataset.labels or [""] * len(dataset)
    seeds = dataset.seeds if dataset.seeds is not None else \
        np.zeros(len(dataset), dtype=np.int64)
    ns = dataset.ns if dataset.ns is not None else \
        np.zeros(len(dataset), dtype=np.int32)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(CSV_HEADER) + "\n")
        for i in range(len(dataset)):
            row = [labels[i], str(int(seeds[i])), str(int(ns[i]))]
            row += [fmt(x) for x in dataset.features[i]]
            fh.write(",".join(row) + "\n")


def read_dataset_csv(path) -> Dataset:
    labels: List[str] = []
    seeds: List[int] = []
    ns: List[int] = []
    rows: List[List[float]] = []
    with open(path, "r", encoding="ascii") as fh:
        header = None
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                if tuple(header) != CSV_HEADER:
                    raise ValueError(f"unexpected dataset header: {header}")
                continue
            parts = line.split(",")
            labels.append(parts[0])
            seeds.append(int(parts[1]))
            ns.append(int(parts[2]))
            rows.append([float(x) for x in parts[3:]])
    features = np.array(rows) if rows else np.zeros((0, len(PROPERTY_NAMES)))
    has_labels = any(labels)
    return Dataset(
        features=features,
        labels=labels if has_labels else None,
        seeds=np.array(seeds, dtype=np.int64),
        ns=np.array(ns, dtype=np.int32),
    )
