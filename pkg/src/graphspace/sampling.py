"""Batch sampling of connected graphs and their property vectors.

Each batch slot j draws from streams ``base ^ (j * SLOT_STRIDE + t)``
for attempt t, so results depend only on (spec, seed, base, j) and a
worker pool produces byte-identical output to a sequential run.
"""

from __future__ import annotations

import multiprocessing
from typing import List, Optional, Tuple

import numpy as np

from .errors import SamplingError
from .generators import GeneratorSpec, generate, sample_in_density_band
from .graphs import Graph, is_connected
from .properties import compute_property_vector
from .rng import derived_stream

SLOT_STRIDE = 1024


def connected_graph(spec: GeneratorSpec, seed: int, base_stream: int = 0,
                    slot: int = 0, max_attempts: int = SLOT_STRIDE) -> Graph:
    """First connected draw of the spec within the slot's attempt budget."""
    if max_attempts > SLOT_STRIDE:
        raise ValueError(f"attempt budget per slot is capped at {SLOT_STRIDE}")
    for t in range(max_attempts):
        g = generate(spec, seed, derived_stream(base_stream,
                                                slot * SLOT_STRIDE + t))
        if is_connected(g):
            return g
    raise SamplingError(
        f"no connected {spec.kind} graph in {max_attempts} attempts",
        attempts=max_attempts)


def _connected_task(args):
    spec, seed, base_stream, slot, keep_graph = args
    g = connected_graph(spec, seed, base_stream, slot)
    return compute_property_vector(g).as_array(), (g if keep_graph else None)


def _banded_task(args):
    spec, band, max_tries, seed, base_stream, slot, keep_graph = args
    g = sample_in_density_band(spec, band[0], band[1], max_tries, seed,
                               base_stream=derived_stream(
                                   base_stream, slot * SLOT_STRIDE))
    return compute_property_vector(g).as_array(), (g if keep_graph else None)


def _run_tasks(task, args_list, workers: int):
    if workers > 1 and len(args_list) > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            return pool.map(task, args_list, chunksize=8)
    return [task(a) for a in args_list]


def sample_connected_vectors(spec: GeneratorSpec, count: int, seed: int,
                             base_stream: int = 0, workers: int = 1,
                             keep_graphs: bool = False
                             ) -> Tuple[np.ndarray, Optional[List[Graph]]]:
    """Property vectors of ``count`` connected draws; slot j of the batch
    is independent of every other slot."""
    args = [(spec, seed, base_stream, j, keep_graphs) for j in range(count)]
    results = _run_tasks(_connected_task, args, workers)
    features = np.array([r[0] for r in results])
    graphs = [r[1] for r in results] if keep_graphs else None
    return features, graphs


def sample_banded_vectors(spec: GeneratorSpec, count: int,
                          band: Tuple[float, float], seed: int,
                          base_stream: int = 0, workers: int = 1,
                          max_tries: int = SLOT_STRIDE,
                          keep_graphs: bool = False
                          ) -> Tuple[np.ndarray, Optional[List[Graph]]]:
    """Property vectors of ``count`` density-band-accepted connected draws."""
    if max_tries > SLOT_STRIDE:
        raise ValueError(f"try budget per slot is capped at {SLOT_STRIDE}")
    args = [(spec, band, max_tries, seed, base_stream, j, keep_graphs)
            for j in range(count)]
    results = _run_tasks(_banded_task, args, workers)
    features = np.array([r[0] for r in results])
    graphs = [r[1] for r in results] if keep_graphs else None
    return features, graphs
