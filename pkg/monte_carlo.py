# -*- coding: utf-8 -*-
"""
Monte Carlo Realization Loop
Samples independent multi-tier realizations, associates the typical user and
collects per-realization ISR and P_s(theta) values.

Realization i draws from SeedSequence([seed, i, attempt]) with one spawned
child per tier, so a run is reproducible from (seed, n) alone. The index range
is cut into fixed-size chunks that do not depend on the worker count, and
chunks are merged in order: serial and parallel runs give identical output.
"""

import logging
import os
from dataclasses import dataclass
from multiprocessing import Pool
from typing import List, Optional, Sequence, Tuple

import numpy as np

from errors import ConfigError, DegenerateRealizationError, EmptyRealizationError, MetaDistError
from point_processes import Window, sample_process
from sir_core import (Association, NetworkRealization, TierSpec, associate,
                      relative_interference, success_probability)

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1000
MAX_ATTEMPTS = 1000


@dataclass
class RealizationBatch:
    """Per-realization ISR (float64) and P_s samples (float32, shape (n, n_theta))."""

    isr: np.ndarray
    success: np.ndarray
    moment_sums: np.ndarray  # sums of P_s^b in float64, shape (n_b, n_theta)
    thetas: np.ndarray
    b_values: np.ndarray
    resampled: int

    @property
    def n(self) -> int:
        return int(self.isr.shape[0])


def default_workers() -> int:
    """Worker count from METADIST_WORKERS (default 1 = in-process)."""
    raw = os.getenv("METADIST_WORKERS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError("METADIST_WORKERS", f"not an integer: {raw!r}")
    return max(1, workers)


def realization_seed(seed: int, index: int, attempt: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), int(index), int(attempt)])


def draw_realization(tiers: Sequence[TierSpec], window: Window, seed: int,
                     index: int) -> Tuple[NetworkRealization, Association, int]:
    """
    Realization `index` of the stream `seed`, resampled until it has a
    serving BS. Returns (realization, association, number of discarded draws).
    """
    for attempt in range(MAX_ATTEMPTS):
        children = realization_seed(seed, index, attempt).spawn(len(tiers))
        point_sets = tuple(sample_process(spec.kind, spec.density, window, child, tier=k)
                           for k, (spec, child) in enumerate(zip(tiers, children)))
        realization = NetworkRealization(window, point_sets, tuple(tiers))
        try:
            return realization, associate(realization), attempt
        except (EmptyRealizationError, DegenerateRealizationError) as e:
            logger.debug("realization %d attempt %d discarded: %s", index, attempt, e)
    raise MetaDistError(f"realization {index}: no usable draw in {MAX_ATTEMPTS} attempts")


def _run_chunk(task) -> RealizationBatch:
    tiers, window, seed, start, stop, thetas, b_values = task
    count = stop - start
    isr = np.empty(count)
    success = np.empty((count, len(thetas)), dtype=np.float32)
    moment_sums = np.zeros((len(b_values), len(thetas)))
    resampled = 0

    for row, index in enumerate(range(start, stop)):
        realization, assoc, discarded = draw_realization(tiers, window, seed, index)
        resampled += discarded
        ratios = relative_interference(realization, assoc)
        isr[row] = ratios.sum()
        if len(thetas):
            ps = success_probability(ratios, thetas)
            success[row] = ps
            for j, b in enumerate(b_values):
                moment_sums[j] += ps ** b

    logger.debug("chunk [%d, %d) done, %d resampled", start, stop, resampled)
    return RealizationBatch(isr, success, moment_sums, thetas, b_values, resampled)


def _merge(chunks: List[RealizationBatch], thetas: np.ndarray, b_values: np.ndarray) -> RealizationBatch:
    moment_sums = np.zeros((len(b_values), len(thetas)))
    for chunk in chunks:
        moment_sums += chunk.moment_sums
    return RealizationBatch(
        isr=np.concatenate([c.isr for c in chunks]),
        success=np.concatenate([c.success for c in chunks]),
        moment_sums=moment_sums,
        thetas=thetas,
        b_values=b_values,
        resampled=sum(c.resampled for c in chunks),
    )


def simulate_realizations(tiers: Sequence[TierSpec], window: Window, n: int, seed: int,
                          thetas: Sequence[float] = (), b_values: Sequence[float] = (),
                          workers: Optional[int] = None) -> RealizationBatch:
    """Run n realizations; thetas are linear SIR thresholds."""
    if n < 1:
        raise ConfigError("n", f"realization count must be >= 1, got {n}")
    if not tiers:
        raise ConfigError("tiers", "at least one tier is required")
    thetas = np.asarray(thetas, dtype=float)
    b_values = np.asarray(b_values, dtype=float)
    workers = default_workers() if workers is None else max(1, int(workers))

    tasks = [(tuple(tiers), window, seed, start, min(start + CHUNK_SIZE, n), thetas, b_values)
             for start in range(0, n, CHUNK_SIZE)]
    logger.info("simulating %d realizations of %d tier(s) in %d chunk(s) on %d worker(s)",
                n, len(tiers), len(tasks), workers)

    if workers == 1 or len(tasks) == 1:
        chunks = [_run_chunk(task) for task in tasks]
    else:
        with Pool(processes=workers) as pool:
            chunks = pool.map(_run_chunk, tasks)

    batch = _merge(chunks, thetas, b_values)
    if batch.resampled:
        logger.warning("%d empty or degenerate realizations were resampled", batch.resampled)
    return batch
