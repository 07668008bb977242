"""Seeded fan-out of Monte Carlo batches across worker threads."""

import asyncio
import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass(frozen=True)
class WorkerBatch:
    """Contiguous sample range [start, stop) with its own random stream."""

    index: int
    start: int
    stop: int
    seed: np.random.SeedSequence

    @property
    def size(self) -> int:
        return self.stop - self.start

    def generator(self) -> np.random.Generator:
        """Counter-based generator for this batch."""
        return np.random.Generator(np.random.Philox(self.seed))


def split_batches(n_samples: int, workers: int, seed: int) -> list[WorkerBatch]:
    """Split n_samples into disjoint ranges, one per worker, with spawned seeds.

    The same (n_samples, workers, seed) always yields the same batches.
    """
    if n_samples < 0:
        raise ValueError("n_samples must be nonnegative")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    children = np.random.SeedSequence(seed).spawn(workers)
    return [
        WorkerBatch(
            index=i,
            start=i * n_samples // workers,
            stop=(i + 1) * n_samples // workers,
            seed=child,
        )
        for i, child in enumerate(children)
    ]


class BatchFanout:
    """Runs one task per batch in worker threads and collects results in batch order.

    Reductions over the returned list are therefore independent of thread timing.
    """

    def __init__(self, workers: int = 1, name: str = "batches") -> None:
        if workers < 1:
            raise ValueError("workers must be at least 1")
        self.name = name
        self._workers = workers

    @property
    def worker_count(self) -> int:
        """Number of batches per run."""
        return self._workers

    async def run(
        self, task: Callable[[WorkerBatch], T], n_samples: int, seed: int
    ) -> list[T]:
        """Run task on every batch concurrently."""
        batches = split_batches(n_samples, self._workers, seed)
        logger.debug(
            "[%s] Fanning out %d samples over %d workers", self.name, n_samples, self._workers
        )
        results = await asyncio.gather(*(asyncio.to_thread(task, batch) for batch in batches))
        logger.debug("[%s] Collected %d batch results", self.name, len(results))
        return list(results)

    def run_sync(self, task: Callable[[WorkerBatch], T], n_samples: int, seed: int) -> list[T]:
        """Blocking wrapper around run for synchronous callers."""
        return asyncio.run(self.run(task, n_samples, seed))
