"""Tests for seeded batch fan-out."""

import threading

import numpy as np
import pytest

from momentrate.workers import BatchFanout, WorkerBatch, split_batches


class TestSplitBatches:
    """Tests for split_batches function."""

    def test_ranges_cover_samples(self):
        """Batches are contiguous, disjoint and exhaustive."""
        batches = split_batches(10, 3, seed=1)
        assert [(b.start, b.stop) for b in batches] == [(0, 3), (3, 6), (6, 10)]
        assert sum(b.size for b in batches) == 10

    def test_more_workers_than_samples(self):
        """Surplus workers get empty batches."""
        batches = split_batches(2, 4, seed=0)
        assert [b.size for b in batches] == [0, 1, 0, 1]

    def test_streams_are_reproducible(self):
        """Same seed gives the same draws."""
        a = split_batches(100, 2, seed=42)[1].generator().random(5)
        b = split_batches(100, 2, seed=42)[1].generator().random(5)
        assert np.array_equal(a, b)

    def test_streams_are_distinct(self):
        """Sibling batches draw different numbers."""
        first, second = split_batches(100, 2, seed=42)
        assert not np.array_equal(first.generator().random(5), second.generator().random(5))

    def test_invalid_arguments(self):
        """Negative sample counts and zero workers are rejected."""
        with pytest.raises(ValueError):
            split_batches(-1, 1, seed=0)
        with pytest.raises(ValueError):
            split_batches(10, 0, seed=0)


class TestBatchFanout:
    """Tests for BatchFanout class."""

    def test_init_rejects_zero_workers(self):
        """At least one worker is required."""
        with pytest.raises(ValueError):
            BatchFanout(0)

    def test_worker_count(self):
        """worker_count reports the configured workers."""
        assert BatchFanout(3).worker_count == 3

    @pytest.mark.asyncio
    async def test_results_in_batch_order(self):
        """Results come back ordered by batch index."""
        fanout = BatchFanout(4, name="test")

        def task(batch: WorkerBatch) -> int:
            return batch.index

        assert await fanout.run(task, 100, seed=0) == [0, 1, 2, 3]

    @pytest.mark.asyncio
    async def test_runs_in_threads(self):
        """Tasks execute off the event loop thread."""
        loop_thread = threading.get_ident()
        fanout = BatchFanout(2)
        idents = await fanout.run(lambda _batch: threading.get_ident(), 10, seed=0)
        assert all(ident != loop_thread for ident in idents)

    def test_run_sync_reduction_is_deterministic(self):
        """Sum over batches is identical across runs with the same seed."""
        fanout = BatchFanout(3)

        def task(batch: WorkerBatch) -> float:
            return float(batch.generator().random(batch.size).sum())

        first = sum(fanout.run_sync(task, 1000, seed=7))
        second = sum(fanout.run_sync(task, 1000, seed=7))
        assert first == second

    def test_task_errors_propagate(self):
        """Exceptions raised in a batch reach the caller."""
        fanout = BatchFanout(2)

        def task(batch: WorkerBatch) -> None:
            raise RuntimeError(f"batch {batch.index} failed")

        with pytest.raises(RuntimeError, match="failed"):
            fanout.run_sync(task, 10, seed=0)
