"""Tests for parallel trial execution."""

import numpy as np
import pytest

from determination_depth.runner import TrialResults, TrialTally, run_trials
from determination_depth.utils import InvalidParams


def _coin(rng: np.random.Generator, n: int) -> TrialTally:
    draws = rng.random(n)
    heads = draws < 0.5
    return TrialTally(
        trials=n,
        successes=int(heads.sum()),
        metric_sum=float(draws.sum()),
        metric_sq_sum=float((draws**2).sum()),
        counters={"chunks": 1},
    )


def test_thread_count_does_not_change_results() -> None:
    """Test one thread and four threads give identical tallies."""
    serial = run_trials(10_500, _coin, seed=3, chunk_size=1000)
    parallel = run_trials(10_500, _coin, seed=3, threads=4, chunk_size=1000)

    assert serial.successes == parallel.successes
    assert serial.metric_mean == parallel.metric_mean
    assert serial.trials == parallel.trials == 10_500


def test_results_statistics() -> None:
    """Test means, errors and counters over chunks."""
    results = run_trials(20_000, _coin, seed=11, chunk_size=3000)

    assert results.counter("chunks") == 7
    assert results.counter("missing") == 0
    assert abs(results.mean - 0.5) < 4 * results.stderr
    assert abs(results.metric_mean - 0.5) < 4 * results.metric_stderr
    assert results.stderr == pytest.approx(np.sqrt(0.25 / 20_000), rel=0.01)


def test_seed_changes_results() -> None:
    """Test different seeds give different streams."""
    a = run_trials(5000, _coin, seed=1)
    b = run_trials(5000, _coin, seed=2)

    assert a.metric_mean != b.metric_mean


def test_empty_results() -> None:
    """Test an empty collection reports zero mean."""
    results = TrialResults(tallies=[])

    assert results.trials == 0
    assert results.mean == 0.0
    assert results.stderr == 0.0


def test_rejects_bad_arguments() -> None:
    """Test thread and trial counts must be positive."""
    with pytest.raises(InvalidParams):
        run_trials(100, _coin, seed=0, threads=0)
    with pytest.raises(InvalidParams):
        run_trials(0, _coin, seed=0)
