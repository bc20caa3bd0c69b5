"""Run Monte Carlo trials in parallel chunks and collect the tallies."""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field

import numpy as np

from .utils import binomial_stderr, chunk_generator, chunk_sizes, require

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 10_000


@dataclass
class TrialTally:
    """Result of one chunk of trials."""

    trials: int
    successes: int
    metric_sum: float = 0.0
    metric_sq_sum: float = 0.0
    counters: dict[str, float] = field(default_factory=dict)


@dataclass
class TrialResults:
    """Collection of chunk tallies."""

    tallies: list[TrialTally]

    @property
    def trials(self) -> int:
        """Total number of trials."""
        return sum(t.trials for t in self.tallies)

    @property
    def successes(self) -> int:
        """Total number of successful trials."""
        return sum(t.successes for t in self.tallies)

    @property
    def mean(self) -> float:
        """Success frequency."""
        return self.successes / self.trials if self.trials else 0.0

    @property
    def stderr(self) -> float:
        """Binomial standard error of the success frequency."""
        return binomial_stderr(self.mean, self.trials)

    @property
    def metric_mean(self) -> float:
        """Mean of the per-trial secondary metric."""
        return sum(t.metric_sum for t in self.tallies) / self.trials

    @property
    def metric_stderr(self) -> float:
        """Standard error of the secondary metric mean."""
        n = self.trials
        if n < 2:
            return 0.0
        mean = self.metric_mean
        sq = sum(t.metric_sq_sum for t in self.tallies)
        variance = max(sq / n - mean * mean, 0.0) * n / (n - 1)
        return float(np.sqrt(variance / n))

    def counter(self, name: str) -> float:
        """Sum of a named counter over all chunks."""
        return sum(t.counters.get(name, 0.0) for t in self.tallies)


def run_trials(
    trials: int,
    work: Callable[[np.random.Generator, int], TrialTally],
    seed: int,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> TrialResults:
    """Run ``trials`` trials split into chunks over a thread pool.

    Args:
        trials: Total number of trials
        work: Called with the chunk's generator and its trial count
        seed: Master seed; chunk streams are derived from it
        threads: Maximum number of worker threads
        chunk_size: Trials per chunk

    Chunk streams depend only on the seed and the chunk index, and tallies
    are summed, so the thread count never changes the result.
    """
    require(threads >= 1, "threads must be positive", threads=threads)
    sizes = chunk_sizes(trials, chunk_size)

    if threads == 1:
        tallies = [work(chunk_generator(seed, i), n) for i, n in enumerate(sizes)]
        return TrialResults(tallies=tallies)

    by_index: dict[int, TrialTally] = {}
    with ThreadPoolExecutor(max_workers=threads) as executor:
        future_to_chunk = {
            executor.submit(work, chunk_generator(seed, i), n): i
            for i, n in enumerate(sizes)
        }
        for future in as_completed(future_to_chunk):
            index = future_to_chunk[future]
            by_index[index] = future.result()
            logger.debug("chunk %d/%d done", len(by_index), len(sizes))

    return TrialResults(tallies=[by_index[i] for i in range(len(sizes))])
