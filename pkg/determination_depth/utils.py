"""Shared errors, seed streams, statistics and file helpers."""

import math
import os
import tempfile
from pathlib import Path

import numpy as np


class DeterminationError(Exception):
    """Base class for every error raised by this package."""


class InvalidParams(DeterminationError, ValueError):
    """Raised when an operation receives parameters outside its domain."""

    def __init__(self, message: str, **params: object):
        self.params = params
        if params:
            rendered = ", ".join(f"{k}={v!r}" for k, v in params.items())
            message = f"{message} ({rendered})"
        super().__init__(message)


class TooLarge(DeterminationError, ValueError):
    """Raised when an exhaustive search would exceed its size limit."""

    def __init__(self, what: str, size: int, limit: int):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"{what} too large: {size} exceeds limit {limit}")


class IoFailure(DeterminationError, OSError):
    """Raised when a report or input file cannot be read or written."""

    def __init__(self, path: Path | str, reason: str):
        self.path = Path(path)
        self.reason = reason
        super().__init__(f"I/O failure on {self.path}: {reason}")


def require(condition: bool, message: str, **params: object) -> None:
    """Raise InvalidParams unless condition holds."""
    if not condition:
        raise InvalidParams(message, **params)


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    """Counter-mode stream for one chunk of trials.

    Streams depend only on (seed, chunk), never on execution order.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))


def derive_seed(seed: int, *keys: int) -> int:
    """Seed for a sub-experiment identified by integer keys."""
    state = np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint64)
    return int(state[0] >> np.uint64(1))


def chunk_sizes(trials: int, chunk_size: int) -> list[int]:
    """Split trials into fixed-size chunks; the last one may be short."""
    require(trials >= 1, "trials must be positive", trials=trials)
    full, rest = divmod(trials, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def binomial_stderr(mean: float, trials: int) -> float:
    """Standard error of a Bernoulli mean."""
    if trials <= 0:
        return 0.0
    return math.sqrt(max(mean * (1.0 - mean), 0.0) / trials)


def atomic_write_text(path: Path | str, text: str) -> None:
    """Write text so readers never observe a partial file."""
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(
            prefix=f".{target.name}.", suffix=".tmp", dir=target.parent
        )
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
            os.replace(tmp_name, target)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
    except OSError as e:
        raise IoFailure(target, str(e)) from e


def read_text(path: Path | str) -> str:
    """Read an input file, mapping OS errors to IoFailure."""
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoFailure(path, str(e)) from e
