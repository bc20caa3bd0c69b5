"""The k-position constrained generation task.

A chain fixes an initial set P1 and, for each later position, a successor set
for every predecessor value. A tuple is admissible when v1 is in P1 and every
consecutive pair is allowed. Values are 1..m in the public API; the batch
kernels index them from zero.
"""

import enum
import itertools
import logging
import math
from collections.abc import Sequence
from functools import cache
from typing import Protocol

import attrs
import numpy as np

from .runner import TrialTally, run_trials
from .utils import DeterminationError, TooLarge, derive_seed, require

logger = logging.getLogger(__name__)

MAX_CONSERVATION_K = 12
DEFAULT_MAX_PARTITIONS = 100_000


class LengthMismatch(DeterminationError, ValueError):
    """Raised when a tuple does not have one value per position."""

    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"Expected a tuple of length {expected}, got {got}")


@attrs.frozen
class ConstraintChain:
    """The (k, m, s) constraint functions of one task instance."""

    k: int
    m: int
    s: int
    p1: frozenset[int]
    rows: tuple[tuple[frozenset[int], ...], ...]

    def __attrs_post_init__(self) -> None:
        require(self.k >= 1, "k must be positive", k=self.k)
        require(1 <= self.s <= self.m, "need 1 <= s <= m", s=self.s, m=self.m)
        require(len(self.p1) == self.s, "P1 must have s elements")
        require(len(self.rows) == self.k - 1, "need one row table per link")
        for table in self.rows:
            require(len(table) == self.m, "need one successor set per value")
            require(
                all(len(row) == self.s for row in table), "rows must have s elements"
            )

    def successors(self, position: int, value: int) -> frozenset[int]:
        """P_position(value, .) for position 2..k."""
        return self.rows[position - 2][value - 1]

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Boolean membership arrays (first: (m,), links: (k-1, m, m))."""
        first = np.zeros(self.m, dtype=bool)
        first[[v - 1 for v in self.p1]] = True
        links = np.zeros((self.k - 1, self.m, self.m), dtype=bool)
        for li, table in enumerate(self.rows):
            for a, row in enumerate(table):
                links[li, a, [v - 1 for v in row]] = True
        return first, links

    @classmethod
    def from_arrays(cls, first: np.ndarray, links: np.ndarray) -> "ConstraintChain":
        """Build a chain from one sample of the batch arrays."""
        m = first.shape[0]
        return cls(
            k=links.shape[0] + 1,
            m=m,
            s=int(first.sum()),
            p1=frozenset(int(v) + 1 for v in np.flatnonzero(first)),
            rows=tuple(
                tuple(
                    frozenset(int(v) + 1 for v in np.flatnonzero(row))
                    for row in table
                )
                for table in links
            ),
        )


class ChainEnsemble(Protocol):
    """A distribution over constraint chains that can be sampled in batches."""

    k: int
    m: int
    s: int

    @property
    def gamma(self) -> float: ...

    def sample(
        self, rng: np.random.Generator, trials: int
    ) -> tuple[np.ndarray, np.ndarray]: ...


@attrs.frozen
class UniformEnsemble:
    """Every row an independent uniformly random s-subset of [m]."""

    k: int
    m: int
    s: int

    def __attrs_post_init__(self) -> None:
        require(self.k >= 1, "k must be positive", k=self.k)
        require(1 <= self.s <= self.m, "need 1 <= s <= m", s=self.s, m=self.m)

    @property
    def gamma(self) -> float:
        """Membership probability of any single value in any row."""
        return self.s / self.m

    def _subsets(self, rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
        keys = rng.random(shape + (self.m,))
        picked = np.argsort(keys, axis=-1)[..., : self.s]
        mask = np.zeros(shape + (self.m,), dtype=bool)
        np.put_along_axis(mask, picked, True, axis=-1)
        return mask

    def sample(
        self, rng: np.random.Generator, trials: int
    ) -> tuple[np.ndarray, np.ndarray]:
        """Arrays first (trials, m) and links (trials, k-1, m, m)."""
        first = self._subsets(rng, (trials,))
        links = self._subsets(rng, (trials, self.k - 1, self.m))
        return first, links


def generate_chain(k: int, m: int, s: int, seed: int) -> ConstraintChain:
    """One chain from the uniform ensemble, reproducible per seed."""
    ensemble = UniformEnsemble(k, m, s)
    first, links = ensemble.sample(np.random.default_rng(seed), 1)
    return ConstraintChain.from_arrays(first[0], links[0])


def sequential_resolve(chain: ConstraintChain) -> tuple[int, ...]:
    """Commit one position per layer, always taking the lowest valid value."""
    values = [min(chain.p1)]
    for position in range(2, chain.k + 1):
        values.append(min(chain.successors(position, values[-1])))
    return tuple(values)


@attrs.frozen
class TupleCheck:
    valid: bool
    violations: int


def check_tuple(chain: ConstraintChain, values: Sequence[int]) -> TupleCheck:
    """Count violated memberships (v1 in P1 and each consecutive link)."""
    if len(values) != chain.k:
        raise LengthMismatch(chain.k, len(values))
    require(
        all(1 <= v <= chain.m for v in values), "values must lie in 1..m", m=chain.m
    )
    violations = int(values[0] not in chain.p1)
    for position in range(2, chain.k + 1):
        if values[position - 1] not in chain.successors(position, values[position - 2]):
            violations += 1
    return TupleCheck(violations == 0, violations)


def admissible_tuple_count(chain: ConstraintChain) -> int:
    """Number of admissible tuples (s**k for the uniform ensemble)."""
    counts = [int(v in chain.p1) for v in range(1, chain.m + 1)]
    for position in range(2, chain.k + 1):
        following = [0] * chain.m
        for a in range(1, chain.m + 1):
            for b in chain.successors(position, a):
                following[b - 1] += counts[a - 1]
        counts = following
    return sum(counts)


def is_functional(chain: ConstraintChain) -> bool:
    """Whether the task has exactly one admissible tuple."""
    return admissible_tuple_count(chain) == 1


@attrs.frozen
class LayerAssignment:
    """Layer (1..d') of every position, indexed from position 1."""

    layer_of: tuple[int, ...] = attrs.field(converter=tuple)

    def __attrs_post_init__(self) -> None:
        require(len(self.layer_of) >= 1, "assignment needs a position")
        used = set(self.layer_of)
        require(
            used == set(range(1, max(used) + 1)),
            "layers must be 1..d' and nonempty",
            layers=sorted(used),
        )

    @classmethod
    def contiguous(cls, k: int, d: int) -> "LayerAssignment":
        """Blocks of size ceil(k/d) first, then floor(k/d)."""
        blocks = _block_sizes(k, d)
        return cls(tuple(i + 1 for i, size in enumerate(blocks) for _ in range(size)))

    @property
    def k(self) -> int:
        return len(self.layer_of)

    @property
    def depth(self) -> int:
        """Number of layers d'."""
        return max(self.layer_of)

    def positions(self, layer: int) -> tuple[int, ...]:
        """Positions (1-based) assigned to a layer."""
        return tuple(p + 1 for p, lay in enumerate(self.layer_of) if lay == layer)

    def uninformed(self) -> tuple[int, ...]:
        """Positions l whose link (l-1 -> l) is uninformed."""
        return tuple(
            p + 1
            for p in range(1, self.k)
            if self.layer_of[p - 1] >= self.layer_of[p]
        )

    def is_contiguous(self) -> bool:
        return all(a <= b for a, b in itertools.pairwise(self.layer_of))


def _block_sizes(k: int, d: int) -> list[int]:
    require(1 <= d <= k, "need 1 <= d <= k", k=k, d=d)
    q, r = divmod(k, d)
    return [q + 1] * r + [q] * (d - r)


def count_uninformed_links(assignment: LayerAssignment) -> int:
    """Links l-1 -> l with layer(l-1) >= layer(l)."""
    return len(assignment.uninformed())


class Policy(enum.Enum):
    """How candidates fill positions."""

    UNIFORM_GUESS = "uniform"
    VALID_GREEDY = "greedy"


@attrs.frozen
class StrategyRun:
    assignment: LayerAssignment
    width: int = 1
    policy: Policy = Policy.UNIFORM_GUESS
    seed: int = 0

    def __attrs_post_init__(self) -> None:
        require(self.width >= 1, "width must be positive", width=self.width)


def _lowest(mask: np.ndarray) -> np.ndarray:
    return np.argmax(mask, axis=-1)


def _run_batch(
    first: np.ndarray,
    links: np.ndarray,
    assignment: LayerAssignment,
    width: int,
    policy: Policy,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Fill w candidates per chain layer by layer; return values and violations.

    Values have shape (trials, w, k) and are zero-based.
    """
    trials, m = first.shape
    k = assignment.k
    rows = np.arange(trials)[:, None]
    values = np.zeros((trials, width, k), dtype=np.int64)
    fixed: set[int] = set()
    greedy = policy is Policy.VALID_GREEDY

    for layer in range(1, assignment.depth + 1):
        members = [p - 1 for p in assignment.positions(layer)]
        for p in members:
            back = None
            if greedy and p + 1 < k and p + 1 in fixed:
                back = links[rows, p, :, values[:, :, p + 1]]
            if p == 0 or p - 1 in fixed:
                if p == 0:
                    allowed = np.broadcast_to(first[:, None, :], (trials, width, m))
                else:
                    allowed = links[rows, p - 1, values[:, :, p - 1]]
                if back is not None:
                    both = allowed & back
                    allowed = np.where(both.any(axis=-1, keepdims=True), both, allowed)
                values[:, :, p] = _lowest(allowed)
            else:
                guess = rng.integers(0, m, size=(trials, width))
                if back is not None:
                    keys = np.where(back, rng.random(back.shape), -1.0)
                    guess = np.where(back.any(axis=-1), np.argmax(keys, axis=-1), guess)
                values[:, :, p] = guess
        fixed.update(members)

    violations = (~first[rows, values[:, :, 0]]).astype(np.int64)
    for p in range(1, k):
        violations += ~links[rows, p - 1, values[:, :, p - 1], values[:, :, p]]
    return values, violations


@attrs.frozen
class StrategyOutcome:
    success: bool
    violations: tuple[int, ...]
    candidates: tuple[tuple[int, ...], ...]


def run_parallel_strategy(chain: ConstraintChain, run: StrategyRun) -> StrategyOutcome:
    """Build ``run.width`` candidates for one chain; succeed if any is valid."""
    require(run.assignment.k == chain.k, "assignment must cover every position")
    first, links = chain.as_arrays()
    values, violations = _run_batch(
        first[None],
        links[None],
        run.assignment,
        run.width,
        run.policy,
        np.random.default_rng(run.seed),
    )
    per_candidate = tuple(int(v) for v in violations[0])
    return StrategyOutcome(
        success=min(per_candidate) == 0,
        violations=per_candidate,
        candidates=tuple(tuple(int(v) + 1 for v in cand) for cand in values[0]),
    )


def separation_bound(k: int, dprime: int, w: int, gamma: float) -> float:
    """Upper bound on the success of any d'-layer, width-w strategy."""
    require(0 < gamma <= 1, "gamma must lie in (0, 1]", gamma=gamma)
    require(1 <= dprime < k, "need 1 <= d' < k", k=k, dprime=dprime)
    require(w >= 1, "width must be positive", w=w)
    return min(1.0, w * gamma ** (k - dprime))


def width_for_certainty(k: int, dprime: int, gamma: float) -> int:
    """Smallest width at which the separation bound reaches 1."""
    require(0 < gamma <= 1, "gamma must lie in (0, 1]", gamma=gamma)
    return math.ceil(round((1 / gamma) ** (k - dprime), 9))


def expected_violations(k: int, dprime: int, m: int, s: int) -> float:
    """Expected violations of one uniform-guess candidate on contiguous layers."""
    return (k - dprime) * (1 - s / m)


@attrs.frozen
class ChainExperiment:
    """A strategy evaluated over the uniform ensemble."""

    k: int
    m: int
    s: int
    dprime: int
    width: int = 1
    policy: Policy = Policy.UNIFORM_GUESS
    assignment: LayerAssignment | None = None

    @property
    def layers(self) -> LayerAssignment:
        if self.assignment is not None:
            return self.assignment
        return LayerAssignment.contiguous(self.k, self.dprime)

    @property
    def ensemble(self) -> UniformEnsemble:
        return UniformEnsemble(self.k, self.m, self.s)


@attrs.frozen
class Estimate:
    mean: float
    stderr: float
    trials: int
    mean_violations: float
    violations_stderr: float


def estimate_resolution_probability(
    params: ChainExperiment, trials: int, seed: int, threads: int = 1
) -> Estimate:
    """Success frequency over fresh chains, one per trial.

    The violation statistics refer to the first candidate of every trial.
    """
    require(trials >= 1, "trials must be positive", trials=trials)
    require(params.width >= 1, "width must be positive", width=params.width)
    assignment = params.layers
    require(assignment.k == params.k, "assignment must cover every position")
    ensemble = params.ensemble

    def work(rng: np.random.Generator, n: int) -> TrialTally:
        first, links = ensemble.sample(rng, n)
        _, violations = _run_batch(
            first, links, assignment, params.width, params.policy, rng
        )
        lead = violations[:, 0].astype(float)
        return TrialTally(
            trials=n,
            successes=int((violations == 0).any(axis=1).sum()),
            metric_sum=float(lead.sum()),
            metric_sq_sum=float((lead**2).sum()),
        )

    results = run_trials(trials, work, seed, threads=threads)
    logger.debug("%s: %d/%d", params, results.successes, results.trials)
    return Estimate(
        mean=results.mean,
        stderr=results.stderr,
        trials=results.trials,
        mean_violations=results.metric_mean,
        violations_stderr=results.metric_stderr,
    )


def contiguous_assignment(k: int, d: int) -> LayerAssignment:
    return LayerAssignment.contiguous(k, d)


@attrs.frozen
class SeparationCell:
    """One (k, d', w) cell of the separation experiment."""

    k: int
    m: int
    s: int
    dprime: int
    width: int
    policy: Policy
    estimate: Estimate
    bound: float
    expected_violations: float

    @property
    def passed(self) -> bool:
        if self.dprime == self.k:
            return self.estimate.mean == 1.0
        return self.estimate.mean <= self.bound + 3 * self.estimate.stderr + 1e-12


def separation_grid(
    ks: Sequence[int],
    m: int,
    s: int,
    widths: Sequence[int],
    trials: int,
    seed: int,
    dprimes: Sequence[int] | None = None,
    policy: Policy = Policy.UNIFORM_GUESS,
    threads: int = 1,
) -> list[SeparationCell]:
    """Estimate every cell of a separation grid over contiguous layers.

    Without ``dprimes`` every depth 1..k is run; depth k is the sequential
    strategy, which must succeed on every trial.
    """
    gamma = s / m
    cells = []
    for k in ks:
        for dprime in dprimes or range(1, k + 1):
            if not 1 <= dprime <= k:
                continue
            for width in widths:
                params = ChainExperiment(k, m, s, dprime, width, policy)
                cell_seed = derive_seed(seed, k, dprime, width)
                estimate = estimate_resolution_probability(
                    params, trials, cell_seed, threads=threads
                )
                bound = (
                    1.0 if dprime == k else separation_bound(k, dprime, width, gamma)
                )
                cells.append(
                    SeparationCell(
                        k,
                        m,
                        s,
                        dprime,
                        width,
                        policy,
                        estimate,
                        bound,
                        expected_violations(k, dprime, m, s),
                    )
                )
    return cells


@attrs.frozen
class TradeoffConfig:
    """Rounds, width and per-player message budgets of the tradeoff protocol.

    ``bits`` holds one budget per uninformed link, or a single budget used
    for all of them.
    """

    rounds: int
    width: int = 1
    bits: tuple[int, ...] = attrs.field(default=(0,), converter=tuple)
    trials: int = 10_000
    seed: int = 0
    guess: int = 1

    def __attrs_post_init__(self) -> None:
        require(self.width >= 1, "width must be positive", width=self.width)
        require(all(b >= 0 for b in self.bits), "bits must be non-negative")
        require(len(self.bits) >= 1, "need at least one bit budget")

    def budgets(self, links: int) -> tuple[int, ...]:
        if len(self.bits) == 1:
            return self.bits * links
        require(len(self.bits) == links, "need one bit budget per uninformed link")
        return self.bits


@attrs.frozen
class TradeoffResult:
    uninformed_links: int
    lhs: float
    bound_rhs: float
    satisfied: bool
    mean: float
    stderr: float
    success_bound: float
    consistent: bool
    informed_row_rate: float
    informed_row_trials: int
    informed_row_exact: float


def exact_informed_row_success(m: int, s: int, bits: int) -> float:
    """Probability the decoded value lies in a uniform s-row when the guess is right.

    The message is the low ``bits`` bits of the row's lowest element and the
    first candidate decodes it to the lowest value with those bits.
    """
    modulus = 1 << bits
    rows = list(itertools.combinations(range(m), s))
    hits = sum(1 for row in rows if row[0] % modulus in row)
    return hits / len(rows)


def _decode(message: np.ndarray, m: int, bits: int, candidate: int) -> np.ndarray:
    modulus = 1 << bits
    count = (m - 1 - message) // modulus + 1
    return message + (candidate % count) * modulus


def simulate_tradeoff(k: int, m: int, s: int, config: TradeoffConfig) -> TradeoffResult:
    """Run the k-party protocol and check log2 w + sum(b) >= |U| log2(m/s).

    Rounds follow contiguous layers. Informed positions take the lowest valid
    successor. At an uninformed link the player sends the low b bits of the
    lowest element of the row indexed by the public predecessor guess, and
    candidate j decodes to the j-th value carrying those bits.
    """
    require(1 <= s <= m, "need 1 <= s <= m", s=s, m=m)
    require(1 <= config.guess <= m, "guess must lie in 1..m", guess=config.guess)
    assignment = LayerAssignment.contiguous(k, config.rounds)
    uninformed = assignment.uninformed()
    budgets = dict(zip(uninformed, config.budgets(len(uninformed)), strict=True))
    ensemble = UniformEnsemble(k, m, s)
    guess = config.guess - 1
    width = config.width

    def work(rng: np.random.Generator, n: int) -> TrialTally:
        first, links = ensemble.sample(rng, n)
        rows = np.arange(n)[:, None]
        values = np.zeros((n, width, k), dtype=np.int64)
        values[:, :, 0] = _lowest(first)[:, None]
        informed_hits = informed_seen = 0
        for position in range(2, k + 1):
            p = position - 1
            if position in budgets:
                b = budgets[position]
                message = _lowest(links[:, p - 1, guess]) % (1 << b)
                for j in range(width):
                    values[:, j, p] = _decode(message, m, b, j)
                on_guess = values[:, 0, p - 1] == guess
                informed_seen += int(on_guess.sum())
                lead_ok = links[np.arange(n), p - 1, guess, values[:, 0, p]]
                informed_hits += int((on_guess & lead_ok).sum())
            else:
                values[:, :, p] = _lowest(links[rows, p - 1, values[:, :, p - 1]])
        ok = first[rows, values[:, :, 0]]
        for p in range(1, k):
            ok &= links[rows, p - 1, values[:, :, p - 1], values[:, :, p]]
        return TrialTally(
            trials=n,
            successes=int(ok.any(axis=1).sum()),
            counters={"informed_seen": informed_seen, "informed_hits": informed_hits},
        )

    results = run_trials(config.trials, work, config.seed)
    lhs = math.log2(width) + sum(budgets.values())
    rhs = len(uninformed) * math.log2(m / s)
    success_bound = min(
        1.0,
        width * math.prod(min(1.0, (1 << b) * s / m) for b in budgets.values()),
    )
    seen = int(results.counter("informed_seen"))
    rate = results.counter("informed_hits") / seen if seen else 0.0
    lead_bits = budgets[uninformed[0]] if uninformed else 0
    return TradeoffResult(
        uninformed_links=len(uninformed),
        lhs=lhs,
        bound_rhs=rhs,
        satisfied=lhs >= rhs - 1e-12,
        mean=results.mean,
        stderr=results.stderr,
        success_bound=success_bound,
        consistent=results.mean <= success_bound + 3 * results.stderr + 1e-12,
        informed_row_rate=rate,
        informed_row_trials=seen,
        informed_row_exact=exact_informed_row_success(m, s, lead_bits),
    )


@attrs.frozen
class ConservationPlan:
    """Contiguous blocks with the circuit depth each block needs."""

    blocks: tuple[tuple[int, ...], ...]

    @property
    def circuit_depths(self) -> tuple[int, ...]:
        return tuple(len(b) - 1 for b in self.blocks)

    @property
    def total(self) -> int:
        """Sum over layers of (1 + circuit depth)."""
        return sum(1 + c for c in self.circuit_depths)


def conservation_plan(k: int, d: int) -> ConservationPlan:
    """Partition 1..k into d contiguous blocks of near-equal size."""
    sizes = _block_sizes(k, d)
    blocks = []
    start = 1
    for size in sizes:
        blocks.append(tuple(range(start, start + size)))
        start += size
    return ConservationPlan(tuple(blocks))


def layer_circuit_depth(layer: int, assigned: int, k: int) -> int:
    """Longest chain segment a layer must traverse itself.

    ``layer`` and ``assigned`` are bitmasks over positions 0..k-1; bit 0 is
    position 1. A position whose nearest lower known position is j needs the
    chain from j+1 up to it computed inside the layer.
    """
    depth = 0
    known = -1
    for p in range(k):
        if assigned >> p & 1:
            known = p
        elif layer >> p & 1:
            depth = max(depth, p - known - 1)
    return depth


@attrs.frozen
class ConservationReport:
    k: int
    method: str
    partitions: int
    minimum_total: int
    argmin_count: int
    below_k: int
    contiguous_partitions: int
    contiguous_at_minimum: int

    @property
    def passed(self) -> bool:
        return self.below_k == 0 and self.minimum_total >= self.k


@cache
def fubini(k: int) -> int:
    """Number of ordered set partitions of k items."""
    if k == 0:
        return 1
    return sum(math.comb(k, i) * fubini(k - i) for i in range(1, k + 1))


def _submasks(mask: int) -> list[int]:
    subs = []
    sub = mask
    while sub:
        subs.append(sub)
        sub = (sub - 1) & mask
    return subs


def _ordered_partitions(remaining: int) -> list[list[int]]:
    if not remaining:
        return [[]]
    out = []
    for first in _submasks(remaining):
        for rest in _ordered_partitions(remaining & ~first):
            out.append([first] + rest)
    return out


def _partition_total(partition: Sequence[int], k: int) -> int:
    assigned = 0
    total = 0
    for layer in partition:
        total += 1 + layer_circuit_depth(layer, assigned, k)
        assigned |= layer
    return total


def _total_distribution(k: int) -> dict[int, int]:
    """Number of ordered partitions per total, by dynamic programming over masks."""
    full = (1 << k) - 1
    by_mask: dict[int, dict[int, int]] = {0: {0: 1}}
    for assigned in sorted(range(full), key=int.bit_count):
        totals = by_mask.pop(assigned, None)
        if totals is None:
            continue
        for layer in _submasks(full & ~assigned):
            step = 1 + layer_circuit_depth(layer, assigned, k)
            target = by_mask.setdefault(assigned | layer, {})
            for total, ways in totals.items():
                target[total + step] = target.get(total + step, 0) + ways
    return by_mask[full]


def verify_conservation_lower_bound(
    k: int, max_partitions: int = DEFAULT_MAX_PARTITIONS
) -> ConservationReport:
    """Check sum(1 + c_i) >= k over every ordered partition into layers.

    Up to ``max_partitions`` partitions are listed one by one; beyond that a
    dynamic program over assigned-position sets counts the partitions per
    total, which covers the same partitions.
    """
    if k > MAX_CONSERVATION_K:
        raise TooLarge("conservation chain", k, MAX_CONSERVATION_K)
    require(k >= 1, "k must be positive", k=k)
    full = (1 << k) - 1

    distribution: dict[int, int] = {}
    if fubini(k) <= max_partitions:
        method = "enumeration"
        for partition in _ordered_partitions(full):
            total = _partition_total(partition, k)
            distribution[total] = distribution.get(total, 0) + 1
    else:
        method = "subset-dp"
        distribution = _total_distribution(k)

    minimum = min(distribution)
    contiguous = [
        _partition_total([mask_of(block) for block in blocks], k)
        for blocks in _compositions(k)
    ]
    logger.debug("conservation k=%d: %s", k, sorted(distribution.items()))
    return ConservationReport(
        k=k,
        method=method,
        partitions=sum(distribution.values()),
        minimum_total=minimum,
        argmin_count=distribution[minimum],
        below_k=sum(ways for total, ways in distribution.items() if total < k),
        contiguous_partitions=len(contiguous),
        contiguous_at_minimum=contiguous.count(minimum),
    )


def mask_of(positions: Sequence[int]) -> int:
    """Bitmask of 1-based positions."""
    return sum(1 << (p - 1) for p in positions)


def _compositions(k: int) -> list[list[tuple[int, ...]]]:
    out = []
    for cuts in range(1 << (k - 1)):
        blocks: list[tuple[int, ...]] = []
        start = 1
        for p in range(1, k):
            if cuts >> (p - 1) & 1:
                blocks.append(tuple(range(start, p + 1)))
                start = p + 1
        blocks.append(tuple(range(start, k + 1)))
        out.append(blocks)
    return out
