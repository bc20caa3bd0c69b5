"""Histories, commitments and determination depth over explicit specifications.

A specification maps each history (a sequence of environment events and
commitment events) to a set of admissible outcomes. Commitments narrow that
set irrevocably; the depth of a determination is the minimum number of
commuting layers its commitments can be grouped into.
"""

import enum
import logging
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from typing import Any

import attrs
import networkx as nx

from .utils import DeterminationError, InvalidParams, TooLarge

logger = logging.getLogger(__name__)

Outcome = int
OutcomeSet = frozenset[int]

MAX_ORACLE_COMMITMENTS = 12
MAX_ENUMERATED_HISTORIES = 200_000


class HorizonExceeded(DeterminationError):
    """Raised when a history has more environment events than the horizon."""

    def __init__(self, horizon: int, env_events: int):
        self.horizon = horizon
        self.env_events = env_events
        super().__init__(
            f"History has {env_events} environment events, horizon is {horizon}"
        )


class CommitmentNotInBasis(DeterminationError, KeyError):
    """Raised when a commitment id is not part of the specification's basis."""

    def __init__(self, commitment_id: str):
        self.commitment_id = commitment_id
        super().__init__(f"Commitment not in basis: {commitment_id}")

    def __str__(self) -> str:
        return str(self.args[0])


class CommitmentNotApplicable(DeterminationError):
    """Raised when a commitment is applied at a history where it is undefined."""

    def __init__(self, commitment_id: str, history: "History"):
        self.commitment_id = commitment_id
        self.history = history
        super().__init__(
            f"Commitment {commitment_id} is not applicable at {format_history(history)}"
        )


class CyclicDependency(DeterminationError):
    """Raised when declared commitment prerequisites form a cycle."""

    def __init__(self, cycle: Sequence[str]):
        self.cycle = tuple(cycle)
        super().__init__(f"Cyclic commitment prerequisites: {' -> '.join(cycle)}")


class TooManyCommitments(TooLarge):
    """Raised when an exhaustive layering search gets too many commitments."""

    def __init__(self, size: int, limit: int = MAX_ORACLE_COMMITMENTS):
        super().__init__("commitment set", size, limit)


class Unresolvable(enum.Enum):
    """Depth of a specification no strategy can resolve."""

    MARKER = "unresolvable"

    def __str__(self) -> str:
        return "inf"


UNRESOLVABLE = Unresolvable.MARKER
Depth = int | Unresolvable


def _depth_key(value: Depth) -> float:
    return float("inf") if value is UNRESOLVABLE else float(value)


class EventKind(enum.Enum):
    """The two kinds of history events."""

    ENVIRONMENT = "env"
    COMMITMENT = "commit"


@attrs.frozen
class EventLabel:
    """One history event: an environment move or a commitment."""

    kind: EventKind
    payload: str

    def __str__(self) -> str:
        if self.kind is EventKind.ENVIRONMENT:
            return f"env:{self.payload}"
        return self.payload


History = tuple[EventLabel, ...]


def env(move_id: str) -> EventLabel:
    """Label for an environment event."""
    return EventLabel(EventKind.ENVIRONMENT, move_id)


def commit(commitment_id: str) -> EventLabel:
    """Label for a commitment event."""
    return EventLabel(EventKind.COMMITMENT, commitment_id)


def env_events(history: History) -> tuple[str, ...]:
    """Environment move ids of a history, in order."""
    return tuple(e.payload for e in history if e.kind is EventKind.ENVIRONMENT)


def commitment_ids(history: History) -> tuple[str, ...]:
    """Commitment ids of a history, in order."""
    return tuple(e.payload for e in history if e.kind is EventKind.COMMITMENT)


def event_ids(history: History) -> frozenset[str]:
    """All event ids present in a history."""
    return frozenset(e.payload for e in history)


def format_history(history: History) -> str:
    """Human-readable rendering of a history."""
    return "<" + " . ".join(str(e) for e in history) + ">"


@attrs.frozen
class Pointwise:
    """Commitment mode that filters outcomes one at a time."""

    retain: Callable[[History, Outcome], bool]

    def __call__(self, prefix: History, current: OutcomeSet) -> OutcomeSet:
        return frozenset(o for o in current if self.retain(prefix, o))


@attrs.frozen
class SetTransform:
    """Commitment mode that maps the whole admissible set at once."""

    transform: Callable[[History, OutcomeSet], OutcomeSet]

    def __call__(self, prefix: History, current: OutcomeSet) -> OutcomeSet:
        return frozenset(self.transform(prefix, current))


@attrs.frozen
class Commitment:
    """An irrevocable narrowing of the admissible set.

    ``requires`` makes the commitment inapplicable until every named event is
    in the history. ``dormant_until`` keeps it applicable but acting as the
    identity until the named events are present. A freezing commitment makes
    the specification ignore environment events that follow it.
    """

    id: str
    mode: Pointwise | SetTransform
    requires: frozenset[str] = attrs.field(default=frozenset(), converter=frozenset)
    dormant_until: frozenset[str] = attrs.field(
        default=frozenset(), converter=frozenset
    )
    freezes: bool = False
    kind: str | None = None
    params: tuple[Any, ...] = ()

    @property
    def is_pointwise(self) -> bool:
        """Whether the commitment acts as an independent per-outcome filter."""
        return (
            isinstance(self.mode, Pointwise)
            and not self.requires
            and not self.dormant_until
            and not self.freezes
        )

    def narrow(self, prefix: History, current: OutcomeSet) -> OutcomeSet:
        """Admissible set after this commitment, given the history before it."""
        if not self.dormant_until <= event_ids(prefix):
            return current
        return self.mode(prefix, current)


def exclude(
    commitment_id: str, outcomes: Iterable[Outcome], **kwargs: Any
) -> Commitment:
    """Pointwise commitment removing the given outcomes."""
    removed = frozenset(outcomes)
    return Commitment(
        commitment_id,
        Pointwise(lambda _h, o: o not in removed),
        kind="exclude",
        params=tuple(sorted(removed)),
        **kwargs,
    )


def keep(commitment_id: str, outcomes: Iterable[Outcome], **kwargs: Any) -> Commitment:
    """Pointwise commitment retaining only the given outcomes."""
    kept = frozenset(outcomes)
    return Commitment(
        commitment_id,
        Pointwise(lambda _h, o: o in kept),
        kind="keep",
        params=tuple(sorted(kept)),
        **kwargs,
    )


def freeze(commitment_id: str, **kwargs: Any) -> Commitment:
    """Commitment that closes the specification to later environment events."""
    return Commitment(
        commitment_id,
        SetTransform(lambda _h, s: s),
        freezes=True,
        kind="freeze",
        **kwargs,
    )


def pick_min(commitment_id: str, **kwargs: Any) -> Commitment:
    """Commitment resolving the admissible set to its lowest outcome."""
    return Commitment(
        commitment_id,
        SetTransform(lambda _h, s: frozenset({min(s)}) if s else s),
        kind="pick_min",
        **kwargs,
    )


@attrs.frozen
class EnvMove:
    """An environment move with its availability conditions."""

    id: str
    requires: frozenset[str] = attrs.field(default=frozenset(), converter=frozenset)
    forbids: frozenset[str] = attrs.field(default=frozenset(), converter=frozenset)
    repeatable: bool = False

    def available(self, history: History) -> bool:
        present = event_ids(history)
        if not self.requires <= present or self.forbids & present:
            return False
        return self.repeatable or self.id not in present


def _table_converter(
    table: Mapping[Sequence[str], Iterable[Outcome]],
) -> dict[tuple[str, ...], OutcomeSet]:
    return {tuple(k): frozenset(v) for k, v in table.items()}


@attrs.frozen(eq=False)
class ExplicitSpec:
    """A finite, fully enumerable specification.

    ``admissible_table`` maps environment-event sequences to admissible sets;
    a history uses the entry for the longest table key that prefixes its
    effective environment sequence. Commitments then narrow that set in
    history order.
    """

    outcomes: tuple[str, ...] = attrs.field(converter=tuple)
    env_moves: tuple[EnvMove, ...] = attrs.field(converter=tuple)
    basis: tuple[Commitment, ...] = attrs.field(converter=tuple)
    admissible_table: dict[tuple[str, ...], OutcomeSet] = attrs.field(
        converter=_table_converter
    )
    horizon: int = 0
    _by_id: dict[str, Commitment] = attrs.field(init=False, repr=False)

    def __attrs_post_init__(self) -> None:
        if not self.outcomes:
            raise InvalidParams("specification needs at least one outcome")
        if self.horizon < 0:
            raise InvalidParams("horizon must be non-negative", horizon=self.horizon)
        ids = [c.id for c in self.basis] + [m.id for m in self.env_moves]
        if len(set(ids)) != len(ids):
            raise InvalidParams("event ids must be unique", ids=ids)
        if () not in self.admissible_table:
            raise InvalidParams("admissible_table needs an entry for the empty history")
        if not self.admissible_table[()]:
            raise InvalidParams("admissible set of the empty history is empty")
        universe = set(range(len(self.outcomes)))
        moves = {m.id for m in self.env_moves}
        for key, value in self.admissible_table.items():
            if not value <= universe:
                raise InvalidParams("admissible_table names unknown outcomes", key=key)
            if not set(key) <= moves:
                raise InvalidParams("admissible_table names unknown env moves", key=key)
        object.__setattr__(self, "_by_id", {c.id: c for c in self.basis})

    @property
    def universe(self) -> OutcomeSet:
        """All outcome ids."""
        return frozenset(range(len(self.outcomes)))

    @property
    def is_offline(self) -> bool:
        """Whether the environment can never move."""
        return not self.env_moves

    @property
    def basis_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.basis)

    def commitment(self, commitment: "Commitment | str") -> Commitment:
        """Look up a basis element by id (or check membership of an instance)."""
        cid = commitment if isinstance(commitment, str) else commitment.id
        found = self._by_id.get(cid)
        if found is None:
            raise CommitmentNotInBasis(cid)
        return found

    def labels(self, outcomes: Iterable[Outcome]) -> list[str]:
        """Outcome labels in id order."""
        return [self.outcomes[o] for o in sorted(outcomes)]

    def check_history(self, history: History) -> None:
        """Validate event references and the horizon."""
        moves = {m.id for m in self.env_moves}
        seen: set[str] = set()
        for e in history:
            if e.kind is EventKind.COMMITMENT:
                self.commitment(e.payload)
                if e.payload in seen:
                    raise CommitmentNotApplicable(e.payload, history)
                seen.add(e.payload)
            elif e.payload not in moves:
                raise InvalidParams("unknown environment move", move=e.payload)
        count = len(env_events(history))
        if count > self.horizon:
            raise HorizonExceeded(self.horizon, count)

    def _lookup(self, env_seq: tuple[str, ...]) -> OutcomeSet:
        for end in range(len(env_seq), -1, -1):
            found = self.admissible_table.get(env_seq[:end])
            if found is not None:
                return found
        return self.admissible_table[()]

    def admissible(self, history: History) -> OutcomeSet:
        """Spec(history)."""
        self.check_history(history)
        freeze_at = len(history)
        for i, e in enumerate(history):
            if e.kind is EventKind.COMMITMENT and self.commitment(e.payload).freezes:
                freeze_at = i
                break
        current = self._lookup(env_events(history[:freeze_at]))
        for i, e in enumerate(history):
            if e.kind is EventKind.COMMITMENT:
                current = self.commitment(e.payload).narrow(history[:i], current)
        return current

    def available_env_moves(self, history: History) -> list[EnvMove]:
        """Environment moves the environment may play next."""
        if len(env_events(history)) >= self.horizon:
            return []
        return [m for m in self.env_moves if m.available(history)]

    def applicable(self, history: History, commitment: "Commitment | str") -> bool:
        """Whether a basis commitment is defined at this history."""
        c = self.commitment(commitment)
        present = event_ids(history)
        return c.id not in present and c.requires <= present

    def env_suffixes(self, history: History) -> Iterator[History]:
        """Every environment-only continuation of a history, the empty one first."""
        yield ()
        for move in self.available_env_moves(history):
            step = (env(move.id),)
            for rest in self.env_suffixes(history + step):
                yield step + rest

    def is_valid(self, history: History) -> bool:
        """Nonempty admissible set at the history and all env continuations."""
        return all(self.admissible(history + x) for x in self.env_suffixes(history))

    def remaining(self, history: History) -> list[str]:
        """Basis ids not yet committed in the history, in basis order."""
        present = event_ids(history)
        return [c.id for c in self.basis if c.id not in present]

    def reachable_histories(
        self, start: History = (), limit: int = MAX_ENUMERATED_HISTORIES
    ) -> Iterator[History]:
        """All histories reachable from ``start`` within the horizon."""
        stack = [start]
        produced = 0
        while stack:
            h = stack.pop()
            produced += 1
            if produced > limit:
                raise TooLarge("history enumeration", produced, limit)
            yield h
            children = [h + (env(m.id),) for m in self.available_env_moves(h)]
            children += [
                h + (commit(cid),)
                for cid in self.remaining(h)
                if self.applicable(h, cid)
            ]
            stack.extend(reversed(children))

    def prerequisite_graph(self) -> nx.DiGraph:
        """Declared prerequisite edges between basis commitments."""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.basis_ids)
        ids = set(self.basis_ids)
        for c in self.basis:
            for dep in (c.requires | c.dormant_until) & ids:
                graph.add_edge(dep, c.id)
        return graph


def atomic_basis(spec: ExplicitSpec) -> tuple[Commitment, ...]:
    """One exclusion commitment per outcome."""
    return tuple(exclude(f"not_{label}", [o]) for o, label in enumerate(spec.outcomes))


def with_basis(spec: ExplicitSpec, basis: Iterable[Commitment]) -> ExplicitSpec:
    """Same specification over a different commitment basis."""
    return attrs.evolve(spec, basis=tuple(basis))


@attrs.frozen
class Determination:
    """The commitment subsequence of a history, split into runs."""

    runs: tuple[tuple[str, ...], ...] = attrs.field(
        converter=lambda runs: tuple(tuple(r) for r in runs if r)
    )

    @classmethod
    def single(cls, commitments: Iterable[str]) -> "Determination":
        """A single-run determination."""
        return cls((tuple(commitments),))

    @property
    def commitments(self) -> tuple[str, ...]:
        return tuple(c for run in self.runs for c in run)

    @property
    def cost(self) -> int:
        """Number of commitments."""
        return len(self.commitments)


def determination_of(history: History) -> Determination:
    """Determination of a history; environment events split the runs."""
    runs: list[list[str]] = [[]]
    for e in history:
        if e.kind is EventKind.ENVIRONMENT:
            runs.append([])
        else:
            runs[-1].append(e.payload)
    return Determination(tuple(tuple(r) for r in runs))


def _commitment_id(commitment: "Commitment | str") -> str:
    return commitment if isinstance(commitment, str) else commitment.id


def apply(
    spec: ExplicitSpec, history: History, commitment: Commitment | str
) -> OutcomeSet:
    """Spec(history . commitment).

    An empty result is returned as-is and logged as an invalid application.
    """
    c = spec.commitment(commitment)
    spec.check_history(history)
    if not spec.applicable(history, c):
        raise CommitmentNotApplicable(c.id, history)
    result = spec.admissible(history + (commit(c.id),))
    if not result:
        logger.warning(
            "Commitment %s empties the admissible set at %s",
            c.id,
            format_history(history),
        )
    return result


def commutes_at(
    spec: ExplicitSpec,
    history: History,
    c1: Commitment | str,
    c2: Commitment | str,
) -> bool:
    """Whether both application orders agree at the history and every env extension."""
    first, second = spec.commitment(c1), spec.commitment(c2)
    for c in (first, second):
        if not spec.applicable(history, c):
            raise CommitmentNotApplicable(c.id, history)
    if first.id == second.id:
        return True
    after_first = history + (commit(first.id),)
    after_second = history + (commit(second.id),)
    if not (
        spec.applicable(after_first, second) and spec.applicable(after_second, first)
    ):
        return False
    h12 = after_first + (commit(second.id),)
    h21 = after_second + (commit(first.id),)
    for suffix in spec.env_suffixes(h12):
        if spec.admissible(h12 + suffix) != spec.admissible(h21 + suffix):
            return False
    return True


def commuting_layers(
    spec: ExplicitSpec, history: History, candidates: Iterable[str]
) -> list[tuple[str, ...]]:
    """Valid nonempty commuting layers drawn from the candidates.

    Members must be applicable at the history and commute pairwise there;
    the layer, applied in id order, must leave every env continuation
    nonempty. Layers come back sorted lexicographically.
    """
    usable = sorted(c for c in set(candidates) if spec.applicable(history, c))
    graph = nx.Graph()
    graph.add_nodes_from(usable)
    for i, a in enumerate(usable):
        for b in usable[i + 1 :]:
            if commutes_at(spec, history, a, b):
                graph.add_edge(a, b)
    layers = []
    for clique in nx.enumerate_all_cliques(graph):
        layer = tuple(sorted(clique))
        if spec.is_valid(history + tuple(commit(c) for c in layer)):
            layers.append(layer)
    return sorted(layers)


def _replay(
    spec: ExplicitSpec, history: History, commitments: Sequence[str], strict: bool
) -> History:
    for cid in commitments:
        if spec.applicable(history, cid):
            history = history + (commit(cid),)
        elif strict:
            raise CommitmentNotApplicable(cid, history)
    return history


def _forced(spec: ExplicitSpec, base: History, phi: str, psi: str) -> bool:
    """Whether psi must sit in a strictly later layer than phi at base."""
    if not spec.applicable(base, phi):
        return False
    after_phi = base + (commit(phi),)
    psi_after = spec.applicable(after_phi, psi) and spec.is_valid(
        after_phi + (commit(psi),)
    )
    psi_alone = spec.applicable(base, psi) and spec.is_valid(base + (commit(psi),))
    if psi_after and not psi_alone:
        return True
    if psi_after and psi_alone:
        return not commutes_at(spec, base, phi, psi)
    return False


def _check_prerequisites(spec: ExplicitSpec) -> None:
    graph = spec.prerequisite_graph()
    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        return
    raise CyclicDependency([u for u, _ in cycle] + [cycle[0][0]])


def dependency_dag(
    spec: ExplicitSpec, det: Determination, history: History = ()
) -> nx.DiGraph:
    """Forced-dependency DAG over the occurrences of a single-run determination.

    Node i is the i-th commitment. Edge i -> j when, with commitment i left
    out of the prefix before j, commitment j either fails without i or no
    longer commutes with it.
    """
    if len(det.runs) > 1:
        raise InvalidParams("offline depth needs a single-run determination")
    _check_prerequisites(spec)
    ids = det.commitments
    _replay(spec, history, ids, strict=True)
    dag = nx.DiGraph()
    for i, cid in enumerate(ids):
        dag.add_node(i, commitment=cid)
    for j in range(len(ids)):
        for i in range(j):
            base = _replay(spec, history, ids[:i] + ids[i + 1 : j], strict=False)
            if _forced(spec, base, ids[i], ids[j]):
                dag.add_edge(i, j)
    logger.debug("dependency DAG: %d nodes, %d edges", len(ids), dag.number_of_edges())
    return dag


def offline_depth(spec: ExplicitSpec, det: Determination, history: History = ()) -> int:
    """Longest forced-dependency chain, counted in commitments."""
    dag = dependency_dag(spec, det, history)
    if dag.number_of_nodes() == 0:
        return 0
    return int(nx.dag_longest_path_length(dag)) + 1


def greedy_layering(
    spec: ExplicitSpec, det: Determination, history: History = ()
) -> tuple[tuple[str, ...], ...]:
    """Earliest-layer grouping of a determination along its dependency DAG."""
    dag = dependency_dag(spec, det, history)
    level: dict[int, int] = {}
    for node in nx.topological_sort(dag):
        level[node] = 1 + max((level[p] for p in dag.predecessors(node)), default=0)
    layers: dict[int, list[str]] = {}
    for node, lvl in level.items():
        layers.setdefault(lvl, []).append(dag.nodes[node]["commitment"])
    return tuple(tuple(sorted(layers[lvl])) for lvl in sorted(layers))


_SearchState = tuple[frozenset[str], OutcomeSet]
_SearchEntry = tuple[History, tuple[tuple[str, ...], ...]]


def brute_force_layering(
    spec: ExplicitSpec,
    history: History,
    commitments: Sequence[Commitment | str],
) -> tuple[tuple[str, ...], ...]:
    """Fewest valid commuting layers that reproduce the determination's result.

    Breadth-first over (applied commitments, admissible set) states, which
    captures the prefix dependence of every commitment kind this package
    builds.
    """
    ids = [_commitment_id(c) for c in commitments]
    if len(ids) > MAX_ORACLE_COMMITMENTS:
        raise TooManyCommitments(len(ids))
    if len(set(ids)) != len(ids):
        raise InvalidParams("commitments must be distinct", commitments=ids)
    target = spec.admissible(_replay(spec, history, ids, strict=True))
    everything = frozenset(ids)

    empty: frozenset[str] = frozenset()
    goal = (everything, target)
    start = (empty, spec.admissible(history))
    if start == goal:
        return ()
    frontier: dict[_SearchState, _SearchEntry] = {start: (history, ())}
    seen = {start}
    while frontier:
        following: dict[_SearchState, _SearchEntry] = {}
        for (applied, _), (h, layers) in frontier.items():
            remaining = [c for c in ids if c not in applied]
            for layer in commuting_layers(spec, h, remaining):
                extended = h + tuple(commit(c) for c in layer)
                key = (applied | frozenset(layer), spec.admissible(extended))
                if key == goal:
                    return layers + (layer,)
                if key not in seen:
                    seen.add(key)
                    following[key] = (extended, layers + (layer,))
        logger.debug("layering search frontier: %d states", len(following))
        frontier = following
    raise InvalidParams("determination admits no valid layering", commitments=ids)


def brute_force_min_layers(
    spec: ExplicitSpec,
    history: History,
    commitments: Sequence[Commitment | str],
) -> int:
    """Minimum number of valid commuting layers (exhaustive oracle)."""
    return len(brute_force_layering(spec, history, commitments))


def online_minmax_depth(spec: ExplicitSpec, history: History = ()) -> Depth:
    """Value of the min-max determination game from a history.

    While the admissible set is ambiguous the strategy must commit a valid
    commuting layer if one exists; it may only wait when none exists and the
    environment can still move. After each layer the environment, which
    moves whenever it has an available move, picks the worst continuation.
    A singleton set costs nothing more unless the environment reopens it.
    """
    spec.check_history(history)
    memo: dict[History, Depth] = {}

    def env_turn(h: History) -> Depth:
        moves = spec.available_env_moves(h)
        if not moves:
            return strategy_turn(h)
        return max((strategy_turn(h + (env(m.id),)) for m in moves), key=_depth_key)

    def strategy_turn(h: History) -> Depth:
        if h in memo:
            return memo[h]
        current = spec.admissible(h)
        moves = spec.available_env_moves(h)
        value: Depth
        if not current:
            value = UNRESOLVABLE
        elif len(current) == 1:
            value = max(
                (strategy_turn(h + (env(m.id),)) for m in moves),
                key=_depth_key,
                default=0,
            )
        else:
            layers = commuting_layers(spec, h, spec.remaining(h))
            if layers:
                best: Depth = UNRESOLVABLE
                for layer in layers:
                    rest = env_turn(h + tuple(commit(c) for c in layer))
                    candidate: Depth = (
                        UNRESOLVABLE if rest is UNRESOLVABLE else rest + 1
                    )
                    if _depth_key(candidate) < _depth_key(best):
                        best = candidate
                value = best
            elif moves:
                value = env_turn(h)
            else:
                value = UNRESOLVABLE
        memo[h] = value
        return value

    result = strategy_turn(history)
    logger.debug("online game explored %d histories", len(memo))
    return result


@attrs.frozen
class ShrinkageViolation:
    """A commitment whose later extension re-admits outcomes."""

    prefix: History
    commitment: str
    extension: History
    added: OutcomeSet


@attrs.frozen
class ShrinkageReport:
    """Result of enumerating every (prefix, commitment, extension) triple."""

    horizon: int
    histories_checked: int
    triples_checked: int
    violations: tuple[ShrinkageViolation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def validate_shrinkage(spec: ExplicitSpec) -> ShrinkageReport:
    """Check Spec(H') is a subset of Spec(H) whenever H' extends H . phi."""
    violations = []
    histories = triples = 0
    for h in spec.reachable_histories():
        histories += 1
        outcome = spec.admissible(h)
        for i, e in enumerate(h):
            if e.kind is not EventKind.COMMITMENT:
                continue
            triples += 1
            before = spec.admissible(h[:i])
            if not outcome <= before:
                violations.append(
                    ShrinkageViolation(h[:i], e.payload, h[i + 1 :], outcome - before)
                )
    logger.debug("shrinkage: %d histories, %d triples", histories, triples)
    return ShrinkageReport(spec.horizon, histories, triples, tuple(violations))
