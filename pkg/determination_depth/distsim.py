"""Multi-agent simulation of determination over an asynchronous network.

Agents own commitments and environment inputs of a shared specification.
Every local commitment or input is broadcast to the other agents as a
message that the scheduler may delay forever. A strategy sees only its own
projection of the event history. Synchronisation barriers deliver every
pending message and add one sync event per agent, which forms a consistent
cut on which all agents agree about the admissible set.
"""

import json
import logging
from collections.abc import Callable, Iterator, Mapping, Sequence
from pathlib import Path
from typing import Any

import attrs
import networkx as nx

from . import catalog
from .core import (
    UNRESOLVABLE,
    Depth,
    ExplicitSpec,
    History,
    commit,
    env,
    exclude,
    keep,
    online_minmax_depth,
)
from .specfile import parse_spec
from .utils import DeterminationError, InvalidParams, TooLarge, read_text, require

logger = logging.getLogger(__name__)

MAX_AGENTS = 2
MAX_SCENARIO_COMMITMENTS = 3
MAX_SCENARIO_HORIZON = 6
MAX_SEARCH_STATES = 500_000
MAX_EXPLORATIONS = 200_000

Label = tuple[str, str]
Projection = tuple[Label, ...]


class NotAChain(DeterminationError):
    """Raised when an agent's events are not totally ordered by causality."""

    def __init__(self, agent: int, first: int, second: int):
        self.agent = agent
        self.first = first
        self.second = second
        super().__init__(f"Events {first} and {second} of agent {agent} are unordered")


class EventNotFound(DeterminationError, KeyError):
    def __init__(self, event_id: int):
        self.event_id = event_id
        super().__init__(event_id)

    def __str__(self) -> str:
        return f"Event {self.event_id} is not in the history"


@attrs.frozen
class Event:
    """A typed local event; ``kind`` is init, commit, env, recv or sync."""

    id: int
    agent: int
    kind: str
    name: str = ""

    @property
    def label(self) -> Label:
        return (self.kind, self.name)


@attrs.frozen
class EventHistory:
    """Events with causal precedence edges (program order and message delivery)."""

    events: tuple[Event, ...] = attrs.field(converter=tuple)
    edges: frozenset[tuple[int, int]] = attrs.field(converter=frozenset)

    def __attrs_post_init__(self) -> None:
        ids = {e.id for e in self.events}
        require(len(ids) == len(self.events), "event ids must be unique")
        require(
            all(a in ids and b in ids for a, b in self.edges),
            "edges must join known events",
        )
        require(
            nx.is_directed_acyclic_graph(self.graph()), "causal order must be acyclic"
        )

    def graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(e.id for e in self.events)
        graph.add_edges_from(self.edges)
        return graph

    def event(self, event_id: int) -> Event:
        for e in self.events:
            if e.id == event_id:
                return e
        raise EventNotFound(event_id)

    @property
    def agents(self) -> int:
        return 1 + max((e.agent for e in self.events), default=-1)


def project(history: EventHistory, agent: int) -> tuple[Event, ...]:
    """The agent's events in causal order."""
    graph = history.graph()
    own = {e.id for e in history.events if e.agent == agent}
    order = [v for v in nx.lexicographical_topological_sort(graph) if v in own]
    for first, second in zip(order, order[1:], strict=False):
        if not nx.has_path(graph, first, second):
            raise NotAChain(agent, first, second)
    return tuple(history.event(v) for v in order)


def projection_labels(history: EventHistory, agent: int) -> Projection:
    return tuple(e.label for e in project(history, agent))


def indistinguishable(h1: EventHistory, h2: EventHistory, agent: int) -> bool:
    """Whether the agent's projections agree as typed sequences."""
    return projection_labels(h1, agent) == projection_labels(h2, agent)


def causal_view(history: EventHistory, event_id: int) -> History:
    """Commitments and environment inputs in the causal past of an event, inclusive."""
    graph = history.graph()
    if event_id not in graph:
        raise EventNotFound(event_id)
    past = nx.ancestors(graph, event_id) | {event_id}
    view = []
    for v in sorted(past):
        e = history.event(v)
        if e.kind == "commit":
            view.append(commit(e.name))
        elif e.kind == "env":
            view.append(env(e.name))
    return tuple(view)


def verify_sync_point(
    history: EventHistory, cut: Sequence[int], spec: ExplicitSpec
) -> bool:
    """Whether one event per agent forms a consistent cut with one admissible set."""
    graph = history.graph()
    for event_id in cut:
        if event_id not in graph:
            raise EventNotFound(event_id)
    require(len(cut) == history.agents, "cut needs one event per agent")
    for p, e_p in enumerate(cut):
        require(
            history.event(e_p).agent == p,
            "cut event belongs to another agent",
            agent=p,
        )

    for q, e_q in enumerate(cut):
        for x in nx.ancestors(graph, e_q):
            p = history.event(x).agent
            if p != q and x != cut[p] and not nx.has_path(graph, x, cut[p]):
                logger.debug(
                    "cut not consistent: %d precedes %d past %d", x, e_q, cut[p]
                )
                return False

    views = {spec.admissible(causal_view(history, e)) for e in cut}
    return len(views) == 1


# Scenarios


@attrs.frozen
class Scenario:
    """A specification split across agents, with a number of allowed barriers."""

    name: str
    spec: ExplicitSpec
    agents: int
    placement: Mapping[str, int] = attrs.field(converter=dict)
    env_placement: Mapping[str, int] = attrs.field(converter=dict, factory=dict)
    barriers: int = 0

    def __attrs_post_init__(self) -> None:
        require(self.agents >= 1, "scenario needs an agent", agents=self.agents)
        require(self.barriers >= 0, "barriers must be non-negative")
        require(
            set(self.placement) == set(self.spec.basis_ids),
            "every commitment needs exactly one owner",
        )
        require(
            set(self.env_placement) == {m.id for m in self.spec.env_moves},
            "every environment move needs exactly one owner",
        )
        owners = list(self.placement.values()) + list(self.env_placement.values())
        require(all(0 <= a < self.agents for a in owners), "owner out of range")

    def with_barriers(self, barriers: int) -> "Scenario":
        return attrs.evolve(self, barriers=barriers)

    def owned(self, agent: int) -> list[str]:
        return [c for c in self.spec.basis_ids if self.placement[c] == agent]


@attrs.frozen
class Step:
    """One scheduler choice: step an agent, deliver, inject input, or end the phase."""

    kind: str
    agent: int = -1
    name: str = ""

    def __str__(self) -> str:
        if self.kind == "end":
            return "end"
        return f"{self.kind}({self.agent}{', ' + self.name if self.name else ''})"


Strategy = Callable[[int, Projection], str | None]
StrategyKey = tuple[int, Projection]
StrategyTable = dict[StrategyKey, str | None]


class _NeedAction(Exception):
    def __init__(self, agent: int, projection: Projection):
        self.agent = agent
        self.projection = projection


@attrs.define
class _State:
    events: list[Event]
    edges: list[tuple[int, int]]
    last: list[int]
    projections: list[Projection]
    waiting_on: list[Projection | None]
    pending: list[tuple[int, int, str, str]]
    phase: int = 0
    history: History = ()

    def copy(self) -> "_State":
        return _State(
            list(self.events),
            list(self.edges),
            list(self.last),
            list(self.projections),
            list(self.waiting_on),
            list(self.pending),
            self.phase,
            self.history,
        )

    def key(self) -> tuple[Any, ...]:
        return (
            tuple(self.projections),
            tuple(self.waiting_on),
            tuple(sorted(p[1:] for p in self.pending)),
            self.phase,
            self.history,
        )

    def add(
        self, agent: int, kind: str, name: str, extra_from: Sequence[int] = ()
    ) -> int:
        event_id = len(self.events)
        self.events.append(Event(event_id, agent, kind, name))
        if self.last[agent] >= 0:
            self.edges.append((self.last[agent], event_id))
        self.edges.extend((src, event_id) for src in extra_from)
        self.last[agent] = event_id
        self.projections[agent] = self.projections[agent] + ((kind, name),)
        return event_id

    def broadcast(
        self, sender: int, event_id: int, kind: str, name: str, agents: int
    ) -> None:
        for recipient in range(agents):
            if recipient != sender:
                self.pending.append((event_id, recipient, kind, name))

    def idle(self, agent: int) -> bool:
        return self.waiting_on[agent] == self.projections[agent]

    def event_history(self) -> EventHistory:
        return EventHistory(self.events, self.edges)


def _initial(scenario: Scenario) -> _State:
    n = scenario.agents
    state = _State([], [], [-1] * n, [()] * n, [None] * n, [])
    for agent in range(n):
        state.add(agent, "init", "")
    return state


def _choices(scenario: Scenario, state: _State) -> list[Step]:
    steps = [Step("step", a) for a in range(scenario.agents) if not state.idle(a)]
    steps += [
        Step("deliver", recipient, str(src)) for src, recipient, _, _ in state.pending
    ]
    moves = scenario.spec.available_env_moves(state.history)
    steps += [Step("env", scenario.env_placement[m.id], m.id) for m in moves]
    if not moves and all(state.idle(a) for a in range(scenario.agents)):
        steps.append(Step("end"))
    return steps


@attrs.frozen
class Run:
    """Outcome of one run under a fixed strategy and schedule."""

    history: EventHistory
    global_history: History
    schedule: tuple[Step, ...]
    finished: bool
    valid: bool
    resolved: bool
    reason: str = ""

    @property
    def succeeded(self) -> bool:
        return self.finished and self.valid and self.resolved


def _apply(scenario: Scenario, state: _State, step: Step, strategy: Strategy) -> str:
    """Advance the state by one scheduler choice.

    Returns "" to continue, "end" when the run is over, or a failure reason.
    """
    spec = scenario.spec
    if step.kind == "step":
        agent = step.agent
        action = strategy(agent, state.projections[agent])
        if action is None:
            state.waiting_on[agent] = state.projections[agent]
            return ""
        owned = scenario.placement.get(action) == agent
        if not owned or ("commit", action) in state.projections[agent]:
            raise InvalidParams(
                "strategy chose a commitment it cannot make", commitment=action
            )
        if not spec.applicable(state.history, action):
            return f"{action} committed while inapplicable"
        extended = state.history + (commit(action),)
        if not spec.is_valid(extended):
            return f"{action} empties the admissible set"
        state.history = extended
        event_id = state.add(agent, "commit", action)
        state.broadcast(agent, event_id, "commit", action, scenario.agents)
        return ""
    if step.kind == "deliver":
        src = int(step.name)
        index = next(
            i
            for i, p in enumerate(state.pending)
            if p[0] == src and p[1] == step.agent
        )
        _, recipient, kind, name = state.pending.pop(index)
        state.add(recipient, "recv", f"{kind}:{name}", extra_from=[src])
        return ""
    if step.kind == "env":
        state.history = state.history + (env(step.name),)
        event_id = state.add(step.agent, "env", step.name)
        state.broadcast(step.agent, event_id, "env", step.name, scenario.agents)
        return ""
    if step.kind == "end":
        if state.phase == scenario.barriers:
            return "end"
        _barrier(state, scenario.agents)
        return ""
    raise InvalidParams("unknown scheduler step", step=str(step))


def _barrier(state: _State, agents: int) -> None:
    for src, recipient, kind, name in sorted(state.pending):
        state.add(recipient, "recv", f"{kind}:{name}", extra_from=[src])
    state.pending.clear()
    before = list(state.last)
    for agent in range(agents):
        others = [before[a] for a in range(agents) if a != agent]
        state.add(agent, "sync", str(state.phase), extra_from=others)
    state.phase += 1


def simulate(
    scenario: Scenario,
    strategy: Strategy | Mapping[StrategyKey, str | None],
    schedule: Sequence[Step],
) -> Run:
    """Replay a schedule deterministically under a strategy.

    A mapping strategy is a table from (agent, projection) to a commitment
    id or None for waiting. The run stops at the first invalid commitment.
    """
    decide = _table_strategy(strategy) if isinstance(strategy, Mapping) else strategy
    state = _initial(scenario)
    done: list[Step] = []

    def stop(finished: bool, valid: bool, resolved: bool, reason: str) -> Run:
        return Run(
            state.event_history(),
            state.history,
            tuple(done),
            finished,
            valid,
            resolved,
            reason,
        )

    for step in schedule:
        if step not in _choices(scenario, state):
            raise InvalidParams("schedule step is not enabled", step=str(step))
        status = _apply(scenario, state, step, decide)
        done.append(step)
        if status == "end":
            resolved = len(scenario.spec.admissible(state.history)) == 1
            reason = "" if resolved else "admissible set not a singleton at the end"
            return stop(True, True, resolved, reason)
        if status:
            return stop(False, False, False, status)
    return stop(False, True, False, "schedule ended early")


def _table_strategy(table: Mapping[StrategyKey, str | None]) -> Strategy:
    def decide(agent: int, projection: Projection) -> str | None:
        try:
            return table[(agent, projection)]
        except KeyError:
            raise InvalidParams(
                "strategy has no action for this projection", agent=agent
            ) from None

    return decide


@attrs.frozen
class Witness:
    """A failing partial strategy and a schedule that defeats it."""

    strategy: tuple[tuple[StrategyKey, str | None], ...]
    schedule: tuple[Step, ...]
    reason: str

    def table(self) -> StrategyTable:
        return dict(self.strategy)


@attrs.frozen
class AsyncCheck:
    resolvable: bool
    barriers: int
    strategy: tuple[tuple[StrategyKey, str | None], ...] | None
    witnesses: tuple[Witness, ...]
    strategies_tried: int


class _Explorer:
    """Every schedule against a partial strategy table.

    Exploration stops at the first missing table entry or failing run.
    """

    def __init__(self, scenario: Scenario, table: Mapping[StrategyKey, str | None]):
        self.scenario = scenario
        self.table = table
        self.memo: set[tuple[Any, ...]] = set()

    def strategy(self, agent: int, projection: Projection) -> str | None:
        key = (agent, projection)
        if key not in self.table:
            raise _NeedAction(agent, projection)
        return self.table[key]

    def run(self) -> tuple[tuple[Step, ...], str] | None:
        """Schedule and reason of a failing run; None when every schedule succeeds."""
        return self._explore(_initial(self.scenario), ())

    def _explore(
        self, state: _State, path: tuple[Step, ...]
    ) -> tuple[tuple[Step, ...], str] | None:
        key = state.key()
        if key in self.memo:
            return None
        for step in _choices(self.scenario, state):
            child = state.copy()
            status = _apply(self.scenario, child, step, self.strategy)
            trace = path + (step,)
            if status == "end":
                if len(self.scenario.spec.admissible(child.history)) != 1:
                    return trace, "admissible set not a singleton at the end"
                continue
            if status:
                return trace, status
            failure = self._explore(child, trace)
            if failure:
                return failure
        self.memo.add(key)
        if len(self.memo) > MAX_SEARCH_STATES:
            raise TooLarge("scheduler state space", len(self.memo), MAX_SEARCH_STATES)
        return None


def _check_size(scenario: Scenario) -> None:
    if scenario.agents > MAX_AGENTS:
        raise TooLarge("scenario agents", scenario.agents, MAX_AGENTS)
    if len(scenario.spec.basis) > MAX_SCENARIO_COMMITMENTS:
        raise TooLarge(
            "scenario commitments", len(scenario.spec.basis), MAX_SCENARIO_COMMITMENTS
        )
    if scenario.spec.horizon > MAX_SCENARIO_HORIZON:
        raise TooLarge("scenario horizon", scenario.spec.horizon, MAX_SCENARIO_HORIZON)


def exhaustive_async_check(scenario: Scenario) -> AsyncCheck:
    """Search every deterministic projection-based strategy against every schedule.

    The strategy table is built lazily: exploration stops at the first
    projection without an action and the search branches over the actions
    available there. Each failing branch yields a witness schedule.
    """
    _check_size(scenario)
    witnesses: list[Witness] = []
    tried = 0
    explorations = 0

    def solve(table: StrategyTable) -> StrategyTable | None:
        nonlocal tried, explorations
        explorations += 1
        if explorations > MAX_EXPLORATIONS:
            raise TooLarge("strategy search", explorations, MAX_EXPLORATIONS)
        explorer = _Explorer(scenario, table)
        try:
            failure = explorer.run()
        except _NeedAction as need:
            own = [
                c
                for c in scenario.owned(need.agent)
                if ("commit", c) not in need.projection
            ]
            for action in [*own, None]:
                found = solve({**table, (need.agent, need.projection): action})
                if found is not None:
                    return found
            return None
        tried += 1
        if failure is None:
            return table
        witnesses.append(Witness(tuple(table.items()), failure[0], failure[1]))
        return None

    found = solve({})
    logger.debug(
        "%s with %d barriers: %d strategies, resolvable=%s",
        scenario.name,
        scenario.barriers,
        tried,
        found is not None,
    )
    return AsyncCheck(
        resolvable=found is not None,
        barriers=scenario.barriers,
        strategy=tuple(found.items()) if found is not None else None,
        witnesses=tuple(witnesses),
        strategies_tried=tried,
    )


def replay_witness(scenario: Scenario, witness: Witness) -> Run:
    """Re-run a witness schedule; a genuine witness never yields a successful run."""
    return simulate(scenario, witness.table(), witness.schedule)


def barrier_cuts(run: Run) -> Iterator[tuple[int, ...]]:
    """Cuts formed by the sync events of each barrier in a run."""
    syncs: dict[str, list[Event]] = {}
    for e in run.history.events:
        if e.kind == "sync":
            syncs.setdefault(e.name, []).append(e)
    for name in sorted(syncs, key=int):
        yield tuple(e.id for e in sorted(syncs[name], key=lambda e: e.agent))


@attrs.frozen
class SyncReport:
    scenario: str
    min_sync_points: Depth
    online_depth: Depth

    @property
    def within_depth(self) -> bool:
        if self.online_depth is UNRESOLVABLE:
            return True
        if self.min_sync_points is UNRESOLVABLE:
            return False
        return self.min_sync_points <= self.online_depth


def min_sync_points(scenario: Scenario, limit: int | None = None) -> Depth:
    """Fewest barriers with which some strategy resolves on every schedule."""
    _check_size(scenario)
    limit = len(scenario.spec.basis) + 1 if limit is None else limit
    for barriers in range(limit + 1):
        if exhaustive_async_check(scenario.with_barriers(barriers)).resolvable:
            return barriers
    return UNRESOLVABLE


def sync_report(scenario: Scenario) -> SyncReport:
    return SyncReport(
        scenario.name, min_sync_points(scenario), online_minmax_depth(scenario.spec)
    )


# Bundled scenarios


def cross_dependency(barriers: int = 0) -> Scenario:
    """phi at agent 0; psi at agent 1 is inapplicable until phi has happened."""
    spec = ExplicitSpec(
        outcomes=["x0y0", "x0y1", "x1y0", "x1y1"],
        env_moves=[],
        basis=[keep("phi", [0, 1]), keep("psi", [0, 2], requires=["phi"])],
        admissible_table={(): [0, 1, 2, 3]},
    )
    placement = {"phi": 0, "psi": 1}
    return Scenario("cross_dependency", spec, 2, placement, barriers=barriers)


def pointwise_local(barriers: int = 0) -> Scenario:
    spec = ExplicitSpec(
        outcomes=["o0", "o1", "o2"],
        env_moves=[],
        basis=[exclude("not_o1", [1]), exclude("not_o2", [2])],
        admissible_table={(): [0, 1, 2]},
    )
    placement = {"not_o1": 0, "not_o2": 1}
    return Scenario("pointwise_local", spec, 2, placement, barriers=barriers)


def deadline_consensus_split(barriers: int = 0) -> Scenario:
    """The deadline arrives at agent 0, agent 1 closes, agent 0 draws."""
    return Scenario(
        "deadline_consensus_split",
        catalog.deadline_consensus(),
        2,
        {"close": 1, "draw": 0},
        {"propose_c": 0, "deadline": 0},
        barriers,
    )


def local_second_layer(barriers: int = 0) -> Scenario:
    """As deadline_consensus_split, but the agent that closes also draws."""
    return attrs.evolve(
        deadline_consensus_split(barriers),
        name="local_second_layer",
        placement={"close": 1, "draw": 1},
    )


def trivial(barriers: int = 0) -> Scenario:
    spec = ExplicitSpec(
        outcomes=["done"], env_moves=[], basis=[], admissible_table={(): [0]}
    )
    return Scenario("trivial", spec, 2, {}, barriers=barriers)


SCENARIOS: dict[str, Callable[[int], Scenario]] = {
    "cross_dependency": cross_dependency,
    "pointwise_local": pointwise_local,
    "deadline_consensus_split": deadline_consensus_split,
    "local_second_layer": local_second_layer,
    "trivial": trivial,
}

CATALOG_SPECS: dict[str, Callable[[], ExplicitSpec]] = {
    "three_valued_consensus": catalog.three_valued_consensus,
    "consensus_server": catalog.consensus_server,
    "deadline_consensus": catalog.deadline_consensus,
    "async_relay": catalog.async_relay,
}


def parse_scenario(document: Any) -> Scenario:
    """Scenario from a decoded document.

    ``spec`` is either an inline specification document or the name of a
    catalog specification.
    """
    keys = {"name", "agents", "spec", "placement", "env_placement", "barriers"}
    required = {"name", "agents", "spec", "placement"}
    if not isinstance(document, dict) or not required <= set(document):
        raise InvalidParams("scenario needs name, agents, spec and placement")
    unknown = set(document) - keys
    if unknown:
        raise InvalidParams(f"unknown scenario keys {sorted(unknown)}")
    source = document["spec"]
    if isinstance(source, str):
        if source not in CATALOG_SPECS:
            raise InvalidParams(f"unknown catalog specification {source!r}")
        spec = CATALOG_SPECS[source]()
    else:
        spec = parse_spec(source)
    return Scenario(
        document["name"],
        spec,
        int(document["agents"]),
        document["placement"],
        document.get("env_placement", {}),
        int(document.get("barriers", 0)),
    )


def load_scenario(source: Path | str) -> Scenario:
    """A bundled scenario by name, or a scenario file."""
    if str(source) in SCENARIOS:
        return SCENARIOS[str(source)](0)
    try:
        document = json.loads(read_text(source))
    except json.JSONDecodeError as e:
        raise InvalidParams(f"scenario file is not valid JSON: {e}") from e
    return parse_scenario(document)
