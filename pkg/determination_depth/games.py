"""Strategic depth of finite perfect-information games.

Payoffs are exact fractions, so ties are detected exactly. A player-1 node
is subgame-non-trivial when at least two of its children are chosen by some
subgame-perfect equilibrium; strategic depth counts those nodes along a path.
"""

import enum
import itertools
import json
import logging
from collections.abc import Iterator, Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any

import attrs
import numpy as np

from .runner import TrialResults, TrialTally, run_trials
from .utils import DeterminationError, InvalidParams, read_text, require

logger = logging.getLogger(__name__)

MAX_PROFILES = 1_000_000

Payoff = tuple[Fraction, Fraction]


class StateSpaceExceeded(DeterminationError):
    """Raised when an exhaustive enumeration would exceed its state budget."""

    def __init__(self, what: str, size: int, limit: int = MAX_PROFILES):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"{what} has {size} states, limit is {limit}")


class Player(enum.Enum):
    DETERMINER = "P1"
    ENVIRONMENT = "P2"

    @property
    def index(self) -> int:
        """Position of this player's entry in a payoff vector."""
        return 0 if self is Player.DETERMINER else 1


@attrs.frozen
class GameNode:
    owner: Player | None = None
    children: tuple[int, ...] = attrs.field(default=(), converter=tuple)
    payoff: Payoff | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


def _payoff(value: Sequence[Any]) -> Payoff:
    require(len(value) == 2, "payoff needs two entries", payoff=value)
    return Fraction(value[0]), Fraction(value[1])


@attrs.frozen
class GameTree:
    """Rooted game tree stored as a node list; node 0 is the root.

    Children always have larger indices than their parent, and every
    non-root node has exactly one parent.
    """

    nodes: tuple[GameNode, ...] = attrs.field(converter=tuple)

    def __attrs_post_init__(self) -> None:
        require(len(self.nodes) >= 1, "game tree needs a root")
        parents = [0] * len(self.nodes)
        for i, node in enumerate(self.nodes):
            if node.is_leaf:
                require(node.payoff is not None, "leaf needs a payoff", node=i)
                continue
            require(node.owner is not None, "internal node needs an owner", node=i)
            for c in node.children:
                require(
                    i < c < len(self.nodes), "children must follow their parent", node=i
                )
                parents[c] += 1
        require(
            all(p == 1 for p in parents[1:]), "every non-root node needs one parent"
        )

    def __len__(self) -> int:
        return len(self.nodes)

    def internal(self) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if not n.is_leaf]

    def paths(self) -> Iterator[tuple[int, ...]]:
        """Every root-to-leaf path as a node sequence."""
        stack: list[tuple[int, ...]] = [(0,)]
        while stack:
            path = stack.pop()
            node = self.nodes[path[-1]]
            if node.is_leaf:
                yield path
            else:
                stack.extend(path + (c,) for c in reversed(node.children))


@attrs.frozen
class SpeAnnotation:
    """Per-node SPE outcome sets and SPE-consistent children."""

    outcomes: tuple[frozenset[Payoff], ...]
    consistent: tuple[tuple[int, ...], ...]

    def is_nontrivial(self, node: int) -> bool:
        return len(self.consistent[node]) >= 2


def spe_annotate(tree: GameTree) -> SpeAnnotation:
    """Exact SPE outcome sets, bottom-up.

    At a node owned by player i, outcome o of child j is achievable exactly
    when some profile of child outcomes makes o a maximiser for i. That
    happens iff o[i] is at least, for every other child, the smallest payoff
    to i among that child's achievable outcomes.
    """
    count = len(tree)
    outcomes: list[frozenset[Payoff]] = [frozenset()] * count
    consistent: list[tuple[int, ...]] = [()] * count
    for v in reversed(range(count)):
        node = tree.nodes[v]
        if node.is_leaf:
            assert node.payoff is not None
            outcomes[v] = frozenset({node.payoff})
            continue
        assert node.owner is not None
        i = node.owner.index
        floors = [min(o[i] for o in outcomes[c]) for c in node.children]
        achievable: set[Payoff] = set()
        chosen = []
        for j, c in enumerate(node.children):
            threshold = max(
                (f for other, f in enumerate(floors) if other != j), default=None
            )
            hits = {o for o in outcomes[c] if threshold is None or o[i] >= threshold}
            if hits:
                chosen.append(c)
                achievable |= hits
        outcomes[v] = frozenset(achievable)
        consistent[v] = tuple(chosen)
    return SpeAnnotation(tuple(outcomes), tuple(consistent))


def spe_outcomes_brute(tree: GameTree) -> SpeAnnotation:
    """Same annotation, by filtering every pure strategy profile.

    A profile survives when it is subgame perfect.
    """
    internal = tree.internal()
    size = 1
    for v in internal:
        size *= len(tree.nodes[v].children)
    if size > MAX_PROFILES:
        raise StateSpaceExceeded("strategy profile space", size)

    outcome_sets: list[set[Payoff]] = [set() for _ in tree.nodes]
    chosen: list[set[int]] = [set() for _ in tree.nodes]
    for profile in itertools.product(*(tree.nodes[v].children for v in internal)):
        choice = dict(zip(internal, profile, strict=True))
        value: list[Payoff | None] = [None] * len(tree)
        perfect = True
        for v in reversed(range(len(tree))):
            node = tree.nodes[v]
            if node.is_leaf:
                value[v] = node.payoff
                continue
            assert node.owner is not None
            i = node.owner.index
            best = max(value[c][i] for c in node.children)  # type: ignore[index]
            picked = value[choice[v]]
            assert picked is not None
            if picked[i] < best:
                perfect = False
                break
            value[v] = picked
        if not perfect:
            continue
        for v in range(len(tree)):
            outcome = value[v]
            assert outcome is not None
            outcome_sets[v].add(outcome)
            if v in choice:
                chosen[v].add(choice[v])
    logger.debug("brute-force SPE over %d profiles", size)
    return SpeAnnotation(
        tuple(frozenset(s) for s in outcome_sets),
        tuple(
            tuple(c for c in node.children if c in chosen[v])
            for v, node in enumerate(tree.nodes)
        ),
    )


def _count(tree: GameTree, annotation: SpeAnnotation, path: Sequence[int]) -> int:
    return sum(
        1
        for v in path
        if tree.nodes[v].owner is Player.DETERMINER and annotation.is_nontrivial(v)
    )


def strategic_depth(tree: GameTree, annotation: SpeAnnotation | None = None) -> int:
    """Most subgame-non-trivial player-1 nodes on any root-to-leaf path."""
    annotation = annotation or spe_annotate(tree)
    return max(_count(tree, annotation, p) for p in tree.paths())


def _interleaved(
    tree: GameTree, annotation: SpeAnnotation, path: Sequence[int]
) -> bool:
    """Whether non-trivial player-2 nodes separate the non-trivial player-1 nodes."""
    pending = False
    seen_p1 = False
    for v in path:
        node = tree.nodes[v]
        if node.is_leaf or not annotation.is_nontrivial(v):
            continue
        if node.owner is Player.DETERMINER:
            if seen_p1 and pending:
                return False
            seen_p1 = True
            pending = True
        else:
            pending = False
    return True


@attrs.frozen
class Decomposition:
    strategic_depth: int
    max_p1_path_nodes: int
    interleaved: bool

    @property
    def forced_depth(self) -> int:
        return self.max_p1_path_nodes - self.strategic_depth


def forced_vs_strategic_decomposition(
    tree: GameTree, annotation: SpeAnnotation | None = None
) -> Decomposition:
    """Strategic depth next to the plain count of player-1 moves.

    ``interleaved`` reports whether some path that attains the strategic
    depth has a non-trivial player-2 node between each consecutive pair of
    non-trivial player-1 nodes, which is when the depth is tight.
    """
    annotation = annotation or spe_annotate(tree)
    paths = list(tree.paths())
    counts = [_count(tree, annotation, p) for p in paths]
    depth = max(counts)
    p1_nodes = max(
        sum(1 for v in p if tree.nodes[v].owner is Player.DETERMINER) for p in paths
    )
    interleaved = any(
        _interleaved(tree, annotation, p)
        for p, c in zip(paths, counts, strict=True)
        if c == depth
    )
    return Decomposition(depth, p1_nodes, interleaved)


def intended_path(tree: GameTree, annotation: SpeAnnotation) -> tuple[int, ...]:
    """Play where both players take their lowest-index SPE-consistent child."""
    path = [0]
    while not tree.nodes[path[-1]].is_leaf:
        path.append(annotation.consistent[path[-1]][0])
    return tuple(path)


@attrs.frozen
class TremblingResult:
    p: float
    path_depth: int
    expected: float
    results: TrialResults

    @property
    def frequency(self) -> float:
        return self.results.mean

    @property
    def stderr(self) -> float:
        return self.results.stderr

    @property
    def within_3_sigma(self) -> bool:
        sigma = max(self.stderr, 1.0 / self.results.trials)
        return abs(self.frequency - self.expected) <= 3 * sigma


def simulate_trembling(
    tree: GameTree,
    p: float,
    trials: int,
    seed: int,
    threads: int = 1,
) -> TremblingResult:
    """Frequency of perfect play when player 1 trembles at non-trivial nodes.

    Player 1 intends its lowest-index SPE-consistent child. At a non-trivial
    node it trembles with probability p and picks uniformly among the other
    children; at trivial nodes it plays the forced move. Player 2 always
    takes its lowest-index SPE-consistent child. A play is perfect when no
    tremble happened on it.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidParams("tremble probability must lie in [0, 1]", p=p)
    require(trials >= 1, "trials must be positive", trials=trials)
    annotation = spe_annotate(tree)
    path = intended_path(tree, annotation)
    d = _count(tree, annotation, path)
    is_leaf = np.array([node.is_leaf for node in tree.nodes])

    def work(rng: np.random.Generator, n: int) -> TrialTally:
        current = np.zeros(n, dtype=np.int64)
        perfect = np.ones(n, dtype=bool)
        while True:
            active = np.flatnonzero(~is_leaf[current])
            if active.size == 0:
                break
            for v in np.unique(current[active]):
                node = tree.nodes[int(v)]
                rows = active[current[active] == v]
                intended = annotation.consistent[int(v)][0]
                target = np.full(rows.size, intended, dtype=np.int64)
                if node.owner is Player.DETERMINER and annotation.is_nontrivial(int(v)):
                    others = [c for c in node.children if c != intended]
                    slips = rng.random(rows.size) < p
                    picks = rng.integers(len(others), size=rows.size)
                    target[slips] = np.asarray(others)[picks[slips]]
                    perfect[rows[slips]] = False
                current[rows] = target
        return TrialTally(trials=n, successes=int(perfect.sum()))

    results = run_trials(trials, work, seed, threads=threads)
    return TremblingResult(p, d, (1.0 - p) ** d, results)


def tied_chain_game(t: int) -> GameTree:
    """t tied player-1 nodes, each pair separated by a tied player-2 node.

    Every payoff is zero; each internal node continues the chain through its
    first child and stops at a leaf through its second.
    """
    require(t >= 1, "chain needs at least one player-1 node", t=t)
    zero = (Fraction(0), Fraction(0))
    nodes: list[GameNode] = []
    for i in range(t):
        # block i: P1 at 4i, P2 at 4i+1, leaves at 4i+2 and 4i+3
        base = 4 * i
        if i == t - 1:
            nodes.append(GameNode(Player.DETERMINER, (base + 1, base + 2)))
            nodes.extend([GameNode(payoff=zero), GameNode(payoff=zero)])
            break
        nodes.append(GameNode(Player.DETERMINER, (base + 1, base + 2)))
        nodes.append(GameNode(Player.ENVIRONMENT, (base + 4, base + 3)))
        nodes.extend([GameNode(payoff=zero), GameNode(payoff=zero)])
    return _renumber(nodes)


def _renumber(nodes: list[GameNode]) -> GameTree:
    """Rebuild a node list in preorder so children follow their parents."""
    order: list[int] = []
    stack = [0]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(reversed(nodes[v].children))
    index = {old: new for new, old in enumerate(order)}
    return GameTree(
        attrs.evolve(nodes[old], children=tuple(index[c] for c in nodes[old].children))
        for old in order
    )


def random_game_tree(
    rng: np.random.Generator,
    internal_nodes: int,
    max_children: int = 3,
    payoff_values: int = 3,
) -> GameTree:
    """Random tree grown by expanding leaves; small payoff ranges produce ties."""
    require(internal_nodes >= 1, "need at least one internal node")
    require(max_children >= 2, "max_children must be at least 2")
    children: list[list[int]] = [[]]
    owners: list[Player | None] = [None]
    leaves = [0]
    for _ in range(internal_nodes):
        v = leaves.pop(int(rng.integers(len(leaves))))
        owners[v] = Player.DETERMINER if rng.random() < 0.5 else Player.ENVIRONMENT
        for _ in range(int(rng.integers(2, max_children + 1))):
            children[v].append(len(children))
            leaves.append(len(children))
            children.append([])
            owners.append(None)
    nodes = []
    for v, kids in enumerate(children):
        if kids:
            nodes.append(GameNode(owners[v], tuple(kids)))
        else:
            pay = rng.integers(payoff_values, size=2)
            payoff = (Fraction(int(pay[0])), Fraction(int(pay[1])))
            nodes.append(GameNode(payoff=payoff))
    return _renumber(nodes)


def _parse_node(obj: Any, nodes: list[GameNode | None], where: str) -> int:
    if not isinstance(obj, dict):
        raise InvalidParams(f"{where}: expected an object")
    index = len(nodes)
    nodes.append(None)
    if "payoff" in obj:
        if set(obj) != {"payoff"}:
            raise InvalidParams(f"{where}: a leaf holds only a payoff")
        nodes[index] = GameNode(payoff=_payoff(obj["payoff"]))
        return index
    if set(obj) != {"owner", "children"} or not obj["children"]:
        raise InvalidParams(f"{where}: internal node needs owner and children")
    try:
        owner = Player(obj["owner"])
    except ValueError as e:
        raise InvalidParams(f"{where}: owner must be P1 or P2") from e
    kids = tuple(
        _parse_node(child, nodes, f"{where}.children[{i}]")
        for i, child in enumerate(obj["children"])
    )
    nodes[index] = GameNode(owner, kids)
    return index


def parse_game(document: Any) -> GameTree:
    """Game tree from nested {owner, children} / {payoff} objects.

    Payoff entries may be integers or fraction strings such as "1/2".
    """
    nodes: list[GameNode | None] = []
    _parse_node(document, nodes, "root")
    return GameTree(n for n in nodes if n is not None)


def load_game(path: Path | str) -> GameTree:
    try:
        document = json.loads(read_text(path))
    except json.JSONDecodeError as e:
        raise InvalidParams(f"game file is not valid JSON: {e}") from e
    return parse_game(document)
