"""Stable matching as a relational specification.

Rotations are discovered by walking the lattice of stable matchings from the
man-optimal one. Precedence between rotations is read off the downsets of
the matchings reached, and each rotation becomes a commitment that keeps the
matchings whose downset contains it once the rotation is exposed.
"""

import itertools
import json
import logging
from collections import deque
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import attrs
import networkx as nx
import numpy as np

from .core import (
    Commitment,
    Determination,
    ExplicitSpec,
    History,
    OutcomeSet,
    SetTransform,
    brute_force_min_layers,
    commit,
)
from .utils import DeterminationError, InvalidParams, TooLarge, read_text, require

logger = logging.getLogger(__name__)

MAX_BRUTE_N = 7
MAX_POSET_N = 16
MAX_ORACLE_ROTATIONS = 10


class CycleDetected(DeterminationError):
    """Raised when a precedence relation is not acyclic."""

    def __init__(self, cycle: Sequence[Any]):
        self.cycle = tuple(cycle)
        super().__init__(f"Precedence relation has a cycle: {self.cycle}")


class TooManyRotations(TooLarge):
    """Raised when the rotation oracle gets more rotations than it can search."""

    def __init__(self, size: int, limit: int = MAX_ORACLE_ROTATIONS):
        super().__init__("rotation set", size, limit)


def _is_permutation(prefs: Sequence[int], n: int) -> bool:
    return sorted(prefs) == list(range(n))


@attrs.frozen
class MatchingInstance:
    """Preference lists of n men and n women, most preferred first."""

    men_prefs: tuple[tuple[int, ...], ...] = attrs.field(
        converter=lambda p: tuple(tuple(r) for r in p)
    )
    women_prefs: tuple[tuple[int, ...], ...] = attrs.field(
        converter=lambda p: tuple(tuple(r) for r in p)
    )

    def __attrs_post_init__(self) -> None:
        n = len(self.men_prefs)
        require(n >= 1, "instance needs at least one agent per side")
        require(len(self.women_prefs) == n, "both sides need n agents", n=n)
        for prefs in self.men_prefs + self.women_prefs:
            require(_is_permutation(prefs, n), "preference lists must be permutations")

    @property
    def n(self) -> int:
        return len(self.men_prefs)

    def women_rank(self) -> list[dict[int, int]]:
        """rank[w][m]: position of man m on woman w's list."""
        return [{m: r for r, m in enumerate(prefs)} for prefs in self.women_prefs]

    def swapped(self) -> "MatchingInstance":
        """Same instance with the roles of the two sides exchanged."""
        return MatchingInstance(self.women_prefs, self.men_prefs)


@attrs.frozen(order=True)
class Matching:
    """Perfect matching; ``wife[m]`` is the woman matched to man m."""

    wife: tuple[int, ...] = attrs.field(converter=tuple)

    @property
    def husband(self) -> tuple[int, ...]:
        result = [0] * len(self.wife)
        for m, w in enumerate(self.wife):
            result[w] = m
        return tuple(result)

    def pairs(self) -> list[tuple[int, int]]:
        return list(enumerate(self.wife))

    def __str__(self) -> str:
        return " ".join(f"m{m}-w{w}" for m, w in self.pairs())


@attrs.frozen
class Rotation:
    """Cyclic reassignment: man a_i moves from b_i to b_(i+1)."""

    cycle: tuple[tuple[int, int], ...]

    def __str__(self) -> str:
        return "(" + ", ".join(f"m{m}:w{w}" for m, w in self.cycle) + ")"


@attrs.frozen
class RotationPoset:
    rotations: tuple[Rotation, ...]
    edges: frozenset[tuple[int, int]]

    def graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.rotations)))
        graph.add_edges_from(self.edges)
        return graph


def gale_shapley(instance: MatchingInstance) -> Matching:
    """Man-proposing deferred acceptance (the man-optimal stable matching)."""
    n = instance.n
    rank = instance.women_rank()
    next_choice = [0] * n
    husband: list[int | None] = [None] * n
    free = deque(range(n))
    while free:
        man = free.popleft()
        woman = instance.men_prefs[man][next_choice[man]]
        next_choice[man] += 1
        current = husband[woman]
        if current is None:
            husband[woman] = man
        elif rank[woman][man] < rank[woman][current]:
            husband[woman] = man
            free.append(current)
        else:
            free.append(man)
    wife = [0] * n
    for woman, man in enumerate(husband):
        assert man is not None
        wife[man] = woman
    return Matching(tuple(wife))


def woman_optimal(instance: MatchingInstance) -> Matching:
    """Woman-proposing deferred acceptance, expressed as wife-of-man."""
    return Matching(gale_shapley(instance.swapped()).husband)


def blocking_pairs(
    instance: MatchingInstance, matching: Matching
) -> list[tuple[int, int]]:
    """Pairs (m, w) who both prefer each other to their partners."""
    rank = instance.women_rank()
    husband = matching.husband
    pairs = []
    for man, prefs in enumerate(instance.men_prefs):
        for woman in prefs:
            if woman == matching.wife[man]:
                break
            if rank[woman][man] < rank[woman][husband[woman]]:
                pairs.append((man, woman))
    return pairs


def is_stable(instance: MatchingInstance, matching: Matching) -> bool:
    return not blocking_pairs(instance, matching)


def enumerate_stable_brute(instance: MatchingInstance) -> list[Matching]:
    """All stable matchings by checking every permutation, in canonical order."""
    if instance.n > MAX_BRUTE_N:
        raise TooLarge("brute-force matching enumeration", instance.n, MAX_BRUTE_N)
    found = [
        Matching(p)
        for p in itertools.permutations(range(instance.n))
        if is_stable(instance, Matching(p))
    ]
    return sorted(found)


def exposed_rotations(instance: MatchingInstance, matching: Matching) -> list[Rotation]:
    """Rotations exposed in a stable matching.

    Man m points to the partner of the first woman after his wife who
    prefers him to her husband; exposed rotations are the cycles of that map.
    """
    rank = instance.women_rank()
    husband = matching.husband
    pointer: dict[int, int] = {}
    for man, prefs in enumerate(instance.men_prefs):
        start = prefs.index(matching.wife[man]) + 1
        for woman in prefs[start:]:
            if rank[woman][man] < rank[woman][husband[woman]]:
                pointer[man] = husband[woman]
                break

    rotations = []
    done: set[int] = set()
    for origin in sorted(pointer):
        path: list[int] = []
        man = origin
        while man in pointer and man not in done and man not in path:
            path.append(man)
            man = pointer[man]
        if man in path:
            cycle = path[path.index(man) :]
            low = cycle.index(min(cycle))
            cycle = cycle[low:] + cycle[:low]
            rotations.append(Rotation(tuple((m, matching.wife[m]) for m in cycle)))
        done.update(path)
    return rotations


def eliminate_rotation(matching: Matching, rotation: Rotation) -> Matching:
    """Move each man of the rotation to the next woman in the cycle."""
    wife = list(matching.wife)
    r = len(rotation.cycle)
    for i, (man, _) in enumerate(rotation.cycle):
        wife[man] = rotation.cycle[(i + 1) % r][1]
    return Matching(tuple(wife))


def explore_lattice(
    instance: MatchingInstance,
) -> tuple[tuple[Rotation, ...], dict[Matching, frozenset[int]]]:
    """Rotations in discovery order and the downset of every stable matching."""
    start = gale_shapley(instance)
    downset = {start: frozenset[int]()}
    rotations: list[Rotation] = []
    index: dict[Rotation, int] = {}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for rotation in exposed_rotations(instance, current):
            if rotation not in index:
                index[rotation] = len(rotations)
                rotations.append(rotation)
            following = eliminate_rotation(current, rotation)
            if following not in downset:
                downset[following] = downset[current] | {index[rotation]}
                queue.append(following)
    logger.debug(
        "lattice: %d stable matchings, %d rotations", len(downset), len(rotations)
    )
    return tuple(rotations), downset


def build_rotation_poset(instance: MatchingInstance) -> RotationPoset:
    """Rotation poset with precedence given by downset containment.

    rho precedes rho' when every reached downset holding rho' holds rho;
    the stored edges are the transitive reduction of that order.
    """
    if instance.n > MAX_POSET_N:
        raise TooLarge("rotation poset instance", instance.n, MAX_POSET_N)
    rotations, downset = explore_lattice(instance)
    order = nx.DiGraph()
    order.add_nodes_from(range(len(rotations)))
    sets = list(downset.values())
    for a, b in itertools.permutations(range(len(rotations)), 2):
        if all(a in ds for ds in sets if b in ds):
            order.add_edge(a, b)
    if not nx.is_directed_acyclic_graph(order):
        raise CycleDetected(nx.find_cycle(order))
    reduced = nx.transitive_reduction(order)
    return RotationPoset(rotations, frozenset(reduced.edges()))


def poset_height(poset: RotationPoset) -> int:
    """Rotations on the longest chain (0 for the empty poset)."""
    graph = poset.graph()
    if not nx.is_directed_acyclic_graph(graph):
        raise CycleDetected(nx.find_cycle(graph))
    if graph.number_of_nodes() == 0:
        return 0
    return int(nx.dag_longest_path_length(graph)) + 1


def downsets(poset: RotationPoset) -> list[frozenset[int]]:
    """Every downset, as the down-closure of an antichain."""
    graph = poset.graph()
    closed = []
    for antichain in nx.antichains(graph):
        members = set(antichain)
        for node in antichain:
            members |= nx.ancestors(graph, node)
        closed.append(frozenset(members))
    return closed


def matching_from_downset(
    instance: MatchingInstance, poset: RotationPoset, downset: frozenset[int]
) -> Matching:
    """Stable matching reached by eliminating the downset's rotations in order."""
    graph = poset.graph().subgraph(downset)
    current = gale_shapley(instance)
    for node in nx.lexicographical_topological_sort(graph):
        current = eliminate_rotation(current, poset.rotations[node])
    return current


def longest_path_layers(poset: RotationPoset) -> list[list[int]]:
    """Layer i holds rotations whose longest predecessor chain has i rotations."""
    graph = poset.graph()
    level: dict[int, int] = {}
    for node in nx.lexicographical_topological_sort(graph):
        level[node] = 1 + max((level[p] for p in graph.predecessors(node)), default=0)
    layers: dict[int, list[int]] = {}
    for node, lvl in sorted(level.items()):
        layers.setdefault(lvl, []).append(node)
    return [layers[lvl] for lvl in sorted(layers)]


def rotation_id(index: int) -> str:
    return f"rho{index}"


@attrs.frozen
class RotationSpec:
    """Stable matchings as an offline specification over rotation commitments."""

    spec: ExplicitSpec
    poset: RotationPoset
    matchings: tuple[Matching, ...]
    downsets: tuple[frozenset[int], ...]


def _rotation_commitment(
    rotation: int,
    predecessors: frozenset[int],
    downset_of: Sequence[frozenset[int]],
) -> Commitment:
    def transform(_prefix: History, current: OutcomeSet) -> OutcomeSet:
        exposed = all(predecessors <= downset_of[mu] for mu in current)
        if not exposed:
            return current
        return frozenset(mu for mu in current if rotation in downset_of[mu])

    return Commitment(rotation_id(rotation), SetTransform(transform))


def rotation_spec(instance: MatchingInstance) -> RotationSpec:
    """Specification over the stable matchings with one commitment per rotation."""
    if instance.n > MAX_BRUTE_N:
        raise TooLarge("rotation specification instance", instance.n, MAX_BRUTE_N)
    rotations, reached = explore_lattice(instance)
    poset = build_rotation_poset(instance)
    graph = poset.graph()
    matchings = tuple(sorted(reached))
    downset_of = tuple(reached[mu] for mu in matchings)
    basis = [
        _rotation_commitment(r, frozenset(nx.ancestors(graph, r)), downset_of)
        for r in range(len(rotations))
    ]
    spec = ExplicitSpec(
        outcomes=[str(mu) for mu in matchings],
        env_moves=[],
        basis=basis,
        admissible_table={(): range(len(matchings))},
    )
    return RotationSpec(spec, poset, matchings, downset_of)


@attrs.frozen
class Resolution:
    layers: tuple[tuple[Rotation, ...], ...]
    trace: tuple[int, ...] | None
    final: tuple[Matching, ...] | None


def layered_resolution(instance: MatchingInstance, trace: bool = True) -> Resolution:
    """Apply every rotation of a longest-path layer at once, layer after layer.

    With ``trace`` the admissible set is tracked through the rotation
    specification: its size before the first layer and after each one.
    """
    poset = build_rotation_poset(instance)
    layers = longest_path_layers(poset)
    rotation_layers = tuple(
        tuple(poset.rotations[r] for r in layer) for layer in layers
    )
    if not trace:
        return Resolution(rotation_layers, None, None)
    if instance.n > MAX_BRUTE_N:
        raise TooLarge("admissible-set trace", instance.n, MAX_BRUTE_N)
    built = rotation_spec(instance)
    history: History = ()
    sizes = [len(built.spec.admissible(history))]
    for layer in layers:
        history = history + tuple(commit(rotation_id(r)) for r in layer)
        sizes.append(len(built.spec.admissible(history)))
    final = tuple(built.matchings[mu] for mu in sorted(built.spec.admissible(history)))
    return Resolution(rotation_layers, tuple(sizes), final)


def matching_depth_oracle(instance: MatchingInstance) -> int:
    """Fewest commuting layers of rotation commitments, by exhaustive search."""
    built = rotation_spec(instance)
    count = len(built.poset.rotations)
    if count > MAX_ORACLE_ROTATIONS:
        raise TooManyRotations(count)
    order = nx.lexicographical_topological_sort(built.poset.graph())
    det = Determination.single(rotation_id(r) for r in order)
    return brute_force_min_layers(built.spec, (), det.commitments)


def random_instance(rng: np.random.Generator, n: int) -> MatchingInstance:
    """Instance with independent uniformly random preference lists."""
    require(n >= 1, "n must be positive", n=n)
    return MatchingInstance(
        [tuple(int(x) for x in rng.permutation(n)) for _ in range(n)],
        [tuple(int(x) for x in rng.permutation(n)) for _ in range(n)],
    )


def cyclic_instance(n: int) -> MatchingInstance:
    """Latin instance whose n stable matchings form one chain of n - 1 rotations.

    Man i ranks women i, i+1, ... and woman j ranks men j+1, j+2, ... (mod n);
    only the n cyclic shifts are stable.
    """
    require(n >= 1, "n must be positive", n=n)
    return MatchingInstance(
        [[(i + t) % n for t in range(n)] for i in range(n)],
        [[(j + 1 + t) % n for t in range(n)] for j in range(n)],
    )


def disjoint_union(instances: Sequence[MatchingInstance]) -> MatchingInstance:
    """Place instances side by side; everyone ranks their own block first."""
    offsets = list(itertools.accumulate((i.n for i in instances), initial=0))
    total = offsets[-1]

    def extend(prefs: Sequence[int], offset: int) -> tuple[int, ...]:
        own = [p + offset for p in prefs]
        return tuple(own + [x for x in range(total) if x not in own])

    men: list[tuple[int, ...]] = []
    women: list[tuple[int, ...]] = []
    for inst, offset in zip(instances, offsets, strict=False):
        men.extend(extend(p, offset) for p in inst.men_prefs)
        women.extend(extend(p, offset) for p in inst.women_prefs)
    return MatchingInstance(men, women)


def parse_instance(document: Any) -> MatchingInstance:
    """Instance from a decoded {n, men_prefs, women_prefs} document."""
    if not isinstance(document, dict) or set(document) != {
        "n",
        "men_prefs",
        "women_prefs",
    }:
        raise InvalidParams("instance document needs exactly n, men_prefs, women_prefs")
    instance = MatchingInstance(document["men_prefs"], document["women_prefs"])
    require(instance.n == document["n"], "n does not match the preference lists")
    return instance


def load_instance(path: Path | str) -> MatchingInstance:
    try:
        document = json.loads(read_text(path))
    except json.JSONDecodeError as e:
        raise InvalidParams(f"instance file is not valid JSON: {e}") from e
    return parse_instance(document)
