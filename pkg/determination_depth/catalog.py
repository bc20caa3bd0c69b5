"""Bundled specifications used by tests, scenarios and the CLI."""

from collections.abc import Iterator

import networkx as nx
import numpy as np

from .core import (
    MAX_ORACLE_COMMITMENTS,
    Commitment,
    Determination,
    EnvMove,
    ExplicitSpec,
    SetTransform,
    atomic_basis,
    exclude,
    freeze,
    keep,
    pick_min,
    with_basis,
)
from .utils import derive_seed, require


def three_valued_consensus() -> ExplicitSpec:
    """Three candidates; the environment may retract one of them, once."""
    moves = ["E", "E'", "E''"]
    spec = ExplicitSpec(
        outcomes=["a", "b", "c"],
        env_moves=[EnvMove(m, forbids=moves) for m in moves],
        basis=[],
        admissible_table={
            (): [0, 1, 2],
            ("E",): [0, 1],
            ("E'",): [1, 2],
            ("E''",): [0, 2],
        },
        horizon=1,
    )
    return with_basis(spec, atomic_basis(spec))


def consensus_server(horizon: int = 4) -> ExplicitSpec:
    """A proposal may add c until the server closes; the draw needs the closure."""
    return ExplicitSpec(
        outcomes=["a", "b", "c"],
        env_moves=[EnvMove("propose_c")],
        basis=[freeze("close"), pick_min("draw", requires=["close"])],
        admissible_table={(): [0, 1], ("propose_c",): [0, 1, 2]},
        horizon=horizon,
    )


def deadline_consensus(horizon: int = 2) -> ExplicitSpec:
    """Consensus server that may only close once a deadline event has arrived."""
    return ExplicitSpec(
        outcomes=["a", "b", "c"],
        env_moves=[EnvMove("propose_c", forbids=["deadline"]), EnvMove("deadline")],
        basis=[
            freeze("close", requires=["deadline"]),
            pick_min("draw", requires=["close"]),
        ],
        admissible_table={(): [0, 1], ("propose_c",): [0, 1, 2]},
        horizon=horizon,
    )


def async_relay(horizon: int = 3) -> ExplicitSpec:
    """psi needs a delivery of phi that the environment may delay indefinitely."""
    return ExplicitSpec(
        outcomes=["x0y0", "x0y1", "x1y0", "x1y1"],
        env_moves=[
            EnvMove("delay", repeatable=True),
            EnvMove("deliver", requires=["phi"]),
        ],
        basis=[keep("phi", [0, 1]), keep("psi", [0, 2], requires=["deliver"])],
        admissible_table={(): [0, 1, 2, 3]},
        horizon=horizon,
    )


def pointwise_spec(n: int) -> ExplicitSpec:
    """Offline specification over n outcomes with the atomic basis."""
    require(n >= 1, "need at least one outcome", n=n)
    spec = ExplicitSpec(
        outcomes=[f"o{i}" for i in range(n)],
        env_moves=[],
        basis=[],
        admissible_table={(): range(n)},
    )
    return with_basis(spec, atomic_basis(spec))


def random_offline_spec(
    rng: np.random.Generator, size: int
) -> tuple[ExplicitSpec, Determination]:
    """Random offline specification and a determination over its whole basis.

    Commitment ``c<i>`` removes its own outcome ``u<i>``; outcome ``keep`` is
    never removed, so every layering stays valid. Gated commitments either
    require earlier ones (inapplicable before) or stay dormant until them
    (identity before). The determination lists the basis in index order,
    which is a topological order of the gates.
    """
    require(0 <= size, "size must be non-negative", size=size)
    basis: list[Commitment] = []
    for i in range(size):
        cid = f"c{i}"
        outcome = i + 1
        kind = rng.integers(3) if i else 0
        gates: list[str] = []
        if kind:
            width = int(rng.integers(1, min(i, 3) + 1))
            picks = rng.choice(i, size=width, replace=False)
            gates = [f"c{int(j)}" for j in sorted(picks)]
        if kind == 1:
            basis.append(exclude(cid, [outcome], requires=gates))
        elif kind == 2:
            basis.append(exclude(cid, [outcome], dormant_until=gates))
        else:
            basis.append(exclude(cid, [outcome]))
    spec = ExplicitSpec(
        outcomes=["keep"] + [f"u{i}" for i in range(size)],
        env_moves=[],
        basis=basis,
        admissible_table={(): range(size + 1)},
    )
    return spec, Determination.single(c.id for c in basis)


def random_offline_corpus(
    seed: int, count: int, max_size: int = MAX_ORACLE_COMMITMENTS
) -> Iterator[tuple[ExplicitSpec, Determination]]:
    """Pinned draws of random_offline_spec cycling through sizes 0..max_size."""
    require(
        0 <= max_size <= MAX_ORACLE_COMMITMENTS,
        "max_size must lie in 0..MAX_ORACLE_COMMITMENTS",
        max_size=max_size,
    )
    for i in range(count):
        rng = np.random.default_rng(derive_seed(seed, i))
        yield random_offline_spec(rng, i % (max_size + 1))


def gate_chain_length(spec: ExplicitSpec) -> int:
    """Longest chain of declared gates, counted in commitments."""
    graph = spec.prerequisite_graph()
    if graph.number_of_nodes() == 0:
        return 0
    return int(nx.dag_longest_path_length(graph)) + 1


def corrupted_readd_spec() -> ExplicitSpec:
    """Offline spec whose ``readd`` commitment puts an excluded outcome back."""
    readd = Commitment("readd", SetTransform(lambda _h, s: s | {2}))
    return ExplicitSpec(
        outcomes=["o0", "o1", "o2"],
        env_moves=[],
        basis=[exclude("not_o2", [2]), readd],
        admissible_table={(): [0, 1, 2]},
    )
