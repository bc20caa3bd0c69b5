"""Tests for histories, commitments and determination depth."""

import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from determination_depth.catalog import (
    async_relay,
    consensus_server,
    corrupted_readd_spec,
    deadline_consensus,
    gate_chain_length,
    pointwise_spec,
    random_offline_corpus,
    random_offline_spec,
    three_valued_consensus,
)
from determination_depth.core import (
    UNRESOLVABLE,
    CommitmentNotApplicable,
    CommitmentNotInBasis,
    CyclicDependency,
    Determination,
    EnvMove,
    ExplicitSpec,
    HorizonExceeded,
    TooManyCommitments,
    apply,
    atomic_basis,
    brute_force_layering,
    brute_force_min_layers,
    commit,
    commuting_layers,
    commutes_at,
    dependency_dag,
    determination_of,
    env,
    exclude,
    format_history,
    greedy_layering,
    offline_depth,
    online_minmax_depth,
    validate_shrinkage,
    with_basis,
)
from determination_depth.utils import InvalidParams


class TestExplicitSpec:
    """Tests for admissible sets and history checks."""

    def test_lookup_follows_environment_then_commitments(self) -> None:
        """Test the table entry is narrowed by every commitment in the history."""
        spec = three_valued_consensus()

        assert spec.admissible(()) == {0, 1, 2}
        assert spec.admissible((env("E"),)) == {0, 1}
        assert spec.admissible((commit("not_a"), env("E'"))) == {1, 2}
        assert spec.admissible((commit("not_c"), env("E''"))) == {0}

    def test_horizon_is_enforced(self) -> None:
        """Test a history with too many environment events is rejected."""
        spec = three_valued_consensus()

        with pytest.raises(HorizonExceeded) as excinfo:
            spec.admissible((env("E"), env("E'")))

        assert excinfo.value.horizon == 1
        assert excinfo.value.env_events == 2

    def test_unknown_commitment(self) -> None:
        """Test commitments outside the basis raise a KeyError subclass."""
        spec = three_valued_consensus()

        with pytest.raises(CommitmentNotInBasis) as excinfo:
            spec.admissible((commit("not_z"),))

        assert isinstance(excinfo.value, KeyError)
        assert str(excinfo.value) == "Commitment not in basis: not_z"

    def test_lookup_follows_a_replaced_basis(self) -> None:
        """Test commitments are looked up in the basis the spec was built with."""
        spec = with_basis(pointwise_spec(2), [exclude("drop_first", [0])])

        assert spec.commitment("drop_first").id == "drop_first"
        assert spec.admissible((commit("drop_first"),)) == frozenset({1})
        with pytest.raises(CommitmentNotInBasis):
            spec.commitment("not_o0")

    def test_repeated_commitment_is_not_applicable(self) -> None:
        """Test a commitment can only appear once in a history."""
        spec = three_valued_consensus()

        with pytest.raises(CommitmentNotApplicable):
            spec.admissible((commit("not_a"), commit("not_a")))

    def test_unknown_environment_move(self) -> None:
        """Test environment events must name a declared move."""
        with pytest.raises(InvalidParams, match="unknown environment move"):
            three_valued_consensus().admissible((env("storm"),))

    def test_construction_checks(self) -> None:
        """Test malformed specifications are rejected at construction."""
        with pytest.raises(InvalidParams):
            ExplicitSpec(outcomes=[], env_moves=[], basis=[], admissible_table={})
        with pytest.raises(InvalidParams, match="empty history"):
            ExplicitSpec(
                outcomes=["a"], env_moves=[], basis=[], admissible_table={("E",): []}
            )
        with pytest.raises(InvalidParams, match="unique"):
            ExplicitSpec(
                outcomes=["a", "b"],
                env_moves=[],
                basis=[exclude("x", [0]), exclude("x", [1])],
                admissible_table={(): [0, 1]},
            )

    def test_env_moves_stop_at_horizon(self) -> None:
        """Test no environment move is offered once the horizon is used up."""
        spec = three_valued_consensus()

        assert {m.id for m in spec.available_env_moves(())} == {"E", "E'", "E''"}
        assert spec.available_env_moves((env("E"),)) == []

    def test_freeze_ignores_later_environment(self) -> None:
        """Test a freezing commitment closes the specification."""
        spec = consensus_server()

        assert spec.admissible((env("propose_c"),)) == {0, 1, 2}
        assert spec.admissible((commit("close"), env("propose_c"))) == {0, 1}
        assert spec.admissible((env("propose_c"), commit("close"))) == {0, 1, 2}

    def test_format_history(self) -> None:
        """Test the readable history rendering."""
        assert format_history((env("E"), commit("not_c"))) == "<env:E . not_c>"
        assert format_history(()) == "<>"


class TestDeterminations:
    """Tests for determinations and commitment application."""

    def test_environment_events_split_runs(self) -> None:
        """Test runs are separated by environment events and empty runs dropped."""
        history = (
            env("E"),
            commit("a"),
            env("E'"),
            commit("b"),
            commit("c"),
        )

        det = determination_of(history)

        assert det.runs == (("a",), ("b", "c"))
        assert det.commitments == ("a", "b", "c")
        assert det.cost == 3

    def test_apply_logs_empty_result(self, caplog: pytest.LogCaptureFixture) -> None:
        """Test an emptying commitment is returned and logged."""
        spec = pointwise_spec(1)

        with caplog.at_level(logging.WARNING):
            result = apply(spec, (), "not_o0")

        assert result == frozenset()
        assert "empties the admissible set" in caplog.text

    def test_apply_checks_prerequisites(self) -> None:
        """Test a commitment whose prerequisites are missing is rejected."""
        with pytest.raises(CommitmentNotApplicable):
            apply(consensus_server(), (), "draw")

        assert apply(consensus_server(), (commit("close"),), "draw") == {0}


class TestLayers:
    """Tests for commutation and layer enumeration."""

    def test_pointwise_exclusions_commute(self) -> None:
        """Test two pointwise exclusions commute."""
        assert commutes_at(pointwise_spec(3), (), "not_o0", "not_o1")

    def test_commutes_requires_applicability(self) -> None:
        """Test commutation is undefined for inapplicable commitments."""
        with pytest.raises(CommitmentNotApplicable):
            commutes_at(consensus_server(), (), "close", "draw")

    def test_commuting_layers_exclude_emptying_layers(self) -> None:
        """Test every nonempty layer except the one removing all outcomes."""
        spec = pointwise_spec(3)

        layers = commuting_layers(spec, (), spec.basis_ids)

        assert len(layers) == 6
        assert ("not_o0", "not_o1", "not_o2") not in layers
        assert layers[0] == ("not_o0",)

    def test_layers_must_survive_environment(self) -> None:
        """Test a pair of exclusions an environment move would empty is invalid."""
        spec = three_valued_consensus()

        layers = commuting_layers(spec, (), spec.basis_ids)

        assert layers == [("not_a",), ("not_b",), ("not_c",)]


class TestOfflineDepth:
    """Tests for the dependency DAG and its depth."""

    def test_independent_exclusions_have_depth_one(self) -> None:
        """Test two pointwise exclusions fit one layer."""
        det = Determination.single(["not_o0", "not_o1"])

        assert offline_depth(pointwise_spec(3), det) == 1

    def test_prerequisite_forces_a_second_layer(self) -> None:
        """Test the draw must follow the closure."""
        spec = consensus_server()
        det = Determination.single(["close", "draw"])

        assert offline_depth(spec, det) == 2
        assert greedy_layering(spec, det) == (("close",), ("draw",))
        assert list(dependency_dag(spec, det).edges) == [(0, 1)]

    def test_empty_determination(self) -> None:
        """Test the empty determination has depth zero."""
        assert offline_depth(pointwise_spec(2), Determination.single([])) == 0
        assert brute_force_layering(pointwise_spec(2), (), []) == ()

    def test_multi_run_determination_rejected(self) -> None:
        """Test offline depth needs a single run."""
        det = Determination((("not_o0",), ("not_o1",)))

        with pytest.raises(InvalidParams):
            dependency_dag(pointwise_spec(3), det)

    def test_cyclic_prerequisites(self) -> None:
        """Test cyclic gates are reported before any layering."""
        spec = ExplicitSpec(
            outcomes=["x", "y"],
            env_moves=[],
            basis=[
                exclude("a", [0], requires=["b"]),
                exclude("b", [1], requires=["a"]),
            ],
            admissible_table={(): [0, 1]},
        )

        with pytest.raises(CyclicDependency) as excinfo:
            offline_depth(spec, Determination.single([]))

        assert set(excinfo.value.cycle) == {"a", "b"}

    def test_brute_force_finds_single_layer(self) -> None:
        """Test the exhaustive oracle groups pointwise exclusions together."""
        spec = pointwise_spec(4)
        ids = ["not_o0", "not_o1", "not_o2"]

        assert brute_force_min_layers(spec, (), ids) == 1
        assert brute_force_layering(spec, (), ids) == (tuple(ids),)

    def test_brute_force_refuses_large_sets(self) -> None:
        """Test the exhaustive oracle caps its input size."""
        spec = pointwise_spec(14)

        with pytest.raises(TooManyCommitments):
            brute_force_min_layers(spec, (), spec.basis_ids[:13])

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(0, 6))
    def test_depth_matches_gate_chains(self, seed: int, size: int) -> None:
        """Test depth equals the longest gate chain and the exhaustive oracle."""
        spec, det = random_offline_spec(np.random.default_rng(seed), size)

        depth = offline_depth(spec, det)

        assert depth == gate_chain_length(spec)
        assert len(greedy_layering(spec, det)) == depth
        assert brute_force_min_layers(spec, (), det.commitments) == depth

    @pytest.mark.slow
    def test_oracle_agrees_on_pinned_corpus(self) -> None:
        """Test 200 random specs of up to 12 commitments against the oracle."""
        sizes = set()
        for spec, det in random_offline_corpus(2024, 200):
            depth = offline_depth(spec, det)
            sizes.add(det.cost)

            assert brute_force_min_layers(spec, (), det.commitments) == depth
            assert depth == gate_chain_length(spec)

        assert sizes == set(range(13))


class TestOnlineDepth:
    """Tests for the min-max determination game."""

    def test_retraction_costs_a_second_layer(self) -> None:
        """Test the environment can force one more layer."""
        assert online_minmax_depth(three_valued_consensus()) == 2

    def test_consensus_servers(self) -> None:
        """Test close then draw, with or without a deadline."""
        assert online_minmax_depth(consensus_server()) == 2
        assert online_minmax_depth(deadline_consensus()) == 2

    def test_singleton_costs_nothing(self) -> None:
        """Test a resolved offline specification has depth zero."""
        assert online_minmax_depth(pointwise_spec(1)) == 0

    def test_offline_specs_take_one_layer(self) -> None:
        """Test one layer of exclusions resolves an offline specification."""
        assert online_minmax_depth(pointwise_spec(4)) == 1

    def test_delayed_delivery_is_unresolvable(self) -> None:
        """Test an environment that never delivers leaves the set ambiguous."""
        assert online_minmax_depth(async_relay()) is UNRESOLVABLE

    @staticmethod
    def _forced_choice(
        outcomes: list[str], table: dict[tuple[str, ...], list[int]]
    ) -> ExplicitSpec:
        moves = [EnvMove(m, forbids=["X", "Y"]) for m in ("X", "Y")]
        spec = ExplicitSpec(
            outcomes=outcomes,
            env_moves=moves,
            basis=[],
            admissible_table=table,
            horizon=1,
        )
        return with_basis(spec, atomic_basis(spec))

    def test_waiting_for_the_environment_is_free(self) -> None:
        """Test no layer is charged when every environment move decides."""
        spec = self._forced_choice(
            ["a", "b"], {(): [0, 1], ("X",): [0], ("Y",): [1]}
        )

        assert commuting_layers(spec, (), spec.basis_ids) == []
        assert online_minmax_depth(spec) == 0

    def test_layer_valid_on_every_move_is_committed(self) -> None:
        """Test a layer that survives both moves is taken up front."""
        spec = self._forced_choice(
            ["a", "b", "c"], {(): [0, 1, 2], ("X",): [0], ("Y",): [0, 1]}
        )

        assert commuting_layers(spec, (), spec.basis_ids) == [
            ("not_b",),
            ("not_b", "not_c"),
            ("not_c",),
        ]
        assert online_minmax_depth(spec) == 1


class TestShrinkage:
    """Tests for the shrinkage validator."""

    @pytest.mark.parametrize(
        "spec",
        [three_valued_consensus(), consensus_server(2), async_relay(2)],
        ids=["three_valued", "server", "relay"],
    )
    def test_catalog_specs_shrink(self, spec: ExplicitSpec) -> None:
        """Test bundled specifications never re-admit outcomes."""
        report = validate_shrinkage(spec)

        assert report.passed
        assert report.histories_checked > 1

    def test_readding_commitment_is_caught(self) -> None:
        """Test a commitment that adds an outcome back is reported."""
        report = validate_shrinkage(corrupted_readd_spec())

        assert not report.passed
        assert len(report.violations) == 1
        violation = report.violations[0]
        assert violation.commitment == "readd"
        assert violation.prefix == (commit("not_o2"),)
        assert violation.added == {2}
