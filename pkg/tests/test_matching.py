"""Tests for stable matchings, rotations and their depth."""

import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from determination_depth.cli import DATA_DIR
from determination_depth.core import commit
from determination_depth.matching import (
    Matching,
    MatchingInstance,
    blocking_pairs,
    build_rotation_poset,
    cyclic_instance,
    disjoint_union,
    downsets,
    enumerate_stable_brute,
    explore_lattice,
    gale_shapley,
    is_stable,
    layered_resolution,
    load_instance,
    matching_depth_oracle,
    matching_from_downset,
    parse_instance,
    poset_height,
    random_instance,
    rotation_spec,
    woman_optimal,
)
from determination_depth.utils import InvalidParams, TooLarge


@pytest.fixture
def chain_of_three() -> MatchingInstance:
    """Three stable matchings in a chain of two rotations."""
    return load_instance(DATA_DIR / "chain_of_three.json")


def _two_by_two() -> MatchingInstance:
    return MatchingInstance([[0, 1], [1, 0]], [[1, 0], [0, 1]])


class TestStability:
    """Tests for deferred acceptance and stability checks."""

    def test_optimal_matchings(self, chain_of_three: MatchingInstance) -> None:
        """Test each side's proposals give that side its best matching."""
        assert gale_shapley(chain_of_three) == Matching((0, 1, 2))
        assert woman_optimal(chain_of_three) == Matching((2, 0, 1))

    def test_blocking_pairs(self, chain_of_three: MatchingInstance) -> None:
        """Test the pair preferring each other is reported."""
        assert blocking_pairs(chain_of_three, Matching((0, 2, 1))) == [(2, 0)]
        assert is_stable(chain_of_three, Matching((1, 2, 0)))

    def test_brute_force_enumeration(self, chain_of_three: MatchingInstance) -> None:
        """Test all three stable matchings are found in order."""
        assert enumerate_stable_brute(chain_of_three) == [
            Matching((0, 1, 2)),
            Matching((1, 2, 0)),
            Matching((2, 0, 1)),
        ]

    def test_brute_force_refuses_large_instances(self) -> None:
        """Test the permutation search is capped."""
        with pytest.raises(TooLarge):
            enumerate_stable_brute(random_instance(np.random.default_rng(0), 8))

    def test_instance_validation(self) -> None:
        """Test preference lists must be permutations of one size."""
        with pytest.raises(InvalidParams):
            MatchingInstance([[0, 0], [1, 0]], [[0, 1], [1, 0]])
        with pytest.raises(InvalidParams):
            MatchingInstance([[0]], [[0, 1], [1, 0]])


class TestRotations:
    """Tests for rotations, the poset and downsets."""

    def test_chain_poset(self, chain_of_three: MatchingInstance) -> None:
        """Test two rotations, one preceding the other."""
        poset = build_rotation_poset(chain_of_three)

        assert len(poset.rotations) == 2
        assert poset.edges == {(0, 1)}
        assert poset_height(poset) == 2
        assert str(poset.rotations[0]) == "(m0:w0, m1:w1, m2:w2)"

    def test_unique_stable_matching(self) -> None:
        """Test no rotations and a single matching."""
        instance = load_instance(DATA_DIR / "unique_stable.json")
        rotations, reached = explore_lattice(instance)

        assert rotations == ()
        assert list(reached) == [Matching((0, 1, 2))]
        assert poset_height(build_rotation_poset(instance)) == 0

    def test_independent_blocks_form_an_antichain(self) -> None:
        """Test three independent rotations of height one."""
        instance = disjoint_union([_two_by_two()] * 3)
        poset = build_rotation_poset(instance)

        assert instance.n == 6
        assert len(poset.rotations) == 3
        assert poset.edges == frozenset()
        assert poset_height(poset) == 1
        assert len(downsets(poset)) == 8

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 5), st.integers(0, 2**32 - 1))
    def test_lattice_matches_brute_force(self, n: int, seed: int) -> None:
        """Test downsets are in bijection with the stable matchings."""
        instance = random_instance(np.random.default_rng(seed), n)
        stable = set(enumerate_stable_brute(instance))
        _, reached = explore_lattice(instance)
        poset = build_rotation_poset(instance)

        assert set(reached) == stable
        closed = downsets(poset)
        assert len(closed) == len(stable)
        assert {matching_from_downset(instance, poset, d) for d in closed} == stable


class TestCyclicInstances:
    """Tests for Latin instances whose rotations form a single chain."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_height_is_n_minus_one(self, n: int) -> None:
        """Test the n cyclic shifts give a chain of n - 1 rotations."""
        poset = build_rotation_poset(cyclic_instance(n))

        assert len(poset.rotations) == n - 1
        assert poset_height(poset) == n - 1

    def test_three_is_the_bundled_chain(
        self, chain_of_three: MatchingInstance
    ) -> None:
        """Test the n=3 instance is the bundled chain of three."""
        assert cyclic_instance(3) == chain_of_three

    def test_height_three_resolution(self) -> None:
        """Test four stable matchings resolve in three layers."""
        instance = cyclic_instance(4)
        poset = build_rotation_poset(instance)

        resolution = layered_resolution(instance)

        assert len(enumerate_stable_brute(instance)) == 4
        assert len(downsets(poset)) == 4
        assert len(resolution.layers) == 3
        assert resolution.trace == (4, 3, 2, 1)
        assert resolution.final == (Matching((3, 0, 1, 2)),)
        assert matching_depth_oracle(instance) == 3


class TestRotationSpec:
    """Tests for rotations as commitments."""

    def test_trace_of_the_chain(self, chain_of_three: MatchingInstance) -> None:
        """Test each layer shrinks the admissible set down to the woman optimum."""
        resolution = layered_resolution(chain_of_three)

        assert resolution.trace == (3, 2, 1)
        assert resolution.final == (woman_optimal(chain_of_three),)
        assert len(resolution.layers) == 2

    def test_trace_can_be_skipped(self, chain_of_three: MatchingInstance) -> None:
        """Test the layers alone need no specification."""
        resolution = layered_resolution(chain_of_three, trace=False)

        assert resolution.trace is None
        assert resolution.final is None

    def test_later_rotation_is_dormant_until_exposed(
        self, chain_of_three: MatchingInstance
    ) -> None:
        """Test a rotation acts as the identity before its predecessor."""
        built = rotation_spec(chain_of_three)
        spec = built.spec

        assert spec.admissible((commit("rho1"),)) == {0, 1, 2}
        assert spec.admissible((commit("rho0"), commit("rho1"))) == {2}

    def test_oracle_matches_height(self, chain_of_three: MatchingInstance) -> None:
        """Test the exhaustive layer search agrees with the poset height."""
        assert matching_depth_oracle(chain_of_three) == 2
        assert matching_depth_oracle(disjoint_union([_two_by_two()] * 3)) == 1

    @settings(max_examples=20, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_random_oracle_matches_height(self, n: int, seed: int) -> None:
        """Test depth equals poset height on random instances."""
        instance = random_instance(np.random.default_rng(seed), n)
        poset = build_rotation_poset(instance)
        resolution = layered_resolution(instance)

        assert matching_depth_oracle(instance) == poset_height(poset)
        assert resolution.final == (woman_optimal(instance),)


class TestInstanceDocuments:
    """Tests for instance files."""

    def test_parse_instance_checks_keys(self) -> None:
        """Test the document needs n and both preference lists."""
        with pytest.raises(InvalidParams):
            parse_instance({"n": 1, "men_prefs": [[0]]})
        with pytest.raises(InvalidParams, match="n does not match"):
            parse_instance({"n": 2, "men_prefs": [[0]], "women_prefs": [[0]]})

    def test_load_instance_rejects_bad_json(self, tmp_path: Path) -> None:
        """Test a malformed file is reported as invalid input."""
        path = tmp_path / "bad.json"
        path.write_text("[")

        with pytest.raises(InvalidParams, match="not valid JSON"):
            load_instance(path)

    def test_load_instance_round_trip_document(self, tmp_path: Path) -> None:
        """Test a written instance loads back."""
        path = tmp_path / "inst.json"
        document = {
            "n": 2,
            "men_prefs": [[0, 1], [1, 0]],
            "women_prefs": [[1, 0], [0, 1]],
        }
        path.write_text(json.dumps(document))

        assert load_instance(path) == _two_by_two()
