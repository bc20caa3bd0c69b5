"""Tests for the bundled specifications."""

import numpy as np
import pytest

from determination_depth.catalog import (
    consensus_server,
    gate_chain_length,
    pointwise_spec,
    random_offline_corpus,
    random_offline_spec,
)
from determination_depth.utils import InvalidParams


def test_pointwise_spec_has_atomic_basis() -> None:
    """Test one exclusion per outcome and no environment."""
    spec = pointwise_spec(3)

    assert spec.basis_ids == ("not_o0", "not_o1", "not_o2")
    assert spec.is_offline
    assert all(c.is_pointwise for c in spec.basis)


def test_pointwise_spec_needs_an_outcome() -> None:
    """Test the empty outcome set is rejected."""
    with pytest.raises(InvalidParams):
        pointwise_spec(0)


def test_gate_chain_length() -> None:
    """Test gate chains count commitments along declared prerequisites."""
    assert gate_chain_length(pointwise_spec(3)) == 1
    assert gate_chain_length(consensus_server()) == 2


def test_random_offline_spec_is_reproducible() -> None:
    """Test equal seeds give equal gates."""
    a, det_a = random_offline_spec(np.random.default_rng(5), 6)
    b, det_b = random_offline_spec(np.random.default_rng(5), 6)

    assert det_a == det_b
    assert [c.requires for c in a.basis] == [c.requires for c in b.basis]
    assert [c.dormant_until for c in a.basis] == [c.dormant_until for c in b.basis]
    assert det_a.cost == 6
    assert len(a.outcomes) == 7


def test_random_offline_spec_gates_point_backwards() -> None:
    """Test every gate names an earlier commitment."""
    spec, _ = random_offline_spec(np.random.default_rng(9), 8)

    for i, c in enumerate(spec.basis):
        for gate in c.requires | c.dormant_until:
            assert int(gate[1:]) < i


def test_random_offline_corpus_cycles_sizes() -> None:
    """Test the corpus walks through every size and repeats for a seed."""
    first = [det for _, det in random_offline_corpus(11, 8, max_size=3)]
    again = [det for _, det in random_offline_corpus(11, 8, max_size=3)]

    assert [det.cost for det in first] == [0, 1, 2, 3, 0, 1, 2, 3]
    assert first == again


def test_random_offline_corpus_respects_oracle_limit() -> None:
    """Test sizes beyond the exhaustive oracle are refused."""
    with pytest.raises(InvalidParams, match="max_size"):
        list(random_offline_corpus(0, 1, max_size=13))
