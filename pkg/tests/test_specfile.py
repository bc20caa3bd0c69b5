"""Tests for specification documents."""

import json
from pathlib import Path
from typing import Any

import pytest

from determination_depth.catalog import (
    async_relay,
    consensus_server,
    corrupted_readd_spec,
)
from determination_depth.core import commit, env, online_minmax_depth
from determination_depth.specfile import (
    SpecFormatError,
    dump_spec,
    load_spec,
    parse_spec,
)
from determination_depth.utils import IoFailure


def _document() -> dict[str, Any]:
    return {
        "outcomes": ["x0y0", "x0y1", "x1y0"],
        "env_moves": [{"id": "go"}],
        "basis": [
            {"id": "phi", "kind": "keep", "outcomes": ["x0y0", "x0y1"]},
            {"id": "psi", "kind": "exclude", "outcomes": ["x0y1"], "requires": ["go"]},
        ],
        "admissible_table": [
            {"env": [], "admissible": ["x0y0", "x0y1", "x1y0"]},
        ],
        "horizon": 1,
    }


def test_parse_spec() -> None:
    """Test labels resolve to outcome ids and gates are kept."""
    spec = parse_spec(_document())

    assert spec.outcomes == ("x0y0", "x0y1", "x1y0")
    assert spec.commitment("psi").requires == {"go"}
    assert spec.admissible((commit("phi"),)) == {0, 1}
    assert spec.admissible((commit("phi"), env("go"), commit("psi"))) == {0}


def test_dumped_spec_behaves_the_same() -> None:
    """Test a dumped document parses to an equivalent specification."""
    original = consensus_server(3)

    reread = parse_spec(json.loads(json.dumps(dump_spec(original))))

    assert online_minmax_depth(reread) == online_minmax_depth(original)
    history = (env("propose_c"), commit("close"), commit("draw"))
    assert reread.admissible(history) == original.admissible(history)


def test_dump_keeps_repeatable_moves() -> None:
    """Test move flags survive dumping."""
    document = dump_spec(async_relay())

    assert document["env_moves"][0] == {
        "id": "delay",
        "requires": [],
        "forbids": [],
        "repeatable": True,
    }


def test_dump_rejects_opaque_commitments() -> None:
    """Test commitments without a document form cannot be dumped."""
    with pytest.raises(SpecFormatError, match="readd"):
        dump_spec(corrupted_readd_spec())


@pytest.mark.parametrize(
    ("change", "where"),
    [
        (lambda d: d.update(extra=1), "spec"),
        (lambda d: d["basis"][0].update(outcomes=["nope"]), "basis[0]"),
        (lambda d: d["basis"][0].update(kind="shuffle"), "basis[0]"),
        (
            lambda d: d["basis"].append({"id": "f", "kind": "freeze", "outcomes": []}),
            "basis[2]",
        ),
        (lambda d: d.update(horizon=-1), "horizon"),
        (lambda d: d["admissible_table"][0].pop("env"), "admissible_table[0]"),
        (lambda d: d.update(outcomes=["a", "a"]), "outcomes"),
    ],
)
def test_malformed_documents(change: Any, where: str) -> None:
    """Test each malformation is reported at its location."""
    document = _document()
    change(document)

    with pytest.raises(SpecFormatError) as excinfo:
        parse_spec(document)

    assert excinfo.value.where == where


def test_load_spec(tmp_path: Path) -> None:
    """Test loading from disk and its failure modes."""
    good = tmp_path / "spec.json"
    good.write_text(json.dumps(_document()))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")

    assert load_spec(good).basis_ids == ("phi", "psi")
    with pytest.raises(SpecFormatError, match="not valid JSON"):
        load_spec(bad)
    with pytest.raises(IoFailure):
        load_spec(tmp_path / "missing.json")
