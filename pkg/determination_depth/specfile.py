"""Read and write ExplicitSpec documents.

The document is JSON with the keys ``outcomes``, ``env_moves``, ``basis``,
``admissible_table`` and ``horizon``. Outcomes are referenced by label
everywhere else in the document.
"""

import json
from pathlib import Path
from typing import Any

from .core import Commitment, EnvMove, ExplicitSpec, exclude, freeze, keep, pick_min
from .utils import DeterminationError, read_text

SPEC_KEYS = {"outcomes", "env_moves", "basis", "admissible_table", "horizon"}
MOVE_KEYS = {"id", "requires", "forbids", "repeatable"}
COMMITMENT_KEYS = {"id", "kind", "outcomes", "requires", "dormant_until", "freezes"}
TABLE_KEYS = {"env", "admissible"}


class SpecFormatError(DeterminationError, ValueError):
    """Raised when a specification document is malformed."""

    def __init__(self, where: str, problem: str):
        self.where = where
        self.problem = problem
        super().__init__(f"Invalid specification document at {where}: {problem}")


def _check_keys(obj: Any, allowed: set[str], where: str, required: set[str]) -> None:
    if not isinstance(obj, dict):
        raise SpecFormatError(where, "expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise SpecFormatError(where, f"unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise SpecFormatError(where, f"missing keys {sorted(missing)}")


def _outcome_ids(labels: Any, index: dict[str, int], where: str) -> list[int]:
    if not isinstance(labels, list):
        raise SpecFormatError(where, "expected a list of outcome labels")
    try:
        return [index[label] for label in labels]
    except KeyError as e:
        raise SpecFormatError(where, f"unknown outcome {e.args[0]!r}") from e


def _parse_commitment(obj: Any, index: dict[str, int], where: str) -> Commitment:
    _check_keys(obj, COMMITMENT_KEYS, where, {"id", "kind"})
    kind = obj["kind"]
    common = {
        "requires": obj.get("requires", []),
        "dormant_until": obj.get("dormant_until", []),
    }
    if kind in ("exclude", "keep"):
        if "outcomes" not in obj:
            raise SpecFormatError(where, f"{kind} needs outcomes")
        build = exclude if kind == "exclude" else keep
        return build(
            obj["id"],
            _outcome_ids(obj["outcomes"], index, where),
            freezes=bool(obj.get("freezes", False)),
            **common,
        )
    if "outcomes" in obj:
        raise SpecFormatError(where, f"{kind} takes no outcomes")
    if kind == "freeze":
        return freeze(obj["id"], **common)
    if kind == "pick_min":
        return pick_min(obj["id"], freezes=bool(obj.get("freezes", False)), **common)
    raise SpecFormatError(where, f"unknown commitment kind {kind!r}")


def parse_spec(document: Any) -> ExplicitSpec:
    """Build an ExplicitSpec from a decoded document."""
    _check_keys(document, SPEC_KEYS, "spec", SPEC_KEYS - {"env_moves"})
    outcomes = document["outcomes"]
    if not isinstance(outcomes, list) or len(set(outcomes)) != len(outcomes):
        raise SpecFormatError("outcomes", "expected a list of distinct labels")
    index = {label: i for i, label in enumerate(outcomes)}

    moves = []
    for i, obj in enumerate(document.get("env_moves", [])):
        _check_keys(obj, MOVE_KEYS, f"env_moves[{i}]", {"id"})
        moves.append(
            EnvMove(
                obj["id"],
                requires=obj.get("requires", []),
                forbids=obj.get("forbids", []),
                repeatable=bool(obj.get("repeatable", False)),
            )
        )

    basis = [
        _parse_commitment(obj, index, f"basis[{i}]")
        for i, obj in enumerate(document["basis"])
    ]

    table = {}
    for i, row in enumerate(document["admissible_table"]):
        where = f"admissible_table[{i}]"
        _check_keys(row, TABLE_KEYS, where, TABLE_KEYS)
        table[tuple(row["env"])] = _outcome_ids(row["admissible"], index, where)

    horizon = document["horizon"]
    if not isinstance(horizon, int) or horizon < 0:
        raise SpecFormatError("horizon", "expected a non-negative integer")
    return ExplicitSpec(outcomes, moves, basis, table, horizon)


def load_spec(path: Path | str) -> ExplicitSpec:
    """Read a specification document from disk."""
    try:
        document = json.loads(read_text(path))
    except json.JSONDecodeError as e:
        raise SpecFormatError(str(path), f"not valid JSON ({e})") from e
    return parse_spec(document)


def dump_spec(spec: ExplicitSpec) -> dict[str, Any]:
    """Document form of a specification built from serialisable commitments."""
    basis = []
    for c in spec.basis:
        if c.kind is None:
            raise SpecFormatError(f"basis[{c.id}]", "commitment has no document form")
        entry: dict[str, Any] = {"id": c.id, "kind": c.kind}
        if c.kind in ("exclude", "keep"):
            entry["outcomes"] = spec.labels(c.params)
        if c.requires:
            entry["requires"] = sorted(c.requires)
        if c.dormant_until:
            entry["dormant_until"] = sorted(c.dormant_until)
        if c.freezes and c.kind != "freeze":
            entry["freezes"] = True
        basis.append(entry)
    return {
        "outcomes": list(spec.outcomes),
        "env_moves": [
            {
                "id": m.id,
                "requires": sorted(m.requires),
                "forbids": sorted(m.forbids),
                "repeatable": m.repeatable,
            }
            for m in spec.env_moves
        ],
        "basis": basis,
        "admissible_table": [
            {"env": list(key), "admissible": spec.labels(value)}
            for key, value in spec.admissible_table.items()
        ],
        "horizon": spec.horizon,
    }
