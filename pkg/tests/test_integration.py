"""Integration tests for core workflows."""

import itertools
import json
from pathlib import Path

import pytest

from determination_depth import cli, matching
from determination_depth.cli import DATA_DIR, ExperimentConfig, main, run


def _main(monkeypatch, *argv: str) -> int:  # type: ignore
    monkeypatch.setattr("sys.argv", ["determination-depth", *argv])
    with pytest.raises(SystemExit) as excinfo:
        main()
    return int(excinfo.value.code or 0)


def test_matching_depth_default(monkeypatch, capsys):  # type: ignore
    """Test the bundled unique-stable instance has height zero."""
    assert _main(monkeypatch, "matching-depth") == 0

    out = capsys.readouterr().out
    assert "instance=unique_stable" in out
    assert "height=0" in out
    assert "all checks passed" in out


def test_matching_depth_chain_instance(monkeypatch, capsys):  # type: ignore
    """Test a three-matching lattice resolves in two layers."""
    instance = str(DATA_DIR / "chain_of_three.json")

    assert _main(monkeypatch, "matching-depth", "--instance", instance) == 0

    out = capsys.readouterr().out
    assert "height=2" in out
    assert "oracle=2" in out
    assert "trace=3 2 1" in out
    assert "stable_matchings=3" in out


def _cyclic_corpus(monkeypatch, sizes: list[int]) -> None:  # type: ignore
    cycle = itertools.cycle(sizes)

    def draw(rng: object, n: int) -> matching.MatchingInstance:
        return matching.cyclic_instance(next(cycle))

    monkeypatch.setattr(matching, "random_instance", draw)


def test_matching_corpus_reports_height_coverage(monkeypatch) -> None:  # type: ignore
    """Test the corpus row passes once heights 0 to 3 have all appeared."""
    _cyclic_corpus(monkeypatch, [1, 2, 3, 4])
    config = ExperimentConfig(
        "matching-depth",
        {"instance": None, "random": 4, "n": 6, "heights": [0, 1, 2, 3]},
        seed=1,
    )

    report = run(config)

    assert [row["height"] for row in report.rows[:-1]] == [0, 1, 2, 3]
    assert report.rows[-1] == {"instance": "corpus", "heights": "0 1 2 3", "pass": True}
    assert report.passed


def test_matching_corpus_missing_height_fails(monkeypatch) -> None:  # type: ignore
    """Test a corpus that never reaches height three fails the run."""
    _cyclic_corpus(monkeypatch, [1, 2, 3])
    config = ExperimentConfig(
        "matching-depth",
        {"instance": None, "random": 6, "n": 6, "heights": [0, 1, 2, 3]},
        seed=1,
    )

    report = run(config)

    assert report.rows[-1]["heights"] == "0 1 2"
    assert report.rows[-1]["pass"] is False
    assert report.failure_count == 1


def test_core_oracle_small_corpus(monkeypatch, capsys):  # type: ignore
    """Test offline depth agrees with the oracle on a quick pinned corpus."""
    code = _main(
        monkeypatch,
        "core-oracle",
        "--count", "14",
        "--max-size", "6",
        "--seed", "3",
    )

    assert code == 0
    out = capsys.readouterr().out
    assert "case=three_valued_consensus" in out
    assert "online_depth=2" in out
    assert "15 rows, all checks passed" in out


def test_core_oracle_random_corpus_needs_seed(monkeypatch, capsys):  # type: ignore
    """Test the random corpus is never drawn unseeded."""
    assert _main(monkeypatch, "core-oracle", "--count", "3") == 1
    assert "needs --seed" in capsys.readouterr().err

    assert _main(monkeypatch, "core-oracle", "--count", "0") == 0
    assert "1 rows, all checks passed" in capsys.readouterr().out


def test_qbf_depth_default(monkeypatch, capsys):  # type: ignore
    """Test the bundled QBF is true and the depth game agrees."""
    assert _main(monkeypatch, "qbf-depth") == 0

    out = capsys.readouterr().out
    assert "truth=true" in out
    assert "depth_game=true" in out


def test_dtree_depth(monkeypatch, capsys):  # type: ignore
    """Test parity needs every variable and XOR of two needs both."""
    assert _main(monkeypatch, "dtree-depth", "--parity", "1", "2", "3") == 0
    out = capsys.readouterr().out
    assert out.count("parity=true") == 3
    assert "depth=3" in out

    assert _main(monkeypatch, "dtree-depth", "--table", "6", "--n", "2") == 0
    assert "depth=2" in capsys.readouterr().out


def test_conservation_small(monkeypatch, capsys):  # type: ignore
    """Test the conservation bound holds exhaustively up to k=4."""
    assert _main(monkeypatch, "conservation", "--k-max", "4") == 0

    out = capsys.readouterr().out
    assert "4 rows, all checks passed" in out
    assert "below_k=0" in out


def test_game_depth_trembling_extremes(monkeypatch, capsys):  # type: ignore
    """Test trembling at p=0 and p=1 lands exactly on the bound."""
    code = _main(
        monkeypatch,
        "game-depth",
        "--p", "0", "1",
        "--trials", "500",
        "--seed", "3",
    )

    assert code == 0
    out = capsys.readouterr().out
    assert "kind=decomposition" in out
    assert out.count("kind=trembling") == 2


def test_distsim_selected_scenarios(monkeypatch, capsys):  # type: ignore
    """Test local scenarios need no sync points."""
    code = _main(monkeypatch, "distsim", "--scenario", "trivial", "pointwise_local")

    assert code == 0
    out = capsys.readouterr().out
    assert out.count("min_sync_points=0") == 2


def test_distsim_fixed_barriers(monkeypatch, capsys):  # type: ignore
    """Test an unfenced cross dependency is reported unresolvable."""
    code = _main(
        monkeypatch, "distsim", "--scenario", "cross_dependency", "--barriers", "0"
    )

    assert code == 0
    out = capsys.readouterr().out
    assert "resolvable=false" in out
    assert "witnesses_replayed=true" in out


def test_chain_tradeoff_full_budget(monkeypatch, capsys):  # type: ignore
    """Test budgets of two and three bits satisfy the tradeoff."""
    code = _main(
        monkeypatch,
        "chain-tradeoff",
        "--bits", "2", "3",
        "--trials", "2000",
        "--seed", "7",
    )

    assert code == 0
    out = capsys.readouterr().out
    assert out.count("satisfied=true") == 2


def test_separation_report_is_reproducible(  # type: ignore
    monkeypatch, tmp_path: Path, capsys
):
    """Test a fixed seed gives byte-identical reports."""
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        _main(
            monkeypatch,
            "chain-separation",
            "--k", "4",
            "--width", "1", "2",
            "--trials", "2000",
            "--seed", "1",
            "--out", str(path),
        )
        assert f"Report written to {path}" in capsys.readouterr().out

    first, second = (path.read_bytes() for path in paths)
    assert first == second
    lines = first.decode().splitlines()
    assert lines[0].startswith("k,m,s,dprime,width,policy,empirical,bound")
    assert len(lines) == 9


def test_jsonl_report_file(monkeypatch, tmp_path: Path, capsys):  # type: ignore
    """Test JSON lines output starts with the run metadata."""
    out = tmp_path / "reports" / "dtree.jsonl"

    code = _main(
        monkeypatch,
        "dtree-depth", "--parity", "2", "--format", "jsonl", "--out", str(out),
    )

    assert code == 0
    meta, row = (json.loads(line) for line in out.read_text().splitlines())
    assert meta["type"] == "meta"
    assert meta["command"] == "dtree-depth"
    assert meta["passed"] is True
    assert meta["config"]["parity"] == "2"
    assert row == {"table": "6", "n": 2, "depth": 2, "parity": True, "pass": True}


def test_missing_input_file(monkeypatch, tmp_path: Path, capsys):  # type: ignore
    """Test unreadable inputs end with a one-line error."""
    missing = str(tmp_path / "missing.json")

    assert _main(monkeypatch, "matching-depth", "--instance", missing) == 1

    captured = capsys.readouterr()
    assert captured.err.startswith("Error:")
    assert "missing.json" in captured.err


def test_dtree_depth_without_input(monkeypatch, capsys):  # type: ignore
    """Test dtree-depth refuses to run with nothing to measure."""
    assert _main(monkeypatch, "dtree-depth") == 1

    assert "needs --table/--n or --parity" in capsys.readouterr().err


def test_random_inputs_need_a_seed(monkeypatch, capsys):  # type: ignore
    """Test random instances are never drawn unseeded."""
    assert _main(monkeypatch, "matching-depth", "--random", "2") == 1

    assert "needs --seed" in capsys.readouterr().err


def test_keyboard_interrupt(monkeypatch, capsys):  # type: ignore
    """Test an interrupted run exits with 130."""

    def interrupted(config: ExperimentConfig) -> None:
        raise KeyboardInterrupt

    monkeypatch.setattr(cli, "run", interrupted)

    assert _main(monkeypatch, "conservation", "--k-max", "2") == 130
    assert "Interrupted by user" in capsys.readouterr().err


def test_run_returns_report_without_writing(tmp_path: Path) -> None:
    """Test run only writes a file when an output is configured."""
    config = ExperimentConfig("conservation", {"k_max": 3, "max_partitions": 10})

    report = run(config)

    assert [row["k"] for row in report.rows] == [1, 2, 3]
    assert report.passed
    assert report.seconds >= 0
    assert list(tmp_path.iterdir()) == []
