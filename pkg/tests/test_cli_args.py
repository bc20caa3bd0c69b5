"""Tests for CLI argument parsing."""

import pytest

from determination_depth import __version__
from determination_depth.cli import (
    ExperimentConfig,
    UnknownSubcommand,
    build_parser,
    main,
)
from determination_depth.utils import InvalidParams


def test_cli_requires_command(monkeypatch, capsys):  # type: ignore
    """Test that CLI requires a command."""
    monkeypatch.setattr("sys.argv", ["determination-depth"])

    try:
        main()
    except SystemExit as e:
        assert e.code == 1

    captured = capsys.readouterr()
    assert "usage:" in captured.out.lower() or "usage:" in captured.err.lower()


def test_version(monkeypatch, capsys):  # type: ignore
    """Test --version prints the package version."""
    monkeypatch.setattr("sys.argv", ["determination-depth", "--version"])

    with pytest.raises(SystemExit) as excinfo:
        main()

    assert excinfo.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_stochastic_commands_require_seed(monkeypatch, capsys):  # type: ignore
    """Test Monte Carlo subcommands refuse to run unseeded."""
    monkeypatch.setattr("sys.argv", ["determination-depth", "chain-separation"])

    try:
        main()
    except SystemExit as e:
        assert e.code == 2

    captured = capsys.readouterr()
    assert "--seed" in captured.err


def test_unknown_subcommand_is_rejected(monkeypatch, capsys):  # type: ignore
    """Test argparse rejects subcommands it does not know."""
    monkeypatch.setattr("sys.argv", ["determination-depth", "chain-sorting"])

    try:
        main()
    except SystemExit as e:
        assert e.code == 2

    assert "invalid choice" in capsys.readouterr().err


def test_parser_defaults() -> None:
    """Test default grids of the separation and tradeoff runs."""
    parser = build_parser()

    sep = parser.parse_args(["chain-separation", "--seed", "1"])
    trade = parser.parse_args(["chain-tradeoff", "--seed", "1"])

    assert sep.k == [4, 6]
    assert sep.width == [1, 4, 16]
    assert sep.dprime is None
    assert sep.trials == 100_000
    assert sep.policy == "uniform"
    assert trade.bits == [0, 1, 2]
    assert trade.dprime == 5


def test_acceptance_corpus_defaults() -> None:
    """Test the oracle and matching corpora default to the acceptance sizes."""
    parser = build_parser()

    oracle = parser.parse_args(["core-oracle"])
    mat = parser.parse_args(["matching-depth"])

    assert oracle.count == 200
    assert oracle.max_size == 12
    assert mat.heights == [0, 1, 2, 3]


def test_config_from_args_splits_common_flags() -> None:
    """Test shared flags leave the subcommand parameters."""
    args = build_parser().parse_args(
        ["conservation", "--k-max", "4", "--threads", "2", "--format", "jsonl"]
    )

    config = ExperimentConfig.from_args(args)

    assert config.command == "conservation"
    assert config.params == {"k_max": 4, "max_partitions": 100_000}
    assert config.threads == 2
    assert config.fmt == "jsonl"
    assert config.out is None
    assert config.seed is None


def test_config_validation() -> None:
    """Test configs are checked before anything runs."""
    with pytest.raises(UnknownSubcommand):
        ExperimentConfig("chain-sorting")
    with pytest.raises(InvalidParams, match="unknown conservation parameters"):
        ExperimentConfig("conservation", {"k_max": 3, "width": 2})
    with pytest.raises(InvalidParams):
        ExperimentConfig("conservation", fmt="xml")
    with pytest.raises(InvalidParams):
        ExperimentConfig("conservation", threads=0)


def test_config_echo_flattens_lists() -> None:
    """Test list parameters are echoed as space-separated text."""
    config = ExperimentConfig(
        "dtree-depth", {"table": None, "n": None, "parity": [1, 2]}, seed=3
    )

    echo = config.echo()

    assert echo["parity"] == "1 2"
    assert echo["seed"] == 3
    assert echo["threads"] == 1
