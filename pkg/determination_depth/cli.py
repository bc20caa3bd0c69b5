"""Command-line interface for determination-depth."""

import argparse
import logging
import os
import sys
import time
from collections.abc import Callable
from pathlib import Path
from typing import Any

import attrs
import numpy as np

from . import (
    __version__,
    catalog,
    distsim,
    games,
    genchain,
    matching,
    metacomplexity,
)
from .core import (
    MAX_ORACLE_COMMITMENTS,
    UNRESOLVABLE,
    Depth,
    brute_force_min_layers,
    offline_depth,
    online_minmax_depth,
)
from .report import FORMATS, Report, emit, print_console_report
from .utils import DeterminationError, InvalidParams, derive_seed

DATA_DIR = Path(__file__).resolve().parent / "data"
LOG_LEVEL_ENV = "DETERMINATION_DEPTH_LOG_LEVEL"
COMMON_KEYS = frozenset(
    {"command", "seed", "trials", "format", "out", "threads", "verbose"}
)

logger = logging.getLogger(__name__)


class UnknownSubcommand(DeterminationError):
    """Raised when a config names a subcommand that does not exist."""

    def __init__(self, command: str):
        self.command = command
        super().__init__(f"Unknown subcommand: {command}")


@attrs.frozen
class ExperimentConfig:
    """Everything one subcommand run depends on."""

    command: str
    params: dict[str, Any] = attrs.field(factory=dict)
    seed: int | None = None
    trials: int | None = None
    fmt: str = "csv"
    out: Path | None = None
    threads: int = 1

    def __attrs_post_init__(self) -> None:
        if self.command not in PARAMETERS:
            raise UnknownSubcommand(self.command)
        unknown = set(self.params) - PARAMETERS[self.command]
        if unknown:
            raise InvalidParams(
                f"unknown {self.command} parameters", unknown=sorted(unknown)
            )
        if self.fmt not in FORMATS:
            raise InvalidParams("unknown report format", format=self.fmt)
        if self.threads < 1:
            raise InvalidParams("threads must be positive", threads=self.threads)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "ExperimentConfig":
        values = vars(args)
        out = values.get("out")
        return cls(
            command=args.command,
            params={k: v for k, v in values.items() if k not in COMMON_KEYS},
            seed=values.get("seed"),
            trials=values.get("trials"),
            fmt=values.get("format") or "csv",
            out=Path(out) if out else None,
            threads=values.get("threads") or 1,
        )

    def echo(self) -> dict[str, Any]:
        """Configuration as plain values for report metadata."""
        echo = {k: _plain(v) for k, v in self.params.items()}
        echo.update(seed=self.seed, trials=self.trials, threads=self.threads)
        return echo

    def require_seed(self) -> int:
        if self.seed is None:
            raise InvalidParams(f"{self.command} needs --seed for this run")
        return self.seed


def _plain(value: Any) -> Any:
    if isinstance(value, list | tuple):
        return " ".join(str(v) for v in value)
    if isinstance(value, Path):
        return str(value)
    return value


def _depth(value: Depth) -> Any:
    return "unresolvable" if value is UNRESOLVABLE else value


def _data(name: str) -> Path:
    return DATA_DIR / name


def cmd_core_oracle(config: ExperimentConfig) -> Report:
    """Offline depth against the exhaustive layering oracle on random specs."""
    p = config.params
    report = Report(
        config.command,
        config.echo(),
        [
            "case",
            "commitments",
            "offline_depth",
            "gate_chain",
            "oracle",
            "online_depth",
            "pass",
        ],
    )
    online = online_minmax_depth(catalog.three_valued_consensus())
    report.add(
        {
            "case": "three_valued_consensus",
            "online_depth": _depth(online),
            "pass": online == 2,
        }
    )
    if not p["count"]:
        return report
    corpus = catalog.random_offline_corpus(
        config.require_seed(), p["count"], p["max_size"]
    )
    for i, (spec, det) in enumerate(corpus):
        depth = offline_depth(spec, det)
        oracle = brute_force_min_layers(spec, (), det.commitments)
        chain = catalog.gate_chain_length(spec)
        report.add(
            {
                "case": f"random-{i}",
                "commitments": det.cost,
                "offline_depth": depth,
                "gate_chain": chain,
                "oracle": oracle,
                "pass": depth == oracle == chain,
            }
        )
    return report


def cmd_chain_separation(config: ExperimentConfig) -> Report:
    """Separation grid over (k, d', w) cells with contiguous layers."""
    p = config.params
    report = Report(
        config.command,
        config.echo(),
        [
            "k",
            "m",
            "s",
            "dprime",
            "width",
            "policy",
            "empirical",
            "bound",
            "stderr",
            "mean_violations",
            "expected_violations",
            "certain_width",
            "pass",
        ],
    )
    policy = genchain.Policy(p["policy"])
    cells = genchain.separation_grid(
        p["k"],
        p["m"],
        p["s"],
        p["width"],
        trials=config.trials or 1,
        seed=config.require_seed(),
        dprimes=p["dprime"],
        policy=policy,
        threads=config.threads,
    )
    for cell in cells:
        if cell.dprime == cell.k:
            certain = 1
        else:
            certain = genchain.width_for_certainty(
                cell.k, cell.dprime, cell.s / cell.m
            )
        report.add(
            {
                "k": cell.k,
                "m": cell.m,
                "s": cell.s,
                "dprime": cell.dprime,
                "width": cell.width,
                "policy": policy.value,
                "empirical": cell.estimate.mean,
                "bound": cell.bound,
                "stderr": cell.estimate.stderr,
                "mean_violations": cell.estimate.mean_violations,
                "expected_violations": cell.expected_violations,
                "certain_width": certain,
                "pass": cell.passed,
            }
        )
    return report


def cmd_chain_tradeoff(config: ExperimentConfig) -> Report:
    """Message-passing protocol across uninformed links, one row per bit budget."""
    p = config.params
    report = Report(
        config.command,
        config.echo(),
        [
            "k",
            "m",
            "s",
            "dprime",
            "width",
            "bits",
            "uninformed_links",
            "lhs",
            "bound_rhs",
            "satisfied",
            "empirical",
            "bound",
            "stderr",
            "informed_row_rate",
            "informed_row_exact",
            "pass",
        ],
    )
    seed = config.require_seed()
    for k in p["k"]:
        for bits in p["bits"]:
            tradeoff = genchain.TradeoffConfig(
                rounds=p["dprime"],
                width=p["width"],
                bits=(bits,),
                trials=config.trials or 1,
                seed=derive_seed(seed, k, bits),
                guess=p["guess"],
            )
            result = genchain.simulate_tradeoff(k, p["m"], p["s"], tradeoff)
            certain = result.mean == 1.0
            report.add(
                {
                    "k": k,
                    "m": p["m"],
                    "s": p["s"],
                    "dprime": p["dprime"],
                    "width": p["width"],
                    "bits": bits,
                    "uninformed_links": result.uninformed_links,
                    "lhs": result.lhs,
                    "bound_rhs": result.bound_rhs,
                    "satisfied": result.satisfied,
                    "empirical": result.mean,
                    "bound": result.success_bound,
                    "stderr": result.stderr,
                    "informed_row_rate": result.informed_row_rate,
                    "informed_row_exact": result.informed_row_exact,
                    "pass": result.consistent and (result.satisfied or not certain),
                }
            )
    return report


def cmd_conservation(config: ExperimentConfig) -> Report:
    """Sum of (1 + circuit depth) over layers never drops below k."""
    p = config.params
    report = Report(
        config.command,
        config.echo(),
        [
            "k",
            "method",
            "partitions",
            "minimum_total",
            "argmin_count",
            "below_k",
            "contiguous_at_minimum",
            "plans_total_k",
            "pass",
        ],
    )
    for k in range(1, p["k_max"] + 1):
        result = genchain.verify_conservation_lower_bound(k, p["max_partitions"])
        plans_ok = all(
            genchain.conservation_plan(k, d).total == k for d in range(1, k + 1)
        )
        report.add(
            {
                "k": k,
                "method": result.method,
                "partitions": result.partitions,
                "minimum_total": result.minimum_total,
                "argmin_count": result.argmin_count,
                "below_k": result.below_k,
                "contiguous_at_minimum": result.contiguous_at_minimum,
                "plans_total_k": plans_ok,
                "pass": result.passed and plans_ok,
            }
        )
    return report


def _matching_row(name: str, instance: matching.MatchingInstance) -> dict[str, Any]:
    poset = matching.build_rotation_poset(instance)
    height = matching.poset_height(poset)
    resolution = matching.layered_resolution(
        instance, trace=instance.n <= matching.MAX_BRUTE_N
    )
    ok = len(resolution.layers) == height
    row: dict[str, Any] = {
        "instance": name,
        "n": instance.n,
        "rotations": len(poset.rotations),
        "height": height,
        "layers": " | ".join(
            " ".join(str(r) for r in layer) for layer in resolution.layers
        ),
        "edges": " ".join(
            f"{matching.rotation_id(a)}<{matching.rotation_id(b)}"
            for a, b in sorted(poset.edges)
        ),
        "trace": None,
        "stable_matchings": None,
        "downsets": None,
        "oracle": None,
    }
    if resolution.trace is not None:
        row["trace"] = " ".join(str(size) for size in resolution.trace)
        ok &= resolution.final == (matching.woman_optimal(instance),)
        stable = len(matching.enumerate_stable_brute(instance))
        count = len(matching.downsets(poset))
        row.update(stable_matchings=stable, downsets=count)
        ok &= stable == count
    small = len(poset.rotations) <= matching.MAX_ORACLE_ROTATIONS
    if small and resolution.trace is not None:
        row["oracle"] = matching.matching_depth_oracle(instance)
        ok &= row["oracle"] == height
    row["pass"] = ok
    return row


def cmd_matching_depth(config: ExperimentConfig) -> Report:
    """Rotation-poset height of stable matching instances."""
    p = config.params
    report = Report(
        config.command,
        config.echo(),
        [
            "instance",
            "n",
            "rotations",
            "height",
            "oracle",
            "stable_matchings",
            "downsets",
            "trace",
            "layers",
            "edges",
            "heights",
            "pass",
        ],
    )
    if p["random"]:
        seed = config.require_seed()
        for i in range(p["random"]):
            rng = np.random.default_rng(derive_seed(seed, i))
            n = int(rng.integers(1, p["n"] + 1))
            report.add(_matching_row(f"random-{i}", matching.random_instance(rng, n)))
        seen = sorted({row["height"] for row in report.rows})
        missing = sorted(set(p["heights"]) - set(seen))
        if missing:
            logger.warning("random corpus never reached heights %s", missing)
        report.add(
            {
                "instance": "corpus",
                "heights": " ".join(str(h) for h in seen),
                "pass": not missing,
            }
        )
        return report
    path = Path(p["instance"]) if p["instance"] else _data("unique_stable.json")
    report.add(_matching_row(path.stem, matching.load_instance(path)))
    return report


def cmd_dtree_depth(config: ExperimentConfig) -> Report:
    """Minimum decision-tree depth of truth tables."""
    p = config.params
    report = Report(
        config.command, config.echo(), ["table", "n", "depth", "parity", "pass"]
    )
    tables: list[tuple[metacomplexity.TruthTable, bool]] = []
    if p["table"] is not None:
        if p["n"] is None:
            raise InvalidParams("--table needs --n")
        tables.append((metacomplexity.TruthTable.from_hex(p["table"], p["n"]), False))
    for n in p["parity"] or ():
        tables.append((metacomplexity.parity_table(n), True))
    if not tables:
        raise InvalidParams("dtree-depth needs --table/--n or --parity")
    for table, is_parity in tables:
        depth = metacomplexity.min_decision_tree_depth(table)
        report.add(
            {
                "table": table.to_hex(),
                "n": table.n,
                "depth": depth,
                "parity": is_parity,
                "pass": depth == table.n if is_parity else depth <= table.n,
            }
        )
    return report


def _monotone_in_budget(formula: metacomplexity.Formula, n: int) -> bool:
    verdicts = [
        metacomplexity.depth_game_decide(
            metacomplexity.DepthGameInstance(formula, n, k)
        )
        for k in range(n + 1)
    ]
    return all(a <= b for a, b in zip(verdicts, verdicts[1:], strict=False))


def cmd_qbf_depth(config: ExperimentConfig) -> Report:
    """Depth game verdicts against brute-force QBF truth."""
    p = config.params
    report = Report(
        config.command,
        config.echo(),
        ["qbf", "n", "k", "truth", "depth_game", "monotone", "pass"],
    )
    if p["random"]:
        seed = config.require_seed()
        qbfs = [
            metacomplexity.random_sigma2_qbf(
                np.random.default_rng(derive_seed(seed, i)), rounds=p["rounds"]
            )
            for i in range(p["random"])
        ]
    else:
        path = Path(p["qbf"]) if p["qbf"] else _data("exists_forall_or.json")
        qbfs = [metacomplexity.load_qbf(path)]
    for qbf in qbfs:
        instance = metacomplexity.qbf_to_depth_instance(qbf)
        truth = metacomplexity.evaluate_qbf(qbf)
        verdict = metacomplexity.depth_game_decide(instance)
        monotone = _monotone_in_budget(qbf.matrix, instance.n)
        report.add(
            {
                "qbf": str(qbf),
                "n": instance.n,
                "k": instance.k,
                "truth": truth,
                "depth_game": verdict,
                "monotone": monotone,
                "pass": truth == verdict and monotone,
            }
        )
    return report


def cmd_game_depth(config: ExperimentConfig) -> Report:
    """Strategic depth of a game tree and trembling-hand amplification."""
    p = config.params
    report = Report(
        config.command,
        config.echo(),
        [
            "tree",
            "kind",
            "strategic_depth",
            "max_p1_path_nodes",
            "interleaved",
            "p",
            "empirical",
            "bound",
            "stderr",
            "pass",
        ],
    )
    if p["random"]:
        seed = config.require_seed()
        for i in range(p["random"]):
            rng = np.random.default_rng(derive_seed(seed, i))
            tree = games.random_game_tree(rng, int(rng.integers(1, p["nodes"] + 1)))
            annotation = games.spe_annotate(tree)
            d = games.forced_vs_strategic_decomposition(tree, annotation)
            report.add(
                {
                    "tree": f"random-{i}",
                    "kind": "spe-check",
                    "strategic_depth": d.strategic_depth,
                    "max_p1_path_nodes": d.max_p1_path_nodes,
                    "interleaved": d.interleaved,
                    "pass": annotation == games.spe_outcomes_brute(tree),
                }
            )
        return report

    path = Path(p["tree"]) if p["tree"] else _data("tied_chain_game.json")
    tree = games.load_game(path)
    d = games.forced_vs_strategic_decomposition(tree)
    report.add(
        {
            "tree": path.stem,
            "kind": "decomposition",
            "strategic_depth": d.strategic_depth,
            "max_p1_path_nodes": d.max_p1_path_nodes,
            "interleaved": d.interleaved,
        }
    )
    if p["p"]:
        seed = config.require_seed()
        for i, prob in enumerate(p["p"]):
            result = games.simulate_trembling(
                tree,
                prob,
                config.trials or 1,
                derive_seed(seed, i),
                threads=config.threads,
            )
            report.add(
                {
                    "tree": path.stem,
                    "kind": "trembling",
                    "strategic_depth": result.path_depth,
                    "p": prob,
                    "empirical": result.frequency,
                    "bound": result.expected,
                    "stderr": result.stderr,
                    "pass": result.within_3_sigma,
                }
            )
    return report


def cmd_distsim(config: ExperimentConfig) -> Report:
    """Asynchronous resolvability and sync-point counts of scenarios."""
    p = config.params
    report = Report(
        config.command,
        config.echo(),
        [
            "scenario",
            "barriers",
            "resolvable",
            "strategies_tried",
            "witnesses",
            "witnesses_replayed",
            "min_sync_points",
            "online_depth",
            "pass",
        ],
    )
    sources = p["scenario"] or list(distsim.SCENARIOS)
    for source in sources:
        scenario = distsim.load_scenario(source)
        if p["barriers"] is None:
            sync = distsim.sync_report(scenario)
            report.add(
                {
                    "scenario": scenario.name,
                    "min_sync_points": _depth(sync.min_sync_points),
                    "online_depth": _depth(sync.online_depth),
                    "pass": sync.within_depth,
                }
            )
            continue
        fenced = scenario.with_barriers(p["barriers"])
        check = distsim.exhaustive_async_check(fenced)
        replayed = all(
            not distsim.replay_witness(fenced, w).succeeded for w in check.witnesses
        )
        report.add(
            {
                "scenario": scenario.name,
                "barriers": p["barriers"],
                "resolvable": check.resolvable,
                "strategies_tried": check.strategies_tried,
                "witnesses": len(check.witnesses),
                "witnesses_replayed": replayed,
                "pass": replayed,
            }
        )
    return report


COMMANDS: dict[str, Callable[[ExperimentConfig], Report]] = {
    "core-oracle": cmd_core_oracle,
    "chain-separation": cmd_chain_separation,
    "chain-tradeoff": cmd_chain_tradeoff,
    "conservation": cmd_conservation,
    "matching-depth": cmd_matching_depth,
    "dtree-depth": cmd_dtree_depth,
    "qbf-depth": cmd_qbf_depth,
    "game-depth": cmd_game_depth,
    "distsim": cmd_distsim,
}

PARAMETERS: dict[str, frozenset[str]] = {
    "core-oracle": frozenset({"count", "max_size"}),
    "chain-separation": frozenset({"k", "m", "s", "dprime", "width", "policy"}),
    "chain-tradeoff": frozenset({"k", "m", "s", "dprime", "width", "bits", "guess"}),
    "conservation": frozenset({"k_max", "max_partitions"}),
    "matching-depth": frozenset({"instance", "random", "n", "heights"}),
    "dtree-depth": frozenset({"table", "n", "parity"}),
    "qbf-depth": frozenset({"qbf", "random", "rounds"}),
    "game-depth": frozenset({"tree", "p", "random", "nodes"}),
    "distsim": frozenset({"scenario", "barriers"}),
}


def run(config: ExperimentConfig) -> Report:
    """Dispatch to the subcommand and write the report when an output is set."""
    handler = COMMANDS.get(config.command)
    if handler is None:
        raise UnknownSubcommand(config.command)
    started = time.perf_counter()
    report = handler(config)
    report.seconds = time.perf_counter() - started
    logger.debug(
        "%s: %d rows in %.2fs", config.command, len(report.rows), report.seconds
    )
    if config.out is not None:
        emit(report, config.fmt, config.out)
    return report


def _add_common_args(p: argparse.ArgumentParser, *, stochastic: bool) -> None:
    """Add flags shared by every subcommand."""
    p.add_argument(
        "--format",
        choices=FORMATS,
        default="csv",
        help="Report file format (default: csv)",
    )
    p.add_argument("--out", help="Write the report to this file")
    p.add_argument(
        "--threads",
        type=int,
        default=1,
        help="Worker threads for Monte Carlo trials (default: 1)",
    )
    p.add_argument(
        "-v", "--verbose", action="store_true", help="Log at DEBUG level"
    )
    if stochastic:
        p.add_argument(
            "--seed", type=int, required=True, help="Seed for every random stream"
        )
        p.add_argument(
            "--trials",
            type=int,
            default=100_000,
            help="Monte Carlo trials per cell (default: 100000)",
        )
    else:
        p.add_argument(
            "--seed", type=int, help="Seed for randomly generated inputs"
        )


def _configure_logging(verbose: bool) -> None:
    name = os.environ.get(LOG_LEVEL_ENV, "WARNING").upper()
    level = logging.DEBUG if verbose else getattr(logging, name, logging.WARNING)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Determination depth experiments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"determination-depth {__version__}",
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    # Core
    oracle = subparsers.add_parser(
        "core-oracle", help="Offline depth against the exhaustive layering oracle"
    )
    oracle.add_argument(
        "--count", type=int, default=200, help="Random specifications (default: 200)"
    )
    oracle.add_argument(
        "--max-size",
        dest="max_size",
        type=int,
        default=MAX_ORACLE_COMMITMENTS,
        help=f"Largest commitment count (default: {MAX_ORACLE_COMMITMENTS})",
    )
    _add_common_args(oracle, stochastic=False)

    # Separation
    sep = subparsers.add_parser(
        "chain-separation", help="Depth-width separation on constraint chains"
    )
    sep.add_argument("--k", type=int, nargs="+", default=[4, 6])
    sep.add_argument("--m", type=int, default=8)
    sep.add_argument("--s", type=int, default=2)
    sep.add_argument(
        "--dprime",
        type=int,
        nargs="+",
        help="Strategy depths to run (default: 1..k)",
    )
    sep.add_argument("--width", type=int, nargs="+", default=[1, 4, 16])
    sep.add_argument(
        "--policy",
        choices=[policy.value for policy in genchain.Policy],
        default=genchain.Policy.UNIFORM_GUESS.value,
    )
    _add_common_args(sep, stochastic=True)

    # Tradeoff
    trade = subparsers.add_parser(
        "chain-tradeoff", help="Depth-width-communication tradeoff"
    )
    trade.add_argument("--k", type=int, nargs="+", default=[6])
    trade.add_argument("--m", type=int, default=8)
    trade.add_argument("--s", type=int, default=2)
    trade.add_argument("--dprime", type=int, default=5, help="Rounds (default: 5)")
    trade.add_argument("--width", type=int, default=1)
    trade.add_argument(
        "--bits",
        type=int,
        nargs="+",
        default=[0, 1, 2],
        help="Message bits per uninformed link, one row each",
    )
    trade.add_argument(
        "--guess", type=int, default=1, help="Public predecessor guess (1..m)"
    )
    _add_common_args(trade, stochastic=True)

    # Conservation
    cons = subparsers.add_parser(
        "conservation", help="Exhaustive check of the conservation lower bound"
    )
    cons.add_argument("--k-max", dest="k_max", type=int, default=8)
    cons.add_argument(
        "--max-partitions",
        dest="max_partitions",
        type=int,
        default=genchain.DEFAULT_MAX_PARTITIONS,
        help="Enumerate partitions up to this count, else count them by DP",
    )
    _add_common_args(cons, stochastic=False)

    # Matching
    mat = subparsers.add_parser(
        "matching-depth", help="Rotation-poset depth of stable matching"
    )
    mat.add_argument("--instance", help="Instance file (default: unique stable)")
    mat.add_argument(
        "--random", type=int, default=0, help="Run this many random instances"
    )
    mat.add_argument("--n", type=int, default=6, help="Largest random instance size")
    mat.add_argument(
        "--heights",
        type=int,
        nargs="+",
        default=[0, 1, 2, 3],
        help="Poset heights the random corpus must reach (default: 0 1 2 3)",
    )
    _add_common_args(mat, stochastic=False)

    # Decision trees
    dtree = subparsers.add_parser(
        "dtree-depth", help="Exact minimum decision-tree depth"
    )
    dtree.add_argument("--table", help="Truth table as hexadecimal")
    dtree.add_argument("--n", type=int, help="Number of variables of --table")
    dtree.add_argument(
        "--parity", type=int, nargs="+", help="Parity functions on these sizes"
    )
    _add_common_args(dtree, stochastic=False)

    # QBF
    qbf = subparsers.add_parser("qbf-depth", help="Depth game against QBF truth")
    qbf.add_argument("--qbf", help="QBF file (default: exists-forall or)")
    qbf.add_argument("--random", type=int, default=0, help="Random QBF count")
    qbf.add_argument("--rounds", type=int, default=2, help="Exists/forall pairs")
    _add_common_args(qbf, stochastic=False)

    # Games
    game = subparsers.add_parser(
        "game-depth", help="Strategic depth and trembling-hand amplification"
    )
    game.add_argument("--tree", help="Game tree file (default: tied chain)")
    game.add_argument(
        "--p", type=float, nargs="+", help="Tremble probabilities to simulate"
    )
    game.add_argument("--random", type=int, default=0, help="Random tree count")
    game.add_argument(
        "--nodes", type=int, default=12, help="Most internal nodes per random tree"
    )
    _add_common_args(game, stochastic=False)
    game.add_argument(
        "--trials", type=int, default=100_000, help="Trembling trials per p"
    )

    # Distributed
    dist = subparsers.add_parser(
        "distsim", help="Asynchronous impossibility and sync points"
    )
    dist.add_argument(
        "--scenario",
        nargs="+",
        help="Bundled scenario names or scenario files (default: all bundled)",
    )
    dist.add_argument(
        "--barriers",
        type=int,
        help="Check this barrier count (default: search the minimum)",
    )
    _add_common_args(dist, stochastic=False)

    return parser


def main() -> None:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args()

    if not args.command:
        parser.print_help()
        sys.exit(1)

    _configure_logging(args.verbose)

    try:
        config = ExperimentConfig.from_args(args)
        report = run(config)
        print_console_report(report)
        if config.out is not None:
            print(f"Report written to {config.out}")
        sys.exit(0 if report.passed else 1)
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        sys.exit(130)
    except (DeterminationError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
