"""Brute-force solvers for the two metacomplexity problems.

Minimum decision-tree depth is the offline problem: determination depth of
synthesising a decision tree for a given truth table. The depth game is the
online one: determiner and environment take turns fixing variables of a
formula, and the question is whether k determiner rounds suffice to force a
satisfying assignment.

Variables are numbered from 1. In a truth table, bit i-1 of an index is the
value of x_i.
"""

import enum
import functools
import itertools
import json
import logging
import re
from collections.abc import Iterator, Sequence
from pathlib import Path
from typing import Any, Literal

import attrs
import numpy as np

from .utils import DeterminationError, InvalidParams, TooLarge, read_text, require

logger = logging.getLogger(__name__)

MAX_TABLE_VARIABLES = 5
MAX_GAME_VARIABLES = 12


class TooManyVariables(TooLarge):
    def __init__(self, size: int, limit: int = MAX_TABLE_VARIABLES):
        super().__init__("truth table", size, limit)


class FormulaSyntaxError(DeterminationError, ValueError):
    """Raised when formula text cannot be parsed."""

    def __init__(self, text: str, position: int, problem: str):
        self.text = text
        self.position = position
        self.problem = problem
        super().__init__(f"Formula syntax error at {position}: {problem} in {text!r}")


class MalformedPrefix(DeterminationError, ValueError):
    """Raised when a QBF prefix does not alternate exists/forall from exists."""

    def __init__(self, prefix: Sequence[tuple[str, int]], problem: str):
        self.prefix = tuple(prefix)
        self.problem = problem
        super().__init__(f"Malformed quantifier prefix {list(self.prefix)}: {problem}")


# Truth tables and decision trees


@attrs.frozen
class TruthTable:
    n: int
    bits: tuple[int, ...] = attrs.field(converter=lambda b: tuple(int(x) for x in b))

    def __attrs_post_init__(self) -> None:
        require(self.n >= 0, "n must be non-negative", n=self.n)
        require(len(self.bits) == 2**self.n, "table needs 2**n entries", n=self.n)
        require(set(self.bits) <= {0, 1}, "table entries must be 0 or 1")

    @classmethod
    def from_hex(cls, text: str, n: int) -> "TruthTable":
        """Table whose bit j is bit j of the hexadecimal number."""
        try:
            value = int(text, 16)
        except ValueError as e:
            raise InvalidParams(f"not a hexadecimal truth table: {text!r}") from e
        size = 2**n
        if value >> size:
            raise InvalidParams("hex value has more than 2**n bits", n=n)
        return cls(n, [(value >> j) & 1 for j in range(size)])

    def to_hex(self) -> str:
        value = sum(b << j for j, b in enumerate(self.bits))
        return f"{value:x}"

    def value(self, assignment: Sequence[int]) -> int:
        """Output for an assignment listed as (x_1, ..., x_n)."""
        return self.bits[sum(int(b) << i for i, b in enumerate(assignment))]

    def permuted(self, perm: Sequence[int]) -> "TruthTable":
        """Table g with g(y) = f(x) where x_(perm[i]+1) = y_(i+1)."""
        require(sorted(perm) == list(range(self.n)), "perm must permute the variables")
        bits = []
        for index in range(2**self.n):
            source = 0
            for i, p in enumerate(perm):
                source |= ((index >> i) & 1) << p
            bits.append(self.bits[source])
        return TruthTable(self.n, bits)

    def as_array(self) -> np.ndarray:
        """Table as an n-dimensional array; axis i holds x_(n-i)."""
        return np.asarray(self.bits, dtype=np.int8).reshape((2,) * self.n)


def parity_table(n: int) -> TruthTable:
    return TruthTable(n, [bin(i).count("1") % 2 for i in range(2**n)])


@attrs.frozen
class Leaf:
    value: int


@attrs.frozen
class Test:
    variable: int
    low: "DecisionTree"
    high: "DecisionTree"


DecisionTree = Leaf | Test


def tree_depth(tree: DecisionTree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(tree_depth(tree.low), tree_depth(tree.high))


def evaluate_tree(tree: DecisionTree, assignment: Sequence[int]) -> int:
    while isinstance(tree, Test):
        tree = tree.high if assignment[tree.variable - 1] else tree.low
    return tree.value


def optimal_decision_tree(table: TruthTable) -> DecisionTree:
    """A decision tree of minimum depth, found by memoised search over restrictions."""
    if table.n > MAX_TABLE_VARIABLES:
        raise TooManyVariables(table.n)
    memo: dict[tuple[tuple[int, ...], bytes], DecisionTree] = {}

    def best(variables: tuple[int, ...], sub: np.ndarray) -> DecisionTree:
        if sub.min() == sub.max():
            return Leaf(int(sub.flat[0]))
        key = (variables, sub.tobytes())
        if key in memo:
            return memo[key]
        found: DecisionTree | None = None
        for axis, variable in enumerate(variables):
            rest = variables[:axis] + variables[axis + 1 :]
            low = best(rest, np.take(sub, 0, axis=axis))
            high = best(rest, np.take(sub, 1, axis=axis))
            candidate = Test(variable, low, high)
            if found is None or tree_depth(candidate) < tree_depth(found):
                found = candidate
        assert found is not None
        memo[key] = found
        return found

    variables = tuple(range(table.n, 0, -1))
    tree = best(variables, table.as_array())
    logger.debug("decision tree search: %d memoised restrictions", len(memo))
    return tree


def min_decision_tree_depth(table: TruthTable) -> int:
    """Exact minimum depth of a decision tree computing the table."""
    return tree_depth(optimal_decision_tree(table))


# Formulas


@attrs.frozen
class Const:
    value: bool


@attrs.frozen
class Var:
    index: int


@attrs.frozen
class Not:
    arg: "Formula"


@attrs.frozen
class And:
    args: tuple["Formula", ...]


@attrs.frozen
class Or:
    args: tuple["Formula", ...]


Formula = Const | Var | Not | And | Or

_TOKEN = re.compile(r"\s*(\(|\)|[A-Za-z_][A-Za-z0-9_]*)")


def _tokens(text: str) -> Iterator[tuple[int, str]]:
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            return
        match = _TOKEN.match(text, pos)
        if not match:
            raise FormulaSyntaxError(text, pos, "unexpected character")
        yield match.start(1), match.group(1)
        pos = match.end()


def parse_formula(text: str) -> Formula:
    """Parse prefix notation such as ``(or x1 (not x2))``.

    Atoms are ``x<i>``, ``true`` and ``false``; operators are ``and``,
    ``or`` and ``not``.
    """
    tokens = list(_tokens(text))
    if not tokens:
        raise FormulaSyntaxError(text, 0, "empty formula")

    def parse(i: int) -> tuple[Formula, int]:
        if i >= len(tokens):
            raise FormulaSyntaxError(text, len(text), "unexpected end")
        pos, tok = tokens[i]
        if tok == ")":
            raise FormulaSyntaxError(text, pos, "unexpected ')'")
        if tok != "(":
            return _atom(text, pos, tok), i + 1
        if i + 1 >= len(tokens):
            raise FormulaSyntaxError(text, pos, "unclosed '('")
        op_pos, op = tokens[i + 1]
        args: list[Formula] = []
        j = i + 2
        while j < len(tokens) and tokens[j][1] != ")":
            arg, j = parse(j)
            args.append(arg)
        if j >= len(tokens):
            raise FormulaSyntaxError(text, pos, "unclosed '('")
        if op == "not":
            if len(args) != 1:
                raise FormulaSyntaxError(text, op_pos, "not takes one argument")
            return Not(args[0]), j + 1
        if op in ("and", "or"):
            if not args:
                raise FormulaSyntaxError(text, op_pos, f"{op} needs arguments")
            node = And(tuple(args)) if op == "and" else Or(tuple(args))
            return node, j + 1
        raise FormulaSyntaxError(text, op_pos, f"unknown operator {op!r}")

    formula, end = parse(0)
    if end != len(tokens):
        raise FormulaSyntaxError(text, tokens[end][0], "trailing input")
    return formula


def _atom(text: str, pos: int, tok: str) -> Formula:
    if tok == "true":
        return Const(True)
    if tok == "false":
        return Const(False)
    match = re.fullmatch(r"x([1-9][0-9]*)", tok)
    if not match:
        raise FormulaSyntaxError(text, pos, f"unknown atom {tok!r}")
    return Var(int(match.group(1)))


def format_formula(formula: Formula) -> str:
    match formula:
        case Const(value=v):
            return "true" if v else "false"
        case Var(index=i):
            return f"x{i}"
        case Not(arg=a):
            return f"(not {format_formula(a)})"
        case And(args=args):
            return "(and " + " ".join(format_formula(a) for a in args) + ")"
        case Or(args=args):
            return "(or " + " ".join(format_formula(a) for a in args) + ")"
    raise TypeError(formula)


def variables(formula: Formula) -> frozenset[int]:
    match formula:
        case Var(index=i):
            return frozenset({i})
        case Not(arg=a):
            return variables(a)
        case And(args=args) | Or(args=args):
            return frozenset().union(*(variables(a) for a in args))
    return frozenset()


def evaluate(formula: Formula, assignment: Any) -> Any:
    """Evaluate on one assignment, or elementwise on numpy boolean columns.

    ``assignment[i - 1]`` holds the value of x_i.
    """
    match formula:
        case Const(value=v):
            return v
        case Var(index=i):
            return assignment[i - 1]
        case Not(arg=a):
            inner = evaluate(a, assignment)
            return np.logical_not(inner) if _is_array(assignment) else not inner
        case And(args=args):
            values = (evaluate(a, assignment) for a in args)
            return functools.reduce(lambda x, y: x & y, values)
        case Or(args=args):
            values = (evaluate(a, assignment) for a in args)
            return functools.reduce(lambda x, y: x | y, values)
    raise TypeError(formula)


def _is_array(assignment: Any) -> bool:
    return isinstance(assignment, np.ndarray)


def satisfying_table(formula: Formula, n: int) -> np.ndarray:
    """Truth value of the formula for every assignment index below 2**n."""
    index = np.arange(2**n)
    columns = ((index[None, :] >> np.arange(n)[:, None]) & 1).astype(bool)
    value = evaluate(formula, columns)
    return np.broadcast_to(np.asarray(value, dtype=bool), index.shape).copy()


# Depth game


class Role(enum.Enum):
    DETERMINER = "D"
    ENVIRONMENT = "E"


@attrs.frozen
class DepthGameInstance:
    """Depth game over x_1..x_n with a determiner budget of k rounds.

    ``variable_order`` pins which variable each round fixes and ``schedule``
    pins who controls each round; when unset, the controller picks the
    variable and the schedule is searched.
    """

    formula: Formula
    n: int
    k: int
    variable_order: tuple[int, ...] | None = attrs.field(
        default=None, converter=attrs.converters.optional(tuple)
    )
    schedule: tuple[Role, ...] | None = attrs.field(
        default=None, converter=attrs.converters.optional(tuple)
    )

    def __attrs_post_init__(self) -> None:
        require(0 <= self.k <= self.n, "budget must lie in [0, n]", k=self.k, n=self.n)
        unknown = variables(self.formula) - set(range(1, self.n + 1))
        require(
            not unknown,
            "formula references undeclared variables",
            unknown=sorted(unknown),
        )
        if self.variable_order is not None:
            require(
                sorted(self.variable_order) == list(range(1, self.n + 1)),
                "variable_order must list every variable once",
            )
        if self.schedule is not None:
            require(len(self.schedule) == self.n, "schedule needs one role per round")
            require(
                sum(r is Role.DETERMINER for r in self.schedule) == self.k,
                "schedule must give the determiner k rounds",
            )


GameMode = Literal["adaptive", "upfront"]


def _schedules(n: int, k: int) -> Iterator[tuple[Role, ...]]:
    for rounds in itertools.combinations(range(n), k):
        chosen = set(rounds)
        yield tuple(
            Role.DETERMINER if r in chosen else Role.ENVIRONMENT for r in range(n)
        )


def depth_game_decide(instance: DepthGameInstance, mode: GameMode = "adaptive") -> bool:
    """Whether the determiner can force a satisfying assignment with k rounds.

    In adaptive mode the determiner decides at each round whether to spend
    budget on it, so the schedule may depend on earlier moves. In upfront
    mode a schedule with exactly k determiner rounds is fixed before play.
    A pinned schedule on the instance overrides both.
    """
    n, k = instance.n, instance.k
    if n > MAX_GAME_VARIABLES:
        raise TooLarge("depth game", n, MAX_GAME_VARIABLES)
    if mode not in ("adaptive", "upfront"):
        raise InvalidParams("mode must be adaptive or upfront", mode=mode)
    sat = satisfying_table(instance.formula, n)
    order = instance.variable_order

    def moves(mask: int, depth: int) -> list[tuple[int, int]]:
        if order:
            free = [order[depth] - 1]
        else:
            free = [v for v in range(n) if not mask >> v & 1]
        return [(v, b) for v in free for b in (0, 1)]

    def play(schedule: tuple[Role, ...] | None) -> bool:
        @functools.cache
        def value(mask: int, values: int, budget: int) -> bool:
            depth = mask.bit_count()
            if depth == n:
                return bool(sat[values])
            if schedule is not None:
                roles = [schedule[depth]]
            else:
                roles = []
                if budget > 0:
                    roles.append(Role.DETERMINER)
                if n - depth > budget:
                    roles.append(Role.ENVIRONMENT)
            for role in roles:
                spend = 1 if role is Role.DETERMINER else 0
                outcomes = (
                    value(mask | 1 << v, values | b << v, budget - spend)
                    for v, b in moves(mask, depth)
                )
                won = any(outcomes) if role is Role.DETERMINER else all(outcomes)
                if won:
                    return True
            return False

        result = value(0, 0, k)
        logger.debug("depth game: %d states", value.cache_info().currsize)
        return result

    if instance.schedule is not None:
        return play(instance.schedule)
    if mode == "upfront":
        return any(play(s) for s in _schedules(n, k))
    return play(None)


# QBF


@attrs.frozen
class Qbf:
    """Prenex QBF; ``prefix`` lists (quantifier, variable) with quantifier E or A."""

    prefix: tuple[tuple[str, int], ...] = attrs.field(
        converter=lambda p: tuple((str(q), int(v)) for q, v in p)
    )
    matrix: Formula

    def __attrs_post_init__(self) -> None:
        bound = [v for _, v in self.prefix]
        require(len(set(bound)) == len(bound), "a variable is quantified twice")
        require(all(q in ("E", "A") for q, _ in self.prefix), "quantifiers are E or A")
        free = variables(self.matrix) - set(bound)
        require(not free, "matrix has free variables", free=sorted(free))

    def __str__(self) -> str:
        head = "".join(f"{'∃' if q == 'E' else '∀'}x{v}" for q, v in self.prefix)
        return f"{head}.{format_formula(self.matrix)}"


def evaluate_qbf(qbf: Qbf) -> bool:
    """Truth value by expanding every quantifier."""
    assignment: dict[int, bool] = {}
    size = max((v for _, v in qbf.prefix), default=0)

    def go(i: int) -> bool:
        if i == len(qbf.prefix):
            values = [assignment.get(v, False) for v in range(1, size + 1)]
            return bool(evaluate(qbf.matrix, values))
        quantifier, v = qbf.prefix[i]
        results = []
        for b in (False, True):
            assignment[v] = b
            results.append(go(i + 1))
        del assignment[v]
        return any(results) if quantifier == "E" else all(results)

    return go(0)


def qbf_to_depth_instance(qbf: Qbf) -> DepthGameInstance:
    """Depth game with the QBF's variable order and an alternating schedule.

    The prefix must alternate E, A starting with E; it may end on either
    quantifier. Existential variables become determiner rounds.
    """
    prefix = qbf.prefix
    if not prefix:
        raise MalformedPrefix(prefix, "empty prefix")
    for i, (quantifier, _) in enumerate(prefix):
        expected = "E" if i % 2 == 0 else "A"
        if quantifier != expected:
            raise MalformedPrefix(prefix, f"position {i} should be {expected}")
    bound = sorted(v for _, v in prefix)
    if bound != list(range(1, len(prefix) + 1)):
        raise MalformedPrefix(prefix, "variables must be x1..xn")
    schedule = tuple(
        Role.DETERMINER if q == "E" else Role.ENVIRONMENT for q, _ in prefix
    )
    return DepthGameInstance(
        qbf.matrix,
        n=len(prefix),
        k=sum(q == "E" for q, _ in prefix),
        variable_order=tuple(v for _, v in prefix),
        schedule=schedule,
    )


def random_formula(
    rng: np.random.Generator, n: int, clauses: int = 3, width: int = 2
) -> Formula:
    """Random DNF over x_1..x_n with literal negations chosen at random."""
    terms = []
    for _ in range(clauses):
        picks = rng.choice(n, size=min(width, n), replace=False)
        literals: list[Formula] = []
        for v in sorted(int(p) + 1 for p in picks):
            literals.append(Not(Var(v)) if rng.random() < 0.5 else Var(v))
        terms.append(And(tuple(literals)))
    return Or(tuple(terms))


def random_sigma2_qbf(rng: np.random.Generator, rounds: int = 2) -> Qbf:
    """Random QBF over x1..x(2*rounds) with alternating exists/forall pairs."""
    require(rounds >= 1, "need at least one round", rounds=rounds)
    n = 2 * rounds
    prefix = [("E" if i % 2 == 0 else "A", i + 1) for i in range(n)]
    return Qbf(prefix, random_formula(rng, n, clauses=int(rng.integers(2, 5))))


def parse_qbf(document: Any) -> Qbf:
    """QBF from {"prefix": [["E", 1], ...], "matrix": "<prefix formula>"}."""
    if not isinstance(document, dict) or set(document) != {"prefix", "matrix"}:
        raise InvalidParams("QBF document needs exactly prefix and matrix")
    return Qbf(document["prefix"], parse_formula(document["matrix"]))


def load_qbf(path: Path | str) -> Qbf:
    try:
        document = json.loads(read_text(path))
    except json.JSONDecodeError as e:
        raise InvalidParams(f"QBF file is not valid JSON: {e}") from e
    return parse_qbf(document)
