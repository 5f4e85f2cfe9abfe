"""Expression trees for multigene genetic programming.

A gene is an immutable binary tree whose leaves index input features and
whose internal nodes apply a function from a :class:`FunctionSet`.  Trees
are plain frozen dataclasses, so structural equality and hashing come for
free and subtrees can be shared between genes without copying.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

__all__ = [
    "Leaf",
    "Op",
    "Node",
    "FunctionSet",
    "ParseError",
    "parse_sexpr",
    "print_sexpr",
    "eval_tree",
    "tree_metrics",
    "node_count",
    "depth",
    "expressional_complexity",
    "random_tree",
    "variables",
    "nodes_with_depth",
    "replace_node",
]


def _protected_div(a, b):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(b) > 1e-3, np.divide(a, b), 1.0)


OPERATORS = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": _protected_div,
}


@dataclass(frozen=True)
class Leaf:
    """Terminal node reading the feature at 0-based ``index``."""

    index: int

    size = 1
    depth = 1
    complexity = 1


@dataclass(frozen=True)
class Op:
    """Binary function node.

    ``size``, ``depth`` and ``complexity`` are computed once at construction
    and excluded from equality and hashing.
    """

    symbol: str
    left: "Node"
    right: "Node"
    size: int = field(init=False, compare=False, repr=False)
    depth: int = field(init=False, compare=False, repr=False)
    complexity: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        size = 1 + self.left.size + self.right.size
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "depth", 1 + max(self.left.depth, self.right.depth))
        object.__setattr__(
            self, "complexity", size + self.left.complexity + self.right.complexity
        )


Node = Union[Leaf, Op]


@dataclass(frozen=True)
class FunctionSet:
    """Ordered collection of binary function symbols.

    Defaults to addition and subtraction only, which keeps every gene a
    linear combination of its inputs.
    """

    ops: tuple = ("+", "-")

    def __post_init__(self):
        ops = tuple(self.ops)
        if not ops:
            raise ValueError("function set must not be empty")
        if len(set(ops)) != len(ops):
            raise ValueError(f"duplicate symbols in function set {ops}")
        unknown = [s for s in ops if s not in OPERATORS]
        if unknown:
            raise ValueError(f"unknown function symbols {unknown}; known: {list(OPERATORS)}")
        object.__setattr__(self, "ops", ops)

    @classmethod
    def parse(cls, text: str) -> "FunctionSet":
        """Build from a comma separated list such as ``"+,-,*"``."""
        return cls(tuple(s.strip() for s in text.split(",") if s.strip()))

    def __contains__(self, symbol):
        return symbol in self.ops

    def __len__(self):
        return len(self.ops)


# ---------------------------------------------------------------------------
# Serialization


class ParseError(ValueError):
    """Malformed s-expression; ``position`` is the character offset."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
_POSITIONAL = re.compile(r"x([0-9]+)\Z")


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.end() == pos:
            break
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), start))
        pos = m.end()
    if text[pos:].strip():
        raise ParseError("unexpected trailing input", pos)
    return tokens


def parse_sexpr(text: str, schema: Sequence[str] | int, function_set: FunctionSet | None = None) -> Node:
    """Parse a prefix s-expression into a tree.

    Parameters
    ----------
    text : str
        Expression such as ``"(+ x1 (- x2 x3))"``.
    schema : sequence of str or int
        Feature names (or just the feature count).  Variables are written
        either positionally as ``x<k>`` (1-based) or by feature name.  The
        positional form takes precedence when a token matches both.
    function_set : FunctionSet, optional
        When given, operators outside this set are rejected.

    Raises
    ------
    ParseError
        On syntax errors, unknown variables or functions, and arity mismatch.
    """
    if isinstance(schema, int):
        n_features, names = schema, {}
    else:
        n_features = len(schema)
        names = {name: i for i, name in enumerate(schema)}
    allowed = OPERATORS if function_set is None else function_set.ops

    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression", 0)
    pos = 0

    def leaf(tok, at):
        m = _POSITIONAL.match(tok)
        if m:
            k = int(m.group(1))
            if 1 <= k <= n_features:
                return Leaf(k - 1)
            if tok not in names:
                raise ParseError(f"variable {tok!r} out of range 1..{n_features}", at)
        if tok in names:
            return Leaf(names[tok])
        raise ParseError(f"unknown variable {tok!r}", at)

    def expr():
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", len(text))
        tok, at = tokens[pos]
        pos += 1
        if tok == ")":
            raise ParseError("unexpected ')'", at)
        if tok != "(":
            return leaf(tok, at)
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", len(text))
        sym, sym_at = tokens[pos]
        if sym in "()":
            raise ParseError("expected function symbol", sym_at)
        if sym not in OPERATORS or sym not in allowed:
            raise ParseError(f"unknown function symbol {sym!r}", sym_at)
        pos += 1
        args = []
        while pos < len(tokens) and tokens[pos][0] != ")":
            args.append(expr())
        if pos >= len(tokens):
            raise ParseError("missing ')'", len(text))
        pos += 1
        if len(args) != 2:
            raise ParseError(f"{sym!r} takes 2 arguments, got {len(args)}", at)
        return Op(sym, args[0], args[1])

    tree = expr()
    if pos != len(tokens):
        raise ParseError("unexpected trailing input", tokens[pos][1])
    return tree


def print_sexpr(tree: Node, schema: Sequence[str] | None = None) -> str:
    """Render ``tree`` in canonical prefix form.

    Variables are printed positionally (``x1``, ``x2``, ...) unless feature
    names are supplied through ``schema``.
    """
    if isinstance(tree, Leaf):
        return schema[tree.index] if schema is not None else f"x{tree.index + 1}"
    return f"({tree.symbol} {print_sexpr(tree.left, schema)} {print_sexpr(tree.right, schema)})"


# ---------------------------------------------------------------------------
# Evaluation and metrics


def _columns(data):
    X = getattr(data, "X", data)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("expected a 2-D samples x features matrix")
    return X


def _eval(tree, X):
    if isinstance(tree, Leaf):
        return X[:, tree.index]
    return OPERATORS[tree.symbol](_eval(tree.left, X), _eval(tree.right, X))


def eval_tree(tree: Node, data) -> np.ndarray:
    """Evaluate ``tree`` on every sample of ``data``.

    ``data`` is a :class:`~mogpfusion.dataset.Dataset` or a 2-D array of
    shape ``(n_samples, n_features)``.  Returns a new float vector of length
    ``n_samples``.
    """
    X = _columns(data)
    bad = [i for i in variables(tree) if i >= X.shape[1]]
    if bad:
        raise IndexError(f"tree references feature index {max(bad)} but data has {X.shape[1]} features")
    with np.errstate(over="ignore", invalid="ignore"):
        out = _eval(tree, X)
    return np.array(out, dtype=float, copy=True)


def node_count(tree: Node) -> int:
    return tree.size


def depth(tree: Node) -> int:
    """Longest root-to-leaf path counted in nodes; a lone leaf has depth 1."""
    return tree.depth


def expressional_complexity(tree: Node) -> int:
    """Sum over every node of the size of the subtree rooted there."""
    return tree.complexity


def tree_metrics(tree: Node) -> dict:
    return {
        "node_count": tree.size,
        "depth": tree.depth,
        "expressional_complexity": tree.complexity,
    }


def variables(tree: Node) -> set:
    """Set of 0-based feature indices referenced by ``tree``."""
    out = set()
    stack = [tree]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            out.add(node.index)
        else:
            stack.append(node.left)
            stack.append(node.right)
    return out


def nodes_with_depth(tree: Node) -> list:
    """Pre-order list of ``(node, depth)`` pairs, root at depth 1."""
    out = []
    stack = [(tree, 1)]
    while stack:
        node, d = stack.pop()
        out.append((node, d))
        if isinstance(node, Op):
            stack.append((node.right, d + 1))
            stack.append((node.left, d + 1))
    return out


def replace_node(tree: Node, position: int, new: Node) -> Node:
    """Return a copy of ``tree`` with its pre-order node ``position`` replaced."""
    if position == 0:
        return new
    if not isinstance(tree, Op):
        raise IndexError("node position out of range")
    left_size = tree.left.size
    if position <= left_size:
        return Op(tree.symbol, replace_node(tree.left, position - 1, new), tree.right)
    if position <= left_size + tree.right.size:
        return Op(tree.symbol, tree.left, replace_node(tree.right, position - 1 - left_size, new))
    raise IndexError("node position out of range")


def random_tree(rng: np.random.Generator, schema, function_set: FunctionSet | None = None,
                max_depth: int = 5, method: str = "grow") -> Node:
    """Generate a random tree of depth at most ``max_depth``.

    ``method="full"`` places every leaf at exactly ``max_depth``.  With
    ``"grow"`` each node below the depth limit is a function with probability
    ``n_functions / (n_functions + n_features)``, otherwise a terminal.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if method not in ("grow", "full"):
        raise ValueError(f"method must be 'grow' or 'full', not {method!r}")
    n_features = schema if isinstance(schema, int) else len(schema)
    if n_features < 1:
        raise ValueError("schema has no features")
    ops = (function_set or FunctionSet()).ops
    p_function = len(ops) / (len(ops) + n_features)

    def build(d):
        if d < max_depth and (method == "full" or rng.random() < p_function):
            sym = ops[rng.integers(len(ops))]
            left = build(d + 1)
            right = build(d + 1)
            return Op(sym, left, right)
        return Leaf(int(rng.integers(n_features)))

    return build(1)
