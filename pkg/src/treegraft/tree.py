"""Decision tree structure, classification and text serialization.

Trees are immutable: post-processing builds new trees that share unchanged
subtrees.  Continuous tests send ``value <= threshold`` down the low
branch.  An example with a missing test value descends every branch,
carrying weight proportional to the training mass stored in each subtree's
leaf distributions; the predicted label is the class with the greatest
summed leaf weight (ties broken by class declaration order).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Union

import numpy as np

from .dataset import Columns, DataError, Dataset, Example, Schema


@dataclass(frozen=True, eq=False)
class Leaf:
    label: int  # class code
    dist: np.ndarray  # per-class training weight; all zero for grafted leaves
    grafted: bool = False
    mass: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "mass", float(self.dist.sum()))


@dataclass(frozen=True, eq=False)
class ContinuousTest:
    attr: int
    threshold: float
    low: "Node"  # <= branch
    high: "Node"  # > branch
    mass: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "mass", self.low.mass + self.high.mass)


@dataclass(frozen=True, eq=False)
class DiscreteTest:
    attr: int
    children: tuple["Node", ...]  # one per declared value, in declaration order
    mass: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "mass", float(sum(c.mass for c in self.children)))


Node = Union[Leaf, ContinuousTest, DiscreteTest]


@dataclass(frozen=True, eq=False)
class DecisionTree:
    root: Node
    schema: Schema


def node_count(tree: DecisionTree | Node) -> int:
    """Number of nodes, internal and leaf."""
    node = tree.root if isinstance(tree, DecisionTree) else tree
    if isinstance(node, Leaf):
        return 1
    if isinstance(node, ContinuousTest):
        return 1 + node_count(node.low) + node_count(node.high)
    return 1 + sum(node_count(c) for c in node.children)


def iter_leaves(node: Node) -> Iterator[Leaf]:
    """Leaves in left-to-right tree order."""
    if isinstance(node, Leaf):
        yield node
    elif isinstance(node, ContinuousTest):
        yield from iter_leaves(node.low)
        yield from iter_leaves(node.high)
    else:
        for child in node.children:
            yield from iter_leaves(child)


def _branch_shares(children: tuple[Node, ...]) -> list[float]:
    total = sum(c.mass for c in children)
    if total > 0.0:
        return [c.mass / total for c in children]
    return [1.0 / len(children)] * len(children)


# ---------------------------------------------------------------------------
# Classification


def _validate_example(example: Example, schema: Schema) -> None:
    if len(example.values) != len(schema.inputs):
        raise DataError(
            f"example has {len(example.values)} values, schema expects {len(schema.inputs)}"
        )
    for spec in schema.inputs:
        v = example.values[spec.position]
        if v is None:
            continue
        if spec.is_continuous:
            if not isinstance(v, (int, float)):
                raise DataError(f"attribute {spec.name!r} expects a number, got {v!r}")
        elif v not in spec.values:
            raise DataError(f"undeclared value {v!r} for attribute {spec.name!r}")


def class_weights(tree: DecisionTree, example: Example) -> np.ndarray:
    """Per-class routed leaf weight for one example; sums to 1."""
    _validate_example(example, tree.schema)
    out = np.zeros(tree.schema.n_classes)

    def descend(node: Node, weight: float) -> None:
        if weight == 0.0:
            return
        if isinstance(node, Leaf):
            out[node.label] += weight
            return
        v = example.values[node.attr]
        if isinstance(node, ContinuousTest):
            if v is not None:
                descend(node.low if v <= node.threshold else node.high, weight)
            else:
                shares = _branch_shares((node.low, node.high))
                descend(node.low, weight * shares[0])
                descend(node.high, weight * shares[1])
        else:
            if v is not None:
                code = tree.schema.value_code(node.attr, v)
                descend(node.children[code], weight)
            else:
                for child, share in zip(node.children, _branch_shares(node.children)):
                    descend(child, weight * share)

    descend(tree.root, 1.0)
    return out


def classify(tree: DecisionTree, example: Example) -> str:
    """Predicted class label for one example."""
    scores = class_weights(tree, example)
    return tree.schema.class_labels[int(np.argmax(scores))]


def split_cases(
    node: ContinuousTest | DiscreteTest, cols: Columns, idx: np.ndarray, w: np.ndarray
) -> list[tuple[Node, np.ndarray, np.ndarray]]:
    """Distribute weighted cases over a node's branches.

    Cases with the test value missing descend every branch with weight
    scaled by the branch's share of the subtree training mass (equal shares
    when no branch carries mass).  ``idx`` stays ascending so downstream
    tie-breaking can rely on training-data order.
    """
    if isinstance(node, ContinuousTest):
        vals = cols.cont[node.attr][idx]
        known = ~np.isnan(vals)
        missing = ~known
        pairs = [
            (node.low, known & (vals <= node.threshold)),
            (node.high, known & (vals > node.threshold)),
        ]
        shares = _branch_shares((node.low, node.high))
    else:
        codes = cols.disc[node.attr][idx]
        missing = codes < 0
        pairs = [(child, codes == code) for code, child in enumerate(node.children)]
        shares = _branch_shares(node.children)
    any_missing = bool(missing.any())
    out = []
    for (child, member), share in zip(pairs, shares):
        if any_missing and share > 0.0:
            mask = member | missing
            cw = np.where(missing, w * share, w)[mask]
        else:
            mask = member
            cw = w[mask]
        out.append((child, idx[mask], cw))
    return out


def route_cases(
    node: Node,
    cols: Columns,
    idx: np.ndarray,
    w: np.ndarray,
    visit: Callable[[Leaf, np.ndarray, np.ndarray], None],
) -> None:
    """Route weighted cases down the tree, calling ``visit`` at every leaf."""
    if len(idx) == 0:
        return
    if isinstance(node, Leaf):
        visit(node, idx, w)
        return
    for child, child_idx, child_w in split_cases(node, cols, idx, w):
        route_cases(child, cols, child_idx, child_w, visit)


def class_scores_batch(
    tree: DecisionTree, dataset: Dataset, indices: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Routed per-class weights for many examples at once.

    Returns ``(indices, scores)`` with ``scores[i]`` the class-weight row for
    ``dataset.examples[indices[i]]``.
    """
    cols = dataset.columns()
    if indices is None:
        indices = np.arange(len(dataset))
    else:
        indices = np.asarray(indices, dtype=np.int64)
    scores = np.zeros((len(dataset), tree.schema.n_classes))

    def visit(leaf: Leaf, idx: np.ndarray, w: np.ndarray) -> None:
        scores[idx, leaf.label] += w

    route_cases(tree.root, cols, indices, cols.weights[indices].copy(), visit)
    return indices, scores[indices]


def classify_batch(
    tree: DecisionTree, dataset: Dataset, indices: np.ndarray | None = None
) -> np.ndarray:
    """Predicted class codes for the selected examples."""
    _, scores = class_scores_batch(tree, dataset, indices)
    return np.argmax(scores, axis=1)


# ---------------------------------------------------------------------------
# Ancestor-derived value bounds


class PathBounds:
    """Per-attribute value interval implied by ancestor cuts.

    The lower limit is exclusive (set by > branches), the upper limit
    inclusive (set by <= branches); unconstrained attributes span
    (-inf, +inf).
    """

    def __init__(self, lower: dict[int, float] | None = None, upper: dict[int, float] | None = None):
        self._lower = dict(lower or {})
        self._upper = dict(upper or {})

    def lower(self, attr: int) -> float:
        return self._lower.get(attr, -np.inf)

    def upper(self, attr: int) -> float:
        return self._upper.get(attr, np.inf)

    def narrow_upper(self, attr: int, value: float) -> "PathBounds":
        upper = dict(self._upper)
        upper[attr] = min(upper.get(attr, np.inf), value)
        return PathBounds(self._lower, upper)

    def narrow_lower(self, attr: int, value: float) -> "PathBounds":
        lower = dict(self._lower)
        lower[attr] = max(lower.get(attr, -np.inf), value)
        return PathBounds(lower, self._upper)

    def interval(self, attr: int) -> tuple[float, float]:
        return self.lower(attr), self.upper(attr)


def find_path(tree: DecisionTree, target: Node) -> list[Node]:
    """Root-to-target node sequence (inclusive); identity-based lookup."""

    def search(node: Node, acc: list[Node]) -> list[Node] | None:
        acc.append(node)
        if node is target:
            return acc
        if isinstance(node, ContinuousTest):
            children = (node.low, node.high)
        elif isinstance(node, DiscreteTest):
            children = node.children
        else:
            children = ()
        for child in children:
            found = search(child, acc)
            if found is not None:
                return found
        acc.pop()
        return None

    path = search(tree.root, [])
    if path is None:
        raise ValueError("node does not belong to this tree")
    return path


def bounds(tree: DecisionTree, leaf: Node) -> PathBounds:
    """Fold the cuts on the root-to-leaf path into per-attribute intervals."""
    path = find_path(tree, leaf)
    pb = PathBounds()
    for parent, child in zip(path, path[1:]):
        if isinstance(parent, ContinuousTest):
            if child is parent.low:
                pb = pb.narrow_upper(parent.attr, parent.threshold)
            else:
                pb = pb.narrow_lower(parent.attr, parent.threshold)
    return pb


# ---------------------------------------------------------------------------
# Serialization

_RESERVED_CHARS = set(" \t,=")


def _check_serializable_name(name: str) -> None:
    if any(ch in _RESERVED_CHARS for ch in name):
        raise ValueError(
            f"name {name!r} contains whitespace/','/'=' and cannot appear in tree text"
        )


def serialize(tree: DecisionTree) -> str:
    """Render a tree as indented UTF-8 text; two spaces encode one depth level."""
    schema = tree.schema
    for spec in schema.attributes:
        _check_serializable_name(spec.name)
        for v in spec.values:
            _check_serializable_name(v)
    lines: list[str] = []

    def emit(node: Node, depth: int) -> None:
        pad = "  " * depth
        if isinstance(node, Leaf):
            parts = ["leaf", schema.class_labels[node.label]]
            items = [
                f"{cls}={float(weight)!r}"
                for cls, weight in zip(schema.class_labels, node.dist)
                if weight != 0.0
            ]
            if items:
                parts.append(",".join(items))
            if node.grafted:
                parts.append("grafted")
            lines.append(pad + " ".join(parts))
        elif isinstance(node, ContinuousTest):
            lines.append(
                pad + f"test {schema.attributes[node.attr].name} <= {float(node.threshold)!r}"
            )
            emit(node.low, depth + 1)
            emit(node.high, depth + 1)
        else:
            lines.append(pad + f"test {schema.attributes[node.attr].name} discrete")
            for child in node.children:
                emit(child, depth + 1)

    emit(tree.root, 0)
    return "\n".join(lines) + "\n"


def deserialize(text: str, schema: Schema) -> DecisionTree:
    """Parse tree text produced by :func:`serialize` against the same schema."""
    rows: list[tuple[int, int, str]] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        if not raw.strip():
            continue
        stripped = raw.lstrip(" ")
        indent = len(raw) - len(stripped)
        if indent % 2 != 0 or "\t" in raw[:indent]:
            raise DataError("indentation must be pairs of spaces", lineno)
        rows.append((lineno, indent // 2, stripped.rstrip()))
    if not rows:
        raise DataError("empty tree text")

    pos = 0
    label_codes = {cls: i for i, cls in enumerate(schema.class_labels)}

    def parse(depth: int) -> Node:
        nonlocal pos
        if pos >= len(rows):
            raise DataError("unexpected end of tree text", rows[-1][0])
        lineno, d, content = rows[pos]
        if d != depth:
            raise DataError(f"expected depth {depth}, found {d}", lineno)
        pos += 1
        tokens = content.split(" ")
        if tokens[0] == "leaf":
            if len(tokens) < 2:
                raise DataError("leaf line needs a class label", lineno)
            if tokens[1] not in label_codes:
                raise DataError(f"unknown class {tokens[1]!r}", lineno)
            label = label_codes[tokens[1]]
            dist = np.zeros(schema.n_classes)
            grafted = False
            for token in tokens[2:]:
                if token == "grafted":
                    grafted = True
                elif "=" in token:
                    for item in token.split(","):
                        cls, _, weight = item.partition("=")
                        if cls not in label_codes:
                            raise DataError(f"unknown class {cls!r} in distribution", lineno)
                        try:
                            dist[label_codes[cls]] = float(weight)
                        except ValueError:
                            raise DataError(f"bad weight {weight!r}", lineno) from None
                else:
                    raise DataError(f"unexpected token {token!r}", lineno)
            return Leaf(label, dist, grafted)
        if tokens[0] == "test":
            if len(tokens) < 3:
                raise DataError("malformed test line", lineno)
            try:
                spec = schema.by_name(tokens[1])
            except DataError:
                raise DataError(f"unknown attribute {tokens[1]!r}", lineno) from None
            if tokens[2] == "<=":
                if not spec.is_continuous:
                    raise DataError(f"attribute {spec.name!r} is not continuous", lineno)
                if len(tokens) != 4:
                    raise DataError("malformed continuous test line", lineno)
                try:
                    threshold = float(tokens[3])
                except ValueError:
                    raise DataError(f"bad threshold {tokens[3]!r}", lineno) from None
                low = parse(depth + 1)
                high = parse(depth + 1)
                return ContinuousTest(spec.position, threshold, low, high)
            if tokens[2] == "discrete":
                if spec.kind != "discrete":
                    raise DataError(f"attribute {spec.name!r} is not discrete", lineno)
                children = tuple(parse(depth + 1) for _ in spec.values)
                return DiscreteTest(spec.position, children)
            raise DataError(f"unexpected test form {tokens[2]!r}", lineno)
        raise DataError(f"unexpected line {content!r}", lineno)

    root = parse(0)
    if pos != len(rows):
        raise DataError("trailing content after tree", rows[pos][0])
    return DecisionTree(root, schema)


def trees_equal(a: DecisionTree | Node, b: DecisionTree | Node) -> bool:
    """Structural equality: shape, tests, thresholds, labels, weights, flags."""
    na = a.root if isinstance(a, DecisionTree) else a
    nb = b.root if isinstance(b, DecisionTree) else b
    if type(na) is not type(nb):
        return False
    if isinstance(na, Leaf):
        return (
            na.label == nb.label
            and na.grafted == nb.grafted
            and np.array_equal(na.dist, nb.dist)
        )
    if isinstance(na, ContinuousTest):
        return (
            na.attr == nb.attr
            and na.threshold == nb.threshold
            and trees_equal(na.low, nb.low)
            and trees_equal(na.high, nb.high)
        )
    return (
        na.attr == nb.attr
        and len(na.children) == len(nb.children)
        and all(trees_equal(x, y) for x, y in zip(na.children, nb.children))
    )
