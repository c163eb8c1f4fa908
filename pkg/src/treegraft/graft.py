"""Post-processor that grafts extra splits onto training-empty leaf regions.

For every original leaf the processor searches the evidence held at its
ancestors: each observed value of a continuous attribute that falls inside
the leaf's ancestor-derived bounds but outside the range actually occupied
by the leaf's own cases defines a candidate region, on the low side
(below every case at the leaf) or the high side (above every case).  The
support for relabeling a candidate region with a class is the Laplace
accuracy estimate ``(P + 1) / (T + 2)`` over the ancestor's cases falling
in that region.  The single best-supported candidate (per the tie-break
chain: deeper ancestor, lower attribute position, earlier data order,
earlier class declaration) is grafted as a new binary cut whose fresh
branch is an empty, flagged leaf, but only when it beats the leaf's own
Laplace evidence and proposes a different class.

Candidate thresholds are strictly inside the open window between the
active ancestor bound and the leaf's own value range, so a grafted cut
never duplicates an ancestor cut and never reroutes a training case: the
tree's classification of every training example is provably unchanged,
and :func:`post_process` re-verifies this and raises on any violation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .dataset import Dataset, Schema
from .tree import (
    ContinuousTest,
    DecisionTree,
    DiscreteTest,
    Leaf,
    Node,
    PathBounds,
    classify_batch,
    find_path,
    split_cases,
)


class TrainingEquivalenceError(RuntimeError):
    """A post-processed tree changed the classification of a training case."""


def laplace(total: float, positives: float) -> float:
    """Laplace accuracy estimate (positives + 1) / (total + 2)."""
    if total < 0.0 or positives < 0.0:
        raise ValueError("weights must be non-negative")
    if positives > total and not math.isclose(positives, total, rel_tol=1e-9, abs_tol=1e-9):
        raise ValueError("positive weight cannot exceed total weight")
    return (positives + 1.0) / (total + 2.0)


class GraftOutcome(Enum):
    NO_CANDIDATE = "no-candidate"
    REJECTED = "candidate-rejected"
    SAME_CLASS = "candidate-same-class"
    GRAFTED = "grafted"


@dataclass(frozen=True)
class GraftCandidate:
    direction: str  # "below" | "above"
    ancestor: Node
    ancestor_depth: int
    attribute: int
    threshold: float
    label: int
    evidence: float


@dataclass(frozen=True)
class LeafDecision:
    leaf_index: int
    leaf_label: int
    leaf_evidence: float
    outcome: GraftOutcome
    applied: Optional[GraftCandidate]
    below: Optional[GraftCandidate]
    above: Optional[GraftCandidate]


@dataclass(frozen=True)
class GraftReport:
    decisions: tuple[LeafDecision, ...]

    @property
    def grafted(self) -> int:
        return sum(1 for d in self.decisions if d.outcome is GraftOutcome.GRAFTED)

    @property
    def rejected(self) -> int:
        return sum(1 for d in self.decisions if d.outcome is GraftOutcome.REJECTED)

    @property
    def same_class(self) -> int:
        return sum(1 for d in self.decisions if d.outcome is GraftOutcome.SAME_CLASS)

    @property
    def no_candidate(self) -> int:
        return sum(1 for d in self.decisions if d.outcome is GraftOutcome.NO_CANDIDATE)


# ---------------------------------------------------------------------------
# Candidate search


class _AncestorFrame:
    __slots__ = ("node", "idx", "w", "depth", "_per_attr")

    def __init__(self, node, idx, w, depth):
        self.node = node
        self.idx = idx
        self.w = w
        self.depth = depth
        self._per_attr: dict[int, tuple] = {}

    def attr_tables(self, attr: int, cols):
        """Sorted values with cumulative weight tables for one attribute.

        Returns (sorted_values, padded_cum_weight, padded_cum_class_weight,
        unique_values, first_data_position) over the known-valued cases, or
        None when every case is missing the attribute.  Cached because one
        ancestor serves every leaf below it.
        """
        if attr in self._per_attr:
            return self._per_attr[attr]
        vals = cols.cont[attr][self.idx]
        known = ~np.isnan(vals)
        if not known.any():
            result = None
        else:
            kv = vals[known]
            kw = self.w[known]
            klab = cols.labels[self.idx][known]
            order = np.argsort(kv, kind="stable")
            sv = kv[order]
            sw = kw[order]
            sl = klab[order]
            cum_w = np.concatenate([[0.0], np.cumsum(sw)])
            per_class = np.zeros((len(sv), cols.n_classes))
            per_class[np.arange(len(sv)), sl] = sw
            cum_c = np.vstack([np.zeros(cols.n_classes), np.cumsum(per_class, axis=0)])
            uvals, first_pos = np.unique(kv, return_index=True)
            result = (sv, cum_w, cum_c, uvals, first_pos)
        self._per_attr[attr] = result
        return result


def _window_candidates(tables, low_cut: float, high_cut: float):
    """Unique observed values strictly inside (low_cut, high_cut)."""
    _sv, _cw, _cc, uvals, first_pos = tables
    lo = np.searchsorted(uvals, low_cut, side="right")
    hi = np.searchsorted(uvals, high_cut, side="left")
    return uvals[lo:hi], first_pos[lo:hi]


def _region_counts(tables, start_excl, end_incl):
    """Weight totals over cases with start < value <= end, per class.

    Either bound may be a vector of candidate thresholds; the other is a
    scalar, so the result is one row per candidate.
    """
    sv, cum_w, cum_c, _u, _f = tables
    i_lo = np.searchsorted(sv, start_excl, side="right")
    i_hi = np.searchsorted(sv, end_incl, side="right")
    totals = cum_w[i_hi] - cum_w[i_lo]
    per_class = cum_c[i_hi] - cum_c[i_lo]
    return totals, per_class


def _fold_block(best, direction, frame, attr, values, first_pos, totals, per_class):
    """Fold one (ancestor, attribute) candidate block into the running best.

    Iteration preference inside a block is training-data order of the
    threshold value; the per-candidate class is the Laplace argmax with
    class declaration order breaking ties.  A strict improvement test keeps
    the earlier (more preferred) tuple on equal evidence.
    """
    if len(values) == 0:
        return best
    evidence = (per_class + 1.0) / (totals + 2.0)[:, None]
    classes = np.argmax(evidence, axis=1)
    ev = evidence[np.arange(len(values)), classes]
    order = np.argsort(first_pos, kind="stable")
    local = order[int(np.argmax(ev[order]))]
    if best is None or ev[local] > best.evidence:
        return GraftCandidate(
            direction=direction,
            ancestor=frame.node,
            ancestor_depth=frame.depth,
            attribute=attr,
            threshold=float(values[local]),
            label=int(classes[local]),
            evidence=float(ev[local]),
        )
    return best


def _leaf_value_range(cols, attr, idx):
    vals = cols.cont[attr][idx]
    known = vals[~np.isnan(vals)]
    if len(known) == 0:
        return math.inf, -math.inf
    return float(known.min()), float(known.max())


def _search_leaf(schema: Schema, cols, leaf_idx, ancestors, bnds: PathBounds):
    """Best below/above graft candidates for one leaf's context."""
    best_below = None
    best_above = None
    leaf_ranges = {
        attr: _leaf_value_range(cols, attr, leaf_idx) for attr in schema.continuous_positions
    }
    for frame in reversed(ancestors):  # deepest ancestor first
        for attr in schema.continuous_positions:
            tables = frame.attr_tables(attr, cols)
            if tables is None:
                continue
            lower = bnds.lower(attr)
            upper = bnds.upper(attr)
            leaf_min, leaf_max = leaf_ranges[attr]
            # below: thresholds strictly inside (lower, leaf_min), region (lower, v]
            values, first_pos = _window_candidates(tables, lower, leaf_min)
            if len(values):
                totals, per_class = _region_counts(tables, lower, values)
                best_below = _fold_block(
                    best_below, "below", frame, attr, values, first_pos, totals, per_class
                )
            # above: thresholds strictly inside (leaf_max, upper), region (v, upper]
            values, first_pos = _window_candidates(tables, leaf_max, upper)
            if len(values):
                totals, per_class = _region_counts(tables, values, upper)
                best_above = _fold_block(
                    best_above, "above", frame, attr, values, first_pos, totals, per_class
                )
    return best_below, best_above


def _decide_leaf(
    leaf: Leaf,
    leaf_index: int,
    schema: Schema,
    cols,
    idx,
    w,
    ancestors,
    bnds: PathBounds,
) -> LeafDecision:
    k = schema.n_classes
    dist = np.bincount(cols.labels[idx], weights=w, minlength=k) if len(idx) else np.zeros(k)
    leaf_evidence = laplace(float(dist.sum()), float(dist[leaf.label]))
    below, above = _search_leaf(schema, cols, idx, ancestors, bnds)

    def decision(outcome, applied=None):
        return LeafDecision(leaf_index, leaf.label, leaf_evidence, outcome, applied, below, above)

    if below is None and above is None:
        return decision(GraftOutcome.NO_CANDIDATE)
    if below is not None and below.evidence > leaf_evidence and (
        above is None or below.evidence >= above.evidence
    ):
        if below.label != leaf.label:
            return decision(GraftOutcome.GRAFTED, below)
        return decision(GraftOutcome.SAME_CLASS)
    if above is not None and above.evidence > leaf_evidence:
        if above.label != leaf.label:
            return decision(GraftOutcome.GRAFTED, above)
        return decision(GraftOutcome.SAME_CLASS)
    return decision(GraftOutcome.REJECTED)


def _graft_node(leaf: Leaf, cand: GraftCandidate, n_classes: int) -> ContinuousTest:
    fresh = Leaf(cand.label, np.zeros(n_classes), grafted=True)
    if cand.direction == "below":
        return ContinuousTest(cand.attribute, cand.threshold, fresh, leaf)
    return ContinuousTest(cand.attribute, cand.threshold, leaf, fresh)


# ---------------------------------------------------------------------------
# Public operations


def _training_indices(dataset: Dataset, indices):
    if indices is None:
        return np.arange(len(dataset))
    return np.asarray(indices, dtype=np.int64)


def cases_at(tree: DecisionTree, node: Node, dataset: Dataset, indices=None):
    """Weighted training cases able to reach ``node`` (fractional under missing)."""
    cols = dataset.columns()
    idx = _training_indices(dataset, indices)
    w = cols.weights[idx].copy()
    path = find_path(tree, node)
    for parent, child in zip(path, path[1:]):
        for branch, branch_idx, branch_w in split_cases(parent, cols, idx, w):
            if branch is child:
                idx, w = branch_idx, branch_w
                break
    return idx, w


def _leaf_context(tree: DecisionTree, leaf: Node, dataset: Dataset, indices):
    if not isinstance(leaf, Leaf):
        raise ValueError("target node is not a leaf")
    if leaf.grafted:
        raise ValueError("grafted leaves are not re-processed")
    cols = dataset.columns()
    idx = _training_indices(dataset, indices)
    w = cols.weights[idx].copy()
    path = find_path(tree, leaf)
    ancestors = []
    bnds = PathBounds()
    depth = 0
    for parent, child in zip(path, path[1:]):
        ancestors.append(_AncestorFrame(parent, idx, w, depth))
        if isinstance(parent, ContinuousTest):
            if child is parent.low:
                bnds = bnds.narrow_upper(parent.attr, parent.threshold)
            else:
                bnds = bnds.narrow_lower(parent.attr, parent.threshold)
        for branch, branch_idx, branch_w in split_cases(parent, cols, idx, w):
            if branch is child:
                idx, w = branch_idx, branch_w
                break
        depth += 1
    return cols, idx, w, ancestors, bnds


def best_candidates(tree: DecisionTree, leaf: Node, dataset: Dataset, indices=None):
    """Best below/above graft candidates for an original leaf (None when absent)."""
    cols, idx, w, ancestors, bnds = _leaf_context(tree, leaf, dataset, indices)
    return _search_leaf(tree.schema, cols, idx, ancestors, bnds)


def graft_leaf(tree: DecisionTree, leaf: Node, dataset: Dataset, indices=None) -> DecisionTree:
    """Apply at most one graft to a single leaf, returning a new tree."""
    cols, idx, w, ancestors, bnds = _leaf_context(tree, leaf, dataset, indices)
    decision = _decide_leaf(leaf, 0, tree.schema, cols, idx, w, ancestors, bnds)
    if decision.outcome is not GraftOutcome.GRAFTED:
        return tree
    path = find_path(tree, leaf)
    node: Node = _graft_node(leaf, decision.applied, tree.schema.n_classes)
    for parent, child in reversed(list(zip(path, path[1:]))):
        if isinstance(parent, ContinuousTest):
            if child is parent.low:
                node = ContinuousTest(parent.attr, parent.threshold, node, parent.high)
            else:
                node = ContinuousTest(parent.attr, parent.threshold, parent.low, node)
        else:
            node = DiscreteTest(
                parent.attr, tuple(node if c is child else c for c in parent.children)
            )
    return DecisionTree(node, tree.schema)


def post_process(tree: DecisionTree, dataset: Dataset, indices=None):
    """Examine every original leaf once, grafting where the evidence wins.

    Returns the post-processed tree and a :class:`GraftReport`.  Training
    classifications are re-checked afterwards; any change raises
    :class:`TrainingEquivalenceError` (it would be an implementation defect).
    """
    schema = tree.schema
    cols = dataset.columns()
    idx0 = _training_indices(dataset, indices)
    if (cols.labels[idx0] < 0).any():
        raise ValueError("training set contains unlabeled examples")
    w0 = cols.weights[idx0].copy()
    decisions: list[LeafDecision] = []

    def walk(node: Node, idx, w, ancestors, bnds: PathBounds, depth: int) -> Node:
        if isinstance(node, Leaf):
            if node.grafted:
                return node
            decision = _decide_leaf(node, len(decisions), schema, cols, idx, w, ancestors, bnds)
            decisions.append(decision)
            if decision.outcome is GraftOutcome.GRAFTED:
                return _graft_node(node, decision.applied, schema.n_classes)
            return node
        frame = _AncestorFrame(node, idx, w, depth)
        branches = split_cases(node, cols, idx, w)
        new_children = []
        changed = False
        for child, child_idx, child_w in branches:
            if isinstance(node, ContinuousTest) and child is node.low:
                child_bnds = bnds.narrow_upper(node.attr, node.threshold)
            elif isinstance(node, ContinuousTest):
                child_bnds = bnds.narrow_lower(node.attr, node.threshold)
            else:
                child_bnds = bnds
            new_child = walk(child, child_idx, child_w, ancestors + [frame], child_bnds, depth + 1)
            changed = changed or new_child is not child
            new_children.append(new_child)
        if not changed:
            return node
        if isinstance(node, ContinuousTest):
            return ContinuousTest(node.attr, node.threshold, new_children[0], new_children[1])
        return DiscreteTest(node.attr, tuple(new_children))

    new_root = walk(tree.root, idx0, w0, [], PathBounds(), 0)
    out = DecisionTree(new_root, schema)
    check_training_equivalence(tree, out, dataset, idx0)
    return out, GraftReport(tuple(decisions))


def check_training_equivalence(before: DecisionTree, after: DecisionTree, dataset: Dataset, indices=None) -> None:
    """Raise unless both trees classify every selected case identically."""
    idx = _training_indices(dataset, indices)
    a = classify_batch(before, dataset, idx)
    b = classify_batch(after, dataset, idx)
    if not np.array_equal(a, b):
        bad = idx[np.nonzero(a != b)[0]]
        raise TrainingEquivalenceError(
            f"post-processing changed the classification of training case(s) {bad[:5].tolist()}"
        )


def render_report(report: GraftReport, tree: DecisionTree) -> str:
    """Human-readable per-leaf outcome listing with totals."""
    labels = tree.schema.class_labels
    attrs = tree.schema.attributes
    lines = []
    for d in report.decisions:
        head = f"leaf {d.leaf_index} ({labels[d.leaf_label]}, evidence {d.leaf_evidence:.6g})"
        if d.outcome is GraftOutcome.GRAFTED:
            c = d.applied
            lines.append(
                f"{head}: grafted {c.direction} via {attrs[c.attribute].name} <= {c.threshold!r}"
                f" -> {labels[c.label]} (evidence {c.evidence:.6g})"
            )
        elif d.outcome is GraftOutcome.SAME_CLASS:
            lines.append(f"{head}: best candidate proposes the leaf's own class; not grafted")
        elif d.outcome is GraftOutcome.REJECTED:
            best = max(
                (c for c in (d.below, d.above) if c is not None),
                key=lambda c: c.evidence,
            )
            lines.append(f"{head}: candidate rejected (best evidence {best.evidence:.6g})")
        else:
            lines.append(f"{head}: no candidate")
    lines.append(
        f"leaves: {len(report.decisions)}  grafted: {report.grafted}  "
        f"rejected: {report.rejected}  same-class: {report.same_class}  "
        f"no-candidate: {report.no_candidate}"
    )
    return "\n".join(lines) + "\n"
