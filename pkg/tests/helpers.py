"""Shared test utilities: independent oracles and synthetic data generators.

The graft-candidate oracle re-derives everything from first principles in
plain Python (per-example recursive routing, explicit tuple enumeration,
explicit tie-break comparisons) so it shares no code path with the
production search.
"""

from __future__ import annotations

import math

import numpy as np

from treegraft.dataset import AttributeSpec, Dataset, Example, Schema
from treegraft.rng import Xoshiro256StarStar
from treegraft.tree import ContinuousTest, DecisionTree, DiscreteTest, Leaf


# ---------------------------------------------------------------------------
# Brute-force graft-candidate oracle


def _subtree_mass(node):
    if isinstance(node, Leaf):
        return float(sum(node.dist))
    if isinstance(node, ContinuousTest):
        return _subtree_mass(node.low) + _subtree_mass(node.high)
    return sum(_subtree_mass(c) for c in node.children)


def _children_of(node):
    if isinstance(node, ContinuousTest):
        return [node.low, node.high]
    if isinstance(node, DiscreteTest):
        return list(node.children)
    return []


def collect_cases(tree: DecisionTree, dataset: Dataset, indices=None):
    """Map id(node) -> list of (example_index, weight) reaching the node."""
    if indices is None:
        indices = range(len(dataset.examples))
    cases = {}

    def walk(node, pairs):
        cases[id(node)] = pairs
        if isinstance(node, Leaf):
            return
        children = _children_of(node)
        masses = [_subtree_mass(c) for c in children]
        total = sum(masses)
        shares = (
            [m / total for m in masses] if total > 0 else [1.0 / len(children)] * len(children)
        )
        buckets = [[] for _ in children]
        for i, w in pairs:
            v = dataset.examples[i].values[node.attr]
            if v is None:
                for b, share in zip(buckets, shares):
                    if share > 0.0:
                        b.append((i, w * share))
            elif isinstance(node, ContinuousTest):
                buckets[0 if v <= node.threshold else 1].append((i, w))
            else:
                code = dataset.schema.value_code(node.attr, v)
                buckets[code].append((i, w))
        for child, bucket in zip(children, buckets):
            walk(child, bucket)

    root_pairs = [(i, dataset.examples[i].weight) for i in indices]
    walk(tree.root, root_pairs)
    return cases


def path_to(tree: DecisionTree, target):
    def search(node, acc):
        acc.append(node)
        if node is target:
            return True
        for child in _children_of(node):
            if search(child, acc):
                return True
        acc.pop()
        return False

    acc = []
    assert search(tree.root, acc)
    return acc


def brute_best_candidates(tree: DecisionTree, leaf, dataset: Dataset, indices=None):
    """Exhaustive enumeration of graft candidates with explicit tie-breaks.

    Returns (below, above); each is None or a dict with keys
    ancestor, depth, attribute, threshold, label, evidence.
    """
    schema = dataset.schema
    cases = collect_cases(tree, dataset, indices)
    path = path_to(tree, leaf)

    lowerlim = {}
    upperlim = {}
    for parent, child in zip(path, path[1:]):
        if isinstance(parent, ContinuousTest):
            a = parent.attr
            if child is parent.low:
                upperlim[a] = min(upperlim.get(a, math.inf), parent.threshold)
            else:
                lowerlim[a] = max(lowerlim.get(a, -math.inf), parent.threshold)

    leaf_pairs = cases[id(leaf)]
    cont_attrs = [a.position for a in schema.inputs if a.is_continuous]

    def leaf_range(attr):
        vals = [
            dataset.examples[i].values[attr]
            for i, _ in leaf_pairs
            if dataset.examples[i].values[attr] is not None
        ]
        if not vals:
            return math.inf, -math.inf
        return min(vals), max(vals)

    n_classes = len(schema.class_labels)
    best = {"below": None, "above": None}

    ancestors = list(enumerate(path[:-1]))  # (depth, node)
    for depth, anc in sorted(ancestors, key=lambda t: -t[0]):  # deepest first
        pairs = cases[id(anc)]
        for attr in cont_attrs:
            lo = lowerlim.get(attr, -math.inf)
            hi = upperlim.get(attr, math.inf)
            lmin, lmax = leaf_range(attr)
            known = [
                (i, w, dataset.examples[i].values[attr])
                for i, w in pairs
                if dataset.examples[i].values[attr] is not None
            ]
            seen = set()
            ordered_values = []
            for _i, _w, v in known:  # data order; first occurrence wins
                if v not in seen:
                    seen.add(v)
                    ordered_values.append(v)
            for direction, window in (
                ("below", lambda v: lo < v < lmin),
                ("above", lambda v: lmax < v < hi),
            ):
                for v in ordered_values:
                    if not window(v):
                        continue
                    if direction == "below":
                        region = [(i, w, x) for i, w, x in known if lo < x <= v]
                    else:
                        region = [(i, w, x) for i, w, x in known if v < x <= hi]
                    total = sum(w for _i, w, _x in region)
                    for label in range(n_classes):
                        pos = sum(
                            w
                            for i, w, _x in region
                            if schema.label_code(dataset.examples[i].label) == label
                        )
                        evidence = (pos + 1.0) / (total + 2.0)
                        cur = best[direction]
                        if cur is None or evidence > cur["evidence"]:
                            best[direction] = {
                                "ancestor": anc,
                                "depth": depth,
                                "attribute": attr,
                                "threshold": v,
                                "label": label,
                                "evidence": evidence,
                            }
    return best["below"], best["above"]


def brute_leaf_evidence(tree, leaf, dataset, indices=None):
    cases = collect_cases(tree, dataset, indices)
    pairs = cases[id(leaf)]
    total = sum(w for _i, w in pairs)
    pos = sum(
        w
        for i, w in pairs
        if dataset.schema.label_code(dataset.examples[i].label) == leaf.label
    )
    return (pos + 1.0) / (total + 2.0)


# ---------------------------------------------------------------------------
# Synthetic datasets


def random_dataset(
    seed: int,
    n_cases_range=(6, 30),
    n_cont_range=(1, 4),
    n_disc_range=(0, 0),
    n_classes_range=(2, 3),
    value_grid=10,
    missing_rate=0.0,
) -> Dataset:
    """Small random dataset with geometric class structure and noise.

    Continuous values come from a coarse integer grid so that ties between
    observed values (and therefore tie-break paths) occur often.
    """
    rng = Xoshiro256StarStar(seed)

    def rint(lo, hi):
        return lo + rng.below(hi - lo + 1)

    n = rint(*n_cases_range)
    n_cont = rint(*n_cont_range)
    n_disc = rint(*n_disc_range)
    n_classes = rint(*n_classes_range)

    specs = []
    for i in range(n_cont):
        specs.append(AttributeSpec(f"c{i}", "continuous", (), len(specs)))
    for i in range(n_disc):
        n_values = rint(2, 3)
        values = tuple(f"v{j}" for j in range(n_values))
        specs.append(AttributeSpec(f"d{i}", "discrete", values, len(specs)))
    labels = tuple(f"k{i}" for i in range(n_classes))
    specs.append(AttributeSpec("class", "class", labels, len(specs)))
    schema = Schema(specs)

    pivot = rint(1, value_grid - 2)
    examples = []
    for _ in range(n):
        values = []
        for spec in schema.inputs:
            if spec.is_continuous:
                values.append(float(rng.below(value_grid)))
            else:
                values.append(spec.values[rng.below(len(spec.values))])
        base = values[0] if isinstance(values[0], float) else 0.0
        label_idx = (0 if base <= pivot else 1) if n_classes >= 2 else 0
        if n_classes == 3 and isinstance(values[0], float) and rng.uniform() < 0.3:
            label_idx = 2
        if rng.uniform() < 0.15:  # label noise
            label_idx = rng.below(n_classes)
        if missing_rate > 0.0:
            values = [None if rng.uniform() < missing_rate else v for v in values]
        examples.append(Example(tuple(values), labels[label_idx]))
    return Dataset(schema, examples, (f"synthetic-{seed}", "rows"))


def random_tree(schema: Schema, seed: int, max_depth=3) -> DecisionTree:
    """Random well-formed tree over the schema (labels maximize leaf dists)."""
    rng = Xoshiro256StarStar(seed)
    k = len(schema.class_labels)

    def leaf():
        dist = [float(rng.below(6)) for _ in range(k)]
        best = max(range(k), key=lambda i: (dist[i], -i))
        return Leaf(best, np.array(dist))

    def build(depth):
        if depth >= max_depth or (depth > 0 and rng.uniform() < 0.35):
            return leaf()
        specs = schema.inputs
        spec = specs[rng.below(len(specs))]
        if spec.is_continuous:
            threshold = float(rng.below(10))
            return ContinuousTest(spec.position, threshold, build(depth + 1), build(depth + 1))
        return DiscreteTest(spec.position, tuple(build(depth + 1) for _ in spec.values))

    return DecisionTree(build(0), schema)
