"""C4.5-style decision tree induction and pessimistic error pruning.

Splits are selected by the classic two-stage rule: every attribute
contributes its best split (by information gain), and among the attributes
whose gain reaches the mean gain of admissible splits the one with the
highest gain ratio wins.  Continuous thresholds are always observed data
values (the largest value not exceeding the examined boundary).  Cases
with the split value missing are handled C4.5-style: gain is computed on
the known-value cases and scaled by the known fraction, split information
includes the unknown fraction as an extra branch, and the cases descend
every branch with proportional weight.

Pruning replaces a subtree with a leaf when the pessimistic error estimate
of the pooled leaf does not exceed the summed estimates of the subtree's
leaves.  The estimate for E weighted errors out of N weighted cases is
``N * U`` where ``U`` is the exact binomial upper confidence bound at the
configured confidence, i.e. the solution of ``I_u(E+1, N-E) = 1 - CF``
for the regularized incomplete beta ``I`` (this reduces to the familiar
``1 - CF**(1/N)`` when E = 0 and extends smoothly to fractional counts).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, Schema
from .stats import regularized_incbeta
from .tree import ContinuousTest, DecisionTree, DiscreteTest, Leaf, Node, split_cases

_GAIN_EPS = 1e-12


@dataclass(frozen=True)
class InduceConfig:
    min_cases_per_branch: int = 2
    prune_confidence: float = 0.25
    gain_criterion: str = "gain_ratio"

    def __post_init__(self):
        if self.min_cases_per_branch < 1:
            raise ValueError("min_cases_per_branch must be positive")
        if not 0.0 < self.prune_confidence < 1.0:
            raise ValueError("prune_confidence must be in (0, 1)")
        if self.gain_criterion != "gain_ratio":
            raise ValueError("only the gain_ratio criterion is supported")


@dataclass(frozen=True)
class SplitCandidate:
    attribute: int
    threshold: float | None  # None for discrete splits
    gain: float
    gain_ratio: float


def _entropy(dist: np.ndarray) -> float:
    total = dist.sum()
    if total <= 0.0:
        return 0.0
    p = dist[dist > 0.0] / total
    return float(-(p * np.log2(p)).sum())


def _entropy_rows(mat: np.ndarray) -> np.ndarray:
    totals = mat.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(totals > 0.0, mat / np.where(totals > 0.0, totals, 1.0), 0.0)
        plogp = np.where(p > 0.0, p * np.log2(p), 0.0)
    return -plogp.sum(axis=1)


def _split_info(branch_weights: list[float], total: float) -> float:
    acc = 0.0
    for bw in branch_weights:
        if bw > 0.0:
            f = bw / total
            acc -= f * np.log2(f)
    return acc


def _eval_continuous(values, labels, w, k, w_total, min_cases) -> SplitCandidate | None:
    known = ~np.isnan(values)
    if not known.any():
        return None
    kv = values[known]
    kw = w[known]
    kl = labels[known]
    w_known = kw.sum()
    if w_known < 2 * min_cases:
        return None
    order = np.argsort(kv, kind="stable")
    sv = kv[order]
    sw = kw[order]
    sl = kl[order]
    cuts = np.nonzero(sv[:-1] != sv[1:])[0]
    if len(cuts) == 0:
        return None
    cum_w = np.cumsum(sw)
    per_class = np.zeros((len(sv), k))
    per_class[np.arange(len(sv)), sl] = sw
    cum_c = np.cumsum(per_class, axis=0)
    known_dist = cum_c[-1]

    w_low = cum_w[cuts]
    w_high = w_known - w_low
    feasible = (w_low >= min_cases) & (w_high >= min_cases)
    if not feasible.any():
        return None
    cuts = cuts[feasible]
    w_low = w_low[feasible]
    w_high = w_high[feasible]
    low_dist = cum_c[cuts]
    high_dist = known_dist - low_dist

    h_known = _entropy(known_dist)
    info = (w_low * _entropy_rows(low_dist) + w_high * _entropy_rows(high_dist)) / w_known
    gains = (w_known / w_total) * (h_known - info)
    best = int(np.argmax(gains))  # first max: smallest threshold wins ties
    gain = float(gains[best])
    if gain <= _GAIN_EPS:
        return None
    w_missing = w_total - w_known
    split_info = _split_info([float(w_low[best]), float(w_high[best]), w_missing], w_total)
    return SplitCandidate(
        attribute=-1,  # caller fills the position
        threshold=float(sv[cuts[best]]),
        gain=gain,
        gain_ratio=gain / split_info,
    )


def _eval_discrete(codes, labels, w, k, n_values, w_total, min_cases) -> SplitCandidate | None:
    known = codes >= 0
    if not known.any():
        return None
    kc = codes[known]
    kw = w[known]
    kl = labels[known]
    w_known = kw.sum()
    branch_w = np.bincount(kc, weights=kw, minlength=n_values)
    if int((branch_w >= min_cases).sum()) < 2:
        return None
    branch_dist = np.zeros((n_values, k))
    np.add.at(branch_dist, (kc, kl), kw)
    known_dist = branch_dist.sum(axis=0)
    h_known = _entropy(known_dist)
    info = float((branch_w * _entropy_rows(branch_dist)).sum()) / w_known
    gain = (w_known / w_total) * (h_known - info)
    if gain <= _GAIN_EPS:
        return None
    w_missing = w_total - w_known
    split_info = _split_info([float(b) for b in branch_w] + [w_missing], w_total)
    return SplitCandidate(attribute=-1, threshold=None, gain=float(gain), gain_ratio=float(gain) / split_info)


def _class_dist(labels: np.ndarray, w: np.ndarray, k: int) -> np.ndarray:
    return np.bincount(labels, weights=w, minlength=k)


def _majority(dist: np.ndarray) -> int:
    return int(np.argmax(dist))  # first max: class declaration order breaks ties


def _candidate_splits(schema, cols, idx, w, config) -> list[SplitCandidate]:
    labels = cols.labels[idx]
    k = schema.n_classes
    w_total = w.sum()
    out = []
    for spec in schema.inputs:
        if spec.is_continuous:
            cand = _eval_continuous(
                cols.cont[spec.position][idx], labels, w, k, w_total, config.min_cases_per_branch
            )
        else:
            cand = _eval_discrete(
                cols.disc[spec.position][idx],
                labels,
                w,
                k,
                len(spec.values),
                w_total,
                config.min_cases_per_branch,
            )
        if cand is not None:
            out.append(
                SplitCandidate(spec.position, cand.threshold, cand.gain, cand.gain_ratio)
            )
    return out


def _select_split(candidates: list[SplitCandidate]) -> SplitCandidate | None:
    if not candidates:
        return None
    avg_gain = sum(c.gain for c in candidates) / len(candidates)
    best = None
    for cand in candidates:  # attribute position order; strict > keeps the first
        if cand.gain >= avg_gain - 1e-12 and (best is None or cand.gain_ratio > best.gain_ratio):
            best = cand
    return best


def _grow(schema: Schema, cols, idx, w, config: InduceConfig) -> Node:
    k = schema.n_classes
    dist = _class_dist(cols.labels[idx], w, k)
    label = _majority(dist)
    if int((dist > 0.0).sum()) <= 1 or dist.sum() < 2 * config.min_cases_per_branch:
        return Leaf(label, dist)
    best = _select_split(_candidate_splits(schema, cols, idx, w, config))
    if best is None:
        return Leaf(label, dist)
    spec = schema.attributes[best.attribute]
    children = []
    for child_idx, child_w in _split_training_cases(best, spec, cols, idx, w):
        if len(child_idx) == 0:
            children.append(Leaf(label, np.zeros(k)))
        else:
            children.append(_grow(schema, cols, child_idx, child_w, config))
    if best.threshold is not None:
        return ContinuousTest(best.attribute, best.threshold, children[0], children[1])
    return DiscreteTest(best.attribute, tuple(children))


def _split_training_cases(cand: SplitCandidate, spec, cols, idx, w):
    """Branch case sets during growth: known-weight shares for missing values.

    Identical in value to the mass-proportional routing used after training
    (branch mass is exactly the known weight routed into the branch), but
    computed from the cases at hand since child subtrees do not exist yet.
    """
    if cand.threshold is not None:
        vals = cols.cont[cand.attribute][idx]
        known = ~np.isnan(vals)
        missing = ~known
        members = [known & (vals <= cand.threshold), known & (vals > cand.threshold)]
    else:
        codes = cols.disc[cand.attribute][idx]
        missing = codes < 0
        members = [codes == code for code in range(len(spec.values))]
    known_w = [float(w[m].sum()) for m in members]
    total_known = sum(known_w)
    any_missing = bool(missing.any())
    out = []
    for m, bw in zip(members, known_w):
        share = bw / total_known if total_known > 0.0 else 1.0 / len(members)
        if any_missing and share > 0.0:
            mask = m | missing
            cw = np.where(missing, w * share, w)[mask]
        else:
            mask = m
            cw = w[mask]
        out.append((idx[mask], cw))
    return out


def grow(dataset: Dataset, config: InduceConfig | None = None, indices=None) -> DecisionTree:
    """Grow an unpruned tree from the selected training cases."""
    config = config or InduceConfig()
    if indices is None:
        idx = np.arange(len(dataset))
    else:
        idx = np.asarray(indices, dtype=np.int64)
    if len(idx) == 0:
        raise ValueError("cannot grow a tree from an empty training set")
    cols = dataset.columns()
    if (cols.labels[idx] < 0).any():
        raise ValueError("training set contains unlabeled examples")
    root = _grow(dataset.schema, cols, idx, cols.weights[idx].copy(), config)
    return DecisionTree(root, dataset.schema)


def error_rate_upper_bound(errors: float, n: float, confidence: float) -> float:
    """Upper confidence bound on a binomial error rate at the given confidence.

    Solves ``I_u(errors + 1, n - errors) = 1 - confidence`` by bisection
    (closed form when errors = 0); accepts fractional weighted counts.
    """
    if n <= 0.0:
        return 1.0
    errors = min(max(errors, 0.0), n)
    if errors >= n:
        return 1.0
    if errors == 0.0:
        return 1.0 - confidence ** (1.0 / n)
    a = errors + 1.0
    b = n - errors
    target = 1.0 - confidence
    lo, hi = errors / n, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if regularized_incbeta(a, b, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _estimated_errors(dist: np.ndarray, confidence: float) -> float:
    n = float(dist.sum())
    if n <= 0.0:
        return 0.0
    errors = n - float(dist.max())
    return n * error_rate_upper_bound(errors, n, confidence)


def _prune(node: Node, schema, cols, idx, w, config) -> tuple[Node, float]:
    k = schema.n_classes
    dist = _class_dist(cols.labels[idx], w, k)
    if isinstance(node, Leaf):
        return node, _estimated_errors(dist, config.prune_confidence)
    children = []
    subtree_errors = 0.0
    changed = False
    for child, child_idx, child_w in split_cases(node, cols, idx, w):
        new_child, err = _prune(child, schema, cols, child_idx, child_w, config)
        subtree_errors += err
        changed = changed or new_child is not child
        children.append(new_child)
    leaf_errors = _estimated_errors(dist, config.prune_confidence)
    if leaf_errors <= subtree_errors:
        return Leaf(_majority(dist), dist), leaf_errors
    if changed:
        if isinstance(node, ContinuousTest):
            node = ContinuousTest(node.attr, node.threshold, children[0], children[1])
        else:
            node = DiscreteTest(node.attr, tuple(children))
    return node, subtree_errors


def prune(tree: DecisionTree, dataset: Dataset, config: InduceConfig | None = None, indices=None) -> DecisionTree:
    """Bottom-up pessimistic pruning against the tree's training cases."""
    config = config or InduceConfig()
    if indices is None:
        idx = np.arange(len(dataset))
    else:
        idx = np.asarray(indices, dtype=np.int64)
    cols = dataset.columns()
    root, _ = _prune(tree.root, tree.schema, cols, idx, cols.weights[idx].copy(), config)
    return DecisionTree(root, tree.schema)


def train(
    dataset: Dataset, config: InduceConfig | None = None, indices=None
) -> tuple[DecisionTree, DecisionTree]:
    """Grow an unpruned tree and derive its pruned variant."""
    config = config or InduceConfig()
    unpruned = grow(dataset, config, indices)
    pruned = prune(unpruned, dataset, config, indices)
    return unpruned, pruned
