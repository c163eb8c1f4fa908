"""Repeated-holdout evaluation harness.

Each trial draws a seeded train/evaluation split, trains the unpruned and
pruned trees, post-processes both, and scores all four variants on the
held-out cases.  Trial ``i`` uses seed ``base_seed + i``, so a run is fully
reproducible from its flags.  Aggregation reports, per dataset and tree
variant, the accuracy and node-count means with a two-tailed matched-pairs
t-test (statistic signed baseline minus post-processed, matching the
convention that a negative t favors the post-processed trees), and an
overall one-tailed sign test across the significant accuracy differences.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

import numpy as np

from .dataset import Dataset, make_split
from .graft import check_training_equivalence, post_process
from .induce import InduceConfig, train
from .stats import mean_sd, paired_t, sign_test
from .tree import classify_batch, node_count

SIGNIFICANCE_LEVEL = 0.05


@dataclass(frozen=True)
class TrialRecord:
    dataset: str
    trial: int
    seed: int
    acc_unpruned: float
    acc_unpruned_grafted: float
    acc_pruned: float
    acc_pruned_grafted: float
    nodes_unpruned: int
    nodes_unpruned_grafted: int
    nodes_pruned: int
    nodes_pruned_grafted: int
    grafts_unpruned: int
    grafts_pruned: int


def _accuracy(tree, dataset, indices) -> float:
    predicted = classify_batch(tree, dataset, indices)
    actual = dataset.columns().labels[indices]
    return 100.0 * float(np.mean(predicted == actual))


def run_single_trial(
    dataset: Dataset,
    train_indices,
    eval_indices,
    config: InduceConfig | None = None,
    dataset_id: str | None = None,
    trial: int = 0,
    seed: int = 0,
) -> TrialRecord:
    """Train, prune, post-process and score one train/evaluation pair.

    Training equivalence of both post-processed trees is re-verified here,
    independently of the check inside :func:`treegraft.graft.post_process`.
    """
    config = config or InduceConfig()
    train_idx = np.asarray(train_indices, dtype=np.int64)
    eval_idx = np.asarray(eval_indices, dtype=np.int64)
    unpruned, pruned = train(dataset, config, indices=train_idx)
    unpruned_grafted, report_unpruned = post_process(unpruned, dataset, indices=train_idx)
    pruned_grafted, report_pruned = post_process(pruned, dataset, indices=train_idx)
    check_training_equivalence(unpruned, unpruned_grafted, dataset, train_idx)
    check_training_equivalence(pruned, pruned_grafted, dataset, train_idx)
    return TrialRecord(
        dataset=dataset_id if dataset_id is not None else dataset.name,
        trial=trial,
        seed=seed,
        acc_unpruned=_accuracy(unpruned, dataset, eval_idx),
        acc_unpruned_grafted=_accuracy(unpruned_grafted, dataset, eval_idx),
        acc_pruned=_accuracy(pruned, dataset, eval_idx),
        acc_pruned_grafted=_accuracy(pruned_grafted, dataset, eval_idx),
        nodes_unpruned=node_count(unpruned),
        nodes_unpruned_grafted=node_count(unpruned_grafted),
        nodes_pruned=node_count(pruned),
        nodes_pruned_grafted=node_count(pruned_grafted),
        grafts_unpruned=report_unpruned.grafted,
        grafts_pruned=report_pruned.grafted,
    )


def run_experiment(
    dataset: Dataset,
    trials: int = 100,
    train_fraction: float = 0.8,
    base_seed: int = 1,
    config: InduceConfig | None = None,
    dataset_id: str | None = None,
) -> list[TrialRecord]:
    """Repeat seeded holdout trials; trial ``i`` uses seed ``base_seed + i``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    records = []
    for i in range(trials):
        seed = base_seed + i
        plan = make_split(dataset, seed, train_fraction)
        records.append(
            run_single_trial(
                dataset,
                plan.train_indices,
                plan.eval_indices,
                config,
                dataset_id=dataset_id,
                trial=i,
                seed=seed,
            )
        )
    return records


# ---------------------------------------------------------------------------
# Aggregation


@dataclass(frozen=True)
class PairSummary:
    """Baseline vs post-processed series for one dataset and tree variant."""

    base_mean: float
    base_sd: float
    graft_mean: float
    graft_sd: float
    t: float
    p: float

    @property
    def significant(self) -> bool:
        return self.p <= SIGNIFICANCE_LEVEL

    @property
    def direction(self) -> int:
        """+1 post-processed mean higher, -1 lower, 0 equal."""
        if self.graft_mean > self.base_mean:
            return 1
        if self.graft_mean < self.base_mean:
            return -1
        return 0


@dataclass(frozen=True)
class DatasetSummary:
    name: str
    trials: int
    acc_unpruned: PairSummary
    acc_pruned: PairSummary
    nodes_unpruned: PairSummary
    nodes_pruned: PairSummary


@dataclass(frozen=True)
class ComparisonReport:
    datasets: tuple[DatasetSummary, ...]
    significant_increases: int
    significant_decreases: int
    sign_test_p: float | None


def _pair_summary(base: Sequence[float], grafted: Sequence[float]) -> PairSummary:
    base_mean, base_sd = mean_sd(base)
    graft_mean, graft_sd = mean_sd(grafted)
    result = paired_t(base, grafted)
    return PairSummary(base_mean, base_sd, graft_mean, graft_sd, result.statistic, result.p_value)


def summarize(records: Iterable[TrialRecord]) -> ComparisonReport:
    """Aggregate trial records per dataset; deterministic for a given input set."""
    by_dataset: dict[str, list[TrialRecord]] = {}
    for rec in records:
        by_dataset.setdefault(rec.dataset, []).append(rec)
    summaries = []
    increases = 0
    decreases = 0
    for name in sorted(by_dataset):
        rows = sorted(by_dataset[name], key=lambda r: r.trial)
        if len(rows) < 2:
            raise ValueError(f"dataset {name!r} needs at least two trials to summarize")
        summary = DatasetSummary(
            name=name,
            trials=len(rows),
            acc_unpruned=_pair_summary(
                [r.acc_unpruned for r in rows], [r.acc_unpruned_grafted for r in rows]
            ),
            acc_pruned=_pair_summary(
                [r.acc_pruned for r in rows], [r.acc_pruned_grafted for r in rows]
            ),
            nodes_unpruned=_pair_summary(
                [float(r.nodes_unpruned) for r in rows],
                [float(r.nodes_unpruned_grafted) for r in rows],
            ),
            nodes_pruned=_pair_summary(
                [float(r.nodes_pruned) for r in rows],
                [float(r.nodes_pruned_grafted) for r in rows],
            ),
        )
        for pair in (summary.acc_unpruned, summary.acc_pruned):
            if pair.significant and pair.direction > 0:
                increases += 1
            elif pair.significant and pair.direction < 0:
                decreases += 1
        summaries.append(summary)
    comparisons = increases + decreases
    sign_p = sign_test(increases, decreases) if comparisons >= 1 else None
    return ComparisonReport(tuple(summaries), increases, decreases, sign_p)


# ---------------------------------------------------------------------------
# Rendering

_TABLES = (
    ("accuracy_unpruned", "Predictive accuracy (%), unpruned trees", "acc_unpruned"),
    ("accuracy_pruned", "Predictive accuracy (%), pruned trees", "acc_pruned"),
    ("nodes_unpruned", "Tree size (nodes), unpruned trees", "nodes_unpruned"),
    ("nodes_pruned", "Tree size (nodes), pruned trees", "nodes_pruned"),
)


def _render_text(report: ComparisonReport) -> str:
    out = []
    for _key, title, attr in _TABLES:
        out.append(title)
        rows = [["dataset", "base x", "base s", "graft x", "graft s", "t", "p"]]
        for ds in report.datasets:
            pair: PairSummary = getattr(ds, attr)
            rows.append(
                [
                    ds.name,
                    f"{pair.base_mean:.1f}",
                    f"{pair.base_sd:.1f}",
                    f"{pair.graft_mean:.1f}",
                    f"{pair.graft_sd:.1f}",
                    f"{pair.t:.1f}",
                    f"{pair.p:.3f}",
                ]
            )
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        for r in rows:
            out.append(
                "  ".join(
                    cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i])
                    for i, cell in enumerate(r)
                ).rstrip()
            )
        out.append("")
    out.append(
        f"significant accuracy increases: {report.significant_increases}, "
        f"decreases: {report.significant_decreases}"
    )
    if report.sign_test_p is not None:
        out.append(f"sign test p = {report.sign_test_p:.3f}")
    else:
        out.append("sign test p = n/a (no significant comparisons)")
    return "\n".join(out) + "\n"


def _render_csv(report: ComparisonReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["table", "dataset", "base_mean", "base_sd", "graft_mean", "graft_sd", "t", "p"]
    )
    for key, _title, attr in _TABLES:
        for ds in report.datasets:
            pair: PairSummary = getattr(ds, attr)
            writer.writerow(
                [
                    key,
                    ds.name,
                    repr(pair.base_mean),
                    repr(pair.base_sd),
                    repr(pair.graft_mean),
                    repr(pair.graft_sd),
                    repr(pair.t),
                    repr(pair.p),
                ]
            )
    writer.writerow(
        [
            "sign_test",
            "overall",
            report.significant_increases,
            report.significant_decreases,
            "",
            "",
            "",
            repr(report.sign_test_p) if report.sign_test_p is not None else "",
        ]
    )
    return buf.getvalue()


def render_tables(report: ComparisonReport, format: str = "text") -> str:
    """Render the four comparison tables as aligned text or CSV."""
    if format == "text":
        return _render_text(report)
    if format == "csv":
        return _render_csv(report)
    raise ValueError(f"unknown format {format!r}")


# ---------------------------------------------------------------------------
# Record persistence

_RECORD_FIELDS = [f.name for f in fields(TrialRecord)]
_FLOAT_FIELDS = {
    "acc_unpruned",
    "acc_unpruned_grafted",
    "acc_pruned",
    "acc_pruned_grafted",
}


def write_records(records: Iterable[TrialRecord]) -> str:
    """Render trial records as CSV text (full float precision)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_RECORD_FIELDS)
    for rec in records:
        row = []
        for name in _RECORD_FIELDS:
            value = getattr(rec, name)
            row.append(repr(value) if isinstance(value, float) else value)
        writer.writerow(row)
    return buf.getvalue()


def read_records(text: str) -> list[TrialRecord]:
    """Parse CSV text produced by :func:`write_records`."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != _RECORD_FIELDS:
        raise ValueError(f"unexpected record header {header!r}")
    records = []
    for row in reader:
        if not row:
            continue
        kwargs = {}
        for name, cell in zip(_RECORD_FIELDS, row):
            if name == "dataset":
                kwargs[name] = cell
            elif name in _FLOAT_FIELDS:
                kwargs[name] = float(cell)
            else:
                kwargs[name] = int(cell)
        records.append(TrialRecord(**kwargs))
    return records
