"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 data/file error, 3 internal
invariant violation (a post-processed tree changed a training
classification, which would be a defect).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import dataset as ds
from .dataset import DataError
from .experiment import read_records, render_tables, run_experiment, summarize, write_records
from .graft import TrainingEquivalenceError, post_process, render_report
from .induce import InduceConfig, train
from .tree import classify_batch, deserialize, node_count, serialize


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="treegraft", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="induce unpruned and pruned trees from a dataset")
    p.add_argument("--names", required=True, help="attribute schema (.names)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--data", help="training data (.data, comma separated)")
    group.add_argument("--csv", help="training data (CSV with header)")
    p.add_argument("--min-cases", type=int, default=2, help="minimum cases per branch")
    p.add_argument("--cf", type=float, default=0.25, help="pruning confidence factor")
    p.add_argument("--out-unpruned", required=True)
    p.add_argument("--out-pruned", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("graft", help="post-process a tree against its training data")
    p.add_argument("--tree", required=True)
    p.add_argument("--names", required=True)
    p.add_argument("--data", required=True, help="the tree's training data")
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="write per-leaf report here instead of stdout")
    p.set_defaults(func=_cmd_graft)

    p = sub.add_parser("classify", help="classify data rows with a serialized tree")
    p.add_argument("--tree", required=True)
    p.add_argument("--names", required=True)
    p.add_argument("--input", required=True, help="rows to classify (label optional)")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("experiment", help="run repeated seeded holdout trials")
    p.add_argument("--names", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--records", required=True, help="output CSV of per-trial records")
    p.add_argument("--tables", required=True, help="output text tables")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("report", help="re-render tables from a records CSV")
    p.add_argument("--records", required=True)
    p.add_argument("--tables", required=True)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=_cmd_report)

    return parser


def _load_training(args) -> ds.Dataset:
    schema = ds.load_names(args.names)
    if getattr(args, "csv", None):
        return ds.load_csv(args.csv, schema)
    return ds.load_data(args.data, schema)


def _cmd_train(args) -> int:
    data = _load_training(args)
    config = InduceConfig(min_cases_per_branch=args.min_cases, prune_confidence=args.cf)
    unpruned, pruned = train(data, config)
    with open(args.out_unpruned, "w", encoding="utf-8") as fh:
        fh.write(serialize(unpruned))
    with open(args.out_pruned, "w", encoding="utf-8") as fh:
        fh.write(serialize(pruned))
    print(f"unpruned nodes: {node_count(unpruned)}")
    print(f"pruned nodes: {node_count(pruned)}")
    return 0


def _cmd_graft(args) -> int:
    schema = ds.load_names(args.names)
    data = ds.load_data(args.data, schema)
    with open(args.tree, encoding="utf-8") as fh:
        tree = deserialize(fh.read(), schema)
    grafted, report = post_process(tree, data)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(serialize(grafted))
    text = render_report(report, grafted)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"nodes: {node_count(tree)} -> {node_count(grafted)}")
    return 0


def _cmd_classify(args) -> int:
    schema = ds.load_names(args.names)
    with open(args.tree, encoding="utf-8") as fh:
        tree = deserialize(fh.read(), schema)
    data = ds.load_data(args.input, schema, allow_unlabeled=True)
    if len(data) == 0:
        return 0
    codes = classify_batch(tree, data)
    for code in codes:
        print(schema.class_labels[int(code)])
    actual = data.columns().labels
    if (actual >= 0).all():
        accuracy = 100.0 * float(np.mean(codes == actual))
        print(f"accuracy: {accuracy!r}%")
    return 0


def _cmd_experiment(args) -> int:
    schema = ds.load_names(args.names)
    data = ds.load_data(args.data, schema)
    records = run_experiment(
        data,
        trials=args.trials,
        train_fraction=args.fraction,
        base_seed=args.seed,
    )
    with open(args.records, "w", encoding="utf-8") as fh:
        fh.write(write_records(records))
    with open(args.tables, "w", encoding="utf-8") as fh:
        fh.write(render_tables(summarize(records), "text"))
    print(f"trials: {len(records)}  records: {args.records}  tables: {args.tables}")
    return 0


def _cmd_report(args) -> int:
    with open(args.records, encoding="utf-8") as fh:
        records = read_records(fh.read())
    report = summarize(records)
    with open(args.tables, "w", encoding="utf-8") as fh:
        fh.write(render_tables(report, args.format))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TrainingEquivalenceError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
