"""C4.5-style decision trees with an evidence-based grafting post-processor."""

from .dataset import (
    AttributeSpec,
    DataError,
    Dataset,
    Example,
    Schema,
    SplitPlan,
    format_data,
    load_bundled,
    make_split,
    parse_csv,
    parse_data,
    parse_names,
)
from .experiment import (
    ComparisonReport,
    TrialRecord,
    read_records,
    render_tables,
    run_experiment,
    run_single_trial,
    summarize,
    write_records,
)
from .graft import (
    GraftCandidate,
    GraftOutcome,
    GraftReport,
    TrainingEquivalenceError,
    best_candidates,
    cases_at,
    graft_leaf,
    laplace,
    post_process,
)
from .induce import InduceConfig, SplitCandidate, grow, prune, train
from .stats import TestResult, mean_sd, paired_t, sign_test
from .tree import (
    ContinuousTest,
    DecisionTree,
    DiscreteTest,
    Leaf,
    PathBounds,
    bounds,
    classify,
    classify_batch,
    deserialize,
    node_count,
    serialize,
)

__version__ = "0.1.0"
