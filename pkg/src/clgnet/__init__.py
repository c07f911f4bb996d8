"""Conditional linear Gaussian Bayesian networks with data-parallel learning."""

from .bench import BenchReport, BenchRow, bench_sweep, parallel_limit, parameter_hash
from .data import (
    BatchSource,
    Column,
    DataBatch,
    DataSchema,
    batch_stream,
    iter_batches,
    open_dataset,
    read_all,
    write_dataset,
)
from .distributions import (
    RIDGE,
    ROW_SUM_TOL,
    VARIANCE_FLOOR,
    ConditionalLinearGaussian,
    MultinomialTable,
)
from .errors import DatasetError, ModelError, QueryError
from .graph import ParentSet, ParentSetDag
from .greedy import (
    Candidate,
    FeatureSelection,
    FssState,
    SearchStep,
    fss_score,
    greedy_search,
    select_best,
)
from .mle import MleConfig, compute_mle, sum_batch
from .network import (
    BayesianNetwork,
    global_sufficient_statistics,
    model_text,
    moments_to_parameters,
    read_model,
    validate,
    write_model,
)
from .sampling import (
    Evidence,
    SampleRng,
    WeightedSample,
    derive_task_seed,
    estimate_with_error,
    event_probability,
    expected_value,
    parse_evidence,
    parse_query,
    weighted_sample,
)
from .suffstats import NetworkStats, NodeStats, config_count, config_index, config_states
from .synthetic import SyntheticSpec, generate_data, make_superparent_network, sample_rows
from .variables import CONTINUOUS, DISCRETE, Variable
from .vectors import CompoundVector, IndexedElement, PairwiseSum, vector_add, vector_scale, zero_like

__all__ = [
    "BatchSource",
    "BayesianNetwork",
    "BenchReport",
    "BenchRow",
    "Candidate",
    "Column",
    "CompoundVector",
    "ConditionalLinearGaussian",
    "CONTINUOUS",
    "DataBatch",
    "DataSchema",
    "DatasetError",
    "DISCRETE",
    "Evidence",
    "FeatureSelection",
    "FssState",
    "IndexedElement",
    "MleConfig",
    "ModelError",
    "MultinomialTable",
    "NetworkStats",
    "NodeStats",
    "PairwiseSum",
    "ParentSet",
    "ParentSetDag",
    "QueryError",
    "RIDGE",
    "ROW_SUM_TOL",
    "SampleRng",
    "SearchStep",
    "SyntheticSpec",
    "Variable",
    "VARIANCE_FLOOR",
    "WeightedSample",
    "batch_stream",
    "bench_sweep",
    "compute_mle",
    "config_count",
    "config_index",
    "config_states",
    "derive_task_seed",
    "estimate_with_error",
    "event_probability",
    "expected_value",
    "fss_score",
    "generate_data",
    "global_sufficient_statistics",
    "greedy_search",
    "iter_batches",
    "make_superparent_network",
    "model_text",
    "moments_to_parameters",
    "open_dataset",
    "parallel_limit",
    "parameter_hash",
    "parse_evidence",
    "parse_query",
    "read_all",
    "read_model",
    "sample_rows",
    "select_best",
    "sum_batch",
    "validate",
    "vector_add",
    "vector_scale",
    "weighted_sample",
    "write_dataset",
    "write_model",
    "zero_like",
]
