"""Maximum likelihood estimation over a batch stream.

The estimator is a map-reduce: each batch is summed into one statistics
vector (map), batch sums are combined (reduce), the combined sum is divided
by the record count and handed to the moment solver.  The combine uses a
bracketing that depends only on the number of batches, and batch partials
are consumed in file order, so the learned parameters are bit-identical for
every worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

from .data import BatchSource, DataBatch, parse_records
from .errors import DatasetError
from .graph import ParentSetDag
from .network import BayesianNetwork, moments_to_parameters
from .parallel import TaskRunner
from .suffstats import NetworkStats
from .vectors import CompoundVector, PairwiseSum


@dataclass(frozen=True)
class MleConfig:
    batch_size: int = 1000
    workers: int = 1
    deterministic_reduce: bool = True

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def _as_layout(skeleton) -> NetworkStats:
    if isinstance(skeleton, NetworkStats):
        return skeleton
    if isinstance(skeleton, BayesianNetwork):
        return skeleton.stats_layout
    if isinstance(skeleton, ParentSetDag):
        return NetworkStats.from_dag(skeleton)
    raise TypeError(f"cannot derive a statistics layout from {type(skeleton).__name__}")


def sum_batch(skeleton, batch: DataBatch) -> CompoundVector:
    """Sum of per-instance statistics over one batch."""
    if len(batch) == 0:
        raise ValueError("batch is empty")
    return _as_layout(skeleton).batch_stats(batch.values)


_WORKER: dict = {}


def _init_worker(schema, layout):
    _WORKER["schema"] = schema
    _WORKER["layout"] = layout


def _block_stats(task):
    origin, first_lineno, lines = task
    values = parse_records(lines, _WORKER["schema"], first_lineno)
    return _WORKER["layout"].batch_stats(values), len(lines)


def compute_mle(source: BatchSource, dag: ParentSetDag, config: MleConfig = MleConfig()) -> BayesianNetwork:
    """Fit all network parameters from the records of ``source``.

    The dataset header must match the graph's variables by name, kind and
    position.  The record count is taken from the stream itself.
    """
    if not source.schema.matches_variables(dag.variables):
        raise DatasetError(
            f"dataset header {source.schema.header_line()!r} does not match the network variables"
        )
    source.batch_size = config.batch_size
    layout = NetworkStats.from_dag(dag)

    def blocks():
        while True:
            split = source.split_lines()
            if split is None:
                return
            yield split

    acc = PairwiseSum()
    n = 0
    with TaskRunner(config.workers, init=_init_worker, initargs=(source.schema, layout)) as runner:
        for stats, count in runner.map(
            _block_stats,
            blocks(),
            max_pending=config.workers + 1,
            ordered=config.deterministic_reduce,
        ):
            acc.push(stats)
            n += count
    if n == 0:
        raise DatasetError("dataset contains no records")
    expected = acc.total().divide(n)
    if not expected.allfinite():
        raise ValueError("non-finite statistics; dataset may contain extreme values")
    return moments_to_parameters(dag, expected, n)
