"""Benchmark harness: timed estimation sweeps and the pipeline core bound.

When batch loading is serialized on one I/O channel while processing runs
concurrently, the number of cores that can be busy at the same time is
floor(P / L) + 1, where P is the time to process one batch and L the time
to load it.  ``parallel_limit`` computes that bound; the sweep harness
measures real wall times for varying worker counts or batch sizes and
reports them as CSV rows, each carrying a hash of the learned parameters
so runs can be checked for agreement.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import time
from dataclasses import dataclass

from .data import count_records, open_dataset
from .mle import MleConfig, compute_mle
from .network import BayesianNetwork, model_text

CSV_HEADER = ("sweep", "value", "median_ms", "workers", "batch_size", "n", "param_hash")


def parallel_limit(process_time: float, load_time: float) -> int:
    """Maximum cores simultaneously busy: floor(P/L) + 1."""
    if load_time <= 0:
        raise ValueError("load time must be > 0")
    if process_time < 0:
        raise ValueError("process time must be >= 0")
    return int(math.floor(process_time / load_time)) + 1


def parameter_hash(bn: BayesianNetwork) -> str:
    """Digest of the learned parameters at 10 significant digits.

    Rounding makes the hash invariant to the sub-1e-12 regrouping
    differences that different batch sizes introduce in the reduction,
    while still distinguishing any two genuinely different fits.
    """
    return hashlib.sha256(model_text(bn, precision=10).encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class BenchRow:
    sweep: str
    value: int
    median_ms: float
    workers: int
    batch_size: int
    n: int
    param_hash: str


@dataclass(frozen=True)
class BenchReport:
    rows: tuple[BenchRow, ...]

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            self._write(fh)

    def csv_text(self) -> str:
        buf = io.StringIO()
        self._write(buf)
        return buf.getvalue()

    def _write(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow(
                [r.sweep, r.value, f"{r.median_ms:.3f}", r.workers, r.batch_size, r.n, r.param_hash]
            )


def _median(times: list[float]) -> float:
    ordered = sorted(times)
    mid = len(ordered) // 2
    if len(ordered) % 2:
        return ordered[mid]
    return 0.5 * (ordered[mid - 1] + ordered[mid])


def run_mle_timed(data_path, dag, config: MleConfig) -> tuple[BayesianNetwork, float]:
    """One estimation run; returns the network and wall time in ms."""
    with open_dataset(data_path, batch_size=config.batch_size) as source:
        start = time.perf_counter()
        bn = compute_mle(source, dag, config)
        elapsed = time.perf_counter() - start
    return bn, elapsed * 1000.0


def bench_sweep(
    data_path,
    dag,
    sweep: str,
    values,
    repetitions: int = 3,
    workers: int = 1,
    batch_size: int = 1000,
) -> BenchReport:
    """Median estimation wall time per sweep value.

    ``sweep`` is "workers" or "batch_size"; the named parameter takes each
    of ``values`` in turn while the other stays fixed.  Runs execute one at
    a time so timings never contend with each other.
    """
    if sweep not in ("workers", "batch_size"):
        raise ValueError(f"unknown sweep {sweep!r}")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    n = count_records(data_path)
    rows = []
    for value in values:
        if sweep == "workers":
            config = MleConfig(batch_size=batch_size, workers=int(value))
        else:
            config = MleConfig(batch_size=int(value), workers=workers)
        times = []
        bn = None
        for _ in range(repetitions):
            bn, ms = run_mle_timed(data_path, dag, config)
            times.append(ms)
        rows.append(
            BenchRow(
                sweep=sweep,
                value=int(value),
                median_ms=_median(times),
                workers=config.workers,
                batch_size=config.batch_size,
                n=n,
                param_hash=parameter_hash(bn),
            )
        )
    return BenchReport(tuple(rows))
