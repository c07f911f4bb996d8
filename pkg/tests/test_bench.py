import csv

import numpy as np
import pytest

from clgnet import (
    SyntheticSpec,
    bench_sweep,
    generate_data,
    make_superparent_network,
    parallel_limit,
)
from clgnet.bench import CSV_HEADER
from clgnet.plotting import save_sweep_plot


def simulate_peak_concurrency(process_time, load_time, workers, batches):
    """Discrete-event pipeline: one serialized load channel feeding workers.

    A free worker grabs the channel, loads its batch (L), releases the
    channel and processes the batch (P).  Returns the peak number of batches
    on-core at once, counting the hand-off instant where one batch finishes
    as its successor starts: both are resident at that moment, so processing
    intervals are closed.
    """
    channel_free = 0.0
    worker_free = [0.0] * workers
    intervals = []
    for _ in range(batches):
        w = min(range(workers), key=lambda i: worker_free[i])
        start_load = max(channel_free, worker_free[w])
        end_load = start_load + load_time
        end_proc = end_load + process_time
        channel_free = end_load
        worker_free[w] = end_proc
        intervals.append((end_load, end_proc))
    # closed intervals: starts sort before ends at equal times
    events = sorted(
        [(s, 0, +1) for s, _ in intervals] + [(e, 1, -1) for _, e in intervals]
    )
    peak = current = 0
    for _, _, delta in events:
        current += delta
        peak = max(peak, current)
    return peak


class TestParallelLimit:
    def test_three_to_one_ratio_gives_four(self):
        assert parallel_limit(3.0, 1.0) == 4

    def test_pure_io_bound(self):
        assert parallel_limit(0.0, 1.0) == 1

    def test_ten_to_one(self):
        assert parallel_limit(10.0, 1.0) == 11

    def test_zero_load_time_rejected(self):
        with pytest.raises(ValueError):
            parallel_limit(1.0, 0.0)

    def test_negative_process_time_rejected(self):
        with pytest.raises(ValueError):
            parallel_limit(-1.0, 1.0)

    def test_matches_pipeline_simulation(self):
        rng = np.random.default_rng(0)
        cases = [(3.0, 1.0)]  # the four-core illustration
        while len(cases) < 21:
            load = float(rng.uniform(0.1, 2.0))
            process = float(rng.uniform(0.0, 10.0) * load)
            cases.append((process, load))
        for process, load in cases:
            bound = parallel_limit(process, load)
            peak = simulate_peak_concurrency(
                process, load, workers=bound + 4, batches=4 * bound + 8
            )
            assert peak == bound, (process, load)


@pytest.fixture(scope="module")
def small_bench_setup(tmp_path_factory):
    bn = make_superparent_network(SyntheticSpec(2, 2, seed=21))
    path = tmp_path_factory.mktemp("bench") / "d.csv"
    generate_data(bn, 3000, seed=22, out_path=path)
    return bn, path


class TestBenchSweep:
    def test_single_value_single_row(self, small_bench_setup):
        bn, path = small_bench_setup
        report = bench_sweep(path, bn.dag, "workers", [1], repetitions=1)
        assert len(report.rows) == 1
        row = report.rows[0]
        assert row.workers == 1 and row.n == 3000 and row.median_ms > 0

    def test_hashes_identical_across_rows(self, small_bench_setup):
        bn, path = small_bench_setup
        report = bench_sweep(path, bn.dag, "batch_size", [64, 512, 3000], repetitions=1)
        hashes = {r.param_hash for r in report.rows}
        assert len(hashes) == 1

    def test_csv_round_trip(self, small_bench_setup, tmp_path):
        bn, path = small_bench_setup
        report = bench_sweep(path, bn.dag, "workers", [1, 2], repetitions=1)
        out = tmp_path / "report.csv"
        report.to_csv(out)
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert tuple(rows[0]) == CSV_HEADER
        assert len(rows) == 3
        assert [r[1] for r in rows[1:]] == ["1", "2"]
        float(rows[1][2])  # median_ms parses

    def test_unknown_sweep_rejected(self, small_bench_setup):
        bn, path = small_bench_setup
        with pytest.raises(ValueError, match="unknown sweep"):
            bench_sweep(path, bn.dag, "records", [1])

    def test_plot_written(self, small_bench_setup, tmp_path):
        bn, path = small_bench_setup
        report = bench_sweep(path, bn.dag, "batch_size", [64, 512], repetitions=1)
        png = tmp_path / "report.png"
        save_sweep_plot(report, png)
        assert png.stat().st_size > 0
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
