import threading

import numpy as np
import pytest

from clgnet import (
    DataSchema,
    DatasetError,
    batch_stream,
    iter_batches,
    open_dataset,
    read_all,
    write_dataset,
)


HEADER = "a:disc(2),b:cont"


def write_file(path, n_records, header=HEADER, newline="\n"):
    rows = [f"{i % 2},{i * 0.5}" for i in range(n_records)]
    path.write_text(newline.join([header] + rows) + newline)
    return path


class TestHeader:
    def test_parse_example(self):
        schema = DataSchema.parse_header(HEADER)
        assert [(c.name, c.kind, c.arity) for c in schema] == [
            ("a", "discrete", 2),
            ("b", "continuous", None),
        ]

    def test_arity_one_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a:disc(1)\n")
        with pytest.raises(DatasetError, match="arity"):
            open_dataset(p)

    def test_duplicate_names_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a:disc(2),a:cont\n")
        with pytest.raises(DatasetError, match="duplicate"):
            open_dataset(p)

    def test_malformed_header(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a;disc\n")
        with pytest.raises(DatasetError, match="malformed header"):
            open_dataset(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DatasetError, match="cannot open"):
            open_dataset(tmp_path / "absent.csv")

    def test_empty_file(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("")
        with pytest.raises(DatasetError, match="missing header"):
            open_dataset(p)


class TestTryAdvance:
    def test_single_record_then_eof(self, tmp_path):
        p = write_file(tmp_path / "d.csv", 1)
        seen = []
        with open_dataset(p) as src:
            assert src.try_advance(seen.append) is True
            assert src.try_advance(seen.append) is False
        assert len(seen) == 1

    def test_record_parsing(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text(f"{HEADER}\n1,0.5\n")
        rows = []
        with open_dataset(p) as src:
            src.try_advance(rows.append)
        assert np.array_equal(rows[0], [1.0, 0.5])

    def test_out_of_range_reports_line_two(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text(f"{HEADER}\n2,0.5\n")
        with open_dataset(p) as src:
            with pytest.raises(DatasetError, match="line 2") as err:
                src.try_advance(lambda r: None)
        assert err.value.line == 2


class TestTrySplit:
    def test_sizes_4_4_2(self, tmp_path):
        p = write_file(tmp_path / "d.csv", 10)
        with open_dataset(p, batch_size=4) as src:
            sizes = [len(b) for b in iter_batches(src)]
        assert sizes == [4, 4, 2]

    def test_exact_multiple(self, tmp_path):
        p = write_file(tmp_path / "d.csv", 4)
        with open_dataset(p, batch_size=4) as src:
            batches = list(iter_batches(src))
            assert src.try_split() is None
        assert [len(b) for b in batches] == [4]

    def test_origins_are_cumulative(self, tmp_path):
        p = write_file(tmp_path / "d.csv", 10)
        with open_dataset(p, batch_size=4) as src:
            origins = [b.origin for b in iter_batches(src)]
        assert origins == [0, 4, 8]

    def test_concatenation_matches_sequential_read(self, tmp_path):
        p = write_file(tmp_path / "d.csv", 123)
        sequential = []
        with open_dataset(p) as src:
            while src.try_advance(sequential.append):
                pass
        with open_dataset(p, batch_size=7) as src:
            stacked = np.concatenate([b.values for b in iter_batches(src)])
        assert np.array_equal(np.array(sequential), stacked)

    def test_parse_error_carries_line(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text(f"{HEADER}\n0,1.0\n1,nope\n")
        with open_dataset(p, batch_size=10) as src:
            with pytest.raises(DatasetError, match="line 3"):
                src.try_split()


class TestPartitionProperty:
    @pytest.mark.parametrize("batch_size", [1, 7, 1000])
    @pytest.mark.parametrize("shape", ["0", "1", "B-1", "B", "B+1", "10B+3"])
    def test_partition(self, tmp_path, batch_size, shape):
        counts = {
            "0": 0,
            "1": 1,
            "B-1": batch_size - 1,
            "B": batch_size,
            "B+1": batch_size + 1,
            "10B+3": 10 * batch_size + 3,
        }
        n = counts[shape]
        p = write_file(tmp_path / "d.csv", n)
        with open_dataset(p, batch_size=batch_size) as src:
            batches = list(iter_batches(src))
        sizes = [len(b) for b in batches]
        assert sum(sizes) == n
        assert all(s == batch_size for s in sizes[:-1])
        if n:
            assert 1 <= sizes[-1] <= batch_size
            assert [b.origin for b in batches] == list(np.cumsum([0] + sizes[:-1]))
        else:
            assert batches == []

    def test_header_only_file_yields_nothing(self, tmp_path):
        p = write_file(tmp_path / "d.csv", 0)
        with open_dataset(p) as src:
            assert list(iter_batches(src)) == []


class TestFormats:
    def test_crlf(self, tmp_path):
        p = write_file(tmp_path / "d.csv", 5, newline="\r\n")
        schema, values = read_all(p)
        assert values.shape == (5, 2)

    def test_no_trailing_newline(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text(f"{HEADER}\n0,1.5\n1,2.5")
        _, values = read_all(p)
        assert values.shape == (2, 2)

    def test_write_read_round_trip(self, tmp_path):
        schema = DataSchema.parse_header(HEADER)
        rng = np.random.default_rng(0)
        rows = np.column_stack(
            [rng.integers(0, 2, size=50).astype(float), rng.normal(size=50)]
        )
        p = tmp_path / "d.csv"
        assert write_dataset(p, schema, rows) == 50
        schema2, values = read_all(p)
        assert schema2 == schema
        np.testing.assert_allclose(values, rows, rtol=1e-9)

    def test_single_column_dataset(self, tmp_path):
        schema = DataSchema.parse_header("a:disc(3)")
        p = tmp_path / "d.csv"
        write_dataset(p, schema, np.array([[0.0], [2.0], [1.0]]))
        _, values = read_all(p)
        assert np.array_equal(values, [[0.0], [2.0], [1.0]])


def batch_origin_and_sum(batch):
    return batch.origin, float(batch.values.sum()), len(batch)


class TestBatchStream:
    def test_single_worker_preserves_order(self, tmp_path):
        p = write_file(tmp_path / "d.csv", 25)
        with open_dataset(p, batch_size=4) as src:
            results = list(batch_stream(src, batch_origin_and_sum, workers=1))
        assert [r[0] for r in results] == [0, 4, 8, 12, 16, 20, 24]

    @pytest.mark.parametrize("workers", [2, 3])
    def test_delivery_multiset_matches_sequential(self, tmp_path, workers):
        p = write_file(tmp_path / "d.csv", 53)
        with open_dataset(p, batch_size=5) as src:
            sequential = list(batch_stream(src, batch_origin_and_sum, workers=1))
        with open_dataset(p, batch_size=5) as src:
            parallel = list(batch_stream(src, batch_origin_and_sum, workers=workers))
        assert sorted(parallel) == sorted(sequential)
        assert parallel == sequential  # ordered delivery

    @pytest.mark.parametrize("batch_size", [1, 7, 1000])
    def test_lengths_partition_total(self, tmp_path, batch_size):
        p = write_file(tmp_path / "d.csv", 208)
        with open_dataset(p, batch_size=batch_size) as src:
            results = list(batch_stream(src, batch_origin_and_sum, workers=2))
        assert sum(r[2] for r in results) == 208

    def test_parse_error_aborts_deterministically(self, tmp_path):
        p = tmp_path / "d.csv"
        rows = [f"0,{i}" for i in range(30)]
        rows[17] = "0,bad"
        p.write_text("\n".join([HEADER] + rows) + "\n")
        for workers in (1, 2):
            with open_dataset(p, batch_size=5) as src:
                with pytest.raises(DatasetError, match=f"line {17 + 2}"):
                    list(batch_stream(src, batch_origin_and_sum, workers=workers))

    def test_bounded_batches_in_flight(self, tmp_path):
        # threads + a slow consumer: materialised batches never exceed workers + 2
        p = write_file(tmp_path / "d.csv", 60)
        workers = 2
        lock = threading.Lock()
        live = {"now": 0, "peak": 0}

        with open_dataset(p, batch_size=2) as src:
            original = src.split_lines

            def counting_split():
                split = original()
                if split is not None:
                    with lock:
                        live["now"] += 1
                        live["peak"] = max(live["peak"], live["now"])
                return split

            src.split_lines = counting_split

            def slow_consume(batch):
                import time

                time.sleep(0.002)
                with lock:
                    live["now"] -= 1
                return batch.origin

            list(batch_stream(src, slow_consume, workers=workers, kind="thread"))
        assert live["peak"] <= workers + 2
