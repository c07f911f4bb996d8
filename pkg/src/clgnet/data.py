"""Batched streaming access to on-disk data sets.

File format (UTF-8 text, LF or CRLF):

    line 1:   comma-separated header, ``name:disc(arity)`` or ``name:cont``
    lines 2+: comma-separated values, one record per line; discrete values
              are integer state ids, no missing values

Record ordinals are 0-based (the first record is ordinal 0 and sits on file
line 2).  A BatchSource supports two access patterns: ``try_advance``
consumes a single record, ``try_split`` peels off the next batch of up to
``batch_size`` records so it can be handed to a worker.  Splitting is the
only operation that moves the cursor, and the source is never shared across
threads: parallel runs keep splitting in one place and fan the split-off
batches out to workers.

Malformed input aborts with the offending 1-based line number; records are
never silently skipped, since dropped rows would corrupt every statistic
computed downstream.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass

import numpy as np

from .errors import DatasetError
from .parallel import TaskRunner
from .variables import CONTINUOUS, DISCRETE, Variable

DEFAULT_BATCH_SIZE = 1000

_DISC_RE = re.compile(r"^(?P<name>[^:,()\s]+):disc\((?P<arity>\d+)\)$")
_CONT_RE = re.compile(r"^(?P<name>[^:,()\s]+):cont$")


@dataclass(frozen=True)
class Column:
    name: str
    kind: str
    arity: int | None = None

    @property
    def is_discrete(self) -> bool:
        return self.kind == DISCRETE

    def header_token(self) -> str:
        if self.is_discrete:
            return f"{self.name}:disc({self.arity})"
        return f"{self.name}:cont"


class DataSchema:
    def __init__(self, columns):
        columns = tuple(columns)
        if not columns:
            raise DatasetError("schema needs at least one column")
        names = [c.name for c in columns]
        if len(set(names)) != len(names):
            raise DatasetError("duplicate column names in header")
        for c in columns:
            if c.is_discrete and (c.arity is None or c.arity < 2):
                raise DatasetError(f"column {c.name!r} needs arity >= 2, got {c.arity}")
        self.columns = columns

    def __len__(self):
        return len(self.columns)

    def __iter__(self):
        return iter(self.columns)

    def __eq__(self, other):
        return isinstance(other, DataSchema) and self.columns == other.columns

    @classmethod
    def parse_header(cls, line: str) -> "DataSchema":
        columns = []
        for token in line.strip().split(","):
            token = token.strip()
            m = _DISC_RE.match(token)
            if m:
                columns.append(Column(m.group("name"), DISCRETE, int(m.group("arity"))))
                continue
            m = _CONT_RE.match(token)
            if m:
                columns.append(Column(m.group("name"), CONTINUOUS))
                continue
            raise DatasetError(f"malformed header column {token!r}", line=1)
        return cls(columns)

    @classmethod
    def from_variables(cls, variables) -> "DataSchema":
        return cls(Column(v.name, v.kind, v.arity) for v in variables)

    def header_line(self) -> str:
        return ",".join(c.header_token() for c in self.columns)

    def to_variables(self) -> tuple[Variable, ...]:
        return tuple(
            Variable(c.name, i, c.kind, c.arity) for i, c in enumerate(self.columns)
        )

    def matches_variables(self, variables) -> bool:
        variables = sorted(variables, key=lambda v: v.index)
        return self.to_variables() == tuple(variables)


@dataclass(frozen=True)
class DataBatch:
    """Consecutive records; ``origin`` is the ordinal of the first one."""

    origin: int
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    def __len__(self):
        return self.values.shape[0]

    def __iter__(self):
        return iter(self.values)


def parse_record(line: str, schema: DataSchema, lineno: int) -> list[float]:
    tokens = line.split(",")
    if len(tokens) != len(schema):
        raise DatasetError(
            f"expected {len(schema)} fields, found {len(tokens)}", line=lineno
        )
    out = [0.0] * len(tokens)
    for i, (token, col) in enumerate(zip(tokens, schema)):
        token = token.strip()
        try:
            v = float(token)
        except ValueError:
            raise DatasetError(
                f"non-numeric value {token!r} in column {col.name!r}", line=lineno
            ) from None
        if not np.isfinite(v):
            raise DatasetError(
                f"non-finite value {token!r} in column {col.name!r}", line=lineno
            )
        if col.is_discrete:
            if v != int(v):
                raise DatasetError(
                    f"discrete column {col.name!r} has non-integer value {token!r}",
                    line=lineno,
                )
            if not 0 <= int(v) < col.arity:
                raise DatasetError(
                    f"value {token!r} out of range for column {col.name!r} "
                    f"(arity {col.arity})",
                    line=lineno,
                )
        out[i] = v
    return out


def parse_records(lines, schema: DataSchema, first_lineno: int) -> np.ndarray:
    """Parse a block of record lines into a (len(lines), ncols) float array.

    A C tokenizer handles the common case; on any failure the strict
    per-line parser reruns the block to produce an exact line-numbered
    error (or to accept unusual-but-valid spacing the fast path rejects).
    """
    ncols = len(schema)
    try:
        values = np.loadtxt(
            io.StringIO("\n".join(lines)), delimiter=",", dtype=np.float64, ndmin=2
        )
    except Exception:
        return _parse_records_strict(lines, schema, first_lineno)
    if values.shape != (len(lines), ncols):
        return _parse_records_strict(lines, schema, first_lineno)
    for i, col in enumerate(schema):
        colv = values[:, i]
        bad = ~np.isfinite(colv)
        if col.is_discrete:
            bad |= (colv != np.floor(colv)) | (colv < 0) | (colv >= col.arity)
        if bad.any():
            row = int(np.argmax(bad))
            parse_record(lines[row], schema, first_lineno + row)
            raise DatasetError(
                f"invalid value in column {col.name!r}", line=first_lineno + row
            )
    return values


def _parse_records_strict(lines, schema, first_lineno) -> np.ndarray:
    rows = [
        parse_record(line, schema, first_lineno + i) for i, line in enumerate(lines)
    ]
    return np.array(rows, dtype=np.float64).reshape(len(lines), len(schema))


class BatchSource:
    """Single-pass record cursor over a data file.

    Use as a context manager; the underlying file is read forward only.
    """

    def __init__(self, path, batch_size: int = DEFAULT_BATCH_SIZE):
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        self.path = path
        self.batch_size = batch_size
        try:
            self._fh = open(path, "r", encoding="utf-8", newline=None)
        except OSError as e:
            raise DatasetError(f"cannot open dataset {path}: {e}") from e
        header = self._fh.readline()
        if header == "":
            self._fh.close()
            raise DatasetError("empty file: missing header", line=1)
        try:
            self.schema = DataSchema.parse_header(header)
        except DatasetError:
            self._fh.close()
            raise
        self._lineno = 1
        self._ordinal = 0

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _read_line(self) -> str | None:
        line = self._fh.readline()
        if line == "":
            return None
        self._lineno += 1
        return line.rstrip("\r\n")

    def try_advance(self, action) -> bool:
        """Consume one record, apply ``action`` to it, return True.

        Returns False at end of file without calling ``action``.
        """
        line = self._read_line()
        if line is None:
            return False
        values = np.asarray(parse_record(line, self.schema, self._lineno))
        self._ordinal += 1
        action(values)
        return True

    def split_lines(self):
        """Next batch as raw text: (origin, first_lineno, lines), or None.

        The cheap primitive behind try_split; parsing the returned lines can
        happen off the cursor's thread of control.
        """
        first_lineno = self._lineno + 1
        lines = []
        for _ in range(self.batch_size):
            line = self._read_line()
            if line is None:
                break
            lines.append(line)
        if not lines:
            return None
        origin = self._ordinal
        self._ordinal += len(lines)
        return origin, first_lineno, lines

    def try_split(self) -> DataBatch | None:
        """Consume up to ``batch_size`` records into a batch, or None at EOF."""
        split = self.split_lines()
        if split is None:
            return None
        origin, first_lineno, lines = split
        return DataBatch(origin, parse_records(lines, self.schema, first_lineno))


def open_dataset(path, batch_size: int = DEFAULT_BATCH_SIZE) -> BatchSource:
    return BatchSource(path, batch_size)


def iter_batches(source: BatchSource):
    while True:
        batch = source.try_split()
        if batch is None:
            return
        yield batch


def _parse_and_apply(task):
    fn, schema, origin, first_lineno, lines = task
    batch = DataBatch(origin, parse_records(lines, schema, first_lineno))
    return fn(batch)


def batch_stream(source: BatchSource, fn, workers: int = 1, *, kind: str = "process"):
    """Apply ``fn`` to every batch of ``source``, ``workers`` batches at a time.

    Splitting stays serialized on the caller; split-off batches are parsed
    and processed concurrently by the pool.  Results are yielded in batch
    (file) order, and at most workers + 2 batches are materialised at once.
    With processes, ``fn`` must be picklable and is applied in the worker.
    """
    schema = source.schema

    def tasks():
        while True:
            split = source.split_lines()
            if split is None:
                return
            origin, first_lineno, lines = split
            yield (fn, schema, origin, first_lineno, lines)

    with TaskRunner(workers, kind=kind) as runner:
        yield from runner.map(_parse_and_apply, tasks(), max_pending=workers + 1)


def read_all(path) -> tuple[DataSchema, np.ndarray]:
    """Whole data set in memory: (schema, values array of shape (n, ncols))."""
    with open_dataset(path, batch_size=8192) as source:
        parts = [batch.values for batch in iter_batches(source)]
        schema = source.schema
    if parts:
        return schema, np.concatenate(parts, axis=0)
    return schema, np.empty((0, len(schema)))


def count_records(path) -> int:
    with open_dataset(path, batch_size=8192) as source:
        total = 0
        while True:
            split = source.split_lines()
            if split is None:
                return total
            total += len(split[2])


def format_record(values, schema: DataSchema) -> str:
    parts = []
    for v, col in zip(values, schema):
        if col.is_discrete:
            parts.append(str(int(v)))
        else:
            parts.append("%.10g" % v)
    return ",".join(parts)


def write_dataset(path, schema: DataSchema, values) -> int:
    """Write records to ``path`` in the dataset format; returns the count."""
    values = np.asarray(values, dtype=np.float64)
    if values.size and values.shape[1] != len(schema):
        raise ValueError("value columns do not match the schema")
    disc = [c.is_discrete for c in schema]
    fmt = ",".join("%d" if d else "%.10g" for d in disc)
    written = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(schema.header_line() + "\n")
        chunk = 50_000
        for start in range(0, values.shape[0], chunk):
            block = values[start : start + chunk]
            fh.write("\n".join(fmt % tuple(row) for row in block))
            fh.write("\n")
            written += block.shape[0]
    return written
