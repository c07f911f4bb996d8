"""Parallel importance sampling with reproducible per-sample seeding.

Samples are drawn by likelihood weighting: variables are sampled in
topological order from their parent conditionals, evidence variables are
clamped to their observed values, and each sample is weighted by the
product of the evidence conditionals.  Expectations are the weighted ratio

    estimate = sum_i f(x_i) w_i / sum_i w_i.

Reproducibility does not rely on scheduling: sample i gets its own RNG
seeded by a 64-bit mix of (base_seed, i), samples are generated in
fixed-size index chunks, and the (numerator, denominator) pairs are reduced
per chunk in index order and across chunks with a fixed bracketing.  The
estimate is therefore bit-identical for any worker count.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import partial

import numpy as np

from .errors import QueryError
from .network import BayesianNetwork
from .parallel import TaskRunner
from .vectors import PairwiseSum

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
SAMPLE_CHUNK = 4096


def _mix64(z: int) -> int:
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


def derive_task_seed(base_seed: int, index: int) -> int:
    """Scheduler-independent 64-bit seed for sample ``index``.

    The index is spread by a fixed odd multiplier, folded into the base seed,
    and passed through an avalanche finalizer; the map is a bijection of the
    index for any base seed, so distinct indices never collide.
    """
    return _mix64((base_seed ^ ((index * _GOLDEN) & _MASK64)) & _MASK64)


class SampleRng:
    """Small deterministic random stream (Weyl sequence + avalanche mix).

    Cheap to construct, which matters because every sample gets its own
    stream seeded from its index.  Gaussians come from the Box-Muller
    transform with the sine half cached.
    """

    __slots__ = ("_state", "_spare")

    def __init__(self, seed: int):
        self._state = seed & _MASK64
        self._spare = None

    def _next64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix64(self._state)

    def random(self) -> float:
        """Uniform draw in [0, 1)."""
        return self._next64() * 2.0**-64

    def standard_normal(self) -> float:
        if self._spare is not None:
            value = self._spare
            self._spare = None
            return value
        u1 = (self._next64() + 1) * 2.0**-64  # (0, 1]: keeps the log finite
        u2 = self._next64() * 2.0**-64
        r = math.sqrt(-2.0 * math.log(u1))
        t = 2.0 * math.pi * u2
        self._spare = r * math.sin(t)
        return r * math.cos(t)


class Evidence:
    """Partial assignment, variable index -> observed value."""

    def __init__(self, bn: BayesianNetwork, assignments: dict):
        items = {}
        for key, value in assignments.items():
            var = bn.variables[key] if isinstance(key, int) else bn.dag.variable_named(key)
            value = float(value)
            if var.is_discrete:
                if value != int(value) or not 0 <= int(value) < var.arity:
                    raise ValueError(
                        f"evidence value {value!r} out of range for {var.name!r} (arity {var.arity})"
                    )
            elif not math.isfinite(value):
                raise ValueError(f"evidence value for {var.name!r} must be finite")
            if var.index in items:
                raise ValueError(f"duplicate evidence for {var.name!r}")
            items[var.index] = value
        self._items = items

    @classmethod
    def empty(cls, bn: BayesianNetwork) -> "Evidence":
        return cls(bn, {})

    def __len__(self):
        return len(self._items)

    def __contains__(self, index: int) -> bool:
        return index in self._items

    def __getitem__(self, index: int) -> float:
        return self._items[index]

    def items(self):
        return self._items.items()


@dataclass(frozen=True)
class WeightedSample:
    values: np.ndarray
    weight: float


def _draw(bn: BayesianNetwork, evidence: Evidence, rng) -> tuple[list, float]:
    values = [0.0] * len(bn.variables)
    weight = 1.0
    for var in bn.dag.topological_order():
        dist = bn.distributions[var.index]
        if var.index in evidence:
            values[var.index] = evidence[var.index]
            weight *= dist.density(values)
        else:
            values[var.index] = dist.sample(rng, values)
    return values, weight


def weighted_sample(bn: BayesianNetwork, evidence: Evidence, rng) -> WeightedSample:
    """One likelihood-weighting draw from the evidence-clamped network.

    The weight is the product of the evidence conditionals given the sampled
    parents.  Continuous evidence contributes Gaussian density values rather
    than probabilities, so weights can exceed 1.  ``rng`` needs ``random()``
    and ``standard_normal()``; both SampleRng and numpy Generator qualify.
    """
    values, weight = _draw(bn, evidence, rng)
    return WeightedSample(np.array(values), weight)


_SAMPLER: dict = {}


def _init_sampler(bn, evidence, target_index, f, base_seed):
    _SAMPLER.update(
        bn=bn, evidence=evidence, target=target_index, f=f, base_seed=base_seed
    )


def _chunk_sums(bounds) -> np.ndarray:
    """Index-ordered sums over one chunk: f*w, w, and the squared terms
    (f^2 w^2, f w^2, w^2) the variance estimate needs."""
    start, stop = bounds
    bn, evidence = _SAMPLER["bn"], _SAMPLER["evidence"]
    target, f, base_seed = _SAMPLER["target"], _SAMPLER["f"], _SAMPLER["base_seed"]
    s0 = s1 = s2 = s3 = s4 = 0.0
    for i in range(start, stop):
        rng = SampleRng(derive_task_seed(base_seed, i))
        values, w = _draw(bn, evidence, rng)
        fw = f(values[target]) * w
        s0 += fw
        s1 += w
        s2 += fw * fw
        s3 += fw * w
        s4 += w * w
    return np.array([s0, s1, s2, s3, s4])


def _estimate(bn, evidence, target, f, m, seed, workers):
    if m < 1:
        raise ValueError("sample count must be >= 1")
    if evidence is None:
        evidence = Evidence.empty(bn)
    target_var = bn.dag.variable_named(target) if isinstance(target, str) else bn.variables[target]
    chunks = [
        (start, min(start + SAMPLE_CHUNK, m)) for start in range(0, m, SAMPLE_CHUNK)
    ]
    acc = PairwiseSum()
    with TaskRunner(
        workers,
        init=_init_sampler,
        initargs=(bn, evidence, target_var.index, f, seed),
    ) as runner:
        for sums in runner.map(_chunk_sums, chunks):
            acc.push(sums)
    totals = acc.total()
    if totals[1] == 0.0:
        raise ValueError("all samples rejected by evidence")
    return totals


def expected_value(
    bn: BayesianNetwork,
    evidence: Evidence | None,
    target,
    f,
    m: int,
    seed: int,
    workers: int = 1,
) -> float:
    """Importance-sampling estimate of E[f(target) | evidence] from m samples.

    Deterministic for fixed (network, evidence, f, m, seed) at any worker
    count.  Raises when every sample has zero weight.
    """
    totals = _estimate(bn, evidence, target, f, m, seed, workers)
    return float(totals[0] / totals[1])


def estimate_with_error(
    bn: BayesianNetwork,
    evidence: Evidence | None,
    target,
    f,
    m: int,
    seed: int,
    workers: int = 1,
) -> tuple[float, float]:
    """Estimate plus its delta-method standard error, from the same stream.

    For the weighted ratio R the error is sqrt(sum w_i^2 (f_i - R)^2) / sum w_i,
    which reduces to the plain standard error of the mean when all weights
    are one.
    """
    sum_fw, sum_w, sum_f2w2, sum_fw2, sum_w2 = _estimate(
        bn, evidence, target, f, m, seed, workers
    )
    estimate = float(sum_fw / sum_w)
    spread = max(sum_f2w2 - 2.0 * estimate * sum_fw2 + estimate * estimate * sum_w2, 0.0)
    return estimate, float(math.sqrt(spread) / sum_w)


def _indicator_eq(target: float, v: float) -> float:
    return 1.0 if v == target else 0.0


def _indicator_lt(threshold: float, v: float) -> float:
    return 1.0 if v < threshold else 0.0


def _indicator_gt(threshold: float, v: float) -> float:
    return 1.0 if v > threshold else 0.0


def _identity(v: float) -> float:
    return v


def event_probability(
    bn: BayesianNetwork,
    evidence: Evidence | None,
    target,
    predicate,
    m: int,
    seed: int,
    workers: int = 1,
) -> float:
    """Probability that ``predicate`` holds for one variable, via sampling."""

    def indicator(v: float) -> float:
        return 1.0 if predicate(v) else 0.0

    return expected_value(bn, evidence, target, indicator, m, seed, workers)


# --- query grammar --------------------------------------------------------

_QUERY_RE = re.compile(
    r"^\s*(?P<kind>[PE])\s*\(\s*(?P<name>[^<>=()\s]+)\s*"
    r"(?:(?P<op>[<>=])\s*(?P<value>[^()\s]+)\s*)?\)\s*$"
)


def parse_query(text: str):
    """Parse ``P(name=v)``, ``P(name<v)``, ``P(name>v)`` or ``E(name)``.

    Returns (variable name, estimator function), where the estimator reads
    the target variable's sampled value.
    """
    m = _QUERY_RE.match(text)
    if not m:
        raise QueryError(f"cannot parse query {text!r}")
    kind, name, op, value = m.group("kind", "name", "op", "value")
    if kind == "E":
        if op is not None:
            raise QueryError(f"E(...) takes a bare variable name: {text!r}")
        return name, _identity
    if op is None:
        raise QueryError(f"P(...) needs a comparison, e.g. P({name}=1): {text!r}")
    try:
        v = float(value)
    except ValueError:
        raise QueryError(f"bad threshold {value!r} in query {text!r}") from None
    ops = {"=": _indicator_eq, "<": _indicator_lt, ">": _indicator_gt}
    return name, partial(ops[op], v)


def parse_evidence(text: str, bn: BayesianNetwork) -> Evidence:
    """Parse ``name=value,name=value,...`` against the network's variables."""
    assignments = {}
    if text.strip():
        for part in text.split(","):
            if "=" not in part:
                raise QueryError(f"evidence term {part!r} must look like name=value")
            name, _, value = part.partition("=")
            name = name.strip()
            try:
                assignments[name] = float(value)
            except ValueError:
                raise QueryError(f"bad evidence value in {part!r}") from None
    try:
        return Evidence(bn, assignments)
    except ValueError as e:
        raise QueryError(str(e)) from None
