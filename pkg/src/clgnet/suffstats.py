"""Per-variable sufficient-statistics layout and kernels.

Every variable owns one flat statistics block, subdivided into one segment
per configuration of its discrete parents.  Configurations are numbered by
mixed-radix encoding of the discrete parent states in their listed order,
first-listed parent most significant.

Discrete variable, arity a:  segment = one-hot over the a states, so the
block has length nconfig * a and entry (j, x) counts occurrences.

Continuous variable with k continuous parents z and value x:  segment =
    [1, z_1..z_k, x, x*z_1..x*z_k, x^2, z_a*z_b for a <= b]
of length 2k + 3 + k(k+1)/2.  Summed over data these are the raw moments
needed to solve the per-configuration linear-Gaussian normal equations.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .graph import ParentSet, ParentSetDag
from .vectors import CompoundVector, IndexedElement


def config_index(states, arities) -> int:
    """Mixed-radix configuration id, first state most significant."""
    j = 0
    for s, a in zip(states, arities):
        j = j * a + int(s)
    return j


def config_states(j, arities) -> tuple[int, ...]:
    states = [0] * len(arities)
    for i in range(len(arities) - 1, -1, -1):
        states[i] = j % arities[i]
        j //= arities[i]
    return tuple(states)


def config_count(arities) -> int:
    n = 1
    for a in arities:
        n *= a
    return n


@dataclass(frozen=True)
class NodeStats:
    index: int
    is_discrete: bool
    arity: int | None
    dparent_idx: tuple[int, ...]
    dparent_arities: tuple[int, ...]
    cparent_idx: tuple[int, ...]

    @classmethod
    def from_parent_set(cls, ps: ParentSet) -> "NodeStats":
        dparents = ps.discrete_parents
        return cls(
            index=ps.main.index,
            is_discrete=ps.main.is_discrete,
            arity=ps.main.arity,
            dparent_idx=tuple(p.index for p in dparents),
            dparent_arities=tuple(p.arity for p in dparents),
            cparent_idx=tuple(p.index for p in ps.continuous_parents),
        )

    @property
    def nconfig(self) -> int:
        return config_count(self.dparent_arities)

    @property
    def k(self) -> int:
        return len(self.cparent_idx)

    @property
    def per_config(self) -> int:
        if self.is_discrete:
            return self.arity
        k = self.k
        return 2 * k + 3 + k * (k + 1) // 2

    @property
    def length(self) -> int:
        return self.nconfig * self.per_config

    @property
    def tri_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(combinations_with_replacement(range(self.k), 2))

    def config_of(self, values) -> int:
        """Configuration id for one data row."""
        states = []
        for idx, a in zip(self.dparent_idx, self.dparent_arities):
            s = values[idx]
            si = int(s)
            if si != s or not 0 <= si < a:
                raise ValueError(
                    f"value {s!r} out of range for discrete parent index {idx} (arity {a})"
                )
            states.append(si)
        return config_index(states, self.dparent_arities)

    def config_of_rows(self, values: np.ndarray) -> np.ndarray:
        j = np.zeros(values.shape[0], dtype=np.intp)
        for idx, a in zip(self.dparent_idx, self.dparent_arities):
            col = values[:, idx]
            s = col.astype(np.intp)
            if ((s != col) | (s < 0) | (s >= a)).any():
                raise ValueError(f"discrete parent column {idx} has values out of range")
            j = j * a + s
        return j

    def _features(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        """Continuous-node moment features, one row per data row."""
        m, k = x.shape[0], self.k
        feats = np.empty((m, self.per_config))
        feats[:, 0] = 1.0
        feats[:, 1 : 1 + k] = z
        feats[:, 1 + k] = x
        feats[:, 2 + k : 2 + 2 * k] = x[:, None] * z
        feats[:, 2 + 2 * k] = x * x
        for col, (a, b) in enumerate(self.tri_pairs, start=3 + 2 * k):
            feats[:, col] = z[:, a] * z[:, b]
        return feats

    def instance_stats(self, values) -> np.ndarray:
        """Statistics block for a single data row."""
        out = np.zeros(self.length)
        j = self.config_of(values)
        if self.is_discrete:
            x = values[self.index]
            xi = int(x)
            if xi != x or not 0 <= xi < self.arity:
                raise ValueError(
                    f"value {x!r} out of range for discrete variable index {self.index}"
                )
            out[j * self.arity + xi] = 1.0
        else:
            row = np.asarray(values, dtype=np.float64)
            x = row[self.index : self.index + 1]
            z = row[list(self.cparent_idx)].reshape(1, self.k)
            out[j * self.per_config : (j + 1) * self.per_config] = self._features(x, z)[0]
        return out

    def batch_stats(self, values: np.ndarray) -> np.ndarray:
        """Statistics block summed over the rows of a batch.

        Reductions use plain numpy sums (no BLAS), so the result is a pure
        function of the batch contents: identical in any process, for any
        worker count.
        """
        j = self.config_of_rows(values)
        if self.is_discrete:
            col = values[:, self.index]
            x = col.astype(np.intp)
            if ((x != col) | (x < 0) | (x >= self.arity)).any():
                raise ValueError(f"discrete column {self.index} has values out of range")
            counts = np.bincount(j * self.arity + x, minlength=self.length)
            return counts.astype(np.float64)
        x = values[:, self.index]
        z = values[:, list(self.cparent_idx)]
        feats = self._features(x, z)
        if self.nconfig == 1:
            return feats.sum(axis=0)
        out = np.zeros((self.nconfig, self.per_config))
        for cfg in range(self.nconfig):
            mask = j == cfg
            if mask.any():
                out[cfg] = feats[mask].sum(axis=0)
        return out.ravel()


class NetworkStats:
    """Statistics layout for a whole network: one NodeStats per variable."""

    def __init__(self, nodes):
        self.nodes = tuple(nodes)

    @classmethod
    def from_dag(cls, dag: ParentSetDag) -> "NetworkStats":
        return cls(NodeStats.from_parent_set(ps) for ps in dag)

    def skeleton(self) -> tuple:
        return tuple((n.index, n.length) for n in self.nodes)

    def zero(self) -> CompoundVector:
        return CompoundVector(
            IndexedElement(n.index, np.zeros(n.length)) for n in self.nodes
        )

    def instance_stats(self, values) -> CompoundVector:
        return CompoundVector(
            IndexedElement(n.index, n.instance_stats(values)) for n in self.nodes
        )

    def batch_stats(self, values: np.ndarray) -> CompoundVector:
        return CompoundVector(
            IndexedElement(n.index, n.batch_stats(values)) for n in self.nodes
        )
