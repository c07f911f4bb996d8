"""Conditional distributions attached to network nodes.

Two variants: a multinomial table for discrete variables (which may only
have discrete parents) and a conditional linear Gaussian for continuous
variables, whose mean is linear in the continuous parents with coefficients
switched by the discrete-parent configuration.

All methods take full data rows (vectors indexed by variable index) and
read the entries they need, so distributions stay self-contained.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import ParentSet
from .suffstats import NodeStats, config_count
from .variables import Variable

VARIANCE_FLOOR = 1e-6
RIDGE = 1e-8
ROW_SUM_TOL = 1e-9

LOG_2PI = math.log(2.0 * math.pi)


class MultinomialTable:
    """Conditional probability table over a discrete variable.

    ``table`` has one row per discrete-parent configuration and one column
    per state of the variable.
    """

    def __init__(self, var: Variable, parents, table):
        if not var.is_discrete:
            raise TypeError(f"{var.name!r} is not discrete")
        parents = tuple(parents)
        for p in parents:
            if not p.is_discrete:
                raise TypeError(
                    f"multinomial node {var.name!r} cannot have continuous parent {p.name!r}"
                )
        nconfig = config_count([p.arity for p in parents])
        table = np.ascontiguousarray(table, dtype=np.float64)
        if table.shape != (nconfig, var.arity):
            raise ValueError(
                f"table for {var.name!r} must have shape {(nconfig, var.arity)}, got {table.shape}"
            )
        table.setflags(write=False)
        self.var = var
        self.parents = parents
        self.table = table
        self._node = NodeStats.from_parent_set(ParentSet(var, parents))
        # plain-float rows keep the per-sample hot path off numpy scalars
        self._rows = tuple(tuple(float(p) for p in row) for row in table)

    @property
    def nconfig(self) -> int:
        return self.table.shape[0]

    def config_of(self, values) -> int:
        return self._node.config_of(values)

    def density(self, values) -> float:
        x = int(values[self.var.index])
        if not 0 <= x < self.var.arity:
            raise ValueError(f"state {x} out of range for {self.var.name!r}")
        return self._rows[self.config_of(values)][x]

    def log_density(self, values) -> float:
        p = self.density(values)
        return math.log(p) if p > 0.0 else -math.inf

    def sample(self, rng, values) -> float:
        """Draw a state given the parent entries already present in ``values``."""
        row = self._rows[self.config_of(values)]
        u = rng.random()
        acc = 0.0
        for state, p in enumerate(row):
            acc += p
            if u < acc:
                return float(state)
        return float(len(row) - 1)

    def sufficient_statistics(self, values) -> np.ndarray:
        return self._node.instance_stats(values)

    @classmethod
    def from_moments(cls, var, parents, block: np.ndarray) -> "MultinomialTable":
        """Table from averaged one-hot statistics; empty rows become uniform."""
        nconfig = config_count([p.arity for p in parents])
        rows = np.asarray(block, dtype=np.float64).reshape(nconfig, var.arity)
        table = np.empty_like(rows)
        for j in range(nconfig):
            total = rows[j].sum()
            if total == 0.0:
                table[j] = 1.0 / var.arity
            else:
                table[j] = rows[j] / total
        return cls(var, parents, table)


class ConditionalLinearGaussian:
    """Gaussian node with mean alpha_j + beta_j . z per discrete configuration."""

    def __init__(self, var: Variable, discrete_parents, continuous_parents, alpha, beta, sigma2):
        if var.is_discrete:
            raise TypeError(f"{var.name!r} is not continuous")
        discrete_parents = tuple(discrete_parents)
        continuous_parents = tuple(continuous_parents)
        k = len(continuous_parents)
        nconfig = config_count([p.arity for p in discrete_parents])
        alpha = np.ascontiguousarray(alpha, dtype=np.float64).reshape(nconfig)
        beta = np.ascontiguousarray(beta, dtype=np.float64).reshape(nconfig, k)
        sigma2 = np.ascontiguousarray(sigma2, dtype=np.float64).reshape(nconfig)
        for a in (alpha, beta, sigma2):
            a.setflags(write=False)
        self.var = var
        self.discrete_parents = discrete_parents
        self.continuous_parents = continuous_parents
        self.alpha = alpha
        self.beta = beta
        self.sigma2 = sigma2
        self._node = NodeStats.from_parent_set(
            ParentSet(var, discrete_parents + continuous_parents)
        )
        self._alpha = tuple(float(a) for a in alpha)
        self._beta = tuple(tuple(float(b) for b in row) for row in beta)
        self._sigma2 = tuple(float(s) for s in sigma2)
        self._sd = tuple(math.sqrt(s) for s in self._sigma2)

    @property
    def parents(self) -> tuple[Variable, ...]:
        return self.discrete_parents + self.continuous_parents

    @property
    def nconfig(self) -> int:
        return self.alpha.shape[0]

    @property
    def k(self) -> int:
        return self.beta.shape[1]

    def config_of(self, values) -> int:
        return self._node.config_of(values)

    def _mean_at(self, j, values) -> float:
        m = self._alpha[j]
        row = self._beta[j]
        for col, idx in enumerate(self._node.cparent_idx):
            m += row[col] * values[idx]
        return m

    def mean(self, values) -> float:
        return self._mean_at(self.config_of(values), values)

    def log_density(self, values) -> float:
        j = self.config_of(values)
        s2 = self._sigma2[j]
        d = values[self.var.index] - self._mean_at(j, values)
        return -0.5 * (LOG_2PI + math.log(s2)) - d * d / (2.0 * s2)

    def density(self, values) -> float:
        return math.exp(self.log_density(values))

    def sample(self, rng, values) -> float:
        j = self.config_of(values)
        return self._mean_at(j, values) + self._sd[j] * rng.standard_normal()

    def sufficient_statistics(self, values) -> np.ndarray:
        return self._node.instance_stats(values)

    @classmethod
    def from_moments(cls, var, discrete_parents, continuous_parents, block: np.ndarray) -> "ConditionalLinearGaussian":
        """Solve the per-configuration normal equations from averaged moments.

        Configurations with no mass get the neutral defaults alpha=0, beta=0,
        sigma2=1.  A ridge term is added when the parent covariance is
        singular, and the residual variance is floored at VARIANCE_FLOOR.
        """
        k = len(continuous_parents)
        nconfig = config_count([p.arity for p in discrete_parents])
        node = NodeStats.from_parent_set(
            ParentSet(var, tuple(discrete_parents) + tuple(continuous_parents))
        )
        blocks = np.asarray(block, dtype=np.float64).reshape(nconfig, node.per_config)
        alpha = np.zeros(nconfig)
        beta = np.zeros((nconfig, k))
        sigma2 = np.ones(nconfig)
        for j in range(nconfig):
            m = blocks[j]
            m1 = m[0]
            if m1 == 0.0:
                continue
            zbar = m[1 : 1 + k] / m1
            xbar = m[1 + k] / m1
            xzbar = m[2 + k : 2 + 2 * k] / m1
            x2bar = m[2 + 2 * k] / m1
            cov_zx = xzbar - zbar * xbar
            if k > 0:
                cov_zz = np.empty((k, k))
                for col, (a, b) in enumerate(node.tri_pairs, start=3 + 2 * k):
                    cov_zz[a, b] = cov_zz[b, a] = m[col] / m1 - zbar[a] * zbar[b]
                try:
                    b_j = np.linalg.solve(cov_zz, cov_zx)
                    if not np.isfinite(b_j).all():
                        raise np.linalg.LinAlgError
                except np.linalg.LinAlgError:
                    b_j = np.linalg.solve(cov_zz + RIDGE * np.eye(k), cov_zx)
                beta[j] = b_j
                residual = x2bar - xbar * xbar - float(b_j @ cov_zx)
            else:
                residual = x2bar - xbar * xbar
            alpha[j] = xbar - float(beta[j] @ zbar)
            sigma2[j] = max(residual, VARIANCE_FLOOR)
        return cls(var, discrete_parents, continuous_parents, alpha, beta, sigma2)
