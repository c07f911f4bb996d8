"""Seeded synthetic networks and ancestral data generation.

The benchmark family has four root super-parents: a discrete class C, a
second discrete root SPM, and two Gaussian roots SPG1 and SPG2.  Every
multinomial child M_i depends on the two discrete super-parents (discrete
nodes may not have continuous parents), and every Gaussian child G_i
depends on all four.  Parameters are drawn from a seeded generator: table
rows from a flat Dirichlet, linear coefficients from U(-1, 1), variances
from U(0.5, 1.5).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataSchema, write_dataset
from .distributions import ConditionalLinearGaussian, MultinomialTable
from .graph import ParentSet, ParentSetDag
from .network import BayesianNetwork
from .suffstats import config_count
from .variables import Variable


@dataclass(frozen=True)
class SyntheticSpec:
    m_children: int = 10
    g_children: int = 10
    class_arity: int = 2
    spm_arity: int = 3
    m_arity: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.m_children < 0 or self.g_children < 0:
            raise ValueError("child counts must be >= 0")


def make_superparent_network(spec: SyntheticSpec) -> BayesianNetwork:
    rng = np.random.default_rng(spec.seed)

    c = Variable.discrete("C", 0, spec.class_arity)
    spm = Variable.discrete("SPM", 1, spec.spm_arity)
    spg1 = Variable.continuous("SPG1", 2)
    spg2 = Variable.continuous("SPG2", 3)
    variables = [c, spm, spg1, spg2]
    parent_sets = [
        ParentSet(c),
        ParentSet(spm),
        ParentSet(spg1),
        ParentSet(spg2),
    ]
    for i in range(spec.m_children):
        v = Variable.discrete(f"M{i + 1}", len(variables), spec.m_arity)
        variables.append(v)
        parent_sets.append(ParentSet(v, (c, spm)))
    for i in range(spec.g_children):
        v = Variable.continuous(f"G{i + 1}", len(variables))
        variables.append(v)
        parent_sets.append(ParentSet(v, (c, spm, spg1, spg2)))
    dag = ParentSetDag(parent_sets)

    def random_table(var, parents):
        nconfig = config_count([p.arity for p in parents])
        rows = rng.dirichlet(np.ones(var.arity), size=nconfig)
        return MultinomialTable(var, parents, rows)

    def random_clg(var, dparents, cparents):
        nconfig = config_count([p.arity for p in dparents])
        k = len(cparents)
        alpha = rng.uniform(-1.0, 1.0, size=nconfig)
        beta = rng.uniform(-1.0, 1.0, size=(nconfig, k))
        sigma2 = rng.uniform(0.5, 1.5, size=nconfig)
        return ConditionalLinearGaussian(var, dparents, cparents, alpha, beta, sigma2)

    dists = []
    for ps in dag:
        if ps.main.is_discrete:
            dists.append(random_table(ps.main, ps.parents))
        else:
            dists.append(random_clg(ps.main, ps.discrete_parents, ps.continuous_parents))
    return BayesianNetwork(dag, dists)


def sample_rows(bn: BayesianNetwork, n: int, seed: int) -> np.ndarray:
    """n ancestral samples as a (n, variables) array, deterministic per seed.

    Nodes are filled column-by-column in topological order, one vectorised
    draw per node.
    """
    rng = np.random.default_rng(seed)
    values = np.empty((n, len(bn.variables)))
    for var in bn.dag.topological_order():
        dist = bn.distributions[var.index]
        node = dist._node
        if n == 0:
            continue
        j = node.config_of_rows(values) if node.dparent_idx else np.zeros(n, dtype=np.intp)
        if var.is_discrete:
            cum = np.cumsum(dist.table, axis=1)[j]
            u = rng.random(n)
            states = (u[:, None] >= cum).sum(axis=1)
            values[:, var.index] = np.minimum(states, var.arity - 1)
        else:
            mean = dist.alpha[j]
            if node.cparent_idx:
                z = values[:, list(node.cparent_idx)]
                mean = mean + (dist.beta[j] * z).sum(axis=1)
            values[:, var.index] = mean + np.sqrt(dist.sigma2[j]) * rng.standard_normal(n)
    return values


def generate_data(bn: BayesianNetwork, n: int, seed: int, out_path) -> int:
    """Write n ancestral samples to ``out_path`` in the dataset format."""
    if n < 0:
        raise ValueError("sample count must be >= 0")
    schema = DataSchema.from_variables(bn.variables)
    return write_dataset(out_path, schema, sample_rows(bn, n, seed))
