"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the library's own code paths: joint
probabilities are brute-force products of table lookups over enumerated
states, graph queries are edge-list scans, and statistics are accumulated
per instance with explicit loops.  Tests compare the library against these.
"""

import itertools

import numpy as np
import pytest

from clgnet import (
    BayesianNetwork,
    MultinomialTable,
    ParentSet,
    ParentSetDag,
    Variable,
)


# --- example networks ------------------------------------------------------


def make_five_node_dag():
    """X1 -> X2, X1 -> X3, X2 -> X4, X3 -> X4, X3 -> X5 (all binary)."""
    x1 = Variable.discrete("X1", 0, 2)
    x2 = Variable.discrete("X2", 1, 2)
    x3 = Variable.discrete("X3", 2, 2)
    x4 = Variable.discrete("X4", 3, 2)
    x5 = Variable.discrete("X5", 4, 2)
    return ParentSetDag(
        [
            ParentSet(x1),
            ParentSet(x2, (x1,)),
            ParentSet(x3, (x1,)),
            ParentSet(x4, (x2, x3)),
            ParentSet(x5, (x3,)),
        ]
    )


@pytest.fixture
def five_node_dag():
    return make_five_node_dag()


def random_tables_for(dag, seed):
    """Random-parameter discrete network over ``dag``."""
    rng = np.random.default_rng(seed)
    dists = []
    for ps in dag:
        nconfig = 1
        for p in ps.parents:
            nconfig *= p.arity
        rows = rng.dirichlet(np.ones(ps.main.arity), size=nconfig)
        dists.append(MultinomialTable(ps.main, ps.parents, rows))
    return BayesianNetwork(dag, dists)


def random_dag(rng, n_vars, max_arity=3, edge_prob=0.3):
    """Random discrete DAG: edges only from lower to higher index."""
    variables = [
        Variable.discrete(f"V{i}", i, int(rng.integers(2, max_arity + 1)))
        for i in range(n_vars)
    ]
    parent_sets = []
    for i, v in enumerate(variables):
        parents = tuple(
            variables[j] for j in range(i) if rng.random() < edge_prob
        )
        parent_sets.append(ParentSet(v, parents))
    return ParentSetDag(parent_sets)


# --- graph oracles ----------------------------------------------------------


def edge_list(dag):
    return [(p.index, ps.main.index) for ps in dag for p in ps.parents]


def brute_force_links(dag):
    return len(edge_list(dag))


def brute_force_children(dag, var):
    return sorted(child for parent, child in edge_list(dag) if parent == var.index)


# --- enumeration oracles (discrete networks) --------------------------------


def oracle_config(assignment, parents):
    """Mixed-radix config id, first-listed parent most significant."""
    j = 0
    for p in parents:
        j = j * p.arity + int(assignment[p.index])
    return j


def oracle_joint_prob(bn, assignment):
    """Direct multiplication of table lookups; no library density code."""
    prob = 1.0
    for dist in bn.distributions:
        j = oracle_config(assignment, dist.parents)
        prob *= dist.table[j, int(assignment[dist.var.index])]
    return prob


def enumerate_states(bn):
    arities = [v.arity for v in bn.variables]
    for states in itertools.product(*(range(a) for a in arities)):
        yield np.array(states, dtype=np.float64)


def oracle_event_prob(bn, event, given=None):
    """Exact P(event | given) by full enumeration.

    ``event`` and ``given`` are predicates over the assignment vector.
    """
    num = 0.0
    den = 0.0
    for assignment in enumerate_states(bn):
        p = oracle_joint_prob(bn, assignment)
        if given is None or given(assignment):
            den += p
            if event(assignment):
                num += p
    return num / den


def oracle_expectation(bn, f, target_index, given=None):
    num = 0.0
    den = 0.0
    for assignment in enumerate_states(bn):
        p = oracle_joint_prob(bn, assignment)
        if given is None or given(assignment):
            den += p
            num += f(assignment[target_index]) * p
    return num / den


# --- per-instance statistics oracle -----------------------------------------


def oracle_fold_statistics(bn, rows):
    """Instance-by-instance fold of per-node statistics, explicit loops."""
    from clgnet import vector_add

    total = None
    for row in rows:
        stats = bn.sufficient_statistics(row)
        total = stats if total is None else vector_add(total, stats)
    return total
