import numpy as np
import pytest

from clgnet import (
    ConditionalLinearGaussian,
    MultinomialTable,
    NetworkStats,
    ParentSet,
    ParentSetDag,
    Variable,
    config_count,
    config_index,
    config_states,
)

from conftest import make_five_node_dag, random_tables_for


class TestConfigIndex:
    def test_first_parent_most_significant(self):
        # radices (2, 3): states (1, 2) -> 1*3 + 2 = 5
        assert config_index((1, 2), (2, 3)) == 5

    def test_round_trip(self):
        arities = (2, 3, 4)
        for j in range(config_count(arities)):
            assert config_index(config_states(j, arities), arities) == j

    def test_empty_parents(self):
        assert config_index((), ()) == 0
        assert config_count(()) == 1


class TestLocalStatistics:
    def test_bernoulli_one_hot(self):
        v = Variable.discrete("A", 0, 2)
        dist = MultinomialTable(v, (), [[0.5, 0.5]])
        assert np.array_equal(dist.sufficient_statistics(np.array([1.0])), [0.0, 1.0])
        assert np.array_equal(dist.sufficient_statistics(np.array([0.0])), [1.0, 0.0])

    def test_one_hot_with_binary_parent(self):
        # arity 3 with one binary parent: parent=1, x=2 lands at flat position 5
        p = Variable.discrete("P", 0, 2)
        v = Variable.discrete("A", 1, 3)
        dist = MultinomialTable(v, (p,), np.full((2, 3), 1.0 / 3.0))
        stats = dist.sufficient_statistics(np.array([1.0, 2.0]))
        assert len(stats) == 6
        expected = np.zeros(6)
        expected[1 * 3 + 2] = 1.0
        assert np.array_equal(stats, expected)

    def test_clg_single_parent_moments(self):
        # one continuous parent, no discrete parents: z=2, x=3
        z = Variable.continuous("Z", 0)
        x = Variable.continuous("X", 1)
        dist = ConditionalLinearGaussian(x, (), (z,), [0.0], [[0.0]], [1.0])
        stats = dist.sufficient_statistics(np.array([2.0, 3.0]))
        # leading moments [1, z, x, x*z, x^2], then the z*z cross moment
        assert np.array_equal(stats[:5], [1.0, 2.0, 3.0, 6.0, 9.0])
        assert np.array_equal(stats[5:], [4.0])

    def test_clg_block_lands_in_observed_config(self):
        d = Variable.discrete("D", 0, 2)
        z = Variable.continuous("Z", 1)
        x = Variable.continuous("X", 2)
        dist = ConditionalLinearGaussian(x, (d,), (z,), [0.0, 0.0], [[0.0], [0.0]], [1.0, 1.0])
        stats = dist.sufficient_statistics(np.array([1.0, 2.0, 3.0]))
        per = 6  # [1, z, x, xz, x^2, zz]
        assert np.array_equal(stats[:per], np.zeros(per))
        assert np.array_equal(stats[per : per + 5], [1.0, 2.0, 3.0, 6.0, 9.0])

    def test_out_of_range_discrete_value(self):
        v = Variable.discrete("A", 0, 2)
        dist = MultinomialTable(v, (), [[0.5, 0.5]])
        with pytest.raises(ValueError, match="out of range"):
            dist.sufficient_statistics(np.array([2.0]))


class TestGlobalStatistics:
    def test_element_per_variable(self):
        a = Variable.discrete("A", 0, 2)
        b = Variable.discrete("B", 1, 2)
        dag = ParentSetDag([ParentSet(a), ParentSet(b, (a,))])
        layout = NetworkStats.from_dag(dag)
        stats = layout.instance_stats(np.array([0.0, 1.0]))
        assert [e.index for e in stats] == [0, 1]

    def test_skeleton_identical_across_instances(self):
        bn = random_tables_for(make_five_node_dag(), seed=5)
        s1 = bn.sufficient_statistics(np.zeros(5))
        s2 = bn.sufficient_statistics(np.ones(5))
        assert s1.skeleton() == s2.skeleton()

    def test_contents_match_per_node_statistics(self):
        bn = random_tables_for(make_five_node_dag(), seed=6)
        row = np.array([1.0, 0.0, 1.0, 1.0, 0.0])
        stats = bn.sufficient_statistics(row)
        for dist in bn.distributions:
            local = dist.sufficient_statistics(row)
            assert np.array_equal(stats.element(dist.var.index).values, local)

    def test_batch_kernel_matches_instance_kernel(self):
        rng = np.random.default_rng(8)
        d = Variable.discrete("D", 0, 3)
        z = Variable.continuous("Z", 1)
        x = Variable.continuous("X", 2)
        dag = ParentSetDag([ParentSet(d), ParentSet(z), ParentSet(x, (d, z))])
        layout = NetworkStats.from_dag(dag)
        rows = np.column_stack(
            [rng.integers(0, 3, size=40).astype(float), rng.normal(size=40), rng.normal(size=40)]
        )
        batch = layout.batch_stats(rows)
        total = layout.zero()
        for row in rows:
            total = total + layout.instance_stats(row)
        for got, want in zip(batch, total):
            np.testing.assert_allclose(got.values, want.values, rtol=1e-12, atol=1e-12)
