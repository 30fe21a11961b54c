import math

import numpy as np
import pytest

from blockdag.partition import (
    InfeasiblePartitionError,
    enumerate_partitions,
    expected_num_cells,
    is_feasible,
    log_partition_prob,
    sample_partition,
    sample_partitions,
)


class TestFeasibility:
    def test_label_order(self):
        assert is_feasible([1, 2, 1, 3])
        assert not is_feasible([1, 3, 2])
        assert not is_feasible([2, 1])

    def test_infeasible_vector_raises(self):
        with pytest.raises(InfeasiblePartitionError):
            log_partition_prob([1, 3], 1.0)


class TestLogProb:
    def test_two_nodes_same_class(self):
        assert log_partition_prob([1, 1], 1.0) == pytest.approx(math.log(0.5))

    def test_all_singletons(self):
        d, alpha = 5, 0.7
        expected = d * math.log(alpha) + math.lgamma(alpha) - math.lgamma(d + alpha)
        assert log_partition_prob(list(range(1, d + 1)), alpha) == pytest.approx(expected)

    def test_normalises_up_to_d7(self):
        for alpha in (0.7, 1.0, 1.3):
            for d in range(1, 8):
                total = sum(math.exp(log_partition_prob(z, alpha))
                            for z in enumerate_partitions(d))
                assert total == pytest.approx(1.0, abs=1e-12)

    def test_block_size_exchangeability(self):
        for alpha in (0.3, 1.0, 2.5):
            assert log_partition_prob([1, 1, 2], alpha) == \
                pytest.approx(log_partition_prob([1, 2, 2], alpha))

    def test_alpha_zero_degenerate(self):
        assert log_partition_prob([1, 1, 1], 0.0) == 0.0
        assert log_partition_prob([1, 2], 0.0) == -np.inf


class TestSampling:
    def test_single_node(self):
        rng = np.random.default_rng(0)
        assert sample_partition(1, 2.0, rng).tolist() == [1]

    def test_alpha_zero_single_class(self):
        rng = np.random.default_rng(0)
        assert sample_partition(6, 0.0, rng).tolist() == [1] * 6

    def test_two_nodes_even_split(self):
        rng = np.random.default_rng(1)
        zs = [tuple(sample_partition(2, 1.0, rng)) for _ in range(20000)]
        frac = sum(1 for z in zs if z == (1, 1)) / len(zs)
        assert abs(frac - 0.5) < 0.015

    def test_scalar_sampler_matches_formula(self):
        rng = np.random.default_rng(2)
        n = 50000
        counts = {}
        for _ in range(n):
            key = tuple(sample_partition(4, 1.0, rng))
            counts[key] = counts.get(key, 0) + 1
        for z in enumerate_partitions(4):
            p = math.exp(log_partition_prob(z, 1.0))
            emp = counts.get(tuple(z), 0) / n
            se = math.sqrt(p * (1 - p) / n)
            assert abs(emp - p) < 5 * se

    def test_batch_sampler_matches_formula(self):
        rng = np.random.default_rng(3)
        n = 1_000_000
        zs = sample_partitions(4, 1.0, rng, n)
        codes = zs @ (5 ** np.arange(4))
        vals, cnts = np.unique(codes, return_counts=True)
        emp = dict(zip(vals.tolist(), cnts.tolist()))
        for z in enumerate_partitions(4):
            p = math.exp(log_partition_prob(z, 1.0))
            code = int(z @ (5 ** np.arange(4)))
            se = math.sqrt(p * (1 - p) / n)
            assert abs(emp.get(code, 0) / n - p) < 4 * se

    def test_samples_are_feasible(self):
        rng = np.random.default_rng(4)
        zs = sample_partitions(6, 0.8, rng, 2000)
        assert all(is_feasible(z) for z in zs)


class TestExpectedCells:
    def test_single_node(self):
        assert expected_num_cells(1, 3.0) == pytest.approx(1.0)

    def test_three_nodes_unit_alpha(self):
        assert expected_num_cells(3, 1.0) == pytest.approx(11.0 / 6.0)

    def test_log_growth_limit(self):
        # E[K_d] grows like alpha * ln d
        alpha = 1.5
        ratios = [expected_num_cells(d, alpha) / math.log(d)
                  for d in (10 ** 2, 10 ** 4, 10 ** 6)]
        errs = [abs(r - alpha) for r in ratios]
        assert errs[0] > errs[1] > errs[2]
        assert ratios[2] == pytest.approx(alpha, rel=0.05)

    def test_sampler_mean_matches(self):
        rng = np.random.default_rng(5)
        zs = sample_partitions(8, 1.2, rng, 100_000)
        assert np.mean(zs.max(axis=1)) == pytest.approx(expected_num_cells(8, 1.2), rel=0.01)


def test_enumeration_counts_are_bell_numbers():
    bell = {1: 1, 2: 2, 3: 5, 4: 15, 5: 52, 6: 203, 7: 877}
    for d, b in bell.items():
        assert sum(1 for _ in enumerate_partitions(d)) == b
