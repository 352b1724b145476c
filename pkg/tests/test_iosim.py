import math
from fractions import Fraction

import pytest

from parcost import (CostMatrix, ExternalMemoryConfig, Graph, InstanceError,
                     IoOptimality, IoReport, ParameterError, SortInstance,
                     classify_io_optimality, io_sort_count, kruskal_serial_io,
                     mm_parallel_io_model, mm_serial_run, nowicki_partition_io,
                     terasort_simulate)
from parcost.bench import gen_gop, gen_graph
from parcost.errors import GuardError


class TestIoSortCount:
    def test_empty(self):
        assert io_sort_count(0, 16) == 0

    def test_fits_in_memory(self):
        assert io_sort_count(8, 16) == 8

    def test_multi_pass(self):
        assert io_sort_count(1000, 10) == 3000

    def test_exact_power_boundary(self):
        assert io_sort_count(100, 10) == 200
        assert io_sort_count(101, 10) == 303

    def test_monotone(self):
        for m in (2, 5, 30):
            prev = 0
            for n in range(0, 200, 7):
                cur = io_sort_count(n, m)
                assert cur >= prev
                prev = cur
        for n in (50, 500):
            prev = io_sort_count(n, 2)
            for m in (3, 5, 10, 100, 1000):
                cur = io_sort_count(n, m)
                assert cur <= prev
                prev = cur

    def test_rejects_bad_parameters(self):
        with pytest.raises(ParameterError):
            io_sort_count(-1, 10)
        with pytest.raises(ParameterError):
            io_sort_count(10, 1)


class TestKruskalSerialIo:
    def test_empty(self):
        assert kruskal_serial_io(0, 10) == 0

    def test_model_value(self):
        assert kruskal_serial_io(1000, 10) == 4000

    def test_all_in_memory_is_two_scans(self):
        assert kruskal_serial_io(500, 500) == 1000


class TestGraph:
    def test_rejects_duplicates_and_loops(self):
        with pytest.raises(InstanceError, match="duplicate"):
            Graph(3, ((1, 2, 1), (2, 1, 4)))
        with pytest.raises(InstanceError, match="self-loop"):
            Graph(3, ((2, 2, 1),))
        with pytest.raises(InstanceError, match="out of range"):
            Graph(3, ((1, 4, 1),))


class TestNowickiPartition:
    def test_single_group_reads_each_edge_once(self):
        g = gen_graph(8, 8, seed=2)
        report = nowicki_partition_io(g, 8)
        assert report.extras["groups"] == 1
        assert report.total_io == 8

    def test_star_graph(self):
        star = Graph(4, ((1, 2, 1), (1, 3, 1), (1, 4, 1)))
        report = nowicki_partition_io(star, 4)
        assert report.extras["groups"] == 1
        assert report.total_io == 3

    def test_random_graph_within_factor_four_of_analytic(self):
        g = gen_graph(100, 2000, seed=5)
        report = nowicki_partition_io(g, 100)
        analytic = report.extras["analytic_io"]
        assert analytic == 2000 * 20
        assert analytic / 4 <= report.total_io <= 4 * analytic

    def test_bucket_accounting(self):
        # total reads = sum over buckets of bucket size times the number of
        # group pairs that scan it; recomputed here from scratch
        g = gen_graph(30, 120, seed=9)
        report = nowicki_partition_io(g, 30)
        groups = report.extras["groups"]

        def group_of(v):
            return (v - 1) * groups // g.n_vertices

        bucket_sizes = [0] * groups
        for u, v, _ in g.edges:
            bucket_sizes[min(group_of(u), group_of(v))] += 1
        expected = sum(size * (groups - i) for i, size in enumerate(bucket_sizes))
        assert report.total_io == expected
        assert len(report.phases) == groups * (groups + 1) // 2

    def test_rejects_empty_graph_and_bad_memory(self):
        with pytest.raises(ParameterError):
            nowicki_partition_io(gen_graph(4, 3, seed=1), 1)
        with pytest.raises(InstanceError):
            nowicki_partition_io(Graph(4, ()), 4)


class TestMatchingRuns:
    def test_single_edge_trace(self):
        g = Graph(2, ((1, 2, 1),))
        state, report = mm_serial_run(g, Fraction(1, 10))
        assert len(report.phases) == 6
        assert all(io == 1 for _, io, _ in report.phases)
        assert report.total_io == 6
        # weight after five boosts of 10/9 from 1/2
        assert state.x[0] == Fraction(50000, 59049)
        assert state.frozen_vertices == frozenset((1, 2))

    def test_single_edge_immediate_freeze(self):
        g = Graph(2, ((1, 2, 1),))
        state, report = mm_serial_run(g, Fraction(3, 10))
        assert len(report.phases) == 1
        assert report.total_io == 1
        assert state.x[0] == Fraction(1, 2)

    def test_epsilon_range(self):
        g = Graph(2, ((1, 2, 1),))
        for bad in (0, Fraction(1, 2), 1):
            with pytest.raises(ParameterError):
                mm_serial_run(g, bad)
        mm_serial_run(g, Fraction(49, 100))

    def test_triangle_loads_never_exceed_one(self):
        g = Graph(3, ((1, 2, 1), (2, 3, 1), (1, 3, 1)))
        state, report = mm_serial_run(g, Fraction(1, 10))
        for load in report.extras["max_vertex_load_per_iteration"]:
            assert load <= 1
        for v in (1, 2, 3):
            assert state.vertex_load(g, v) <= 1

    def test_active_counts_never_increase(self):
        g = gen_graph(20, 40, seed=3)
        _, report = mm_serial_run(g, Fraction(1, 10))
        ios = [io for _, io, _ in report.phases]
        assert all(a >= b for a, b in zip(ios, ios[1:]))

    def test_parallel_model_matches_serial(self):
        for n, m, seed in ((10, 15, 1), (25, 60, 2), (40, 100, 3)):
            g = gen_graph(n, m, seed=seed)
            _, serial = mm_serial_run(g, Fraction(1, 10))
            parallel = mm_parallel_io_model(g, Fraction(1, 10))
            assert serial.phases == parallel.phases
            assert serial.total_io == parallel.total_io

    def test_termination_bound(self):
        for n, m, seed in ((30, 60, 4), (60, 120, 5)):
            g = gen_graph(n, m, seed=seed)
            _, report = mm_serial_run(g, Fraction(1, 10))
            bound = math.ceil(math.log(n) / math.log(10 / 9)) + 1
            assert len(report.phases) <= bound


def uniform_cost(p):
    return CostMatrix([[0 if i == j else 1 for j in range(p)] for i in range(p)])


class TestTerasort:
    def test_everything_fits_in_memory(self):
        inst = SortInstance((tuple(range(1, 9)), tuple(range(9, 17))))
        outputs, report = terasort_simulate(
            inst, ExternalMemoryConfig(16, 2), uniform_cost(2))
        labels = [label for label, _, _ in report.phases]
        assert labels == ["sample-and-split", "redistribute", "local-merge"]
        assert report.phases[0][1] == 16      # whole input sampled
        assert report.phases[1][1] == 0       # nothing spills
        assert report.phases[2][1] == 0       # nothing to reread
        flat = [v for out in outputs for v in out]
        assert flat == sorted(flat)

    def test_pre_partitioned_input_sends_nothing(self):
        # machine i already owns the i-th quarter; the full-data sample puts
        # the splitters exactly on the block boundaries
        blocks = tuple(tuple(range(1 + 8 * i, 9 + 8 * i)) for i in range(4))
        inst = SortInstance(blocks)
        _, report = terasort_simulate(
            inst, ExternalMemoryConfig(32, 4), uniform_cost(4))
        assert report.phases[1][2] == 0  # redistribution communication

    def test_output_sorted_and_conserved(self):
        g = gen_gop(5000, 4, seed=12)
        outputs, report = terasort_simulate(
            g.inst, ExternalMemoryConfig(100, 4), g.cost)
        flat = [v for out in outputs for v in out]
        assert flat == sorted(g.inst.values())
        assert report.total_io >= 0

    def test_spill_accounting(self):
        # phase 2 writes and phase 3 rereads count the same spilled records
        g = gen_gop(2000, 2, seed=13)
        _, report = terasort_simulate(
            g.inst, ExternalMemoryConfig(64, 2), g.cost)
        assert report.phases[1][1] == report.phases[2][1]
        assert report.phases[1][1] > 0

    def test_determinism(self):
        g = gen_gop(1000, 3, seed=14)
        cfg = ExternalMemoryConfig(50, 3)
        assert (terasort_simulate(g.inst, cfg, g.cost)
                == terasort_simulate(g.inst, cfg, g.cost))

    def test_dimension_mismatch(self):
        g = gen_gop(100, 3, seed=15)
        with pytest.raises(InstanceError, match="dimension mismatch"):
            terasort_simulate(g.inst, ExternalMemoryConfig(50, 4), g.cost)

    def test_memory_too_small_for_sampling(self):
        inst = SortInstance(((1, 2), (3, 4), (5, 6), (7, 8)))
        with pytest.raises(InstanceError, match="sample"):
            terasort_simulate(inst, ExternalMemoryConfig(3, 4), uniform_cost(4))


class TestIoReport:
    def test_totals_must_match(self):
        with pytest.raises(InstanceError):
            IoReport((("a", 2, 0),), total_io=3, total_comm=0)
        with pytest.raises(InstanceError):
            IoReport((("a", 2, 5),), total_io=2, total_comm=4)

    def test_from_phases(self):
        report = IoReport.from_phases((("a", 2, 1), ("b", 3, Fraction(1, 2))))
        assert report.total_io == 5
        assert report.total_comm == Fraction(3, 2)


class TestClassifier:
    def test_super_needs_strictly_less_everywhere(self):
        pairs = [(10, 5, 10), (20, 12, 20), (40, 30, 41)]
        assert classify_io_optimality(pairs) is IoOptimality.SUPER

    def test_constant_ratio_is_optimal(self):
        pairs = [(10, 10, 10), (20, 20, 20), (40, 40, 40)]
        assert classify_io_optimality(pairs) is IoOptimality.OPTIMAL

    def test_growing_ratio_is_non(self):
        pairs = [(10, 13, 10), (20, 36, 20), (40, 110, 40)]
        assert classify_io_optimality(pairs) is IoOptimality.NON

    def test_mixed_is_inconclusive(self):
        pairs = [(10, 13, 10), (20, 10, 20), (40, 110, 40)]
        assert classify_io_optimality(pairs) is IoOptimality.INCONCLUSIVE

    def test_slow_growth_under_bound_is_inconclusive(self):
        pairs = [(10, 20, 10), (20, 42, 20), (40, 88, 40)]
        assert classify_io_optimality(pairs) is IoOptimality.INCONCLUSIVE

    def test_point_guard(self):
        with pytest.raises(GuardError):
            classify_io_optimality([(10, 1, 2), (20, 1, 2)])

    def test_rejects_unsorted_sizes(self):
        with pytest.raises(ParameterError):
            classify_io_optimality([(10, 1, 2), (10, 1, 2), (20, 1, 2)])
