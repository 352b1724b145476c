import math
import random
from fractions import Fraction
from itertools import combinations

import pytest

from parcost import (CostMatrix, GopInstance, GuardError, InstanceError,
                     SortInstance, derive_transfer_and_load, drp_to_lap,
                     equal_splitters, gop_solve_approx, gop_solve_exact,
                     lap_solve, ratio_bound)
from parcost.bench import gen_gop

UNIT2 = CostMatrix([[0, 1], [1, 0]])


class TestExact:
    def test_balanced_data(self):
        s = gop_solve_exact(GopInstance(SortInstance(((1, 2), (3, 4))), UNIT2))
        assert s.splitters == (2,)
        assert s.assignment.mapping == (1, 2)
        assert s.total_cost == 2.0

    def test_reversed_data_swaps_roles(self):
        s = gop_solve_exact(GopInstance(SortInstance(((3, 4), (1, 2))), UNIT2))
        assert s.splitters == (2,)
        assert s.assignment.mapping == (2, 1)
        assert s.total_cost == 2.0

    def test_pre_placed_lower_half_keeps_identity(self):
        s = gop_solve_exact(GopInstance(SortInstance(((1, 2, 3), (7, 8, 9))), UNIT2))
        assert s.assignment.mapping == (1, 2)
        assert s.comm_cost == 0

    def test_work_guard(self):
        g = gen_gop(30, 3, seed=1)
        with pytest.raises(GuardError):
            gop_solve_exact(g)
        gop_solve_exact(g, work_guard=10 ** 6)

    def test_rejects_fewer_elements_than_machines(self):
        c3 = CostMatrix([[0 if i == j else 1 for j in range(3)] for i in range(3)])
        with pytest.raises(InstanceError):
            gop_solve_exact(GopInstance(SortInstance(((1,), (2,), ())), c3))


class TestEqualSplitters:
    def test_exact_division(self):
        assert equal_splitters(SortInstance(((1, 2), (3, 4)))) == (2,)

    def test_quartiles(self):
        inst = SortInstance(((1, 2, 3, 4), (5, 6), (7,), (8,)))
        assert equal_splitters(inst) == (2, 4, 6)

    def test_floor_rank_when_uneven(self):
        inst = SortInstance(((10, 30, 50), (20, 40)))
        # rank floor(5/2) = 2 in the sorted order (10,20,30,40,50)
        assert equal_splitters(inst) == (20,)

    def test_too_few_elements(self):
        with pytest.raises(InstanceError):
            equal_splitters(SortInstance(((1,), (), ())))


class TestApprox:
    def test_matches_exact_on_balanced_instance(self):
        g = GopInstance(SortInstance(((1, 2), (3, 4))), UNIT2)
        assert gop_solve_approx(g) == gop_solve_exact(g)

    def test_never_beats_exact(self):
        rng = random.Random(61)
        for _ in range(60):
            g = gen_gop(rng.randint(4, 12), 2, seed=rng.randrange(2 ** 32))
            exact = gop_solve_exact(g, work_guard=10 ** 6)
            approx = gop_solve_approx(g)
            assert exact.total_cost <= approx.total_cost + 1e-9

    def test_equal_split_io_term(self):
        rng = random.Random(67)
        for _ in range(40):
            p = rng.choice((2, 4))
            n = p * rng.randint(2, 8)
            g = gen_gop(n, p, seed=rng.randrange(2 ** 32))
            approx = gop_solve_approx(g)
            share = n // p
            assert approx.io_cost == share * math.log2(share)

    def test_ratio_bound_with_precondition(self):
        # only asserted where p * 2^p <= n
        rng = random.Random(71)
        for _ in range(40):
            r = rng.choice((1, 3, 10))
            n = rng.randint(8, 13)
            g = gen_gop(n, 2, seed=rng.randrange(2 ** 32), cost_high=max(r, 1))
            exact = gop_solve_exact(g, work_guard=10 ** 6)
            approx = gop_solve_approx(g)
            bound = max(float(ratio_bound(g.cost)), 2.0)
            assert approx.total_cost <= bound * exact.total_cost + 1e-9

    def test_exact_assignment_extension_helps_or_ties(self):
        rng = random.Random(73)
        for _ in range(30):
            g = gen_gop(rng.randint(6, 12), 2, seed=rng.randrange(2 ** 32),
                        cost_high=9)
            plain = gop_solve_approx(g)
            refined = gop_solve_approx(g, exact_assignment=True)
            assert refined.total_cost <= plain.total_cost + 1e-9
            assert refined.splitters == plain.splitters


class TestSurrogateSpread:
    def test_unit_cost_lap_spread_is_bounded(self):
        # with unit off-diagonal costs, any two splitter choices give
        # surrogate optima within (p-1)/p * n of each other
        rng = random.Random(79)
        for _ in range(20):
            n = rng.randint(4, 12)
            g = gen_gop(n, 2, seed=rng.randrange(2 ** 32))
            costs = []
            for splitters in combinations(g.inst.values(), 1):
                transfer, _ = derive_transfer_and_load(g.inst, splitters)
                _, cost = lap_solve(drp_to_lap(transfer))
                costs.append(cost)
            assert max(costs) - min(costs) <= Fraction(n, 2)
