import random
from fractions import Fraction
from itertools import permutations

import pytest

from parcost import (Assignment, AssignmentProblem, GuardError, InstanceError,
                     TransferMatrix, assignment_cost, drp_to_lap, lap_brute,
                     lap_solve)


def random_problem(rng, p, top=15):
    return AssignmentProblem([[rng.randint(0, top) for _ in range(p)]
                              for _ in range(p)])


class TestLapSolve:
    def test_zero_diagonal_prefers_identity(self):
        prob = AssignmentProblem([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
        a, cost = lap_solve(prob)
        assert a.mapping == (1, 2, 3)
        assert cost == 0

    def test_three_by_three_oracle_value(self):
        # brute-forced over all 6 permutations: unique optimum
        prob = AssignmentProblem([[4, 1, 3], [2, 0, 5], [3, 2, 2]])
        a, cost = lap_solve(prob)
        assert cost == 5
        assert a.mapping == (2, 1, 3)

    def test_single_machine(self):
        a, cost = lap_solve(AssignmentProblem([[7]]))
        assert a.mapping == (1,)
        assert cost == 7

    def test_fractional_weights(self):
        prob = AssignmentProblem([[Fraction(1, 3), Fraction(1, 2)],
                                  [Fraction(1, 4), Fraction(2, 3)]])
        a, cost = lap_solve(prob)
        b, brute_cost = lap_brute(prob)
        assert cost == brute_cost
        assert a.mapping == b.mapping

    def test_lexicographic_tie_break(self):
        # every assignment costs 2: the lexicographically smallest must win
        prob = AssignmentProblem([[1, 1], [1, 1]])
        a, cost = lap_solve(prob)
        assert a.mapping == (1, 2)
        assert cost == 2


class TestLapBrute:
    def test_guard(self):
        prob = AssignmentProblem([[0] * 11 for _ in range(11)])
        with pytest.raises(GuardError):
            lap_brute(prob)
        small = AssignmentProblem([[0] * 4 for _ in range(4)])
        with pytest.raises(GuardError):
            lap_brute(small, max_p=3)
        lap_brute(small, max_p=4)  # overridable in both directions

    def test_agrees_with_solver_on_examples(self):
        for weights in ([[0, 1], [1, 0]], [[4, 1, 3], [2, 0, 5], [3, 2, 2]], [[7]]):
            prob = AssignmentProblem(weights)
            assert lap_solve(prob) == lap_brute(prob)

    def test_randomized_equivalence_6x6(self):
        rng = random.Random(23)
        for _ in range(200):
            prob = random_problem(rng, 6)
            a1, c1 = lap_solve(prob)
            a2, c2 = lap_brute(prob)
            assert c1 == c2
            assert a1.mapping == a2.mapping

    def test_row_permutation_symmetry(self):
        rng = random.Random(29)
        for _ in range(30):
            p = rng.randint(2, 5)
            prob = random_problem(rng, p)
            sigma = list(range(1, p + 1))
            rng.shuffle(sigma)
            moved = [[0] * p for _ in range(p)]
            for i in range(p):
                moved[sigma[i] - 1] = list(prob.weights[i])
            prob2 = AssignmentProblem(moved)
            a1, c1 = lap_brute(prob)
            _, c2 = lap_brute(prob2)
            assert c1 == c2
            relabeled = Assignment(tuple(sigma[m - 1] for m in a1.mapping))
            assert assignment_cost(prob2, relabeled) == c2


class TestDrpToLap:
    def test_column_sum_construction(self):
        prob = drp_to_lap(TransferMatrix([[0, 5], [3, 0]]))
        assert prob.weights == ((3, 0), (0, 5))

    def test_diagonal_transfer_solves_to_identity(self):
        prob = drp_to_lap(TransferMatrix([[4, 0], [0, 9]]))
        a, cost = lap_solve(prob)
        assert a.mapping == (1, 2)
        assert cost == 0

    def test_uniform_transfer_makes_all_assignments_equal(self):
        p, t = 3, 5
        prob = drp_to_lap(TransferMatrix([[t] * p for _ in range(p)]))
        costs = {assignment_cost(prob, Assignment(perm))
                 for perm in permutations(range(1, p + 1))}
        assert costs == {(p - 1) * p * t}

    def test_surrogate_counts_moved_mass(self):
        # sum_j (colsum_j - T[a_j][j]) equals the volume priced at unit cost
        rng = random.Random(31)
        for _ in range(50):
            p = rng.randint(2, 5)
            t = [[rng.randint(0, 9) for _ in range(p)] for _ in range(p)]
            transfer = TransferMatrix(t)
            prob = drp_to_lap(transfer)
            mapping = list(range(1, p + 1))
            rng.shuffle(mapping)
            a = Assignment(tuple(mapping))
            moved = sum(t[i][j] for i in range(p) for j in range(p)
                        if a.mapping[j] != i + 1)
            assert assignment_cost(prob, a) == moved

    def test_column_shift_keeps_argmin_set(self):
        rng = random.Random(37)
        for _ in range(25):
            p = rng.randint(2, 4)
            base = random_problem(rng, p, top=8)
            col = rng.randrange(p)
            delta = rng.randint(1, 9)
            shifted = [[base.weights[i][j] + (delta if j == col else 0)
                        for j in range(p)] for i in range(p)]
            prob2 = AssignmentProblem(shifted)

            def argmin_set(prob):
                costs = {perm: assignment_cost(prob, Assignment(perm))
                         for perm in permutations(range(1, p + 1))}
                best = min(costs.values())
                return {perm for perm, c in costs.items() if c == best}

            assert argmin_set(base) == argmin_set(prob2)

    def test_rejects_negative_weights(self):
        with pytest.raises(InstanceError):
            AssignmentProblem([[0, -1], [1, 0]])
