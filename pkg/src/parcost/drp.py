"""The data redistribution problem: exact and approximate solvers, ratio
bound, and the reduction from tours of a complete bipartite graph.

The exact solver enumerates all p! assignments behind a guard. The
approximation ignores the cost matrix entirely, solves the unit-cost
assignment surrogate on the transfer matrix alone, and reports that
assignment's true cost; its cost is never more than max/min link cost times
the optimum and never less than the optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .core import (Assignment, CostMatrix, Rational, TransferMatrix,
                   _exact_square, as_exact, drp_cost)
from .errors import GuardError, InstanceError
from .lap import drp_to_lap, lap_solve

DEFAULT_EXACT_LIMIT = 10
DEFAULT_TOUR_LIMIT = 6


@dataclass(frozen=True)
class DrpInstance:
    """A transfer matrix and a cost matrix of matching size."""

    transfer: TransferMatrix
    cost: CostMatrix

    def __post_init__(self) -> None:
        if self.transfer.p != self.cost.p:
            raise InstanceError(
                f"dimension mismatch: transfer p={self.transfer.p}, cost p={self.cost.p}")

    @property
    def p(self) -> int:
        return self.transfer.p


@dataclass(frozen=True)
class TspFbInstance:
    """Edge weights of a complete bipartite graph K_{n,n}.

    ``weights[i-1][j-1]`` is the weight of the edge between left vertex i and
    right vertex j. Off-diagonal weights must be positive; diagonal weights
    may be zero (they map onto free local transfers under the reduction).
    """

    weights: tuple[tuple[Rational, ...], ...]

    def __post_init__(self) -> None:
        weights = _exact_square(self.weights, "bipartite tour instance", min_p=2)
        for i, row in enumerate(weights):
            for j, value in enumerate(row):
                if i != j and value <= 0:
                    raise InstanceError(
                        f"weights[{i + 1}][{j + 1}] must be positive, got {value}")
                if value < 0:
                    raise InstanceError(
                        f"weights[{i + 1}][{j + 1}] is negative: {value}")
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return len(self.weights)


def _assignment_weights(inst: DrpInstance) -> list[list[Rational]]:
    """Collapse the objective per virtual machine.

    g[j][k] = sum_i transfer[i][j] * cost[i][k] is the cost of hosting
    virtual machine j on physical machine k, so any assignment's total cost
    is just sum_j g[j][mapping[j]].
    """
    p = inst.p
    t = inst.transfer.entries
    c = inst.cost.entries
    g: list[list[Rational]] = [[0] * p for _ in range(p)]
    for i in range(p):
        row_t = t[i]
        row_c = c[i]
        for j in range(p):
            volume = row_t[j]
            if volume:
                g_row = g[j]
                for k in range(p):
                    g_row[k] += volume * row_c[k]
    return g


def drp_solve_exact(inst: DrpInstance,
                    max_p: int = DEFAULT_EXACT_LIMIT) -> tuple[Assignment, Rational]:
    """Global minimum over all p! assignments, lexicographically smallest first.

    Enumeration is in lexicographic mapping order with strict improvement,
    so the returned mapping is the smallest optimal one.
    """
    p = inst.p
    if p > max_p:
        raise GuardError(
            f"p={p} exceeds the exhaustive-search guard {max_p} (p! enumeration)")
    g = _assignment_weights(inst)
    best_perm: tuple[int, ...] | None = None
    best_cost: Rational = 0
    for perm in permutations(range(p)):
        cost = sum(g[j][perm[j]] for j in range(p))
        if best_perm is None or cost < best_cost:
            best_perm = perm
            best_cost = cost
    assert best_perm is not None
    return Assignment(tuple(k + 1 for k in best_perm)), as_exact(best_cost)


def drp_solve_approx(inst: DrpInstance) -> tuple[Assignment, Rational]:
    """Polynomial approximation: assignment from the unit-cost surrogate.

    Solves the linear assignment problem built from the transfer matrix
    alone and prices the resulting assignment with the real cost matrix.
    """
    assignment, _ = lap_solve(drp_to_lap(inst.transfer))
    return assignment, drp_cost(inst.transfer, inst.cost, assignment)


def ratio_bound(cost: CostMatrix) -> Rational:
    """Worst-case approximation factor: max over min off-diagonal cost."""
    return as_exact(Fraction(cost.max_off_diagonal) / Fraction(cost.min_off_diagonal))


def _tour_columns(n: int) -> tuple[tuple[int, int], ...]:
    """Column pair carrying mass in each row of the reduction's transfer matrix.

    The pairs describe a bipartite position graph (rows vs columns) that must
    form one alternating cycle through all 2n positions; that is what makes
    every assignment of the reduced instance trace a Hamiltonian tour.

    Odd n steps by two, which visits every position exactly once. Even n
    needs the two end rows rewired: row 1 bridges the descending odd chain
    into column 2, and row 2 must bridge column 1 to column 4 -- pairing
    row 2 with column n instead would give column n three incident rows and
    column 4 none for n >= 6. At n = 4 both wirings coincide.
    """
    if n % 2 == 1:
        return tuple((1 + (i + 1) % n, 1 + (i - 1) % n) for i in range(1, n + 1))
    pairs: list[tuple[int, int]] = []
    for i in range(1, n + 1):
        if i == 1:
            pairs.append((2, n - 1))
        elif i == 2:
            pairs.append((1, 4))
        elif i % 2 == 1:
            pairs.append((i, i - 2))
        else:
            pairs.append((i, 2 if i == n else i + 2))
    return tuple(pairs)


def tspfb_to_drp(tour: TspFbInstance) -> DrpInstance:
    """Encode a bipartite tour instance as a redistribution instance.

    The transfer matrix is 0/1 with exactly two ones per row and per column,
    arranged as a single alternating cycle; the cost matrix is the weight
    matrix verbatim (its diagonal may be positive, hence the relaxed cost
    matrix). Every assignment of the result traces a Hamiltonian tour whose
    weight equals the assignment's cost.
    """
    n = tour.n
    if n < 3:
        raise InstanceError(f"the reduction needs n >= 3, got n={n}")
    transfer = [[0] * n for _ in range(n)]
    column_degree = [0] * n
    for i, (a, b) in enumerate(_tour_columns(n)):
        transfer[i][a - 1] = 1
        transfer[i][b - 1] = 1
        column_degree[a - 1] += 1
        column_degree[b - 1] += 1
    assert all(d == 2 for d in column_degree), "position graph must be 2-regular"
    cost = CostMatrix(tour.weights, allow_nonzero_diagonal=True)
    return DrpInstance(TransferMatrix(tuple(tuple(r) for r in transfer)), cost)


def tspfb_brute(tour: TspFbInstance,
                max_n: int = DEFAULT_TOUR_LIMIT) -> Rational:
    """Minimum weight over all Hamiltonian cycles of K_{n,n}, by enumeration.

    Cycles alternate sides, so each is a pair of vertex orders: left vertices
    with vertex 1 pinned first (cycles are rotation-invariant) and right
    vertices in the gaps. Enumerates n! * (n-1)! sequences.
    """
    n = tour.n
    if n > max_n:
        raise GuardError(
            f"n={n} exceeds the tour enumeration guard {max_n} (n!*(n-1)! cycles)")
    w = tour.weights
    best: Rational | None = None
    for left_rest in permutations(range(2, n + 1)):
        left = (1,) + left_rest
        for right in permutations(range(1, n + 1)):
            weight: Rational = 0
            for k in range(n):
                weight += w[left[k] - 1][right[k] - 1]
                weight += w[left[(k + 1) % n] - 1][right[k] - 1]
            if best is None or weight < best:
                best = weight
    assert best is not None
    return as_exact(best)
