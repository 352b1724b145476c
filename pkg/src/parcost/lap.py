"""Exact linear assignment on a square weight matrix, plus a brute-force oracle.

Both solvers share one tie-break rule: among all minimum-cost assignments
they return the lexicographically smallest mapping, so equivalence tests can
compare mappings and not just costs. The polynomial solver enforces the rule
by folding a base-p positional code into the integer weights, which makes the
optimum unique before the Hungarian machinery runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .core import Assignment, Rational, TransferMatrix, _exact_square, as_exact
from .errors import GuardError, InstanceError

DEFAULT_BRUTE_LIMIT = 10


@dataclass(frozen=True)
class AssignmentProblem:
    """A p-by-p matrix of non-negative weights.

    ``weights[i-1][j-1]`` is the cost of hosting virtual machine j on
    physical machine i; an assignment's cost is the sum of its p chosen
    entries, one per column.
    """

    weights: tuple[tuple[Rational, ...], ...]

    def __post_init__(self) -> None:
        weights = _exact_square(self.weights, "assignment problem", min_p=1)
        for i, row in enumerate(weights):
            for j, value in enumerate(row):
                if value < 0:
                    raise InstanceError(
                        f"weights[{i + 1}][{j + 1}] is negative: {value}")
        object.__setattr__(self, "weights", weights)

    @property
    def p(self) -> int:
        return len(self.weights)


def assignment_cost(prob: AssignmentProblem, assignment: Assignment) -> Rational:
    """Sum of weights[mapping[j]][j] over all columns j."""
    if assignment.p != prob.p:
        raise InstanceError(
            f"dimension mismatch: problem p={prob.p}, assignment p={assignment.p}")
    return as_exact(sum(prob.weights[assignment.mapping[j] - 1][j]
                        for j in range(prob.p)))


def _integer_weights(weights: Sequence[Sequence[Rational]]) -> list[list[int]]:
    """Scale a rational matrix by the LCM of denominators to integers."""
    scale = 1
    for row in weights:
        for value in row:
            if isinstance(value, Fraction):
                scale = scale * value.denominator // math.gcd(scale, value.denominator)
    return [[int(value * scale) for value in row] for row in weights]


def _hungarian(cost: list[list[int]]) -> list[int]:
    """Column-potential Hungarian method; returns the row matched to each column.

    Works on arbitrary Python integers, so callers may pre-scale rationals
    however they like without overflow concerns. O(p^3) arithmetic steps.
    """
    n = len(cost)
    big = 1 + sum(sum(row) for row in cost)
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    match = [0] * (n + 1)  # match[j] = row currently assigned to column j
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = [big] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = big
            j1 = 0
            row = cost[i0 - 1]
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    return [match[j] for j in range(1, n + 1)]


def lap_solve(prob: AssignmentProblem) -> tuple[Assignment, Rational]:
    """Minimum-cost assignment with the lexicographically smallest mapping.

    The weights are scaled to integers, multiplied by p^p, and offset by the
    positional code sum_j (row-1) * p^(p-1-j). Distinct assignments then have
    distinct encoded costs, and the unique encoded optimum is exactly the
    lexicographically smallest optimum of the original problem.
    """
    p = prob.p
    ints = _integer_weights(prob.weights)
    radix = p ** p
    place = [p ** (p - 1 - j) for j in range(p)]
    encoded = [[ints[i][j] * radix + i * place[j] for j in range(p)]
               for i in range(p)]
    col_to_row = _hungarian(encoded)
    assignment = Assignment(tuple(col_to_row))
    return assignment, assignment_cost(prob, assignment)


def lap_brute(prob: AssignmentProblem,
              max_p: int = DEFAULT_BRUTE_LIMIT) -> tuple[Assignment, Rational]:
    """Exhaustive minimum over all p! assignments; oracle for lap_solve.

    Permutations are generated in lexicographic order and only strictly
    better costs replace the incumbent, which realizes the same tie-break
    as lap_solve.
    """
    p = prob.p
    if p > max_p:
        raise GuardError(
            f"p={p} exceeds the brute-force guard {max_p} (p! enumeration)")
    best_mapping: tuple[int, ...] | None = None
    best_cost: Rational = 0
    for perm in permutations(range(1, p + 1)):
        cost = sum(prob.weights[perm[j] - 1][j] for j in range(p))
        if best_mapping is None or cost < best_cost:
            best_mapping = perm
            best_cost = cost
    assert best_mapping is not None
    return Assignment(best_mapping), as_exact(best_cost)


def drp_to_lap(transfer: TransferMatrix) -> AssignmentProblem:
    """Build the assignment surrogate that prices every move at unit cost.

    weights[i][j] = colsum_j - transfer[i][j]: assigning virtual machine j to
    physical machine i leaves exactly that much of column j's mass on other
    machines, so minimizing the assignment cost minimizes the total volume
    that has to move at all. Weights are non-negative by construction.
    """
    sums = transfer.column_sums()
    p = transfer.p
    weights = tuple(tuple(sums[j] - transfer.entries[i][j] for j in range(p))
                    for i in range(p))
    return AssignmentProblem(weights)
