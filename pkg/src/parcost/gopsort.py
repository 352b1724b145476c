"""Joint splitter/assignment optimization for distributed sorting.

The exact solver enumerates every splitter set and every assignment behind a
work guard; the approximation takes equal-rank splitters and solves the
redistribution subproblem with the unit-cost assignment surrogate.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb, factorial

from .core import (Assignment, CostMatrix, GopSolution, SortInstance,
                   derive_transfer_and_load, sort_io_term)
from .drp import DrpInstance, _assignment_weights, drp_solve_approx, drp_solve_exact
from .errors import GuardError, InstanceError

#: Default cap on C(n, p-1) * p!; sized for n <= 14 with p <= 3.
DEFAULT_WORK_GUARD = 1000


@dataclass(frozen=True)
class GopInstance:
    """A sort instance plus the communication cost matrix of its cluster."""

    inst: SortInstance
    cost: CostMatrix

    def __post_init__(self) -> None:
        if self.inst.p != self.cost.p:
            raise InstanceError(
                f"dimension mismatch: instance p={self.inst.p}, cost p={self.cost.p}")

    @property
    def p(self) -> int:
        return self.inst.p

    @property
    def n(self) -> int:
        return self.inst.n


def gop_solve_exact(g: GopInstance,
                    work_guard: int = DEFAULT_WORK_GUARD) -> GopSolution:
    """Global minimum over all splitter sets and assignments.

    Splitter sets are drawn from the instance's elements in ascending
    lexicographic order and assignments in lexicographic mapping order;
    only strict improvements replace the incumbent, so ties resolve to the
    smallest splitter sequence and then the smallest mapping.
    """
    inst, cost = g.inst, g.cost
    n, p = inst.n, inst.p
    if n < p:
        raise InstanceError(f"need at least one element per machine: n={n}, p={p}")
    work = comb(n, p - 1) * factorial(p)
    if work > work_guard:
        raise GuardError(
            f"C({n},{p - 1})*{p}! = {work} exceeds the work guard {work_guard}")
    values = inst.values()
    best: GopSolution | None = None
    for splitters in combinations(values, p - 1):
        transfer, loads = derive_transfer_and_load(inst, splitters)
        io = sort_io_term(loads)
        weights = _assignment_weights(DrpInstance(transfer, cost))
        for perm in permutations(range(p)):
            comm = sum(weights[j][perm[j]] for j in range(p))
            total = float(comm) + io
            if best is None or total < best.total_cost:
                mapping = Assignment(tuple(k + 1 for k in perm))
                best = GopSolution(splitters, mapping, comm, io, total)
    assert best is not None
    return best


def equal_splitters(inst: SortInstance) -> tuple[int, ...]:
    """Splitters at the p-quantile ranks of the globally sorted data.

    Splitter k is the element of rank floor(k*n/p), 1-indexed; with n >= p
    the ranks are distinct and at least k, so the result is strictly
    ascending.
    """
    n, p = inst.n, inst.p
    if n < p:
        raise InstanceError(f"need at least one element per machine: n={n}, p={p}")
    values = inst.values()
    return tuple(values[(k * n) // p - 1] for k in range(1, p))


def gop_solve_approx(g: GopInstance, exact_assignment: bool = False) -> GopSolution:
    """Equal-rank splitters plus the surrogate-assignment redistribution plan.

    With ``exact_assignment=True`` the embedded redistribution subproblem is
    solved exactly instead (an extension for comparison runs; the default
    matches the plain approximation). Polynomial time either way for
    bounded p.
    """
    inst, cost = g.inst, g.cost
    splitters = equal_splitters(inst)
    transfer, loads = derive_transfer_and_load(inst, splitters)
    sub = DrpInstance(transfer, cost)
    if exact_assignment:
        assignment, comm = drp_solve_exact(sub)
    else:
        assignment, comm = drp_solve_approx(sub)
    io = sort_io_term(loads)
    return GopSolution(splitters, assignment, comm, io, float(comm) + io)
