"""Domain types and the two cost objectives shared by all solvers.

Numeric conventions, fixed here so every module agrees:

* Costs and masses are exact rationals: ``int`` where possible, otherwise
  ``fractions.Fraction``. Floats supplied by callers are converted to their
  exact binary value, so all comparisons and tie-breaks are deterministic.
* The sorting-IO term uses base-2 logarithms and is computed in binary64;
  ``0*log2(0)`` and ``1*log2(1)`` are both 0 (an empty or singleton interval
  costs nothing to sort). Comparisons that mix the IO term use a documented
  tolerance of 1e-9 where a tolerance is needed at all.
* Machines are numbered 1..p in every public mapping and error message;
  matrix storage is row-major with machine i on row i-1.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .errors import InstanceError

Rational = Union[int, Fraction]

#: Tolerance for comparisons that involve the binary64 IO term.
FLOAT_TOLERANCE = 1e-9


def as_exact(value: object) -> Rational:
    """Convert a number to its exact rational representation.

    Integers pass through, fractions are reduced (and collapse to ``int``
    when integral), and floats become the exact rational they denote.
    """
    if isinstance(value, bool):
        raise InstanceError("booleans are not valid numeric entries")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InstanceError(f"non-finite numeric entry: {value!r}")
        frac = Fraction(value)
        return int(frac) if frac.denominator == 1 else frac
    raise InstanceError(f"unsupported numeric type: {type(value).__name__}")


def _exact_square(rows: Sequence[Sequence[object]], what: str,
                  min_p: int = 1) -> tuple[tuple[Rational, ...], ...]:
    """Validate and convert a square matrix of numbers."""
    p = len(rows)
    if p < min_p:
        raise InstanceError(f"{what} needs at least {min_p} machines, got {p}")
    out = []
    for i, row in enumerate(rows):
        if len(row) != p:
            raise InstanceError(
                f"{what} row {i + 1} has {len(row)} entries, expected {p}")
        out.append(tuple(as_exact(x) for x in row))
    return tuple(out)


@dataclass(frozen=True)
class CostMatrix:
    """Per-unit communication costs between the p physical machines.

    ``entries[i-1][j-1]`` is the cost of moving one unit of data from
    machine i to machine j. The diagonal is zero (local data is free) and
    every off-diagonal entry must be strictly positive so that the ratio
    of extreme link costs is well defined.

    ``allow_nonzero_diagonal`` relaxes only the diagonal constraint; it
    exists for the bipartite-tour reduction, whose edge weights land on the
    diagonal as well. Ordinary instances should never set it.
    """

    entries: tuple[tuple[Rational, ...], ...]
    allow_nonzero_diagonal: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        entries = _exact_square(self.entries, "cost matrix", min_p=2)
        for i, row in enumerate(entries):
            for j, value in enumerate(row):
                if i == j:
                    if value != 0 and not self.allow_nonzero_diagonal:
                        raise InstanceError(
                            f"cost[{i + 1}][{j + 1}] must be 0 on the diagonal, got {value}")
                    if value < 0:
                        raise InstanceError(
                            f"cost[{i + 1}][{j + 1}] is negative: {value}")
                elif value <= 0:
                    raise InstanceError(
                        f"cost[{i + 1}][{j + 1}] must be positive off the diagonal, got {value}")
        object.__setattr__(self, "entries", entries)

    @property
    def p(self) -> int:
        return len(self.entries)

    def cost(self, i: int, j: int) -> Rational:
        """Cost per unit from machine i to machine j (both 1-based)."""
        return self.entries[i - 1][j - 1]

    def off_diagonal(self) -> tuple[Rational, ...]:
        return tuple(v for i, row in enumerate(self.entries)
                     for j, v in enumerate(row) if i != j)

    @property
    def max_off_diagonal(self) -> Rational:
        return max(self.off_diagonal())

    @property
    def min_off_diagonal(self) -> Rational:
        return min(self.off_diagonal())


@dataclass(frozen=True)
class TransferMatrix:
    """Data volumes keyed by (physical source, virtual destination).

    ``entries[i-1][j-1]`` is the amount of data sitting on physical machine
    i that belongs to virtual machine j. All entries are non-negative.
    """

    entries: tuple[tuple[Rational, ...], ...]

    def __post_init__(self) -> None:
        entries = _exact_square(self.entries, "transfer matrix", min_p=1)
        for i, row in enumerate(entries):
            for j, value in enumerate(row):
                if value < 0:
                    raise InstanceError(
                        f"transfer[{i + 1}][{j + 1}] is negative: {value}")
        object.__setattr__(self, "entries", entries)

    @property
    def p(self) -> int:
        return len(self.entries)

    def amount(self, i: int, j: int) -> Rational:
        """Volume from physical machine i destined for virtual machine j."""
        return self.entries[i - 1][j - 1]

    def column_sums(self) -> tuple[Rational, ...]:
        return tuple(sum(row[j] for row in self.entries)
                     for j in range(self.p))

    @property
    def total_mass(self) -> Rational:
        return sum(sum(row) for row in self.entries)


@dataclass(frozen=True)
class Assignment:
    """A bijection from virtual machines to physical machines.

    ``mapping[j-1]`` is the 1-based physical machine hosting virtual
    machine j.
    """

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        mapping = tuple(self.mapping)
        p = len(mapping)
        if p < 1:
            raise InstanceError("assignment must cover at least one machine")
        if sorted(mapping) != list(range(1, p + 1)):
            raise InstanceError(
                f"mapping {mapping} is not a permutation of 1..{p}")
        object.__setattr__(self, "mapping", mapping)

    @property
    def p(self) -> int:
        return len(self.mapping)

    def host(self, j: int) -> int:
        """Physical machine hosting virtual machine j (1-based)."""
        return self.mapping[j - 1]

    @staticmethod
    def identity(p: int) -> "Assignment":
        return Assignment(tuple(range(1, p + 1)))


@dataclass(frozen=True)
class SortInstance:
    """n distinct integers spread over p machines.

    ``subsets[i-1]`` is machine i's local data. Elements must be distinct
    across the whole instance; interval counting below silently assumes it,
    so duplicates are rejected at construction.
    """

    subsets: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        subsets = tuple(tuple(s) for s in self.subsets)
        if len(subsets) < 2:
            raise InstanceError("a sort instance needs p > 1 machines")
        seen: set[int] = set()
        for i, subset in enumerate(subsets):
            for value in subset:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise InstanceError(
                        f"subset {i + 1} holds a non-integer value: {value!r}")
                if value in seen:
                    raise InstanceError(
                        f"duplicate element {value} (subset {i + 1}); elements must be distinct")
                seen.add(value)
        object.__setattr__(self, "subsets", subsets)

    @property
    def p(self) -> int:
        return len(self.subsets)

    @property
    def n(self) -> int:
        return sum(len(s) for s in self.subsets)

    def values(self) -> tuple[int, ...]:
        """All elements in ascending order."""
        return tuple(sorted(v for s in self.subsets for v in s))


@dataclass(frozen=True)
class GopSolution:
    """A splitter choice plus machine assignment with its cost breakdown.

    ``total_cost`` is always ``float(comm_cost) + io_cost``; the redundancy
    is kept so results can be logged and compared without recomputation.
    """

    splitters: tuple[int, ...]
    assignment: Assignment
    comm_cost: Rational
    io_cost: float
    total_cost: float

    def __post_init__(self) -> None:
        splitters = tuple(self.splitters)
        if any(a >= b for a, b in zip(splitters, splitters[1:])):
            raise InstanceError(f"splitters {splitters} are not strictly ascending")
        if self.total_cost != float(self.comm_cost) + self.io_cost:
            raise InstanceError("total_cost must equal comm_cost + io_cost")
        object.__setattr__(self, "splitters", splitters)


def drp_cost(transfer: TransferMatrix, cost: CostMatrix, assignment: Assignment) -> Rational:
    """Total communication cost of hosting virtual machine j on ``assignment.host(j)``.

    Sums ``transfer[i][j] * cost[i][host(j)]`` over all source machines i and
    virtual machines j. Exact and non-negative.
    """
    p = transfer.p
    if cost.p != p or assignment.p != p:
        raise InstanceError(
            f"dimension mismatch: transfer p={p}, cost p={cost.p}, assignment p={assignment.p}")
    total: Rational = 0
    for i in range(p):
        row = transfer.entries[i]
        cost_row = cost.entries[i]
        for j in range(p):
            t = row[j]
            if t:
                total += t * cost_row[assignment.mapping[j] - 1]
    return as_exact(total)


def _check_splitters(splitters: Sequence[int], p: int) -> tuple[int, ...]:
    splitters = tuple(splitters)
    if len(splitters) != p - 1:
        raise InstanceError(
            f"expected {p - 1} splitters for p={p}, got {len(splitters)}")
    if any(a >= b for a, b in zip(splitters, splitters[1:])):
        raise InstanceError(f"splitters {splitters} are not strictly ascending")
    return splitters


def derive_transfer_and_load(inst: SortInstance,
                             splitters: Sequence[int]) -> tuple[TransferMatrix, tuple[int, ...]]:
    """Count elements per (machine, interval) for the given splitters.

    Interval j is the half-open range (splitter_{j-1}, splitter_j], with
    sentinels -inf and +inf at the ends. Returns the p-by-p count matrix and
    the per-interval loads L (its column sums); the loads always sum to n.
    """
    p = inst.p
    splitters = _check_splitters(splitters, p)
    counts = [[0] * p for _ in range(p)]
    for i, subset in enumerate(inst.subsets):
        for value in subset:
            counts[i][bisect_left(splitters, value)] += 1
    transfer = TransferMatrix(tuple(tuple(row) for row in counts))
    loads = tuple(sum(counts[i][j] for i in range(p)) for j in range(p))
    return transfer, loads


def sort_io_term(loads: Sequence[int]) -> float:
    """max over intervals of L * log2(L), with loads of 0 or 1 costing 0."""
    worst = 0.0
    for load in loads:
        if load > 1:
            worst = max(worst, load * math.log2(load))
    return worst


def gop_objective(inst: SortInstance, splitters: Sequence[int],
                  assignment: Assignment, cost: CostMatrix) -> GopSolution:
    """Evaluate the joint objective: communication plus worst sorting IO.

    The communication part prices the derived transfer matrix under the
    given assignment; the IO part is ``sort_io_term`` over the interval
    loads and does not depend on the assignment.
    """
    if cost.p != inst.p or assignment.p != inst.p:
        raise InstanceError(
            f"dimension mismatch: instance p={inst.p}, cost p={cost.p}, "
            f"assignment p={assignment.p}")
    splitters = _check_splitters(splitters, inst.p)
    universe = set(inst.values())
    for s in splitters:
        if s not in universe:
            raise InstanceError(f"splitter {s} is not an element of the instance")
    transfer, loads = derive_transfer_and_load(inst, splitters)
    comm = drp_cost(transfer, cost, assignment)
    io = sort_io_term(loads)
    return GopSolution(splitters, assignment, comm, io, float(comm) + io)
