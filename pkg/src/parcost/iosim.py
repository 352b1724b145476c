"""Executable IO-accounting models for sorting, spanning forests, and
fractional matching, plus the optimality classifier.

Counting conventions, applied identically on both sides of every comparison
so classifications stay model-fair:

* One IO = one record moved between a machine's main memory and its external
  memory; block size is ignored.
* ``io_sort_count(N, M)`` is the serial external-sort model: free for empty
  input, a single scan when the data fits in memory, and N * ceil(log_M N)
  otherwise.
* Simulators are deterministic state machines; two runs on equal inputs
  produce equal reports.
"""

from __future__ import annotations

import heapq
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (CostMatrix, Rational, SortInstance, as_exact,
                   derive_transfer_and_load)
from .errors import GuardError, InstanceError, ParameterError

Phase = tuple[str, int, Rational]


@dataclass(frozen=True)
class ExternalMemoryConfig:
    """Main-memory capacity in records per machine; external memory is unbounded."""

    main_memory: int
    machines: int

    def __post_init__(self) -> None:
        if self.main_memory < 2:
            raise ParameterError(f"main_memory must be >= 2, got {self.main_memory}")
        if self.machines < 1:
            raise ParameterError(f"machines must be >= 1, got {self.machines}")


@dataclass(frozen=True)
class IoReport:
    """Per-phase IO and communication counters from one simulation run.

    ``extras`` carries auxiliary read-only figures (analytic cross-checks,
    per-iteration vertex loads) that are not part of the totals.
    """

    phases: tuple[Phase, ...]
    total_io: int
    total_comm: Rational
    extras: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        phases = tuple((str(label), int(io), as_exact(comm))
                       for label, io, comm in self.phases)
        for label, io, comm in phases:
            if io < 0 or comm < 0:
                raise InstanceError(f"phase {label!r} has a negative counter")
        if self.total_io != sum(io for _, io, _ in phases):
            raise InstanceError("total_io must equal the sum of phase IO counters")
        if self.total_comm != sum(comm for _, _, comm in phases):
            raise InstanceError("total_comm must equal the sum of phase communication")
        object.__setattr__(self, "phases", phases)

    @staticmethod
    def from_phases(phases: Sequence[Phase],
                    extras: Mapping[str, object] | None = None) -> "IoReport":
        phases = tuple(phases)
        total_io = sum(int(io) for _, io, _ in phases)
        total_comm = as_exact(sum(as_exact(c) for _, _, c in phases))
        return IoReport(phases, total_io, total_comm, extras or {})


@dataclass(frozen=True)
class Graph:
    """An undirected weighted graph on vertices 1..n_vertices."""

    n_vertices: int
    edges: tuple[tuple[int, int, Rational], ...]

    def __post_init__(self) -> None:
        if self.n_vertices < 1:
            raise InstanceError(f"n_vertices must be >= 1, got {self.n_vertices}")
        seen: set[frozenset[int]] = set()
        edges = []
        for k, (u, v, w) in enumerate(self.edges):
            if not (1 <= u <= self.n_vertices) or not (1 <= v <= self.n_vertices):
                raise InstanceError(
                    f"edge {k + 1} endpoints ({u},{v}) out of range 1..{self.n_vertices}")
            if u == v:
                raise InstanceError(f"edge {k + 1} is a self-loop at {u}")
            key = frozenset((u, v))
            if key in seen:
                raise InstanceError(f"duplicate undirected edge ({u},{v})")
            seen.add(key)
            edges.append((u, v, as_exact(w)))
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def n_edges(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class FractionalMatchingState:
    """Final state of the multiplicative-boost fractional matching run.

    ``x`` is the per-edge weight, indexed like ``Graph.edges``; the frozen
    sets only ever grow while the run executes. Epsilon is kept exact so the
    freeze decisions are reproducible bit for bit.
    """

    x: tuple[Rational, ...]
    frozen_vertices: frozenset[int]
    frozen_edges: frozenset[int]
    epsilon: Fraction

    def __post_init__(self) -> None:
        if not 0 < self.epsilon < Fraction(1, 2):
            raise ParameterError(
                f"epsilon must lie in (0, 1/2), got {self.epsilon}")

    def vertex_load(self, graph: Graph, v: int) -> Rational:
        """y_v: sum of x over edges incident to v."""
        return as_exact(sum(x for (a, b, _), x in zip(graph.edges, self.x)
                            if v in (a, b)))


def io_sort_count(records: int, memory: int) -> int:
    """Model cost of serially sorting ``records`` with ``memory`` capacity."""
    if records < 0:
        raise ParameterError(f"record count must be >= 0, got {records}")
    if memory < 2:
        raise ParameterError(f"memory must be >= 2, got {memory}")
    if records == 0:
        return 0
    if records <= memory:
        return records
    passes = 1
    reach = memory
    while reach < records:
        reach *= memory
        passes += 1
    return records * passes


def kruskal_serial_io(m: int, memory: int) -> int:
    """Serial spanning-tree IO model: sort the m edges, then scan them once."""
    if m < 0:
        raise ParameterError(f"edge count must be >= 0, got {m}")
    if m == 0:
        return 0
    return io_sort_count(m, memory) + m


class _UnionFind:
    def __init__(self, vertices):
        self.parent = {v: v for v in vertices}

    def find(self, v):
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def _spanning_forest(vertices: Sequence[int],
                     edges: Sequence[tuple[int, int, Rational]]) -> list[tuple[int, int, Rational]]:
    """Kruskal on an in-memory subproblem; deterministic edge order."""
    uf = _UnionFind(vertices)
    forest = []
    for u, v, w in sorted(edges, key=lambda e: (e[2], e[0], e[1])):
        if uf.union(u, v):
            forest.append((u, v, w))
    return forest


def nowicki_partition_io(graph: Graph, memory: int) -> IoReport:
    """Desk-scale replay of the edge-partition phase of the constant-round
    spanning-forest algorithm, with exact read counting.

    Vertices are split into ceil(m/n) equal groups. The edge list lives on
    external memory bucketed by the smaller endpoint group, so assembling the
    subproblem for a group pair (i, j) scans bucket i in full; an edge in
    bucket i is therefore read once per pair (i, j), j >= i. Each pair's
    spanning forest is actually computed in memory (the group sizing, not
    ``memory``, keeps subproblems small). ``extras['analytic_io']`` carries
    the closed-form ceiling m * ceil(m/n) for cross-checking; the measured
    total is m when there is a single group and grows toward the analytic
    value as the group count rises.
    """
    if memory < 2:
        raise ParameterError(f"memory must be >= 2, got {memory}")
    n = graph.n_vertices
    m = graph.n_edges
    if m == 0:
        raise InstanceError("graph has no edges")
    groups = -(-m // n)

    def group_of(v: int) -> int:
        return (v - 1) * groups // n

    group_vertices: list[list[int]] = [[] for _ in range(groups)]
    for v in range(1, n + 1):
        group_vertices[group_of(v)].append(v)
    # sub-bucketed by endpoint groups: pair (i, j) scans all of bucket row i
    # but only E[i][j] participates in that pair's forest
    buckets: list[dict[int, list[int]]] = [{} for _ in range(groups)]
    bucket_sizes = [0] * groups
    for k, (u, v, _) in enumerate(graph.edges):
        gu, gv = group_of(u), group_of(v)
        lo, hi = (gu, gv) if gu <= gv else (gv, gu)
        buckets[lo].setdefault(hi, []).append(k)
        bucket_sizes[lo] += 1

    phases: list[Phase] = []
    forest_edges: set[int] = set()
    for i in range(groups):
        for j in range(i, groups):
            phases.append((f"scan[{i + 1},{j + 1}]", bucket_sizes[i], 0))
            sub = buckets[i].get(j, [])
            vertices = (group_vertices[i] if i == j
                        else group_vertices[i] + group_vertices[j])
            forest = _spanning_forest(vertices, [graph.edges[k] for k in sub])
            kept = {(u, v) for u, v, _ in forest}
            forest_edges.update(k for k in sub
                                if (graph.edges[k][0], graph.edges[k][1]) in kept)
    extras = {
        "analytic_io": m * groups,
        "groups": groups,
        "reduced_edge_count": len(forest_edges),
    }
    return IoReport.from_phases(phases, extras)


def _as_epsilon(epsilon) -> Fraction:
    eps = as_exact(epsilon)
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise ParameterError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    return eps


def mm_serial_run(graph: Graph, epsilon) -> tuple[FractionalMatchingState, IoReport]:
    """Run the multiplicative-boost fractional matching to completion.

    Every edge starts at weight 1/n. Each iteration first freezes every
    vertex whose incident weight reaches 1 - 2*epsilon (together with all
    its edges), then multiplies the surviving edges by 1/(1 - epsilon). The
    iteration's IO count is the number of edges still active at its scan,
    which is how an adjacency-list layout on external memory behaves. The
    final weights satisfy y_v <= 1 at every vertex, and the per-iteration
    maximum load is recorded in ``extras``.
    """
    eps = _as_epsilon(epsilon)
    if graph.n_edges == 0:
        raise InstanceError("graph has no edges")
    n = graph.n_vertices
    m = graph.n_edges
    threshold = 1 - 2 * eps
    boost = Fraction(1, 1) / (1 - eps)
    x: list[Fraction] = [Fraction(1, n)] * m
    edge_frozen = [False] * m
    frozen_vertices: set[int] = set()
    incident: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for k, (u, v, _) in enumerate(graph.edges):
        incident[u].append(k)
        incident[v].append(k)

    phases: list[Phase] = []
    load_history: list[Fraction] = []
    # x grows geometrically from 1/n, so the loop ends within
    # ceil(log_{1/(1-eps)} n) + 1 iterations; the slack below only guards
    # against an implementation bug.
    limit = math.ceil(math.log(n) / math.log(float(1 / (1 - eps)))) + 8 if n > 1 else 8
    iteration = 0
    while not all(edge_frozen):
        iteration += 1
        if iteration > limit:
            raise RuntimeError("matching run failed to terminate within its bound")
        active_now = m - sum(edge_frozen)
        # freeze pass, on the weights as they stand at the scan
        newly = [v for v in range(1, n + 1)
                 if v not in frozen_vertices
                 and sum(x[k] for k in incident[v]) >= threshold]
        for v in newly:
            frozen_vertices.add(v)
            for k in incident[v]:
                edge_frozen[k] = True
        # boost pass on the survivors
        for k in range(m):
            if not edge_frozen[k]:
                x[k] *= boost
        phases.append((f"iteration {iteration}", active_now, 0))
        load_history.append(max(sum(x[k] for k in incident[v])
                                for v in range(1, n + 1)))

    state = FractionalMatchingState(
        x=tuple(as_exact(v) for v in x),
        frozen_vertices=frozenset(frozen_vertices),
        frozen_edges=frozenset(k for k in range(m) if edge_frozen[k]),
        epsilon=eps,
    )
    extras = {"max_vertex_load_per_iteration": tuple(load_history)}
    return state, IoReport.from_phases(phases, extras)


def mm_parallel_io_model(graph: Graph, epsilon) -> IoReport:
    """IO profile of the parallelized matching: identical per-iteration counts.

    Round compression changes the scheduling but not the iteration count or
    the set of active edges, so the parallel IO sequence equals the serial
    one. This model replays the same freeze/boost dynamics but recomputes the
    active-edge count each iteration by scanning the edge list against the
    frozen-vertex set, independently of the serial run's edge bookkeeping.
    """
    eps = _as_epsilon(epsilon)
    if graph.n_edges == 0:
        raise InstanceError("graph has no edges")
    n = graph.n_vertices
    threshold = 1 - 2 * eps
    boost = Fraction(1, 1) / (1 - eps)
    weight: dict[frozenset[int], Fraction] = {
        frozenset((u, v)): Fraction(1, n) for u, v, _ in graph.edges}
    frozen_vertices: set[int] = set()
    frozen_pairs: set[frozenset[int]] = set()

    def active_pairs() -> list[frozenset[int]]:
        return [frozenset((u, v)) for u, v, _ in graph.edges
                if u not in frozen_vertices and v not in frozen_vertices]

    phases: list[Phase] = []
    limit = math.ceil(math.log(n) / math.log(float(1 / (1 - eps)))) + 8 if n > 1 else 8
    iteration = 0
    while len(frozen_pairs) < graph.n_edges:
        iteration += 1
        if iteration > limit:
            raise RuntimeError("matching model failed to terminate within its bound")
        phases.append((f"iteration {iteration}", len(active_pairs()), 0))
        loads = {v: Fraction(0) for v in range(1, n + 1)}
        for u, v, _ in graph.edges:
            w = weight[frozenset((u, v))]
            loads[u] += w
            loads[v] += w
        for v in range(1, n + 1):
            if v not in frozen_vertices and loads[v] >= threshold:
                frozen_vertices.add(v)
        for u, v, _ in graph.edges:
            pair = frozenset((u, v))
            if pair not in frozen_pairs and (u in frozen_vertices or v in frozen_vertices):
                frozen_pairs.add(pair)
        for pair in active_pairs():
            weight[pair] *= boost
    return IoReport.from_phases(phases)


def _apportion(total: int, counts: Sequence[int]) -> list[int]:
    """Largest-remainder split of ``total`` proportional to ``counts``."""
    grand = sum(counts)
    if grand == 0:
        return [0] * len(counts)
    base = [total * c // grand for c in counts]
    remainders = sorted(range(len(counts)),
                        key=lambda i: (-(total * counts[i] % grand), i))
    short = total - sum(base)
    for i in remainders[:short]:
        base[i] += 1
    return base


def terasort_simulate(inst: SortInstance, cfg: ExternalMemoryConfig,
                      cost: CostMatrix) -> tuple[tuple[tuple[int, ...], ...], IoReport]:
    """Three-phase distributed range-partition sort with exact counters.

    Phase 1 (sample-and-split): min(M, n) records are read from external
    memory, one IO each, apportioned over machines by local data size and
    picked at evenly spaced local ranks; all samples travel to machine 1,
    which broadcasts the p-1 equal-rank sample splitters. Communication is
    priced by the cost matrix.

    Phase 2 (redistribute): every record goes to the machine owning its
    splitter interval (identity placement), priced by the cost matrix.
    Receivers buffer arrivals in main memory; a full buffer is flushed to
    external memory as one sorted run, one IO per spilled record. The final
    partial buffer stays in memory.

    Phase 3 (local-merge): each machine merges its sorted runs with the
    in-memory remainder, one IO per spilled record reread. The returned
    per-machine outputs concatenate to the globally sorted data.
    """
    p = inst.p
    if cfg.machines != p or cost.p != p:
        raise InstanceError(
            f"dimension mismatch: instance p={p}, config machines={cfg.machines}, "
            f"cost p={cost.p}")
    n = inst.n
    if n == 0:
        raise InstanceError("no records to sort")
    memory = cfg.main_memory
    sample_size = min(memory, n)
    if sample_size < p:
        raise InstanceError(
            f"main memory {memory} cannot hold one sample record per machine (p={p})")

    local = [tuple(sorted(s)) for s in inst.subsets]
    quotas = _apportion(sample_size, [len(s) for s in local])
    sample: list[int] = []
    for data, quota in zip(local, quotas):
        if quota:
            sample.extend(data[(2 * k + 1) * len(data) // (2 * quota)]
                          for k in range(quota))
    sample.sort()
    splitters = tuple(sample[(k * sample_size) // p - 1] for k in range(1, p))

    io_sample = sample_size
    comm_sample = sum(quotas[i] * cost.cost(i + 1, 1) for i in range(p) if i != 0)
    comm_broadcast = sum((p - 1) * cost.cost(1, j) for j in range(2, p + 1))
    phase1: Phase = ("sample-and-split", io_sample,
                     as_exact(comm_sample + comm_broadcast))

    transfer, _ = derive_transfer_and_load(inst, splitters)
    comm_shuffle = sum(transfer.amount(i, j) * cost.cost(i, j)
                       for i in range(1, p + 1) for j in range(1, p + 1))
    spills = 0
    buffers: list[list[int]] = [[] for _ in range(p)]
    runs: list[list[tuple[int, ...]]] = [[] for _ in range(p)]
    for src in range(p):
        for value in local[src]:
            dest = bisect_left(splitters, value)
            buf = buffers[dest]
            if len(buf) == memory:
                runs[dest].append(tuple(sorted(buf)))
                spills += memory
                buf.clear()
            buf.append(value)
    phase2: Phase = ("redistribute", spills, as_exact(comm_shuffle))

    io_merge = 0
    outputs: list[tuple[int, ...]] = []
    for j in range(p):
        io_merge += sum(len(run) for run in runs[j])
        outputs.append(tuple(heapq.merge(*runs[j], sorted(buffers[j]))))
    phase3: Phase = ("local-merge", io_merge, 0)

    report = IoReport.from_phases(
        (phase1, phase2, phase3),
        extras={"splitters": splitters, "sample_size": sample_size},
    )
    return tuple(outputs), report


class IoOptimality(str, Enum):
    SUPER = "super-io-optimal"
    OPTIMAL = "io-optimal"
    NON = "non-io-optimal"
    INCONCLUSIVE = "inconclusive"


def classify_io_optimality(pairs: Sequence[tuple[int, int, int]],
                           constant_bound: Rational = 8,
                           growth_factor: Rational = Fraction(3, 2),
                           min_points: int = 3) -> IoOptimality:
    """Classify a (size, parallel_io, serial_io) sweep.

    SUPER when parallel IO is strictly below serial IO at every size;
    OPTIMAL when the parallel/serial ratio never exceeds ``constant_bound``
    and does not grow end to end; NON when the ratio rises strictly at every
    step and by at least ``growth_factor`` overall; INCONCLUSIVE otherwise.

    This is an empirical surrogate for an asymptotic property: finite sweeps
    cannot decide asymptotics, so the thresholds are explicit configuration
    and the sweep should be roughly geometric in size.
    """
    pairs = tuple(pairs)
    if len(pairs) < min_points:
        raise GuardError(
            f"need at least {min_points} sweep points, got {len(pairs)}")
    sizes = [s for s, _, _ in pairs]
    if any(a >= b for a, b in zip(sizes, sizes[1:])):
        raise ParameterError(f"sweep sizes must be strictly ascending, got {sizes}")
    for size, parallel, serial in pairs:
        if parallel < 0 or serial <= 0:
            raise ParameterError(
                f"size {size}: counters must satisfy parallel >= 0 and serial > 0")
    ratios = [Fraction(parallel, serial) for _, parallel, serial in pairs]
    if all(parallel < serial for _, parallel, serial in pairs):
        return IoOptimality.SUPER
    if max(ratios) <= constant_bound and ratios[-1] <= ratios[0]:
        return IoOptimality.OPTIMAL
    if (all(a < b for a, b in zip(ratios, ratios[1:]))
            and ratios[-1] >= growth_factor * ratios[0]):
        return IoOptimality.NON
    return IoOptimality.INCONCLUSIVE
