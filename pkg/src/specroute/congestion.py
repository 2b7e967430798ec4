"""Route conflict graphs, exact colouring and routing-round bounds.

Adjacency is stored as one integer bitmask per vertex.  ``chromatic_number``
is a DSATUR-ordered branch-and-bound; ``brute_force_min_rounds`` is a
separate exhaustive search (partition into rounds, then K-colour each round)
that shares no code with it, so the two can cross-check each other.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from . import _kernels
from .errors import ResourceError

CHROMATIC_MAX_VERTICES = 24
BRUTE_FORCE_MAX_VERTICES = 10


@dataclass(frozen=True)
class ConflictGraph:
    m: int
    adjacency: tuple[int, ...]

    def __post_init__(self):
        if len(self.adjacency) != self.m:
            raise ValueError(f"expected {self.m} adjacency masks, got {len(self.adjacency)}")
        for v, mask in enumerate(self.adjacency):
            if mask >> v & 1:
                raise ValueError(f"self-loop on vertex {v}")
            for u in range(self.m):
                if (mask >> u & 1) != (self.adjacency[u] >> v & 1):
                    raise ValueError(f"adjacency is not symmetric at ({v}, {u})")

    @classmethod
    def from_edges(cls, m: int, edges: Iterable[tuple[int, int]]) -> "ConflictGraph":
        adj = [0] * m
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop on vertex {a}")
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        return cls(m, tuple(adj))

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.adjacency[a] >> b & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.m) for b in range(a + 1, self.m) if self.has_edge(a, b)]

    def degree(self, v: int) -> int:
        return bin(self.adjacency[v]).count("1")

    def max_degree(self) -> int:
        return max((self.degree(v) for v in range(self.m)), default=0)


def build_conflict_graph(routes: Sequence[Sequence[int]]) -> ConflictGraph:
    """Edge between two routes iff they share at least one vertex."""
    sets = [frozenset(r) for r in routes]
    edges = [(i, j) for i, j in itertools.combinations(range(len(sets)), 2) if sets[i] & sets[j]]
    return ConflictGraph.from_edges(len(sets), edges)


def complete_graph(m: int) -> ConflictGraph:
    return ConflictGraph.from_edges(m, itertools.combinations(range(m), 2))


def cycle_graph(m: int) -> ConflictGraph:
    return ConflictGraph.from_edges(m, [(i, (i + 1) % m) for i in range(m)])


# --------------------------------------------------------------------------
# exact chromatic number


def greedy_colouring(g: ConflictGraph) -> list[int]:
    """Largest-degree-first greedy colouring (an upper bound)."""
    colours = [-1] * g.m
    for v in sorted(range(g.m), key=lambda v: (-g.degree(v), v)):
        used = {colours[u] for u in range(g.m) if g.adjacency[v] >> u & 1}
        c = 0
        while c in used:
            c += 1
        colours[v] = c
    return colours


def max_clique_size(g: ConflictGraph) -> int:
    best = 0

    def grow(size: int, candidates: int) -> None:
        nonlocal best
        if candidates == 0:
            best = max(best, size)
            return
        if size + bin(candidates).count("1") <= best:
            return
        while candidates:
            v = candidates.bit_length() - 1
            candidates &= ~(1 << v)
            grow(size + 1, candidates & g.adjacency[v])
            if size + bin(candidates).count("1") <= best:
                return

    grow(0, (1 << g.m) - 1)
    return best


def chromatic_number(g: ConflictGraph) -> int:
    if g.m > CHROMATIC_MAX_VERTICES:
        raise ResourceError(f"exact colouring is limited to {CHROMATIC_MAX_VERTICES} vertices, got {g.m}")
    if g.m == 0:
        return 0
    lower = max(1, max_clique_size(g))
    best = max(greedy_colouring(g)) + 1
    if best == lower:
        return best
    colours = [-1] * g.m

    def search(coloured: int, used: int) -> None:
        nonlocal best
        if used >= best:
            return
        if coloured == g.m:
            best = used
            return
        # DSATUR: most distinct neighbour colours, then highest degree
        pick, pick_key = -1, None
        for v in range(g.m):
            if colours[v] >= 0:
                continue
            sat = len({colours[u] for u in range(g.m) if g.adjacency[v] >> u & 1 and colours[u] >= 0})
            key = (sat, g.degree(v))
            if pick_key is None or key > pick_key:
                pick, pick_key = v, key
        taken = {colours[u] for u in range(g.m) if g.adjacency[pick] >> u & 1 and colours[u] >= 0}
        for c in range(min(used + 1, best - 1)):
            if c in taken:
                continue
            colours[pick] = c
            search(coloured + 1, max(used, c + 1))
            colours[pick] = -1
            if best == lower:
                return

    search(0, 0)
    return best


def rounds_formula(chi: int, K: int) -> int:
    if K < 1:
        raise ValueError(f"bus count must be >= 1, got {K}")
    if chi < 0:
        raise ValueError(f"chromatic number must be non-negative, got {chi}")
    return -(-chi // K)


def brute_force_min_rounds(g: ConflictGraph, K: int) -> int:
    """Fewest rounds whose induced subgraphs are each K-colourable, by exhaustive search."""
    if K < 1:
        raise ValueError(f"bus count must be >= 1, got {K}")
    if g.m > BRUTE_FORCE_MAX_VERTICES:
        raise ResourceError(f"exhaustive round search is limited to {BRUTE_FORCE_MAX_VERTICES} vertices, got {g.m}")
    return _kernels.min_rounds(list(g.adjacency), K)


def enumerate_labeled_graphs(n: int) -> Iterator[ConflictGraph]:
    """All 2**(n(n-1)/2) labelled graphs on n vertices in edge-mask order."""
    if not 0 <= n <= 5:
        raise ValueError(f"labelled-graph enumeration is limited to n <= 5, got {n}")
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield ConflictGraph.from_edges(n, (p for b, p in enumerate(pairs) if mask >> b & 1))


@dataclass
class ValidatorReport:
    n_max: int
    K_list: list[int]
    graphs_checked: int
    discrepancies: int
    elapsed: float
    graphs_per_n: dict[int, int] = field(default_factory=dict)

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "n_max": self.n_max,
            "K_list": list(self.K_list),
            "graphs_checked": self.graphs_checked,
            "graphs_per_n": {str(n): c for n, c in self.graphs_per_n.items()},
            "discrepancies": self.discrepancies,
        }
        if timing:
            out["elapsed"] = self.elapsed
        return out


def validate_round_formula(n_max: int = 5, K_list: Sequence[int] = (1, 2, 3)) -> ValidatorReport:
    """Compare exhaustive minimum rounds with ceil(chi/K) on every small labelled graph."""
    start = time.perf_counter()
    checked = bad = 0
    per_n: dict[int, int] = {}
    for n in range(1, n_max + 1):
        per_n[n] = 0
        for g in enumerate_labeled_graphs(n):
            per_n[n] += 1
            chi = chromatic_number(g)
            for K in K_list:
                if brute_force_min_rounds(g, K) != rounds_formula(chi, K):
                    bad += 1
            checked += 1
    return ValidatorReport(n_max, list(K_list), checked, bad, time.perf_counter() - start, per_n)


# --------------------------------------------------------------------------
# greedy bus assignment


@dataclass
class BusAssignment:
    rounds: list[dict[int, int]]

    @property
    def n_rounds(self) -> int:
        return len(self.rounds)

    def bus_of(self, route: int) -> tuple[int, int]:
        """(round, bus) of a route."""
        for r, assigned in enumerate(self.rounds):
            if route in assigned:
                return r, assigned[route]
        raise KeyError(route)


def greedy_bus_assignment(routes: Sequence[Sequence[int]], K: int) -> BusAssignment:
    """Smallest free bus per route in index order; routes with no free bus wait for the next round."""
    if K < 1:
        raise ValueError(f"bus count must be >= 1, got {K}")
    g = build_conflict_graph(routes)
    pending = list(range(g.m))
    rounds: list[dict[int, int]] = []
    while pending:
        assigned: dict[int, int] = {}
        deferred = []
        for v in pending:
            taken = {b for u, b in assigned.items() if g.has_edge(u, v)}
            free = next((b for b in range(1, K + 1) if b not in taken), None)
            if free is None:
                deferred.append(v)
            else:
                assigned[v] = free
        rounds.append(assigned)
        pending = deferred
    return BusAssignment(rounds)


def is_proper_round(g: ConflictGraph, assigned: dict[int, int]) -> bool:
    return all(not g.has_edge(a, b) or assigned[a] != assigned[b] for a, b in itertools.combinations(assigned, 2))


def clique_rounds(m: int, K: int) -> int:
    """Rounds for m pairwise-intersecting routes."""
    return math.ceil(m / K)
