"""Route-demand benchmarks for logical circuit families on line and grid devices.

A logical circuit is reduced to its list of two-qubit pairs, split into
layers by greedy earliest fit, and every pair is routed along a shortest
path sampled uniformly at random.  Each layer is then scored by SWAP
transport (3L per gate), routed transport (2L+1 per gate), the chromatic
number of its route conflict graph and the resulting routing rounds.
"""

from __future__ import annotations

import csv
import io
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .congestion import build_conflict_graph, chromatic_number, max_clique_size, rounds_formula
from .errors import TopologyError
from .rng import Xoshiro256, derive_seed

DEFAULT_K_LIST = (1, 2, 3)
FAMILIES = ("qft", "qaoa", "amplitude", "mirror")
TOPOLOGIES = ("line", "grid")


# --------------------------------------------------------------------------
# topologies


@dataclass(frozen=True)
class Topology:
    kind: str
    n: int
    rows: int = 1
    cols: int = 1

    @classmethod
    def line(cls, n: int) -> "Topology":
        if n < 1:
            raise TopologyError(f"line needs at least one site, got {n}")
        return cls("line", n, 1, n)

    @classmethod
    def grid(cls, rows: int, cols: int) -> "Topology":
        if rows < 1 or cols < 1:
            raise TopologyError(f"grid needs positive dimensions, got {rows}x{cols}")
        return cls("grid", rows * cols, rows, cols)

    @classmethod
    def named(cls, kind: str, n: int) -> "Topology":
        """Line of n sites, or the smallest near-square grid holding n qubits.

        The grid has ``ceil(sqrt(n))`` columns; qubit ``i`` sits on site ``i``
        in row-major order and any spare sites stay free for routing.
        """
        if kind == "line":
            return cls.line(n)
        if kind == "grid":
            cols = math.isqrt(n - 1) + 1 if n > 1 else 1
            return cls.grid(-(-n // cols), cols)
        raise TopologyError(f"unknown topology {kind!r}; expected one of {TOPOLOGIES}")

    def neighbours(self, v: int) -> list[int]:
        if not 0 <= v < self.n:
            raise TopologyError(f"site {v} outside 0..{self.n - 1}")
        r, c = divmod(v, self.cols)
        out = []
        for dr, dc in ((-1, 0), (0, -1), (0, 1), (1, 0)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < self.rows and 0 <= cc < self.cols:
                out.append(rr * self.cols + cc)
        return out

    def distances_from(self, src: int) -> list[int]:
        dist = [-1] * self.n
        dist[src] = 0
        queue = deque([src])
        while queue:
            v = queue.popleft()
            for u in self.neighbours(v):
                if dist[u] < 0:
                    dist[u] = dist[v] + 1
                    queue.append(u)
        return dist

    def distance(self, a: int, b: int) -> int:
        d = self.distances_from(b)[a]
        if d < 0:
            raise TopologyError(f"sites {a} and {b} are disconnected")
        return d

    @property
    def label(self) -> str:
        return "line" if self.kind == "line" else f"grid{self.rows}x{self.cols}"


def count_shortest_paths(topo: Topology, src: int, dst: int) -> tuple[list[int], list[int]]:
    """BFS distances to ``dst`` and the number of shortest paths from each vertex to ``dst``."""
    dist = topo.distances_from(dst)
    if dist[src] < 0:
        raise TopologyError(f"sites {src} and {dst} are disconnected")
    counts = [0] * topo.n
    counts[dst] = 1
    for v in sorted((v for v in range(topo.n) if dist[v] > 0), key=dist.__getitem__):
        counts[v] = sum(counts[u] for u in topo.neighbours(v) if dist[u] == dist[v] - 1)
    return dist, counts


def sample_shortest_path(topo: Topology, src: int, dst: int, rng: Xoshiro256) -> list[int]:
    """Uniformly random shortest path from ``src`` to ``dst``."""
    dist, counts = count_shortest_paths(topo, src, dst)
    path = [src]
    v = src
    while v != dst:
        options = [u for u in topo.neighbours(v) if dist[u] == dist[v] - 1]
        pick = rng.below(counts[v])
        for u in options:
            if pick < counts[u]:
                v = u
                break
            pick -= counts[u]
        path.append(v)
    return path


# --------------------------------------------------------------------------
# logical circuit families


@dataclass(frozen=True)
class LogicalCircuit:
    family: str
    n: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for a, b in self.pairs:
            if a == b or not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"invalid two-qubit pair ({a}, {b}) for n={self.n}")


def gen_qft(n: int) -> LogicalCircuit:
    if n < 2:
        raise ValueError(f"QFT needs n >= 2, got {n}")
    return LogicalCircuit("qft", n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def gen_mirror(n: int) -> LogicalCircuit:
    if n < 2 or n % 2:
        raise ValueError(f"mirror pairing needs an even n >= 2, got {n}")
    return LogicalCircuit("mirror", n, tuple((i, n - 1 - i) for i in range(n // 2)))


def random_regular_edges(n: int, degree: int, rng: Xoshiro256, max_attempts: int = 10_000) -> list[tuple[int, int]]:
    """Sorted edge list of a random degree-regular simple graph (pairing model with rejection)."""
    if degree < 0 or degree >= n or (n * degree) % 2:
        raise ValueError(f"no simple {degree}-regular graph on {n} vertices")
    for _ in range(max_attempts):
        points = [v for v in range(n) for _ in range(degree)]
        rng.shuffle(points)
        edges = set()
        ok = True
        for a, b in zip(points[::2], points[1::2]):
            e = (min(a, b), max(a, b))
            if a == b or e in edges:
                ok = False
                break
            edges.add(e)
        if ok:
            return sorted(edges)
    raise ValueError(f"pairing model failed to produce a simple graph after {max_attempts} attempts")


def gen_qaoa(n: int, degree: int = 3, seed: int = 0) -> LogicalCircuit:
    """One cost layer of QAOA on a seeded random regular graph.

    Each edge's ZZ phase is a CX, RZ, CX sandwich, so every edge contributes
    its pair twice in a row.
    """
    rng = Xoshiro256(derive_seed(seed, 0))
    edges = random_regular_edges(n, degree, rng)
    return LogicalCircuit("qaoa", n, tuple(e for e in edges for _ in range(2)))


def _toffoli_pairs(a: int, b: int, t: int) -> list[tuple[int, int]]:
    # two-qubit interactions of the standard 6-CNOT Toffoli
    return [(b, t), (a, t), (b, t), (a, t), (a, b), (a, b)]


def multi_controlled_pairs(controls: Sequence[int], target: int, is_x: bool = False) -> list[tuple[int, int]]:
    """Two-qubit pairs of a no-ancilla multi-controlled gate.

    C^m U(c; t) = CV(p, t) C^{m-1}X(rest; p) CV^dag(p, t) C^{m-1}X(rest; p) C^{m-1}V(rest; t)
    with V**2 = U and ``p`` the last control.  Two-control X gates use the
    6-CNOT Toffoli.
    """
    controls = list(controls)
    if not controls:
        raise ValueError("need at least one control")
    if len(controls) == 1:
        return [(controls[0], target)]
    if len(controls) == 2 and is_x:
        return _toffoli_pairs(controls[0], controls[1], target)
    rest, p = controls[:-1], controls[-1]
    inner = multi_controlled_pairs(rest, p, is_x=True)
    return [(p, target)] + inner + [(p, target)] + inner + multi_controlled_pairs(rest, target)


def gen_amplitude(n: int, marked: str | None = None) -> LogicalCircuit:
    """One amplitude-amplification iteration reduced to two-qubit pairs.

    Oracle and diffusion are each an n-qubit controlled Z on the middle qubit
    ``n // 2``; controls are ordered nearest first so the recursion peels the
    farthest one.  ``marked`` only moves single-qubit X gates, so it does not
    change the pair list.
    """
    if n < 3:
        raise ValueError(f"amplitude family needs n >= 3, got {n}")
    if marked is not None and (len(marked) != n or set(marked) - {"0", "1"}):
        raise ValueError(f"marked state must be a bitstring of length {n}, got {marked!r}")
    target = n // 2
    controls = sorted((i for i in range(n) if i != target), key=lambda i: (abs(i - target), i))
    block = multi_controlled_pairs(controls, target)
    return LogicalCircuit("amplitude", n, tuple(block + block))


def generate(family: str, n: int, seed: int = 0) -> LogicalCircuit:
    if family == "qft":
        return gen_qft(n)
    if family == "mirror":
        return gen_mirror(n)
    if family == "qaoa":
        return gen_qaoa(n, 3, seed)
    if family == "amplitude":
        return gen_amplitude(n)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


# --------------------------------------------------------------------------
# layering, routing and metrics


def layerize(circuit: LogicalCircuit | Sequence[tuple[int, int]]) -> list[list[tuple[int, int]]]:
    """Greedy earliest fit: each gate goes one layer after the last use of either qubit."""
    pairs = circuit.pairs if isinstance(circuit, LogicalCircuit) else circuit
    last: dict[int, int] = {}
    layers: list[list[tuple[int, int]]] = []
    for a, b in pairs:
        idx = max(last.get(a, -1), last.get(b, -1)) + 1
        if idx == len(layers):
            layers.append([])
        layers[idx].append((a, b))
        last[a] = last[b] = idx
    return layers


def route_layer(layer: Sequence[tuple[int, int]], topo: Topology, rng: Xoshiro256) -> list[list[int]]:
    return [sample_shortest_path(topo, a, b, rng) for a, b in layer]


@dataclass
class LayerMetrics:
    routes: list[list[int]]
    swap_transport: int
    routed_transport: int
    chi: int
    rounds: dict[int, int]

    @property
    def lengths(self) -> list[int]:
        return [len(r) - 1 for r in self.routes]

    @property
    def sum_L(self) -> int:
        return sum(self.lengths)


def layer_metrics(routes: Sequence[Sequence[int]], K_list: Sequence[int] = DEFAULT_K_LIST) -> LayerMetrics:
    lengths = [len(r) - 1 for r in routes]
    if any(L < 1 for L in lengths):
        raise ValueError("every route needs at least one edge")
    g = build_conflict_graph(routes)
    chi = chromatic_number(g)
    if g.m and not max_clique_size(g) <= chi <= g.max_degree() + 1:
        raise AssertionError(f"chromatic number {chi} violates clique/degree bounds")
    return LayerMetrics(
        [list(r) for r in routes],
        sum(3 * L for L in lengths),
        sum(2 * L + 1 for L in lengths),
        chi,
        {K: (rounds_formula(chi, K) if chi else 0) for K in K_list},
    )


@dataclass
class BenchmarkReport:
    family: str
    topology: str
    n: int
    seeds: list[int]
    K_list: list[int]
    layers: list[tuple[int, int, LayerMetrics]] = field(default_factory=list)  # (seed, index, metrics)

    def _mean(self, values) -> float:
        values = list(values)
        return sum(values) / len(values) if values else 0.0

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def mean_swap(self) -> float:
        return self._mean(m.swap_transport for _, _, m in self.layers)

    @property
    def mean_routed(self) -> float:
        return self._mean(m.routed_transport for _, _, m in self.layers)

    @property
    def ratio(self) -> float:
        return self.mean_routed / self.mean_swap if self.mean_swap else 0.0

    @property
    def mean_chi(self) -> float:
        return self._mean(m.chi for _, _, m in self.layers)

    def mean_rounds(self, K: int) -> float:
        return self._mean(m.rounds[K] for _, _, m in self.layers)

    def summary(self) -> dict:
        out = {
            "family": self.family,
            "topology": self.topology,
            "n": self.n,
            "seeds": list(self.seeds),
            "n_layers": self.n_layers,
            "mean_swap_transport": round(self.mean_swap, 6),
            "mean_routed_transport": round(self.mean_routed, 6),
            "ratio": round(self.ratio, 6),
            "mean_chi": round(self.mean_chi, 6),
        }
        for K in self.K_list:
            out[f"mean_R{K}"] = round(self.mean_rounds(K), 6)
        return out

    def csv_columns(self) -> list[str]:
        base = ["family", "topology", "n", "seed", "layer_index", "n_routes", "sum_L", "swap_transport", "routed_transport", "chi"]
        return base + [f"R{K}" for K in self.K_list]

    def csv_rows(self) -> list[list]:
        rows = []
        for seed, idx, m in self.layers:
            rows.append(
                [self.family, self.topology, self.n, seed, idx, len(m.routes), m.sum_L, m.swap_transport, m.routed_transport, m.chi]
                + [m.rounds[K] for K in self.K_list]
            )
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.csv_columns())
        writer.writerows(self.csv_rows())
        return buf.getvalue()


def run_benchmark(
    family: str,
    topology: str | Topology,
    n: int,
    seed: int = 0,
    K_list: Sequence[int] = DEFAULT_K_LIST,
) -> BenchmarkReport:
    return run_seed_sweep(family, topology, n, [seed], K_list)


def run_seed_sweep(
    family: str,
    topology: str | Topology,
    n: int,
    seeds: Sequence[int],
    K_list: Sequence[int] = DEFAULT_K_LIST,
) -> BenchmarkReport:
    """Benchmark pooled over seeds: layer means are taken over every layer of every seed."""
    topo = topology if isinstance(topology, Topology) else Topology.named(topology, n)
    if topo.n < n:
        raise TopologyError(f"topology has {topo.n} sites but the circuit needs {n}")
    report = BenchmarkReport(family, topo.kind, n, list(seeds), list(K_list))
    for seed in seeds:
        circuit = generate(family, n, seed)
        rng = Xoshiro256(derive_seed(seed, 1))
        for idx, layer in enumerate(layerize(circuit)):
            report.layers.append((seed, idx, layer_metrics(route_layer(layer, topo, rng), K_list)))
    return report
