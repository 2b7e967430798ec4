"""Routed CNOT, routed Boolean fan-in and SWAP-baseline circuit builders.

Every builder also records the *intent* of the circuit: the ideal multi-
controlled operation it is supposed to implement.  ``ideal_apply`` realises
that intent by direct amplitude manipulation on the computational blocks,
without touching the routing gate tables, so it serves as an independent
oracle for ``verify_cleanup`` and ``verify_crosstalk``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .algebra import BusConfig, min_dimension
from .errors import ConfigurationError, ResourceError
from .simulator import (
    ATOL,
    MAX_AMPLITUDES,
    PAULI_X,
    GateKind,
    GateRecord,
    QuditRegister,
    _freeze_unitary,
    check_unitary,
    fidelity,
    init_basis,
    init_product,
    projection_table,
    routing_population,
    run_gates,
    site_distribution,
)

_X = _freeze_unitary(PAULI_X)


# --------------------------------------------------------------------------
# intent and ideal oracle


@dataclass(frozen=True)
class Intent:
    """Ideal action ``U**g(bits)`` on the target's logical block.

    ``controls[j]`` supplies bit ``j`` of the truth-table index; ``None`` marks
    a bit that is always 0 (an unused bus).
    """

    controls: tuple[int | None, ...]
    target: int
    table: tuple[int, ...]
    unitary: tuple = _X

    def __post_init__(self):
        if len(self.table) != 1 << len(self.controls):
            raise ValueError(f"truth table needs {1 << len(self.controls)} entries, got {len(self.table)}")
        if not isinstance(self.unitary, tuple):
            object.__setattr__(self, "unitary", _freeze_unitary(self.unitary))

    @classmethod
    def cx(cls, control: int, target: int) -> "Intent":
        return cls((control,), target, (0, 1))

    def to_dict(self) -> dict:
        return {
            "controls": list(self.controls),
            "target": self.target,
            "table": list(self.table),
            "unitary": [[[v.real, v.imag] for v in row] for row in self.unitary],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Intent":
        u = tuple(tuple(complex(re, im) for re, im in row) for row in data["unitary"])
        return cls(tuple(data["controls"]), data["target"], tuple(data["table"]), u)


def ideal_apply(reg: QuditRegister, intents: Iterable[Intent]) -> QuditRegister:
    """Apply each intent to the computational blocks of ``reg`` in place."""
    for it in intents:
        psi = reg.amplitudes.reshape((reg.d,) * reg.n_sites)
        moved = np.moveaxis(psi, it.target, -1)
        u = np.array(it.unitary, dtype=complex)
        for i, bit_on in enumerate(it.table):
            if not bit_on:
                continue
            index: list = [slice(None)] * reg.n_sites
            feasible = True
            for j, c in enumerate(it.controls):
                bit = (i >> j) & 1
                if c is None:
                    feasible = feasible and bit == 0
                else:
                    index[c] = bit
            if not feasible:
                continue
            # the target axis sits last in ``moved``; drop its placeholder
            axes = [index[s] for s in range(reg.n_sites) if s != it.target]
            view = moved[tuple(axes) + (slice(0, 2),)]
            view[...] = view @ u.T
        reg.amplitudes = psi.reshape(-1)
    return reg


# --------------------------------------------------------------------------
# circuits


@dataclass
class Circuit:
    n_sites: int
    cfg: BusConfig
    gates: list[GateRecord] = field(default_factory=list)
    intent: list[Intent] = field(default_factory=list)
    name: str = ""

    @property
    def d(self) -> int:
        return self.cfg.d

    def validate(self) -> None:
        for g in self.gates:
            for s in g.sites:
                if not 0 <= s < self.n_sites:
                    raise ConfigurationError(f"{g.kind.value} references site {s} outside 0..{self.n_sites - 1}")
            if g.k is not None:
                self.cfg.check_bus(g.k)

    def run(self, reg: QuditRegister) -> QuditRegister:
        return run_gates(reg, self.gates, self.cfg)

    def inverse(self) -> "Circuit":
        return Circuit(self.n_sites, self.cfg, [g.inverse() for g in reversed(self.gates)], [], self.name + "^-1")

    def __len__(self) -> int:
        return len(self.gates)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n_sites": self.n_sites,
            "d": self.cfg.d,
            "K": self.cfg.K,
            "gates": [g.to_dict() for g in self.gates],
            "intent": [it.to_dict() for it in self.intent],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> "Circuit":
        c = cls(
            int(data["n_sites"]),
            BusConfig(int(data["d"]), int(data["K"])),
            [GateRecord.from_dict(g) for g in data["gates"]],
            [Intent.from_dict(i) for i in data.get("intent", [])],
            data.get("name", ""),
        )
        c.validate()
        return c

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


def _check_path(path: Sequence[int]) -> tuple[int, ...]:
    path = tuple(int(v) for v in path)
    if len(path) < 2:
        raise ValueError(f"a routed path needs L >= 1 edges, got {len(path) - 1}; use a local CX instead")
    if len(set(path)) != len(path):
        raise ValueError(f"path vertices must be distinct, got {path}")
    if min(path) < 0:
        raise ValueError(f"negative site in path {path}")
    return path


def _hops(path: Sequence[int], k: int) -> list[GateRecord]:
    """Forward lift and propagation gates carrying bus ``k`` from ``path[0]`` to ``path[-1]``."""
    gates = [GateRecord(GateKind.CBL, (path[0], path[1]), k=k, sign=1)]
    for a, b in zip(path[1:-1], path[2:]):
        gates.append(GateRecord(GateKind.BCP, (a, b), k=k, sign=1))
    return gates


def _undo(gates: Sequence[GateRecord]) -> list[GateRecord]:
    return [g.inverse() for g in reversed(gates)]


def _default_cfg(cfg: BusConfig | None, K: int) -> BusConfig:
    return cfg if cfg is not None else BusConfig(min_dimension(K), K)


def build_routed_cnot(path: Sequence[int], k: int = 1, cfg: BusConfig | None = None, n_sites: int | None = None) -> Circuit:
    """Nonlocal CNOT from ``path[0]`` to ``path[-1]`` on bus ``k``: 2L+1 gates."""
    path = _check_path(path)
    cfg = _default_cfg(cfg, k)
    cfg.check_bus(k)
    n = max(path) + 1 if n_sites is None else n_sites
    forward = _hops(path, k)
    gates = forward + [GateRecord(GateKind.CXR, (path[-1],), k=k)] + _undo(forward)
    circ = Circuit(n, cfg, gates, [Intent.cx(path[0], path[-1])], f"routed_cnot_L{len(path) - 1}")
    circ.validate()
    return circ


def _swap_as_cx(a: int, b: int) -> list[GateRecord]:
    return [GateRecord(GateKind.CX, (a, b)), GateRecord(GateKind.CX, (b, a)), GateRecord(GateKind.CX, (a, b))]


def build_swap_baseline(path: Sequence[int], cfg: BusConfig | None = None, n_sites: int | None = None) -> Circuit:
    """Move the control next to the target by SWAPs, CX, then restore the layout."""
    path = _check_path(path)
    cfg = cfg if cfg is not None else BusConfig(2, 0)
    n = max(path) + 1 if n_sites is None else n_sites
    there: list[GateRecord] = []
    for a, b in zip(path[:-2], path[1:-1]):
        there += _swap_as_cx(a, b)
    back: list[GateRecord] = []
    for a, b in reversed(list(zip(path[:-2], path[1:-1]))):
        back += _swap_as_cx(a, b)
    gates = there + [GateRecord(GateKind.CX, (path[-2], path[-1]))] + back
    circ = Circuit(n, cfg, gates, [Intent.cx(path[0], path[-1])], f"swap_baseline_L{len(path) - 1}")
    circ.validate()
    return circ


def build_swap_transport(path: Sequence[int], cfg: BusConfig | None = None, n_sites: int | None = None) -> Circuit:
    """SWAP transport of a state across all L edges (3 CX each), the 3L depth reference."""
    path = _check_path(path)
    cfg = cfg if cfg is not None else BusConfig(2, 0)
    n = max(path) + 1 if n_sites is None else n_sites
    gates: list[GateRecord] = []
    for a, b in zip(path[:-1], path[1:]):
        gates += _swap_as_cx(a, b)
    circ = Circuit(n, cfg, gates, [], f"swap_transport_L{len(path) - 1}")
    circ.validate()
    return circ


def _paths_intersect(p: Sequence[int], q: Sequence[int]) -> bool:
    return bool(set(p) & set(q))


def build_routed_layer(
    paths: Sequence[Sequence[int]],
    buses: Sequence[int],
    cfg: BusConfig | None = None,
    n_sites: int | None = None,
) -> Circuit:
    """Several routed CNOTs in one round: all lifts, then all targets, then all cleanups."""
    paths = [_check_path(p) for p in paths]
    if len(buses) != len(paths):
        raise ConfigurationError(f"{len(paths)} paths but {len(buses)} bus labels")
    cfg = _default_cfg(cfg, max(buses))
    for k in buses:
        cfg.check_bus(k)
    for (i, p), (j, q) in itertools.combinations(enumerate(paths), 2):
        if buses[i] == buses[j] and _paths_intersect(p, q):
            raise ConfigurationError(f"paths {i} and {j} intersect but share bus {buses[i]}")
    n = max(max(p) for p in paths) + 1 if n_sites is None else n_sites
    forward = [g for p, k in zip(paths, buses) for g in _hops(p, k)]
    targets = [GateRecord(GateKind.CXR, (p[-1],), k=k) for p, k in zip(paths, buses)]
    cleanup = [g for p, k in zip(paths, buses) for g in _undo(_hops(p, k))]
    intent = [Intent.cx(p[0], p[-1]) for p in paths]
    circ = Circuit(n, cfg, forward + targets + cleanup, intent, "routed_layer")
    circ.validate()
    return circ


def build_routed_fanin(
    paths: Sequence[Sequence[int]],
    table: Sequence[int],
    unitary=PAULI_X,
    cfg: BusConfig | None = None,
    buses: Sequence[int] | None = None,
    n_sites: int | None = None,
) -> Circuit:
    """Route K controls on distinct buses into one target and apply a Boolean target gate.

    Non-final hops of every arm run first, then the final hops into the shared
    target in ascending bus order, the Boolean target gate, and the exact
    reverse of everything before it.  Arms may have different lengths.
    """
    paths = [_check_path(p) for p in paths]
    if not paths:
        raise ValueError("fan-in needs at least one control path")
    buses = list(range(1, len(paths) + 1)) if buses is None else [int(b) for b in buses]
    if len(buses) != len(paths):
        raise ConfigurationError(f"{len(paths)} paths but {len(buses)} bus labels")
    if len(set(buses)) != len(buses):
        raise ConfigurationError(f"fan-in arms need distinct buses, got {buses}")
    cfg = _default_cfg(cfg, max(buses))
    for k in buses:
        cfg.check_bus(k)
    target = paths[0][-1]
    if any(p[-1] != target for p in paths):
        raise ConfigurationError("all fan-in paths must end at the same target site")
    sources = [p[0] for p in paths]
    for i, p in enumerate(paths):
        others = {v for j, q in enumerate(paths) if j != i for v in q}
        if p[0] in others:
            raise ConfigurationError(f"source {p[0]} of arm {i} lies on another arm")
    u = check_unitary(unitary)
    if len(table) != 1 << cfg.K:
        raise ConfigurationError(f"truth table needs {1 << cfg.K} entries for K={cfg.K}, got {len(table)}")

    order = sorted(range(len(paths)), key=lambda i: buses[i])
    arms = {i: _hops(paths[i], buses[i]) for i in order}
    forward = [g for i in order for g in arms[i][:-1]] + [arms[i][-1] for i in order]
    boolean = GateRecord(GateKind.BOOLEAN, (target,), unitary=_freeze_unitary(u), table=tuple(int(b) for b in table))
    gates = forward + [boolean] + _undo(forward)

    controls: list[int | None] = [None] * cfg.K
    for i, k in enumerate(buses):
        controls[k - 1] = sources[i]
    n = max(max(p) for p in paths) + 1 if n_sites is None else n_sites
    intent = [Intent(tuple(controls), target, tuple(int(b) for b in table), _freeze_unitary(u))]
    circ = Circuit(n, cfg, gates, intent, f"routed_fanin_K{len(paths)}")
    circ.validate()
    return circ


def star_fanin_paths(K: int, L: int) -> tuple[list[list[int]], int]:
    """K arms of length L meeting at one target; returns (paths, n_sites).

    Sites are numbered arm by arm from the source inwards; the target is last.
    """
    if K < 1 or L < 1:
        raise ValueError(f"need K >= 1 and L >= 1, got K={K}, L={L}")
    target = K * L
    paths = [[a * L + j for j in range(L)] + [target] for a in range(K)]
    return paths, target + 1


# --------------------------------------------------------------------------
# Boolean families


def conjunction(K: int) -> tuple[int, ...]:
    return tuple(int(i == (1 << K) - 1) for i in range(1 << K))


def disjunction(K: int) -> tuple[int, ...]:
    return tuple(int(i != 0) for i in range(1 << K))


def threshold(K: int, t: int) -> tuple[int, ...]:
    return tuple(int(bin(i).count("1") >= t) for i in range(1 << K))


def parity(K: int) -> tuple[int, ...]:
    return tuple(bin(i).count("1") & 1 for i in range(1 << K))


def projection(K: int, k: int) -> tuple[int, ...]:
    return projection_table(K, k)


def truth_table_blocks(table: Sequence[int], site: int, unitary, cfg: BusConfig) -> list[GateRecord]:
    """Product-of-blocks synthesis: one block gate per offset where the table is 1."""
    u = _freeze_unitary(check_unitary(unitary))
    return [GateRecord(GateKind.BLOCK, (site,), offset=s, unitary=u) for s in cfg.routing_offsets() if table[s >> 1]]


# --------------------------------------------------------------------------
# scheduling


@dataclass
class Schedule:
    moments: list[list[GateRecord]]
    moment_of: list[int]

    @property
    def depth(self) -> int:
        return len(self.moments)


def schedule(circuit: Circuit | Sequence[GateRecord]) -> Schedule:
    """As-soon-as-possible moment packing that keeps per-site gate order."""
    gates = circuit.gates if isinstance(circuit, Circuit) else list(circuit)
    last: dict[int, int] = {}
    moments: list[list[GateRecord]] = []
    moment_of = []
    for g in gates:
        m = max((last.get(s, -1) for s in g.sites), default=-1) + 1
        for s in g.sites:
            last[s] = m
        if m == len(moments):
            moments.append([])
        moments[m].append(g)
        moment_of.append(m)
    return Schedule(moments, moment_of)


def depth(circuit: Circuit | Sequence[GateRecord]) -> int:
    return schedule(circuit).depth


# --------------------------------------------------------------------------
# verification


@dataclass
class CleanupReport:
    max_infidelity: float
    max_intermediate_disturbance: float
    max_routing_population: float
    n_inputs: int

    def passed(self, tol: float = ATOL) -> bool:
        return max(self.max_infidelity, self.max_intermediate_disturbance, self.max_routing_population) <= tol

    def to_dict(self) -> dict:
        return {
            "max_infidelity": self.max_infidelity,
            "max_intermediate_disturbance": self.max_intermediate_disturbance,
            "max_routing_population": self.max_routing_population,
            "n_inputs": self.n_inputs,
        }


def _check_size(n_sites: int, d: int) -> None:
    if d**n_sites > MAX_AMPLITUDES:
        raise ResourceError(f"d**n = {d}**{n_sites} exceeds the dense simulation bound {MAX_AMPLITUDES}; shrink the instance")


def _intent_sites(circuit: Circuit) -> tuple[set[int], set[int]]:
    controls = {c for it in circuit.intent for c in it.controls if c is not None}
    targets = {it.target for it in circuit.intent}
    return controls, targets


def probe_state(circuit: Circuit) -> QuditRegister:
    """Controls in (|0>+|1>)/sqrt(2); every other site |0>."""
    controls, _ = _intent_sites(circuit)
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    zero = np.array([1, 0], dtype=complex)
    return init_product(circuit.n_sites, circuit.d, [plus if s in controls else zero for s in range(circuit.n_sites)])


def verify_cleanup(circuit: Circuit, inputs: Iterable[Sequence[int] | QuditRegister] | None = None, probe: bool = True) -> CleanupReport:
    """Compare the circuit against its ideal intent on computational inputs and a probe state.

    Intermediate disturbance is the largest total-variation distance between
    the circuit's and the ideal output's level distribution on any site that
    is neither a control nor a target.
    """
    _check_size(circuit.n_sites, circuit.d)
    n, d = circuit.n_sites, circuit.d
    if inputs is None:
        inputs = itertools.product((0, 1), repeat=n)
    states = [x.copy() if isinstance(x, QuditRegister) else init_basis(n, d, x) for x in inputs]
    if probe:
        states.append(probe_state(circuit))
    controls, targets = _intent_sites(circuit)
    others = [s for s in range(n) if s not in controls | targets]

    worst_inf = worst_dist = worst_pop = 0.0
    for reg in states:
        ideal = ideal_apply(reg.copy(), circuit.intent)
        out = circuit.run(reg)
        worst_inf = max(worst_inf, 1.0 - fidelity(out, ideal))
        for s in others:
            diff = 0.5 * np.abs(site_distribution(out, s) - site_distribution(ideal, s)).sum()
            worst_dist = max(worst_dist, float(diff))
        for s in range(n):
            worst_pop = max(worst_pop, routing_population(out, s))
    return CleanupReport(max(worst_inf, 0.0), worst_dist, worst_pop, len(states))


CROSSROADS_PATHS = ((0, 1, 2), (3, 1, 4))
CROSSROADS_BUSES = (1, 2)


@dataclass
class CrosstalkReport:
    overlap_infidelity: float
    final_infidelity: float
    max_distribution_error: float
    shared_sites: tuple[int, ...]
    cases: int

    def passed(self, tol: float = ATOL) -> bool:
        return max(self.overlap_infidelity, self.final_infidelity, self.max_distribution_error) <= tol

    def to_dict(self) -> dict:
        return {
            "overlap_infidelity": self.overlap_infidelity,
            "final_infidelity": self.final_infidelity,
            "max_distribution_error": self.max_distribution_error,
            "shared_sites": list(self.shared_sites),
            "cases": self.cases,
        }


def _predicted_levels(levels: Sequence[int], paths, buses) -> tuple[int, ...]:
    """Levels after all forward hops: every node past a source gains ``x_src * 2**bus``."""
    out = list(levels)
    for p, k in zip(paths, buses):
        x = levels[p[0]] & 1
        for v in p[1:]:
            out[v] += x << k
    return tuple(out)


def verify_crosstalk(
    paths: Sequence[Sequence[int]] = CROSSROADS_PATHS,
    buses: Sequence[int] = CROSSROADS_BUSES,
    d: int = 8,
) -> CrosstalkReport:
    """Run routed CNOTs on intersecting paths in one round and check they do not interfere.

    Three checks over every computational input (plus a superposition probe
    for the two infidelities): the state right after all forward hops against
    the algebraic prediction, the final state against the ideal CNOTs, and
    the level distribution on every shared site against its predicted value.
    """
    K = max(buses)
    circ = build_routed_layer(paths, buses, BusConfig(d, K))
    _check_size(circ.n_sites, d)
    n = circ.n_sites
    n_forward = sum(len(p) - 1 for p in paths)
    forward = circ.gates[:n_forward]
    shared = tuple(sorted(v for v in set(paths[0]).intersection(*map(set, paths[1:]))))

    def prediction(reg: QuditRegister) -> QuditRegister:
        out = QuditRegister(n, d, np.zeros_like(reg.amplitudes))
        for idx in np.flatnonzero(np.abs(reg.amplitudes) > 0):
            new = _predicted_levels(reg.levels_of(int(idx)), paths, buses)
            out.amplitudes[out.index_of(new)] += reg.amplitudes[idx]
        return out

    overlap = final = dist_err = 0.0
    inputs = [init_basis(n, d, x) for x in itertools.product((0, 1), repeat=n)]
    cases = len(inputs)
    for reg in inputs + [probe_state(circ)]:
        mid = run_gates(reg.copy(), forward, circ.cfg)
        overlap = max(overlap, 1.0 - fidelity(mid, prediction(reg)))
        if reg.amplitudes.nonzero()[0].size == 1:
            levels = reg.levels_of(int(np.flatnonzero(reg.amplitudes)[0]))
            expect = _predicted_levels(levels, paths, buses)
            for s in shared:
                want = np.zeros(d)
                want[expect[s]] = 1.0
                dist_err = max(dist_err, float(np.abs(site_distribution(mid, s) - want).max()))
        out = circ.run(reg.copy())
        final = max(final, 1.0 - fidelity(out, ideal_apply(reg.copy(), circ.intent)))
    return CrosstalkReport(max(overlap, 0.0), max(final, 0.0), dist_err, shared, cases)
