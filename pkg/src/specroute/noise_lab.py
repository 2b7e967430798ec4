"""Open-system simulation of routed and SWAP circuits.

Gates are instantaneous; after each gate, routed primitives suffer an
optional leakage channel on the site they write, then every site relaxes
and dephases for the gate's duration.  Two backends share that model:

* ``evolve_master`` integrates the Lindblad equation with fixed-step RK4.
* ``evolve_trajectories`` samples quantum jumps (Monte Carlo wave function).

Both work on the *reachable sector*: the basis states the initial state can
reach through the gates, leakage and relaxation.  Relaxation only lowers
levels and dephasing is diagonal, so every collapse operator has the form
``|x'><x|`` or ``|x><x|`` on basis states and the effective non-Hermitian
Hamiltonian is diagonal.  Restricting to the sector is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .algebra import BusConfig
from .circuits import Circuit, build_routed_cnot, build_swap_baseline, ideal_apply, probe_state
from .errors import ResourceError
from .rng import Xoshiro256, derive_seed
from .simulator import ROUTED, GateKind, GateRecord, QuditRegister, gate_action

MASTER_MAX_DIM = 1024
TRACE_TOL = 1e-8

ROUTING_KINDS = {GateKind.CBL, GateKind.BCP, GateKind.SHIFT}
TARGET_KINDS = {GateKind.CXR, GateKind.CUR, GateKind.BLOCK, GateKind.BOOLEAN, GateKind.SINGLE}

DEFAULT_T1 = (80.0, 45.0, 25.0, 14.0)
DEFAULT_TPHI = (120.0, 80.0, 50.0, 30.0)


@dataclass(frozen=True)
class NoiseModel:
    """Per-level lifetimes and gate durations.

    ``t1[i]`` and ``tphi[i]`` belong to level ``i + 1``; levels beyond the
    listed ones reuse the last value.  ``math.inf`` disables a channel.
    ``swap_time`` is a full SWAP (three CX), default three routing steps.
    """

    t1: tuple[float, ...] = (math.inf,)
    tphi: tuple[float, ...] = (math.inf,)
    leak_eps: float = 0.0
    routing_time: float = 1.0
    target_time: float = 1.0
    swap_time: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "t1", tuple(float(t) for t in self.t1) or (math.inf,))
        object.__setattr__(self, "tphi", tuple(float(t) for t in self.tphi) or (math.inf,))
        if self.swap_time is None:
            object.__setattr__(self, "swap_time", 3.0 * self.routing_time)
        for t in self.t1 + self.tphi:
            if not t > 0:
                raise ValueError(f"lifetimes must be positive or infinite, got {t}")
        for t in (self.routing_time, self.target_time, self.swap_time):
            if t < 0:
                raise ValueError(f"gate durations must be non-negative, got {t}")
        if not 0 <= self.leak_eps < 1:
            raise ValueError(f"leakage strength must lie in [0, 1), got {self.leak_eps}")

    @classmethod
    def ideal(cls, **durations) -> "NoiseModel":
        return cls(**durations)

    @staticmethod
    def _at(times: tuple[float, ...], level: int) -> float:
        return times[min(level, len(times)) - 1]

    def relaxation_rate(self, level: int) -> float:
        return 0.0 if level < 1 else 1.0 / self._at(self.t1, level)

    def dephasing_rate(self, level: int) -> float:
        return 0.0 if level < 1 else 1.0 / (2.0 * self._at(self.tphi, level))

    def duration(self, gate: GateRecord) -> float:
        if gate.kind in ROUTING_KINDS:
            return self.routing_time
        if gate.kind in TARGET_KINDS:
            return self.target_time
        if gate.kind == GateKind.SWAP:
            return self.swap_time
        return self.swap_time / 3.0  # CX

    def with_higher_level_multiplier(self, factor: float, levels: int = 8) -> "NoiseModel":
        """Multiply the lifetimes of levels >= 2 by ``factor``."""
        n = max(levels - 1, len(self.t1), len(self.tphi))
        t1 = tuple(self._at(self.t1, l) * (factor if l >= 2 else 1.0) for l in range(1, n + 1))
        tphi = tuple(self._at(self.tphi, l) * (factor if l >= 2 else 1.0) for l in range(1, n + 1))
        return replace(self, t1=t1, tphi=tphi)

    def with_routed_duration(self, duration: float) -> "NoiseModel":
        """Same model with routing and target primitives taking ``duration``; SWAP timing is kept."""
        return replace(self, routing_time=duration, target_time=duration, swap_time=self.swap_time)

    def to_dict(self) -> dict:
        return {
            "t1": [str(t) if math.isinf(t) else t for t in self.t1],
            "tphi": [str(t) if math.isinf(t) else t for t in self.tphi],
            "leak_eps": self.leak_eps,
            "routing_time": self.routing_time,
            "target_time": self.target_time,
            "swap_time": self.swap_time,
            "level_assignment": "listed times belong to levels 1, 2, ...; higher levels reuse the last value",
        }


@dataclass(frozen=True)
class CollapseOperator:
    kind: str  # "relax" or "dephase"
    level: int
    rate: float
    matrix: np.ndarray = field(compare=False, repr=False)


def collapse_operators(d: int, model: NoiseModel) -> list[CollapseOperator]:
    """Single-site collapse operators: lowering ``|l-1><l|`` and projector ``|l><l|`` per level."""
    ops = []
    for l in range(1, d):
        rate = model.relaxation_rate(l)
        if rate > 0:
            m = np.zeros((d, d))
            m[l - 1, l] = 1.0
            ops.append(CollapseOperator("relax", l, rate, m))
    for l in range(1, d):
        rate = model.dephasing_rate(l)
        if rate > 0:
            m = np.zeros((d, d))
            m[l, l] = 1.0
            ops.append(CollapseOperator("dephase", l, rate, m))
    return ops


def leakage_kraus(d: int, level: int, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Two-outcome Kraus pair mixing ``level`` and ``level + 1`` with probability ``eps``."""
    if not 0 <= eps < 1:
        raise ValueError(f"leakage strength must lie in [0, 1), got {eps}")
    if not 0 <= level < d - 1:
        raise ValueError(f"level {level} has no upper neighbour in d={d}")
    k0 = np.eye(d, dtype=complex)
    k0[level, level] = k0[level + 1, level + 1] = math.sqrt(1 - eps)
    k1 = np.zeros((d, d), dtype=complex)
    k1[level, level + 1] = k1[level + 1, level] = math.sqrt(eps)
    return k0, k1


def leakage_channel(rho: np.ndarray, eps: float) -> np.ndarray:
    """Apply the sequential leakage channel to a single-site density matrix."""
    d = rho.shape[0]
    for l in range(d - 1):
        k0, k1 = leakage_kraus(d, l, eps)
        rho = k0 @ rho @ k0.conj().T + k1 @ rho @ k1.conj().T
    return rho


# --------------------------------------------------------------------------
# reachable sector


class Sector:
    """Basis states reachable from an initial support, with operators restricted to them."""

    def __init__(self, circuit: Circuit, model: NoiseModel, support: np.ndarray, max_dim: int | None = None):
        self.circuit = circuit
        self.model = model
        self.n, self.d = circuit.n_sites, circuit.d
        self.strides = np.array([self.d ** (self.n - 1 - s) for s in range(self.n)], dtype=np.int64)
        self.durations = [model.duration(g) for g in circuit.gates]
        self.leaky = [model.leak_eps > 0 and g.kind in ROUTED for g in circuit.gates]
        self.indices = self._closure(np.unique(np.asarray(support, dtype=np.int64)), max_dim)
        self.dim = self.indices.shape[0]
        self.levels = (self.indices[:, None] // self.strides[None, :]) % self.d
        self.gate_ops = [self._restrict_gate(g) for g in circuit.gates]
        self.jumps = self._jump_operators()
        self.decay = np.zeros(self.dim)
        for _, _, rate, src, _ in self.jumps:
            self.decay[src] += rate

    # ---- closure

    def _digits(self, idx: np.ndarray, site: int) -> np.ndarray:
        return (idx // self.strides[site]) % self.d

    def _gate_image(self, idx: np.ndarray, gate: GateRecord) -> np.ndarray:
        action = gate_action(gate, self.circuit.cfg)
        if action.is_permutation:
            local = np.zeros_like(idx)
            digs = [self._digits(idx, s) for s in action.sites]
            for dg in digs:
                local = local * self.d + dg
            new = np.asarray(action.table)[local]
            out = idx.copy()
            for s, dg in zip(reversed(action.sites), reversed(digs)):
                out += (new % self.d - dg) * self.strides[s]
                new //= self.d
            return out
        site = action.sites[0]
        a = self._digits(idx, site)
        nz = np.abs(action.operator) > 0
        parts = []
        for b in range(self.d):
            mask = nz[b, a]
            parts.append(idx[mask] + (b - a[mask]) * self.strides[site])
        return np.concatenate(parts)

    def _lowered(self, idx: np.ndarray) -> np.ndarray:
        out = [idx]
        for s in range(self.n):
            dg = self._digits(idx, s)
            for l in range(1, self.d):
                if self.model.relaxation_rate(l) > 0:
                    out.append(idx[dg == l] - self.strides[s])
        return np.unique(np.concatenate(out))

    def _leaked(self, idx: np.ndarray, site: int) -> np.ndarray:
        dg = self._digits(idx, site)
        up = idx[dg < self.d - 1] + self.strides[site]
        down = idx[dg > 0] - self.strides[site]
        return np.unique(np.concatenate([idx, up, down]))

    def _close_under(self, idx: np.ndarray, step) -> np.ndarray:
        while True:
            new = step(idx)
            if new.shape[0] == idx.shape[0]:
                return idx
            idx = new

    def _closure(self, current: np.ndarray, max_dim: int | None) -> np.ndarray:
        seen = current
        for gate, dur, leaky in zip(self.circuit.gates, self.durations, self.leaky):
            current = np.unique(self._gate_image(current, gate))
            if leaky:
                site = gate.sites[-1]
                current = self._close_under(current, lambda x: self._leaked(x, site))
            if dur > 0:
                current = self._close_under(current, self._lowered)
            seen = np.union1d(seen, current)
            if max_dim is not None and seen.shape[0] > max_dim:
                raise ResourceError(
                    f"reachable sector exceeds {max_dim} states; use the trajectory backend for this instance"
                )
        return seen

    # ---- restricted operators

    def _positions(self, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        pos = np.searchsorted(self.indices, idx)
        pos = np.minimum(pos, self.dim - 1)
        return pos, self.indices[pos] == idx

    def _restrict_gate(self, gate: GateRecord) -> sp.csr_matrix:
        action = gate_action(gate, self.circuit.cfg)
        cols = np.arange(self.dim)
        if action.is_permutation:
            rows, ok = self._positions(self._gate_image(self.indices, gate))
            return sp.csr_matrix((np.ones(ok.sum(), dtype=complex), (rows[ok], cols[ok])), shape=(self.dim, self.dim))
        return self._restrict_site_operator(action.sites[0], action.operator)

    def _restrict_site_operator(self, site: int, op: np.ndarray) -> sp.csr_matrix:
        a = self.levels[:, site]
        rows, cols, vals = [], [], []
        for b in range(self.d):
            coef = op[b, a]
            nz = np.abs(coef) > 0
            dst, ok = self._positions(self.indices[nz] + (b - a[nz]) * self.strides[site])
            rows.append(dst[ok])
            cols.append(np.flatnonzero(nz)[ok])
            vals.append(coef[nz][ok])
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(self.dim, self.dim)
        )

    def leakage_ops(self, site: int) -> list[tuple[sp.csr_matrix, sp.csr_matrix]]:
        return [
            tuple(self._restrict_site_operator(site, k) for k in leakage_kraus(self.d, l, self.model.leak_eps))
            for l in range(self.d - 1)
        ]

    def _jump_operators(self) -> list[tuple[str, int, float, np.ndarray, np.ndarray]]:
        """(kind, site, rate, source positions, destination positions) per collapse operator."""
        ops = []
        for s in range(self.n):
            for c in collapse_operators(self.d, self.model):
                src = np.flatnonzero(self.levels[:, s] == c.level)
                if src.size == 0:
                    continue
                if c.kind == "relax":
                    # states whose lowered image is absent never hold population
                    # during a dissipative window, so their jumps are inert
                    dst, ok = self._positions(self.indices[src] - self.strides[s])
                    src, dst = src[ok], dst[ok]
                    if src.size == 0:
                        continue
                else:
                    dst = src
                ops.append((c.kind, s, c.rate, src, dst))
        return ops

    # ---- states

    def restrict(self, reg: QuditRegister) -> np.ndarray:
        return reg.amplitudes[self.indices]

    def routing_mask(self, site: int) -> np.ndarray:
        return self.levels[:, site] >= 2


def _support(reg: QuditRegister) -> np.ndarray:
    return np.flatnonzero(np.abs(reg.amplitudes) > 0)


def _ideal_target(initial: QuditRegister, circuit: Circuit, target: QuditRegister | None) -> QuditRegister:
    if target is not None:
        return target
    if circuit.intent:
        return ideal_apply(initial.copy(), circuit.intent)
    return circuit.run(initial.copy())


# --------------------------------------------------------------------------
# master equation


@dataclass
class MasterResult:
    fidelity: float
    routing_populations: list[float]
    trace_drift: float
    sector_dim: int
    rho: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)

    @property
    def stderr(self) -> float:
        return 0.0

    @property
    def pop_routing_max(self) -> float:
        return max(self.routing_populations, default=0.0)


def _liouvillian(sector: Sector) -> sp.csr_matrix:
    """Sparse generator acting on row-major vec(rho)."""
    m = sector.dim
    gamma = sector.decay
    diag = -0.5 * (gamma[:, None] + gamma[None, :]).reshape(-1)
    gen = sp.diags(diag.astype(complex), format="csr")
    for _, _, rate, src, dst in sector.jumps:
        r = (dst[:, None] * m + dst[None, :]).reshape(-1)
        c = (src[:, None] * m + src[None, :]).reshape(-1)
        gen = gen + sp.csr_matrix((np.full(r.size, rate, dtype=complex), (r, c)), shape=(m * m, m * m))
    return gen.tocsr()


def _rk4(gen: sp.csr_matrix, vec: np.ndarray, duration: float, dt: float) -> np.ndarray:
    steps = max(1, math.ceil(duration / dt - 1e-12))
    h = duration / steps
    for _ in range(steps):
        k1 = gen @ vec
        k2 = gen @ (vec + 0.5 * h * k1)
        k3 = gen @ (vec + 0.5 * h * k2)
        k4 = gen @ (vec + h * k3)
        vec = vec + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return vec


def _conjugate(op: sp.csr_matrix, rho: np.ndarray) -> np.ndarray:
    """``op @ rho @ op^dagger`` for a sparse ``op`` and dense ``rho``."""
    left = op @ rho
    return (op @ left.conj().T).conj().T


def default_dt(circuit: Circuit, model: NoiseModel, max_rate: float = 0.0) -> float:
    """A twentieth of the shortest gate, shrunk so that ``dt * max_rate <= 0.2`` for stiff models."""
    durations = [model.duration(g) for g in circuit.gates if model.duration(g) > 0]
    dt = min(durations) / 20.0 if durations else 1.0
    return min(dt, 0.2 / max_rate) if max_rate > 0 else dt


def evolve_master(
    initial: QuditRegister,
    circuit: Circuit,
    model: NoiseModel,
    target: QuditRegister | None = None,
    max_dim: int = MASTER_MAX_DIM,
    dt: float | None = None,
) -> MasterResult:
    """Density-matrix evolution restricted to the reachable sector (at most ``max_dim`` states)."""
    sector = Sector(circuit, model, _support(initial), max_dim=max_dim)
    m = sector.dim
    psi = sector.restrict(initial)
    rho = np.outer(psi, psi.conj())
    gen = _liouvillian(sector) if sector.jumps else None
    dt = default_dt(circuit, model, float(sector.decay.max(initial=0.0))) if dt is None else dt
    leak_cache: dict[int, list] = {}
    for gate, op, dur, leaky in zip(circuit.gates, sector.gate_ops, sector.durations, sector.leaky):
        rho = _conjugate(op, rho)
        if leaky:
            site = gate.sites[-1]
            if site not in leak_cache:
                leak_cache[site] = sector.leakage_ops(site)
            for k0, k1 in leak_cache[site]:
                rho = _conjugate(k0, rho) + _conjugate(k1, rho)
        if gen is not None and dur > 0:
            rho = _rk4(gen, rho.reshape(-1), dur, dt).reshape(m, m)
    ideal = sector.restrict(_ideal_target(initial, circuit, target))
    fid = float(np.real(ideal.conj() @ rho @ ideal))
    diag = np.real(np.diag(rho))
    pops = [float(diag[sector.routing_mask(s)].sum()) for s in range(circuit.n_sites)]
    drift = abs(float(diag.sum()) - 1.0)
    if drift > TRACE_TOL:
        raise AssertionError(f"master-equation trace drifted by {drift:.3e}")
    return MasterResult(fid, pops, drift, m, rho, sector.indices)


# --------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class TrajectoryConfig:
    n_traj: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.n_traj < 1:
            raise ValueError(f"need at least one trajectory, got {self.n_traj}")


@dataclass
class TrajectoryResult:
    fidelity: float
    stderr: float
    routing_populations: list[float]
    n_traj: int
    samples: np.ndarray = field(repr=False)
    sector_dim: int = 0

    @property
    def pop_routing_max(self) -> float:
        return max(self.routing_populations, default=0.0)


def _no_jump_weight(weights: np.ndarray, rates: np.ndarray, t: float) -> float:
    return float(weights @ np.exp(-rates * t))


def _dissipate(psi: np.ndarray, sector: Sector, groups: np.ndarray, rates: np.ndarray, duration: float, rng: Xoshiro256) -> np.ndarray:
    """Evolve one trajectory through a dissipation window with exact jump times."""
    left = duration
    while left > 0:
        weights = np.bincount(groups, weights=np.abs(psi) ** 2, minlength=rates.size)
        r = rng.random()
        if _no_jump_weight(weights, rates, left) > r:
            psi = psi * np.exp(-0.5 * sector.decay * left)
            return psi / np.linalg.norm(psi)
        lo, hi = 0.0, left
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if _no_jump_weight(weights, rates, mid) > r:
                lo = mid
            else:
                hi = mid
        tau = hi
        psi = psi * np.exp(-0.5 * sector.decay * tau)
        psi = psi / np.linalg.norm(psi)
        probs = np.abs(psi) ** 2
        w = np.array([rate * probs[src].sum() for _, _, rate, src, _ in sector.jumps])
        pick = rng.random() * w.sum()
        c = min(int(np.searchsorted(np.cumsum(w), pick, side="right")), len(w) - 1)
        _, _, _, src, dst = sector.jumps[c]
        new = np.zeros_like(psi)
        new[dst] = psi[src]
        psi = new / np.linalg.norm(new)
        left -= tau
    return psi


def _leak(psi: np.ndarray, kraus: list, rng: Xoshiro256) -> np.ndarray:
    for k0, k1 in kraus:
        jumped = k1 @ psi
        p1 = float(np.vdot(jumped, jumped).real)
        if rng.random() < p1:
            psi = jumped / math.sqrt(p1)
        else:
            stay = k0 @ psi
            psi = stay / np.linalg.norm(stay)
    return psi


def evolve_trajectories(
    initial: QuditRegister,
    circuit: Circuit,
    model: NoiseModel,
    config: TrajectoryConfig = TrajectoryConfig(),
    target: QuditRegister | None = None,
) -> TrajectoryResult:
    """Monte Carlo wave-function estimate of the output fidelity.

    Trajectory ``i`` draws from its own stream seeded by ``(config.seed, i)``,
    so equal configs give identical estimates and different circuits run
    with common random numbers.
    """
    sector = Sector(circuit, model, _support(initial))
    psi0 = sector.restrict(initial)
    ideal = sector.restrict(_ideal_target(initial, circuit, target))
    rates, groups = np.unique(sector.decay, return_inverse=True)
    has_jumps = bool(sector.jumps)
    leak_ops = {g.sites[-1]: sector.leakage_ops(g.sites[-1]) for g, lk in zip(circuit.gates, sector.leaky) if lk}
    masks = [sector.routing_mask(s) for s in range(circuit.n_sites)]

    fids = np.empty(config.n_traj)
    pops = np.zeros(circuit.n_sites)
    for i in range(config.n_traj):
        rng = Xoshiro256(derive_seed(config.seed, i))
        psi = psi0.copy()
        for gate, op, dur, leaky in zip(circuit.gates, sector.gate_ops, sector.durations, sector.leaky):
            psi = op @ psi
            if leaky:
                psi = _leak(psi, leak_ops[gate.sites[-1]], rng)
            if has_jumps and dur > 0:
                psi = _dissipate(psi, sector, groups, rates, dur, rng)
        probs = np.abs(psi) ** 2
        fids[i] = abs(np.vdot(ideal, psi)) ** 2
        pops += [probs[m].sum() for m in masks]
    stderr = float(fids.std(ddof=1) / math.sqrt(config.n_traj)) if config.n_traj > 1 else 0.0
    return TrajectoryResult(float(fids.mean()), stderr, [float(p) for p in pops / config.n_traj], config.n_traj, fids, sector.dim)


def evolve(
    initial: QuditRegister,
    circuit: Circuit,
    model: NoiseModel,
    config: TrajectoryConfig = TrajectoryConfig(),
    target: QuditRegister | None = None,
) -> MasterResult | TrajectoryResult:
    """Master equation when ``d**n <= 1024``, trajectories otherwise."""
    if circuit.d**circuit.n_sites <= MASTER_MAX_DIM:
        return evolve_master(initial, circuit, model, target)
    return evolve_trajectories(initial, circuit, model, config, target)


# --------------------------------------------------------------------------
# sweeps


SWEEP_COLUMNS = ["L", "fid_routed", "fid_routed_stderr", "fid_swap", "fid_swap_stderr", "pop_routing_max"]
WIN_COLUMNS = ["duration", "multiplier", "win", "stderr"]


def chain_pair(L: int, d: int, K: int = 1) -> tuple[Circuit, Circuit]:
    """Routed CNOT and SWAP baseline over a chain of L edges."""
    path = list(range(L + 1))
    cfg = BusConfig(d, K)
    return build_routed_cnot(path, 1, cfg), build_swap_baseline(path, cfg)


def distance_sweep(
    L_range: Sequence[int] = range(2, 7),
    d: int = 5,
    model: NoiseModel | None = None,
    config: TrajectoryConfig = TrajectoryConfig(),
) -> list[dict]:
    """Routed vs SWAP fidelity on the Bell-type probe for each chain length."""
    model = NoiseModel(t1=DEFAULT_T1) if model is None else model
    rows = []
    for L in L_range:
        routed, swap = chain_pair(L, d)
        probe = probe_state(routed)
        r = evolve(probe, routed, model, config)
        s = evolve(probe, swap, model, config)
        rows.append(
            {
                "L": L,
                "fid_routed": r.fidelity,
                "fid_routed_stderr": r.stderr,
                "fid_swap": s.fidelity,
                "fid_swap_stderr": s.stderr,
                "pop_routing_max": r.pop_routing_max,
            }
        )
    return rows


def _paired_stderr(a, b) -> float:
    sa = getattr(a, "samples", None)
    sb = getattr(b, "samples", None)
    if sa is not None and sb is not None and sa.size == sb.size and sa.size > 1:
        return float(np.std(sa - sb, ddof=1) / math.sqrt(sa.size))
    return math.hypot(a.stderr, b.stderr)


def threshold_scan(
    durations: Sequence[float] = (1.0, 0.8, 0.6, 0.4, 0.3, 0.2),
    multipliers: Sequence[float] = (1.0, 1.5, 2.0, 3.0, 5.0, 10.0),
    L: int = 3,
    d: int = 8,
    config: TrajectoryConfig = TrajectoryConfig(),
    model: NoiseModel | None = None,
) -> list[dict]:
    """Routed-minus-SWAP fidelity over routed primitive duration and higher-level lifetime gain.

    The SWAP baseline keeps the base model's CX duration in every cell.
    """
    base = NoiseModel(t1=DEFAULT_T1) if model is None else model
    routed, swap = chain_pair(L, d)
    probe = probe_state(routed)
    rows = []
    swap_cache: dict[float, object] = {}
    for dur in durations:
        for mult in multipliers:
            m = base.with_higher_level_multiplier(mult, d).with_routed_duration(dur)
            r = evolve(probe, routed, m, config)
            if mult not in swap_cache:
                swap_cache[mult] = evolve(probe, swap, base.with_higher_level_multiplier(mult, d), config)
            s = swap_cache[mult]
            rows.append({"duration": dur, "multiplier": mult, "win": r.fidelity - s.fidelity, "stderr": _paired_stderr(r, s)})
    return rows
