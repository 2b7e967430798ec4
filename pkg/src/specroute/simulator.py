"""Dense state-vector simulator for ``n`` qudits of local dimension ``d``.

Routing primitives (shift, bus load, bus propagation, CX, SWAP) are basis
permutations and are applied by index remapping.  Same-qudit target
operations (routed controlled unitaries, block gates, Boolean targets) are
``d x d`` operators applied on one site.  Dense full-register matrices are
never built here.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .algebra import BusConfig

ATOL = 1e-12
MAX_AMPLITUDES = 1 << 22

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


class GateKind(str, enum.Enum):
    SINGLE = "SingleSite"
    CX = "CX"
    SHIFT = "Shift"
    CBL = "CBL"
    BCP = "BCP"
    CXR = "CXR"
    CUR = "CUR"
    BLOCK = "Block"
    BOOLEAN = "BooleanTarget"
    SWAP = "Swap"


TWO_SITE = {GateKind.CX, GateKind.CBL, GateKind.BCP, GateKind.SWAP}
ROUTED = {GateKind.CBL, GateKind.BCP, GateKind.CXR, GateKind.CUR, GateKind.BLOCK, GateKind.BOOLEAN}


def _freeze_unitary(u) -> tuple | None:
    if u is None:
        return None
    arr = np.asarray(u, dtype=complex)
    if arr.shape != (2, 2):
        raise ValueError(f"expected a 2x2 unitary, got shape {arr.shape}")
    return tuple(tuple(complex(v) for v in row) for row in arr)


@dataclass(frozen=True)
class GateRecord:
    """One primitive gate.  ``sites`` is (site,) or (control/source, target)."""

    kind: GateKind
    sites: tuple[int, ...]
    k: int | None = None
    sign: int = 1
    delta: int | None = None
    offset: int | None = None
    unitary: tuple | None = None
    table: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        if not isinstance(self.unitary, (tuple, type(None))):
            object.__setattr__(self, "unitary", _freeze_unitary(self.unitary))
        if self.table is not None:
            object.__setattr__(self, "table", tuple(int(b) for b in self.table))
        want = 2 if self.kind in TWO_SITE else 1
        if len(self.sites) != want:
            raise ValueError(f"{self.kind.value} acts on {want} site(s), got {self.sites}")
        if want == 2 and self.sites[0] == self.sites[1]:
            raise ValueError(f"{self.kind.value} needs two distinct sites, got {self.sites}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    @property
    def matrix(self) -> np.ndarray | None:
        return None if self.unitary is None else np.array(self.unitary, dtype=complex)

    @property
    def target(self) -> int:
        return self.sites[-1]

    def inverse(self) -> "GateRecord":
        if self.kind in (GateKind.CBL, GateKind.BCP):
            return GateRecord(self.kind, self.sites, k=self.k, sign=-self.sign)
        if self.kind == GateKind.SHIFT:
            return GateRecord(self.kind, self.sites, delta=-(self.delta or 0))
        if self.unitary is not None:
            u = self.matrix.conj().T
            return GateRecord(self.kind, self.sites, k=self.k, offset=self.offset, unitary=_freeze_unitary(u), table=self.table)
        return self

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value, "sites": list(self.sites)}
        if self.k is not None:
            out["k"] = self.k
        if self.kind in (GateKind.CBL, GateKind.BCP):
            out["sign"] = self.sign
        if self.delta is not None:
            out["delta"] = self.delta
        if self.offset is not None:
            out["offset"] = self.offset
        if self.unitary is not None:
            out["unitary"] = [[[v.real, v.imag] for v in row] for row in self.unitary]
        if self.table is not None:
            out["table"] = list(self.table)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "GateRecord":
        u = data.get("unitary")
        if u is not None:
            u = tuple(tuple(complex(re, im) for re, im in row) for row in u)
        table = data.get("table")
        return cls(
            GateKind(data["kind"]),
            tuple(data["sites"]),
            k=data.get("k"),
            sign=data.get("sign", 1),
            delta=data.get("delta"),
            offset=data.get("offset"),
            unitary=u,
            table=None if table is None else tuple(table),
        )


# --------------------------------------------------------------------------
# local actions


def check_unitary(u: np.ndarray, atol: float = ATOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"expected a 2x2 unitary, got shape {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(2), atol=atol, rtol=0):
        raise ValueError("matrix is not unitary within tolerance")
    return u


def shift_table(d: int, delta: int) -> np.ndarray:
    return (np.arange(d) + delta) % d


def _pair_table(d: int, rule) -> np.ndarray:
    table = np.empty(d * d, dtype=np.int64)
    for a in range(d):
        for b in range(d):
            a2, b2 = rule(a, b)
            table[a * d + b] = a2 * d + b2
    return table


def cx_table(d: int) -> np.ndarray:
    # control level exactly 1 flips target levels 0 <-> 1; identity otherwise
    return _pair_table(d, lambda a, b: (a, (1 - b) if (a == 1 and b < 2) else b))


def swap_table(d: int) -> np.ndarray:
    return _pair_table(d, lambda a, b: (b, a))


def cbl_table(d: int, k: int, sign: int) -> np.ndarray:
    # control condition generalised to the extracted logical digit a & 1
    return _pair_table(d, lambda a, b: (a, (b + sign * (a & 1) * (1 << k)) % d))


def bcp_table(d: int, k: int, sign: int) -> np.ndarray:
    return _pair_table(d, lambda a, b: (a, (b + sign * ((a >> k) & 1) * (1 << k)) % d))


def block_matrix(d: int, s: int, u: np.ndarray) -> np.ndarray:
    """``B_s(U)``: ``U`` on span{|s>, |s+1>}, identity elsewhere."""
    if not 0 <= s or s + 1 >= d:
        raise ValueError(f"block offset {s} does not fit in d={d}")
    m = np.eye(d, dtype=complex)
    m[s : s + 2, s : s + 2] = u
    return m


def boolean_target_matrix(cfg: BusConfig, table: Sequence[int], u: np.ndarray) -> np.ndarray:
    """Same-qudit operator applying ``U**g(f_1(s)..f_K(s))`` on every lifted block.

    ``table[i]`` is ``g`` evaluated at bus bits ``x_k = (i >> (k-1)) & 1``; for an
    offset ``s`` that index is simply ``s >> 1``.
    """
    if len(table) != 1 << cfg.K:
        raise ValueError(f"truth table needs {1 << cfg.K} entries, got {len(table)}")
    m = np.eye(cfg.d, dtype=complex)
    for s in cfg.routing_offsets():
        if table[s >> 1]:
            m[s : s + 2, s : s + 2] = u
    return m


def projection_table(K: int, k: int) -> tuple[int, ...]:
    return tuple((i >> (k - 1)) & 1 for i in range(1 << K))


def cur_matrix(cfg: BusConfig, k: int, u: np.ndarray) -> np.ndarray:
    cfg.check_bus(k)
    return boolean_target_matrix(cfg, projection_table(cfg.K, k), u)


def single_matrix(d: int, u: np.ndarray) -> np.ndarray:
    return block_matrix(d, 0, u)


@dataclass(frozen=True)
class LocalAction:
    """Resolved action of a gate: either a level permutation or a site operator."""

    sites: tuple[int, ...]
    table: np.ndarray | None = field(default=None, compare=False)
    operator: np.ndarray | None = field(default=None, compare=False)

    @property
    def is_permutation(self) -> bool:
        return self.table is not None


@lru_cache(maxsize=4096)
def gate_action(gate: GateRecord, cfg: BusConfig) -> LocalAction:
    d = cfg.d
    kind = gate.kind
    if kind in (GateKind.CBL, GateKind.BCP):
        if gate.k is None:
            raise ValueError(f"{kind.value} needs a bus index")
        cfg.check_bus(gate.k)
        maker = cbl_table if kind == GateKind.CBL else bcp_table
        return LocalAction(gate.sites, table=maker(d, gate.k, gate.sign))
    if kind == GateKind.CX:
        return LocalAction(gate.sites, table=cx_table(d))
    if kind == GateKind.SWAP:
        return LocalAction(gate.sites, table=swap_table(d))
    if kind == GateKind.SHIFT:
        return LocalAction(gate.sites, table=shift_table(d, gate.delta or 0))
    if kind == GateKind.CXR:
        return LocalAction(gate.sites, operator=cur_matrix(cfg, gate.k, PAULI_X))
    u = check_unitary(gate.matrix)
    if kind == GateKind.CUR:
        return LocalAction(gate.sites, operator=cur_matrix(cfg, gate.k, u))
    if kind == GateKind.BLOCK:
        if gate.offset not in cfg.routing_offsets():
            raise ValueError(f"block offset {gate.offset} is not an admissible routing offset")
        return LocalAction(gate.sites, operator=block_matrix(d, gate.offset, u))
    if kind == GateKind.BOOLEAN:
        return LocalAction(gate.sites, operator=boolean_target_matrix(cfg, gate.table, u))
    if kind == GateKind.SINGLE:
        return LocalAction(gate.sites, operator=single_matrix(d, u))
    raise ValueError(f"unknown gate kind {kind}")  # pragma: no cover


@lru_cache(maxsize=512)
def _cached_level_map(n: int, d: int, sites: tuple[int, ...], table_bytes: bytes) -> np.ndarray:
    table = np.frombuffer(table_bytes, dtype=np.int64)
    dest = _kernels.level_map(n, d, sites, table)
    dest.setflags(write=False)
    return dest


def destination_map(n: int, d: int, sites: Sequence[int], table: np.ndarray) -> np.ndarray:
    """Destination index of every basis index; cached per (n, d, sites, table)."""
    return _cached_level_map(n, d, tuple(int(s) for s in sites), np.asarray(table, dtype=np.int64).tobytes())


# --------------------------------------------------------------------------
# register


class QuditRegister:
    """Amplitude vector over ``d**n_sites`` basis states, site 0 most significant."""

    def __init__(self, n_sites: int, d: int, amplitudes: np.ndarray | None = None):
        if n_sites < 1:
            raise ValueError(f"need at least one site, got {n_sites}")
        if d < 2:
            raise ValueError(f"local dimension must be >= 2, got {d}")
        size = d**n_sites
        if size > MAX_AMPLITUDES:
            from .errors import ResourceError

            raise ResourceError(f"d**n = {size} amplitudes exceeds the dense bound {MAX_AMPLITUDES}")
        self.n_sites = n_sites
        self.d = d
        if amplitudes is None:
            amplitudes = np.zeros(size, dtype=complex)
            amplitudes[0] = 1.0
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (size,):
            raise ValueError(f"amplitude vector must have length {size}, got {amplitudes.shape}")
        self.amplitudes = amplitudes

    @property
    def size(self) -> int:
        return self.amplitudes.shape[0]

    def copy(self) -> "QuditRegister":
        return QuditRegister(self.n_sites, self.d, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def index_of(self, levels: Sequence[int]) -> int:
        idx = 0
        for v in levels:
            idx = idx * self.d + int(v)
        return idx

    def levels_of(self, index: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.n_sites):
            index, v = divmod(index, self.d)
            out.append(v)
        return tuple(reversed(out))

    def stride(self, site: int) -> int:
        return self.d ** (self.n_sites - 1 - site)

    def digits(self, site: int) -> np.ndarray:
        """Level of ``site`` for every basis index."""
        return (np.arange(self.size) // self.stride(site)) % self.d

    def __repr__(self) -> str:
        return f"QuditRegister(n_sites={self.n_sites}, d={self.d})"


def init_basis(n_sites: int, d: int, levels: Sequence[int]) -> QuditRegister:
    if len(levels) != n_sites:
        raise ValueError(f"expected {n_sites} levels, got {len(levels)}")
    for v in levels:
        if not 0 <= v < d:
            raise ValueError(f"level {v} outside 0..{d - 1}")
    reg = QuditRegister(n_sites, d, np.zeros(d**n_sites, dtype=complex))
    reg.amplitudes[reg.index_of(levels)] = 1.0
    return reg


def init_product(n_sites: int, d: int, site_states: Sequence[np.ndarray]) -> QuditRegister:
    """Product state from one length-``d`` (or length-2 computational) vector per site."""
    psi = np.ones(1, dtype=complex)
    for v in site_states:
        v = np.asarray(v, dtype=complex)
        if v.shape[0] < d:
            v = np.concatenate([v, np.zeros(d - v.shape[0], dtype=complex)])
        psi = np.kron(psi, v)
    return QuditRegister(n_sites, d, psi)


def _check_site(reg: QuditRegister, *sites: int) -> None:
    for s in sites:
        if not 0 <= s < reg.n_sites:
            raise ValueError(f"site {s} outside 0..{reg.n_sites - 1}")
    if len(set(sites)) != len(sites):
        raise ValueError(f"sites must be distinct, got {sites}")


def apply_permutation(reg: QuditRegister, sites: Sequence[int], table: np.ndarray) -> None:
    _check_site(reg, *sites)
    dest = destination_map(reg.n_sites, reg.d, sites, table)
    out = np.empty_like(reg.amplitudes)
    out[dest] = reg.amplitudes
    reg.amplitudes = out


def apply_site_operator(reg: QuditRegister, site: int, op: np.ndarray) -> None:
    _check_site(reg, site)
    reg.amplitudes = _kernels.site_operator(reg.amplitudes, reg.n_sites, reg.d, site, op)


def apply_shift(reg: QuditRegister, site: int, delta: int) -> None:
    apply_permutation(reg, (site,), shift_table(reg.d, delta))


def apply_cx(reg: QuditRegister, control: int, target: int) -> None:
    apply_permutation(reg, (control, target), cx_table(reg.d))


def apply_swap(reg: QuditRegister, a: int, b: int) -> None:
    apply_permutation(reg, (a, b), swap_table(reg.d))


def apply_cbl(reg: QuditRegister, control: int, target: int, k: int, sign: int = 1) -> None:
    apply_permutation(reg, (control, target), cbl_table(reg.d, k, sign))


def apply_bcp(reg: QuditRegister, source: int, target: int, k: int, sign: int = 1) -> None:
    apply_permutation(reg, (source, target), bcp_table(reg.d, k, sign))


def apply_single(reg: QuditRegister, site: int, u: np.ndarray) -> None:
    apply_site_operator(reg, site, single_matrix(reg.d, check_unitary(u)))


def apply_cur(reg: QuditRegister, site: int, k: int, u: np.ndarray, cfg: BusConfig) -> None:
    _check_cfg(reg, cfg)
    apply_site_operator(reg, site, cur_matrix(cfg, k, check_unitary(u)))


def apply_cxr(reg: QuditRegister, site: int, k: int, cfg: BusConfig) -> None:
    apply_cur(reg, site, k, PAULI_X, cfg)


def apply_block(reg: QuditRegister, site: int, s: int, u: np.ndarray, cfg: BusConfig) -> None:
    _check_cfg(reg, cfg)
    if s not in cfg.routing_offsets() or s + 1 >= reg.d:
        raise ValueError(f"block offset {s} is not an admissible routing offset")
    apply_site_operator(reg, site, block_matrix(reg.d, s, check_unitary(u)))


def apply_boolean_target(reg: QuditRegister, site: int, table: Sequence[int], u: np.ndarray, cfg: BusConfig) -> None:
    _check_cfg(reg, cfg)
    apply_site_operator(reg, site, boolean_target_matrix(cfg, table, check_unitary(u)))


def _check_cfg(reg: QuditRegister, cfg: BusConfig) -> None:
    if cfg.d != reg.d:
        raise ValueError(f"bus config d={cfg.d} does not match register d={reg.d}")


def apply_gate(reg: QuditRegister, gate: GateRecord, cfg: BusConfig) -> None:
    _check_cfg(reg, cfg)
    action = gate_action(gate, cfg)
    if action.is_permutation:
        apply_permutation(reg, action.sites, action.table)
    else:
        apply_site_operator(reg, action.sites[0], action.operator)


def run_gates(reg: QuditRegister, gates: Iterable[GateRecord], cfg: BusConfig) -> QuditRegister:
    for g in gates:
        apply_gate(reg, g, cfg)
    return reg


# --------------------------------------------------------------------------
# observables


def fidelity(a: QuditRegister, b: QuditRegister) -> float:
    if a.amplitudes.shape != b.amplitudes.shape or a.d != b.d:
        raise ValueError("registers have different shapes")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def site_distribution(reg: QuditRegister, site: int) -> np.ndarray:
    _check_site(reg, site)
    probs = np.abs(reg.amplitudes) ** 2
    return probs.reshape(-1, reg.d, reg.stride(site)).sum(axis=(0, 2))


def routing_population(reg: QuditRegister, site: int) -> float:
    return float(site_distribution(reg, site)[2:].sum())


# --------------------------------------------------------------------------
# state dump


def dump_state(reg: QuditRegister) -> str:
    payload = {
        "n_sites": reg.n_sites,
        "d": reg.d,
        "ordering": "site0-most-significant",
        "amplitudes": [[float(a.real), float(a.imag)] for a in reg.amplitudes],
    }
    return json.dumps(payload)


def load_state(text: str) -> QuditRegister:
    data = json.loads(text)
    if data.get("ordering") != "site0-most-significant":
        raise ValueError(f"unsupported ordering {data.get('ordering')!r}")
    amps = np.array([complex(re, im) for re, im in data["amplitudes"]], dtype=complex)
    return QuditRegister(int(data["n_sites"]), int(data["d"]), amps)
