"""Integer routing algebra for binary spectral-bus labels.

A qudit level ``r`` stores the resident logical bit in binary digit 0 and
one routed control bit per bus in digit ``k`` (offset ``2**k``).  Buses are
1-based; digit 0 is never a bus.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BusAbsentError, BusOccupiedError, ConfigurationError


@dataclass(frozen=True)
class BusConfig:
    """Local dimension ``d`` and bus count ``K`` with offsets ``2**k``.

    Construction enforces the no-aliasing condition ``d >= 2**(K+1)`` so that
    every admissible routing value fits below ``d`` without wrapping.
    """

    d: int
    K: int

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ConfigurationError(f"local dimension must be >= 2, got d={self.d}")
        if self.K < 0:
            raise ConfigurationError(f"bus count must be >= 0, got K={self.K}")
        if self.d < min_dimension(self.K):
            raise ConfigurationError(
                f"d={self.d} cannot host K={self.K} buses without aliasing "
                f"(needs d >= {min_dimension(self.K)})"
            )

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(1 << k for k in range(1, self.K + 1))

    @property
    def max_value(self) -> int:
        return (1 << (self.K + 1)) - 1

    def offset(self, k: int) -> int:
        self.check_bus(k)
        return 1 << k

    def check_bus(self, k: int) -> None:
        if not 1 <= k <= self.K:
            raise ConfigurationError(f"bus index {k} outside 1..{self.K}")

    def routing_offsets(self) -> tuple[int, ...]:
        """All offsets ``s = sum_k x_k 2**k`` (the set S_K), ascending."""
        return tuple(range(0, 1 << (self.K + 1), 2))

    def admissible_values(self) -> tuple[int, ...]:
        return tuple(range(1 << (self.K + 1)))


def is_admissible(r: int, cfg: BusConfig) -> bool:
    return 0 <= r <= cfg.max_value


def encode(x0: int, xs: Sequence[int], cfg: BusConfig) -> int:
    if len(xs) != cfg.K:
        raise ConfigurationError(f"expected {cfg.K} bus bits, got {len(xs)}")
    bits = (x0, *xs)
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"bus and logical bits must be 0/1, got {bits}")
    return sum(b << k for k, b in enumerate(bits))


def extract(r: int, k: int, cfg: BusConfig | None = None) -> int:
    """Binary digit ``k`` of ``r``; digit 0 is the logical bit."""
    if cfg is not None:
        if not 0 <= k <= cfg.K:
            raise ValueError(f"digit index {k} outside 0..{cfg.K}")
        if not is_admissible(r, cfg):
            raise ValueError(f"routing value {r} is not admissible for K={cfg.K}")
    elif k < 0:
        raise ValueError(f"digit index must be non-negative, got {k}")
    return (r >> k) & 1


def decode(r: int, cfg: BusConfig) -> tuple[int, tuple[int, ...]]:
    if not is_admissible(r, cfg):
        raise ValueError(f"routing value {r} is not admissible for K={cfg.K}")
    return r & 1, tuple((r >> k) & 1 for k in range(1, cfg.K + 1))


def _bus_mask(buses: Iterable[int], cfg: BusConfig) -> int:
    mask = 0
    for k in set(buses):
        cfg.check_bus(k)
        mask |= 1 << k
    return mask


def bus_add(r: int, buses: Iterable[int], cfg: BusConfig) -> int:
    """Set the digits of ``buses``; all of them must currently be clear."""
    if not is_admissible(r, cfg):
        raise ValueError(f"routing value {r} is not admissible for K={cfg.K}")
    mask = _bus_mask(buses, cfg)
    if r & mask:
        busy = sorted(k for k in range(1, cfg.K + 1) if r & mask & (1 << k))
        raise BusOccupiedError(f"buses {busy} already active in r={r}")
    return r + mask


def bus_remove(r: int, buses: Iterable[int], cfg: BusConfig) -> int:
    """Clear the digits of ``buses``; all of them must currently be set."""
    if not is_admissible(r, cfg):
        raise ValueError(f"routing value {r} is not admissible for K={cfg.K}")
    mask = _bus_mask(buses, cfg)
    if r & mask != mask:
        missing = sorted(k for k in range(1, cfg.K + 1) if mask & (1 << k) and not r & (1 << k))
        raise BusAbsentError(f"buses {missing} not active in r={r}")
    return r - mask


def min_dimension(K: int) -> int:
    if K < 0:
        raise ValueError(f"bus count must be >= 0, got {K}")
    return 1 << (K + 1)


def max_buses(d: int) -> int:
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")
    return d.bit_length() - 2
