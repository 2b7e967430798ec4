"""Qudit spectral-bus routing laboratory.

Submodules: ``algebra`` (bus labels), ``simulator`` (dense qudit states),
``circuits`` (routed CNOT, fan-in, SWAP baseline, verification),
``congestion`` (conflict graphs and routing rounds), ``route_compiler``
(route-demand benchmarks), ``noise_lab`` (open-system sweeps), ``cli``.
"""

__version__ = "0.1.0"

from .algebra import BusConfig, decode, encode, extract, max_buses, min_dimension  # noqa: E402
from .errors import (  # noqa: E402
    BusAbsentError,
    BusOccupiedError,
    ConfigurationError,
    ResourceError,
    SpecrouteError,
    TopologyError,
)

__all__ = [
    "BusConfig",
    "encode",
    "decode",
    "extract",
    "min_dimension",
    "max_buses",
    "SpecrouteError",
    "ConfigurationError",
    "BusOccupiedError",
    "BusAbsentError",
    "TopologyError",
    "ResourceError",
]
