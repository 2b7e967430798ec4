"""Exception hierarchy shared by all modules."""


class SpecrouteError(Exception):
    """Base class for library errors."""


class ConfigurationError(SpecrouteError, ValueError):
    """Bus configuration or circuit layout violates a routing precondition."""


class BusOccupiedError(SpecrouteError, ValueError):
    pass


class BusAbsentError(SpecrouteError, ValueError):
    pass


class TopologyError(SpecrouteError, ValueError):
    pass


class ResourceError(SpecrouteError, RuntimeError):
    """Instance too large for the requested exact method."""
