"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Unsupported parameter combination (ring kind, q, e, CLI spec)."""


class CapacityError(RuntimeError):
    """Requested computation exceeds the enumeration guards."""


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class InvariantViolation(AssertionError):
    """A checked mathematical invariant failed; indicates a bug."""
