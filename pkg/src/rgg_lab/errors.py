"""Exception types shared across the package."""


class UsageError(ValueError):
    """Invalid arguments or configuration (CLI exit code 2)."""


class RegimeError(UsageError):
    """Parameters fall outside the asymptotic regime a formula needs."""


class ResourceError(RuntimeError):
    """A configuration exceeds the memory guardrail (CLI exit code 3)."""
