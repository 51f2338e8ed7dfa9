"""Shared exception types."""


class CapacityError(Exception):
    """An exhaustive search would exceed the configured size cap."""


class VerificationError(Exception):
    """A builder's self-check failed (construction bug, not user error)."""


class ExperimentError(Exception):
    """A Monte Carlo trial aborted; the message carries the trial index."""
