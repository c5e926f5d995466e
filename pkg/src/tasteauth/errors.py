"""Exception hierarchy shared across the package."""


class TasteAuthError(Exception):
    """Base class for all package errors."""


class ValidationError(TasteAuthError):
    """Input violates a declared bound or enum (bad rating value, bad category, ...)."""


class DuplicateError(ValidationError):
    """An entity that must be unique already exists."""


class NotFoundError(TasteAuthError):
    """Referenced entity does not exist."""


class StateError(TasteAuthError):
    """Operation not valid in the current lifecycle state (out-of-order screen,
    completed or expired session, revision while a session is open, ...)."""


class IneligibleError(TasteAuthError):
    """Portfolio cannot sustain challenge generation under the given policy."""

    def __init__(self, reasons):
        self.reasons = list(reasons)
        super().__init__("portfolio ineligible: " + "; ".join(self.reasons))


class InfeasibleError(TasteAuthError):
    """Challenge generation could not satisfy its constraints."""
