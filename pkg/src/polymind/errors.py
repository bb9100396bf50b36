"""Exception types shared across the engine."""


class PolymindError(Exception):
    """Base class for all engine errors."""


class UnknownIdError(PolymindError):
    def __init__(self, kind: str, ident: str):
        self.kind = kind
        self.ident = ident
        super().__init__(f"unknown {kind}: {ident}")


class DuplicateEdgeError(PolymindError):
    pass


class InvalidOperationError(PolymindError):
    """Operation not allowed in the current state (wrong phase, wrong mode, bad geometry)."""


class ArityError(PolymindError):
    """Placeholder count and supplied texts disagree."""


class ValidationError(PolymindError):
    """A task spec failed validation; carries the violation list."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


class ProviderError(PolymindError):
    """LLM transport failure after the retry budget is exhausted."""


class ParseError(PolymindError):
    """Completion text does not satisfy the output contract."""


class PersistenceError(PolymindError):
    """Document or event-log file cannot be read."""


class SchemaVersionError(PersistenceError):
    pass


class TraceError(PolymindError):
    """Malformed simulation trace."""


class ConfigError(PolymindError):
    """Service misconfiguration detected at startup."""
