"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-range input (bad file, unknown node, invalid parameter)."""


class ContractError(RuntimeError):
    """A caller violated a documented precondition, e.g. scoring a disconnected subgraph."""


class PrivacyError(Exception):
    """A participant record carried data that must never leave the owner."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field
