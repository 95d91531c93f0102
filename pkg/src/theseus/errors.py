"""Exception types shared across the package."""


class GraphError(ValueError):
    """Invalid graph parameters or edge manipulation."""


class DegenerateStateError(RuntimeError):
    """Every conditioned amplitude vanished; the state (and any fidelity) is undefined."""


class UndefinedFidelityError(DegenerateStateError):
    """Fidelity requested for a state with zero norm."""


class InvalidStateError(ValueError):
    """A state vector that violates its preconditions (e.g. not normalized)."""


class ParseError(ValueError):
    """Target expression syntax error, carrying the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SchemaError(ValueError):
    """Graph document violates the JSON schema; `path` points at the bad field."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class SearchFailedError(RuntimeError):
    """No qualified solution was found; `solution` holds the best effort."""

    def __init__(self, message: str, solution=None):
        super().__init__(message)
        self.solution = solution
