"""Exception types. The CLI maps each one to a fixed exit code."""


class ParseError(ValueError):
    """Malformed input text; ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EngineError(ValueError):
    """Unknown engine id, or an engine lacking a flag an operation needs."""


class SupportTooLarge(ValueError):
    """An exhaustive search was requested on too large a support."""


class HypothesisError(ValueError):
    """A certified evaluation was requested but a hypothesis fails."""


class ConstructionError(ValueError):
    """A witness construction cannot be carried out with the given data."""
