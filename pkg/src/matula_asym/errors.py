"""Exception hierarchy shared by the library and the CLI."""


class MatulaAsymError(Exception):
    """Base class for all errors raised by this package."""


class CapacityError(MatulaAsymError):
    """A query needs primes beyond what the configured table can answer."""


class DomainError(MatulaAsymError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ContractError(MatulaAsymError, ValueError):
    """A documented precondition (size cap, parameter shape) was violated."""


class ParseError(MatulaAsymError, ValueError):
    """Malformed tree notation; ``position`` is the 0-based offending index."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position
