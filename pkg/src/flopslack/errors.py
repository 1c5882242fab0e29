"""Exception hierarchy shared across the package."""


class FlopslackError(Exception):
    """Base class for all package errors."""


class DomainError(FlopslackError, ValueError):
    """A slack point lies outside the oracle's modeled domain."""


class CharacterizationError(FlopslackError):
    """The delay surface could not be characterized."""


class DegenerateFitError(CharacterizationError):
    """The chosen corner points do not define a unique plane."""


class ParseError(FlopslackError, ValueError):
    """Malformed input text. Carries the offending line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InfeasibleError(FlopslackError):
    """No working point assignment satisfies the timing constraints."""


class BuildError(FlopslackError):
    """The optimization model cannot be encoded as requested."""


class EnumerationLimitError(FlopslackError):
    """Brute-force enumeration would exceed its configured limit."""


class SolverLimitError(FlopslackError):
    """A solver stopped on an iteration or node limit without an answer."""
