"""Exception hierarchy shared by every raagspine module."""


class RaagSpineError(Exception):
    """Base class for all raagspine errors."""


class GraphParseError(RaagSpineError, ValueError):
    """Malformed graph file; ``line`` is 1-based (0 when not tied to a line)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        prefix = f"line {line}: " if line else ""
        super().__init__(f"{prefix}{message}")


class UnknownVertexError(RaagSpineError, KeyError):
    """A vertex or letter name that the graph does not declare."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown vertex"


class WordError(RaagSpineError, ValueError):
    """Malformed word text."""


class WordTooLongError(WordError):
    """A word exceeded a configured engineering limit."""


class PartitionError(RaagSpineError, ValueError):
    """Letters that do not form a valid Gamma-Whitehead subset or partition."""


class NestError(PartitionError):
    """Partitions that cannot be nested, or a side not expressible in a nest."""


class CommutationError(RaagSpineError):
    """Automorphisms expected to commute do not."""


class CollectionError(RaagSpineError, ValueError):
    """A collection of partitions that violates a caller precondition."""


class SearchBudgetExceeded(RaagSpineError, RuntimeError):
    """An exhaustive search ran past its configured budget."""


class TheoremViolation(RaagSpineError, AssertionError):
    """A computed result contradicts a proven statement."""
