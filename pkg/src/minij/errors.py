"""Exception hierarchy shared by all minij modules."""
from __future__ import annotations


class MinijError(Exception):
    """Base class for all errors raised by this package."""


class LexError(MinijError):
    def __init__(self, message, span):
        super().__init__(f"{span}: {message}")
        self.span = span


class ParseError(MinijError):
    def __init__(self, message, span):
        super().__init__(f"{span}: {message}")
        self.span = span


class ProjectError(MinijError):
    """Problems assembling a project from source and stub files."""


class DuplicateTypeError(ProjectError):
    pass


class IoError(ProjectError):
    pass


class StubBodyError(ProjectError):
    pass


class SemanticError(MinijError):
    """Name resolution or type solving failure."""


class UnresolvedSymbolError(SemanticError):
    def __init__(self, failures):
        # failures: list of (name, span) pairs
        self.failures = list(failures)
        lines = ", ".join(f"{name} at {span}" for name, span in self.failures)
        super().__init__(f"unresolved symbols: {lines}")


class AmbiguousNameError(SemanticError):
    pass


class NoApplicableMethodError(SemanticError):
    pass


class AmbiguousOverloadError(SemanticError):
    pass


class TypeSolveError(SemanticError):
    pass


class EntrypointNotFoundError(MinijError):
    pass


class EmitConsistencyError(MinijError):
    pass


class BudgetExceededError(MinijError):
    pass


class UnsupportedStubCallError(MinijError):
    pass


class IndexMismatchError(MinijError):
    pass
