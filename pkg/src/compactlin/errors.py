"""Exception hierarchy shared by all compactlin modules."""


class CompactLinError(Exception):
    """Base class for errors raised by compactlin."""


class SizeExceeded(CompactLinError):
    pass


class SupportsNotDisjoint(CompactLinError):
    pass


class PlanInvalid(CompactLinError):
    pass


class SquarePairRejected(CompactLinError):
    pass


class RegimeMismatch(CompactLinError):
    pass


class InconsistentSpec(CompactLinError):
    pass


class NodeBudgetExceeded(CompactLinError):
    pass


class SolverError(CompactLinError):
    """The exact solver reached a state that should be impossible."""


class ValidationError(CompactLinError):
    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(f"{i.code}: {i.message}" for i in self.issues))


class ParseError(CompactLinError):
    """Raised with a list of ``(line, code, message)`` diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__(
            "; ".join(f"line {ln}: {code}: {msg}" for ln, code, msg in self.diagnostics)
        )
