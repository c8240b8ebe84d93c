"""Exception hierarchy.  The CLI maps these onto exit codes."""


class CRNError(Exception):
    """Base class for all toolkit errors."""


class StructuralError(CRNError):
    """Malformed network, bad partition, dimension mismatch."""


class ConfigurationError(CRNError):
    """A symbol needed for numeric evaluation is unbound."""


class EvaluationError(CRNError):
    """Numeric evaluation hit a zero denominator or a non-positive value."""


class MethodInapplicable(CRNError):
    """A method's preconditions do not hold (no translation found, unsolvable
    subnetwork, non-exclusive composition, ...)."""


class MergeContradiction(MethodInapplicable):
    """Two subnetworks force incompatible values on a shared species."""


class ParseError(CRNError):
    """Raised with the full list of diagnostics when parsing fails."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(str(first) if first else "parse error")
