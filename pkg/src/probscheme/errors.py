"""Exception hierarchy.

Every error raised by the engine derives from :class:`ProbSchemeError`, which
is itself a :class:`ValueError`, so callers that only care about bad input can
catch ``ValueError``.
"""


class ProbSchemeError(ValueError):
    """Base class for all engine errors."""


# -- labels and schemes ------------------------------------------------------

class InvalidLabel(ProbSchemeError):
    pass


class DuplicateLabel(ProbSchemeError):
    pass


class NonPositiveMass(ProbSchemeError):
    pass


class MassNotNormalized(ProbSchemeError):
    pass


class EmptySupport(ProbSchemeError):
    pass


class EmptySequence(ProbSchemeError):
    pass


class DomainMismatch(ProbSchemeError):
    pass


class UnknownLabel(ProbSchemeError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class InexactScalar(ProbSchemeError, TypeError):
    """A float (or other inexact number) was offered where a rational is required."""


# -- bundles -----------------------------------------------------------------

class NotSurjective(ProbSchemeError):
    pass


class NotMeasurePreserving(ProbSchemeError):
    pass


class SchemeMismatch(ProbSchemeError):
    pass


# -- partitions and conditioning ---------------------------------------------

class InvalidPartition(ProbSchemeError):
    pass


class UnknownBlock(ProbSchemeError):
    pass


class NotARefinement(ProbSchemeError):
    pass


class EmptyConditioningEvent(ProbSchemeError):
    pass


class IncompleteTable(ProbSchemeError):
    pass


class UnequalBlockSizes(ProbSchemeError):
    pass


class NonUniformScheme(ProbSchemeError):
    pass


# -- statistics --------------------------------------------------------------

class DegenerateRegressor(ProbSchemeError):
    pass


class NonPositiveEpsilon(ProbSchemeError):
    pass


class CorrelatedInputs(ProbSchemeError):
    pass


class VarianceBoundViolated(ProbSchemeError):
    pass


# -- fiber products ----------------------------------------------------------

class BaseMismatch(ProbSchemeError):
    pass


class CompositionMismatch(ProbSchemeError):
    pass


class ShapeMismatch(ProbSchemeError):
    pass


class TooShort(ProbSchemeError):
    pass


class MarginalMismatch(ProbSchemeError):
    pass


# -- documents and CLI -------------------------------------------------------

class DocumentSyntaxError(ProbSchemeError):
    """Malformed document text; carries 1-based ``line`` and ``column``."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column

    def __str__(self):
        msg = super().__str__()
        if self.line is not None:
            return f"line {self.line}, column {self.column}: {msg}"
        return msg


class SemanticError(ProbSchemeError):
    """Well-formed text describing an invalid object.

    ``location`` is a JSON path into the document; ``cause`` is the engine
    error that rejected it, when there is one.
    """

    def __init__(self, message, location="$", cause=None):
        super().__init__(message)
        self.location = location
        self.cause = cause

    def __str__(self):
        name = type(self.cause).__name__ if self.cause is not None else "SemanticError"
        return f"{name} at {self.location}: {super().__str__()}"


class UnknownCommand(ProbSchemeError):
    pass
