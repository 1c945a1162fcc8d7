"""Exception hierarchy shared by every part of the package."""


class MLESError(Exception):
    """Base class for all errors raised by :mod:`mles`."""


class DuplicateId(MLESError):
    pass


class SecondOutputFact(MLESError):
    pass


class UnknownFact(MLESError):
    pass


class InvalidRule(MLESError):
    """A rule is wired to itself or targets an input fact."""


class WeightSumViolation(MLESError):
    pass


class DuplicateTarget(MLESError):
    pass


class CycleIntroduced(MLESError):
    pass


class InvalidNetwork(MLESError):
    def __init__(self, message, findings=()):
        super().__init__(message)
        self.findings = list(findings)


class ParseError(MLESError):
    """Malformed input; ``location`` names the line, row or field."""

    def __init__(self, message, location=None):
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location


class MissingInput(MLESError):
    def __init__(self, fact_id):
        super().__init__(f"missing value for input fact {fact_id!r}")
        self.fact_id = fact_id


class UnexpectedInput(MLESError):
    def __init__(self, fact_id):
        super().__init__(f"{fact_id!r} is not an input fact of this network")
        self.fact_id = fact_id


class InfeasibleShape(MLESError):
    pass


class HeaderMismatch(MLESError):
    pass


class EmptySplit(MLESError):
    pass


class BadRatios(MLESError):
    pass


class UnknownLabel(MLESError):
    pass


class UnknownFeature(MLESError):
    pass
