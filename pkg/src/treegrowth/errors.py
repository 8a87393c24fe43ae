"""Error types shared by the experiment modules and mapped to CLI exit codes."""


class PreconditionError(ValueError):
    """An operation was called outside its hypotheses (e.g. S has a global fixed point)."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class InconclusiveError(RuntimeError):
    """A bounded search ended without a verdict; carries the partial evidence."""

    def __init__(self, message: str, evidence=None):
        super().__init__(message)
        self.evidence = evidence


class InvariantViolation(RuntimeError):
    """A checked postcondition failed.  This should never happen."""

    def __init__(self, message: str, evidence=None):
        super().__init__(message)
        self.evidence = evidence
