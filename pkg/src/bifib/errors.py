"""Exception hierarchy shared by every module."""


class BifibError(Exception):
    pass


class StructuralError(BifibError, ValueError):
    """Malformed data: dangling ids, duplicate ids, wrong arity."""


class SizeLimitError(BifibError, ValueError):
    """Input exceeds the enumeration guardrails."""


class PreconditionError(BifibError, ValueError):
    pass


class VarianceError(PreconditionError):
    pass


class InconsistencyError(BifibError, RuntimeError):
    """A search that must succeed (or be unique) did not.

    Raised when supplied data claims a property (say, a cleavage of a
    fibration) that the tables contradict.
    """


class HypothesisError(PreconditionError):
    """A named hypothesis of a construction fails on the given instance."""

    def __init__(self, hypothesis: str, detail: str = ""):
        super().__init__(f"hypothesis {hypothesis!r} fails" + (f": {detail}" if detail else ""))
        self.hypothesis = hypothesis
        self.detail = detail
