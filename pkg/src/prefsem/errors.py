"""Exception types shared across the package."""


class NotInDomainError(KeyError):
    """A choice function was evaluated on a set outside its domain family."""


class KappaOutOfRangeError(ValueError):
    pass


class ClaimViolatedError(AssertionError):
    """A self-test over a reconstructed example did not reproduce a claim.

    ``claim`` names the first failing claim, ``report`` carries the full
    verification report.
    """

    def __init__(self, claim: str, report=None) -> None:
        super().__init__(f"claim ({claim}) violated")
        self.claim = claim
        self.report = report


class AtomUnknownError(ValueError):
    pass


class SearchSpaceTooLargeError(ValueError):
    def __init__(self, cardinality: int, limit: int) -> None:
        super().__init__(f"search space has {cardinality} instances (limit {limit})")
        self.cardinality = cardinality
        self.limit = limit


class PreconditionError(ValueError):
    """An operation was called on input violating its documented precondition."""
