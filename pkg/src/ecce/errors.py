"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input data or parameters violate a precondition."""


class DegenerateScoresError(ValidationError):
    """All scores lie in {0, 1}, so the null standard deviation vanishes."""
