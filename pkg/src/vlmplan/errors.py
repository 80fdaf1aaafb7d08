"""Exception types shared across the planning modules."""


class PlanningError(ValueError):
    """Base class for all vlmplan errors."""


class InvalidInputError(PlanningError):
    """An argument violates a documented precondition."""


class OversizeItemError(PlanningError):
    """A pack item is longer than the packed-sequence capacity."""

    def __init__(self, item_id: str, length: int, max_len: int):
        super().__init__(
            f"item {item_id!r} has length {length}, exceeding max_len {max_len}"
        )
        self.item_id = item_id
        self.length = length
        self.max_len = max_len


class SingularFitError(PlanningError):
    """The regression problem is degenerate (x values all identical)."""


class UndefinedMetricError(PlanningError):
    """A ratio metric is undefined for this input (e.g. all loads zero)."""


class RegionParseError(PlanningError):
    """Region text does not match the grammar; carries the failing byte offset."""

    def __init__(self, offset: int, message: str):
        super().__init__(f"at byte {offset}: {message}")
        self.offset = offset


class RegionRangeError(PlanningError):
    """A parsed coordinate lies outside the normalized [0, 999] range."""
