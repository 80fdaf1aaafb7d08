"""First-fit-decreasing packing of token sequences.

Several items' token runs are concatenated into fixed-capacity packed
sequences ("bins"). Each item occupies one contiguous segment, and attention
is only allowed between positions of the same segment, so the induced mask
is block-diagonal.
"""

from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidInputError, OversizeItemError


@dataclass(frozen=True)
class PackItem:
    id: str
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise InvalidInputError(f"item {self.id!r} has non-positive length {self.length}")


@dataclass(frozen=True)
class PackPlan:
    """Assignment of items to packed sequences.

    ``segment_ends[b]`` holds the cumulative end offset of every segment in
    bin ``b``; the last entry is the bin's used length.
    """

    max_len: int
    bins: tuple[tuple[PackItem, ...], ...]
    segment_ends: tuple[tuple[int, ...], ...]

    def bin_length(self, bin_index: int) -> int:
        ends = self.segment_ends[bin_index]
        return ends[-1] if ends else 0

    def free_capacity(self, bin_index: int) -> int:
        return self.max_len - self.bin_length(bin_index)


def pack_ffd(items: Iterable[PackItem], max_len: int) -> PackPlan:
    """Pack items first-fit decreasing.

    Items are sorted by length descending (ties by id ascending) and each is
    placed into the lowest-indexed bin with room, opening a new bin when
    none fits. Raises OversizeItemError for any item longer than max_len.
    """
    if max_len < 1:
        raise InvalidInputError(f"max_len must be positive, got {max_len}")
    items = list(items)
    for item in items:
        if item.length > max_len:
            raise OversizeItemError(item.id, item.length, max_len)
    bins: list[list[PackItem]] = []
    free: list[int] = []
    for item in sorted(items, key=lambda it: (-it.length, it.id)):
        for b, capacity in enumerate(free):
            if capacity >= item.length:
                bins[b].append(item)
                free[b] -= item.length
                break
        else:
            bins.append([item])
            free.append(max_len - item.length)
    ends = []
    for contents in bins:
        total = 0
        bin_ends = []
        for item in contents:
            total += item.length
            bin_ends.append(total)
        ends.append(tuple(bin_ends))
    return PackPlan(
        max_len=max_len,
        bins=tuple(tuple(contents) for contents in bins),
        segment_ends=tuple(ends),
    )


def segment_of(ends: Sequence[int], position: int) -> int:
    """Index of the segment containing a position, given cumulative ends."""
    return bisect_right(ends, position)


def attention_allowed(plan: PackPlan, bin_index: int, i: int, j: int) -> bool:
    """Whether positions i and j of a packed bin may attend to each other.

    True iff both positions fall inside the same source item's segment.
    """
    if not 0 <= bin_index < len(plan.bins):
        raise InvalidInputError(f"bin index {bin_index} out of range")
    ends = plan.segment_ends[bin_index]
    total = ends[-1] if ends else 0
    if not (0 <= i < total and 0 <= j < total):
        raise InvalidInputError(
            f"positions ({i}, {j}) out of range for bin of length {total}"
        )
    return segment_of(ends, i) == segment_of(ends, j)
