"""Greedy cost balancing of image workloads across devices.

Items are scanned in descending cost order and each goes to the currently
least-loaded device (classic longest-processing-time scheduling). Group
balancing applies the same rule inside fixed-size contiguous device groups,
so no item ever leaves the group of its originating rank.
"""

import heapq
from dataclasses import dataclass
from typing import Iterable

from .errors import InvalidInputError, UndefinedMetricError


@dataclass(frozen=True)
class WorkItem:
    id: str
    cost: float
    origin_rank: int = 0

    def __post_init__(self):
        if not self.cost > 0:
            raise InvalidInputError(f"item {self.id!r} has non-positive cost {self.cost}")
        if self.origin_rank < 0:
            raise InvalidInputError(f"item {self.id!r} has negative origin rank")


@dataclass(frozen=True)
class Assignment:
    """Per-device item ids (in placement order) and resulting loads."""

    device_items: tuple[tuple[str, ...], ...]
    loads: tuple[float, ...]

    @property
    def device_count(self) -> int:
        return len(self.loads)

    @property
    def makespan(self) -> float:
        return max(self.loads)


def balance_lpt(items: Iterable[WorkItem], device_count: int) -> Assignment:
    """Longest-processing-time greedy assignment to the least-loaded device.

    Deterministic: cost ties sort by id ascending, load ties go to the
    lowest device index.
    """
    if device_count < 1:
        raise InvalidInputError(f"device count must be positive, got {device_count}")
    assigned: list[list[str]] = [[] for _ in range(device_count)]
    loads = [0.0] * device_count
    heap = [(0.0, d) for d in range(device_count)]
    for item in sorted(items, key=lambda it: (-it.cost, it.id)):
        load, device = heapq.heappop(heap)
        assigned[device].append(item.id)
        load += item.cost
        loads[device] = load
        heapq.heappush(heap, (load, device))
    return Assignment(
        device_items=tuple(tuple(ids) for ids in assigned),
        loads=tuple(loads),
    )


def group_balance(
    items: Iterable[WorkItem], device_count: int, group_size: int
) -> Assignment:
    """Balance each item within the contiguous device group of its origin rank."""
    if device_count < 1:
        raise InvalidInputError(f"device count must be positive, got {device_count}")
    if group_size < 1 or device_count % group_size != 0:
        raise InvalidInputError(
            f"group size {group_size} must divide device count {device_count}"
        )
    groups: list[list[WorkItem]] = [[] for _ in range(device_count // group_size)]
    for item in items:
        if not 0 <= item.origin_rank < device_count:
            raise InvalidInputError(
                f"item {item.id!r} origin rank {item.origin_rank} outside 0..{device_count - 1}"
            )
        groups[item.origin_rank // group_size].append(item)
    device_items: list[tuple[str, ...]] = []
    loads: list[float] = []
    for members in groups:
        sub = balance_lpt(members, group_size)
        device_items.extend(sub.device_items)
        loads.extend(sub.loads)
    return Assignment(device_items=tuple(device_items), loads=tuple(loads))


def imbalance(assignment: Assignment) -> float:
    """Max device load over mean device load (1.0 = perfectly balanced)."""
    if assignment.device_count < 1:
        raise InvalidInputError("assignment has no devices")
    total = sum(assignment.loads)
    if total == 0:
        raise UndefinedMetricError("imbalance is undefined when all loads are zero")
    return max(assignment.loads) / (total / assignment.device_count)
