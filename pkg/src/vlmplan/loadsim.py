"""Byte accounting for parallelism-aware data loading.

Ranks that share a data-parallel replica (the pp x tp block) consume the
same samples, so a naive loader reads the same bytes once per rank. The
optimized loader has a single reader per replica broadcast metadata to the
rest, and filters each device's image batch down to its own shard before
the host-to-device copy. Everything here is arithmetic; no I/O happens.
"""

from dataclasses import dataclass
from typing import Sequence

from .balance import Assignment
from .errors import InvalidInputError


@dataclass(frozen=True)
class Topology:
    """Data-parallel x pipeline-parallel x tensor-parallel device layout."""

    dp: int
    pp: int
    tp: int

    def __post_init__(self):
        if self.dp < 1 or self.pp < 1 or self.tp < 1:
            raise InvalidInputError(f"parallel widths must be positive, got {self}")

    @property
    def world(self) -> int:
        return self.dp * self.pp * self.tp


@dataclass(frozen=True)
class IoReport:
    """Read and transfer volumes for one training batch.

    PCIe figures model the encoder's pure data-parallel sharding: before
    filtering every device would copy the full image batch; after filtering
    each copies only its own shard. ``pcie_bytes_after_filter`` is the mean
    per-device volume (exactly before / world); the per-device breakdown
    follows the actual image partition.
    """

    naive_read_bytes: int
    optimized_read_bytes: int
    broadcast_messages: int
    pcie_bytes_before_filter: int
    pcie_bytes_after_filter: float
    pcie_bytes_per_device: tuple[int, ...]
    prefetch_overlap: bool = True


def round_robin_partition(sample_count: int, world: int) -> list[list[int]]:
    """Default image-to-device partition: sample i goes to device i % world."""
    return [list(range(d, sample_count, world)) for d in range(world)]


def partition_from_assignment(
    assignment: Assignment, sample_ids: Sequence[str]
) -> list[list[int]]:
    """Turn a balancer assignment over sample ids into an index partition."""
    index = {sid: i for i, sid in enumerate(sample_ids)}
    if len(index) != len(sample_ids):
        raise InvalidInputError("sample ids must be unique")
    return [[index[sid] for sid in ids] for ids in assignment.device_items]


def simulate_io(
    topology: Topology,
    bytes_per_dp_rank: int,
    image_bytes_per_sample: Sequence[int],
    partition: Sequence[Sequence[int]] | None = None,
) -> IoReport:
    """Quantify bytes saved by single-reader broadcast and image filtering.

    ``bytes_per_dp_rank`` is one replica's share of the batch on disk;
    ``image_bytes_per_sample`` are the decoded image payloads to shard
    across the whole world. ``partition`` overrides the round-robin
    image-to-device split (one index list per device, covering every
    sample exactly once).
    """
    if bytes_per_dp_rank < 0:
        raise InvalidInputError("bytes_per_dp_rank must be non-negative")
    if any(b < 0 for b in image_bytes_per_sample):
        raise InvalidInputError("image byte sizes must be non-negative")
    world = topology.world
    if partition is None:
        partition = round_robin_partition(len(image_bytes_per_sample), world)
    else:
        if len(partition) != world:
            raise InvalidInputError(
                f"partition has {len(partition)} devices, topology world is {world}"
            )
        flat = sorted(i for group in partition for i in group)
        if flat != list(range(len(image_bytes_per_sample))):
            raise InvalidInputError("partition must cover every sample exactly once")
    per_device = tuple(
        sum(image_bytes_per_sample[i] for i in group) for group in partition
    )
    before = sum(image_bytes_per_sample)
    replica_size = topology.pp * topology.tp
    return IoReport(
        naive_read_bytes=world * bytes_per_dp_rank,
        optimized_read_bytes=topology.dp * bytes_per_dp_rank,
        broadcast_messages=topology.dp * (replica_size - 1),
        pcie_bytes_before_filter=before,
        pcie_bytes_after_filter=before / world,
        pcie_bytes_per_device=per_device,
    )
