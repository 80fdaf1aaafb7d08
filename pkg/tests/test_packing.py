import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from vlmplan.errors import InvalidInputError, OversizeItemError
from vlmplan.packing import PackItem, attention_allowed, pack_ffd


def items_from_lengths(lengths):
    return [PackItem(id=f"item{i:03d}", length=n) for i, n in enumerate(lengths)]


def optimal_bin_count(lengths, capacity):
    """Exact minimum bin count by exhaustive placement (with safe pruning)."""
    lengths = sorted(lengths, reverse=True)
    best = len(lengths)
    bins: list[int] = []

    def place(i):
        nonlocal best
        if len(bins) >= best:
            return
        if i == len(lengths):
            best = len(bins)
            return
        length = lengths[i]
        seen = set()
        for b in range(len(bins)):
            if bins[b] + length <= capacity and bins[b] not in seen:
                seen.add(bins[b])
                bins[b] += length
                place(i + 1)
                bins[b] -= length
        bins.append(length)
        place(i + 1)
        bins.pop()

    if lengths:
        place(0)
        return best
    return 0


def test_ffd_trace_example():
    plan = pack_ffd(items_from_lengths([4, 2, 3]), max_len=6)
    assert [[it.length for it in contents] for contents in plan.bins] == [[4, 2], [3]]


def test_empty_input_yields_zero_bins():
    plan = pack_ffd([], max_len=6)
    assert plan.bins == ()


def test_oversize_item_rejected_by_id():
    with pytest.raises(OversizeItemError) as exc_info:
        pack_ffd([PackItem(id="big", length=7)], max_len=6)
    assert exc_info.value.item_id == "big"
    assert "big" in str(exc_info.value)


def test_max_len_validation():
    with pytest.raises(InvalidInputError):
        pack_ffd([], max_len=0)
    with pytest.raises(InvalidInputError):
        PackItem(id="x", length=0)


def test_segment_ends_are_prefix_sums():
    plan = pack_ffd(items_from_lengths([4, 2, 3]), max_len=6)
    assert plan.segment_ends == ((4, 6), (3,))
    assert plan.bin_length(0) == 6 and plan.free_capacity(0) == 0
    assert plan.bin_length(1) == 3 and plan.free_capacity(1) == 3


def test_attention_segments():
    # Bin with segments of lengths [4, 2].
    plan = pack_ffd(items_from_lengths([4, 2]), max_len=6)
    assert attention_allowed(plan, 0, 0, 3) is True
    assert attention_allowed(plan, 0, 3, 4) is False
    assert attention_allowed(plan, 0, 4, 5) is True


def test_attention_out_of_range():
    plan = pack_ffd(items_from_lengths([4, 2]), max_len=6)
    with pytest.raises(InvalidInputError):
        attention_allowed(plan, 0, 0, 6)
    with pytest.raises(InvalidInputError):
        attention_allowed(plan, 1, 0, 0)
    with pytest.raises(InvalidInputError):
        attention_allowed(plan, 0, -1, 0)


def test_mask_is_block_diagonal():
    plan = pack_ffd(items_from_lengths([3, 2, 1]), max_len=6)
    (ends,) = plan.segment_ends
    total = ends[-1]
    mask = [[attention_allowed(plan, 0, i, j) for j in range(total)] for i in range(total)]
    # Symmetric and reflexive.
    for i in range(total):
        assert mask[i][i]
        for j in range(total):
            assert mask[i][j] == mask[j][i]
    # Exactly the blocks induced by segment boundaries.
    starts = (0,) + ends[:-1]
    for lo, hi in zip(starts, ends):
        for i in range(lo, hi):
            for j in range(total):
                assert mask[i][j] == (lo <= j < hi)


@given(
    st.lists(st.integers(min_value=1, max_value=20), max_size=30),
    st.integers(min_value=20, max_value=40),
)
def test_conservation_and_capacity(lengths, max_len):
    items = items_from_lengths(lengths)
    plan = pack_ffd(items, max_len)
    packed = [it for contents in plan.bins for it in contents]
    assert Counter(it.id for it in packed) == Counter(it.id for it in items)
    assert sum(it.length for it in packed) == sum(lengths)
    for b in range(len(plan.bins)):
        assert plan.bin_length(b) <= max_len


@settings(deadline=None)
@given(
    st.integers(min_value=2, max_value=8).flatmap(
        lambda cap: st.tuples(
            st.just(cap),
            st.lists(st.integers(min_value=1, max_value=cap), max_size=8),
        )
    )
)
def test_ffd_within_one_of_optimal(cap_and_lengths):
    capacity, lengths = cap_and_lengths
    plan = pack_ffd(items_from_lengths(lengths), capacity)
    assert len(plan.bins) <= optimal_bin_count(lengths, capacity) + 1


def test_determinism_under_input_order():
    lengths = [5, 3, 3, 2, 2, 2, 1]
    items = items_from_lengths(lengths)
    shuffled = items[:]
    random.Random(0).shuffle(shuffled)
    assert pack_ffd(items, 6) == pack_ffd(shuffled, 6)
