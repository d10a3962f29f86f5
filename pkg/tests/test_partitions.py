import itertools

import pytest

from fracgame import (
    CapExceeded,
    DimensionMismatch,
    InvalidPartition,
    bell_number,
    enumerate_partitions,
    fission_neighborhood,
    fusion_neighborhood,
    grand_partition,
    is_strict_refinement,
    make_partition,
    partition_from_label,
    partition_label,
    singleton_partition,
)

BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140]


def test_bell_numbers():
    assert [bell_number(n) for n in range(9)] == BELL


def test_enumeration_counts_match_bell():
    for n in range(1, 8):
        parts = list(enumerate_partitions(n))
        assert len(parts) == BELL[n]
        assert len(set(parts)) == BELL[n]


def test_enumeration_is_canonical_and_covers():
    for part in enumerate_partitions(5):
        assert list(part) == sorted(part, key=lambda m: m & -m)
        union = 0
        total = 0
        for block in part:
            union |= block
            total += block.bit_count()
        assert union == 0b11111 and total == 5


def test_enumeration_order_is_stable():
    labels = [partition_label(p, "abc") for p in enumerate_partitions(3)]
    assert labels == ["a,b,c", "a,b|c", "a,c|b", "a|b,c", "a|b|c"]


def test_cap_guard():
    with pytest.raises(CapExceeded):
        list(enumerate_partitions(13))
    with pytest.raises(CapExceeded):
        list(enumerate_partitions(7, cap=6))
    assert len(list(enumerate_partitions(7, cap=7))) == bell_number(7)


def test_make_partition_normalizes_and_checks():
    assert make_partition([4, 3], 3) == (3, 4)
    with pytest.raises(InvalidPartition):
        make_partition([3, 6], 3)  # overlap
    with pytest.raises(InvalidPartition):
        make_partition([3], 3)  # missing player
    assert singleton_partition(3) == (1, 2, 4)
    assert grand_partition(3) == (7,)


def test_labels_round_trip():
    players = ("a", "b", "c", "d")
    for part in enumerate_partitions(4):
        text = partition_label(part, players)
        assert partition_from_label(text, players) == part


def test_fission_neighborhood_matches_refinement_oracle():
    for n in range(2, 6):
        everything = list(enumerate_partitions(n))
        for part in everything:
            got = fission_neighborhood(part)
            want = {q for q in everything if is_strict_refinement(q, part)}
            assert got == want


def test_fusion_neighborhood_matches_coarsening_oracle():
    for n in range(2, 6):
        everything = list(enumerate_partitions(n))
        for part in everything:
            got = fusion_neighborhood(part)
            want = {q for q in everything if is_strict_refinement(part, q)}
            assert got == want


def test_neighborhood_duality():
    everything = list(enumerate_partitions(5))
    for p, q in itertools.combinations(everything, 2):
        assert (q in fission_neighborhood(p)) == (p in fusion_neighborhood(q))


def test_refinement_is_a_strict_partial_order():
    parts = list(enumerate_partitions(4))
    for p in parts:
        assert not is_strict_refinement(p, p)
    for p, q, r in itertools.permutations(parts, 3):
        if is_strict_refinement(p, q) and is_strict_refinement(q, r):
            assert is_strict_refinement(p, r)


def test_extremes():
    n = 4
    assert fission_neighborhood(grand_partition(n)) | {grand_partition(n)} == set(
        enumerate_partitions(n)
    )
    assert fission_neighborhood(singleton_partition(n)) == set()
    assert fusion_neighborhood(singleton_partition(n)) | {singleton_partition(n)} == set(
        enumerate_partitions(n)
    )
    assert fusion_neighborhood(grand_partition(n)) == set()


def test_refinement_requires_same_player_set():
    with pytest.raises(DimensionMismatch):
        is_strict_refinement((1, 2), (3, 4))
