import random
from fractions import Fraction

import pytest

from fracgame import STRONG, boundary_contains, enumerate_partitions, make_game, members
from fracgame.games import geq


@pytest.fixture
def additive3():
    """Every coalition worth the sum of its singletons."""
    return make_game(3, {1: 1, 2: 1, 4: 1, 3: 2, 5: 2, 6: 2, 7: 3})


@pytest.fixture
def superadditive3():
    """Singletons 1, pairs 3, grand 6: strictly superadditive."""
    return make_game(3, {1: 1, 2: 1, 4: 1, 3: 3, 5: 3, 6: 3, 7: 6})


@pytest.fixture
def pairy3():
    """Pairs are worth proportionally more than the grand coalition."""
    return make_game(3, {1: 2, 2: 2, 4: 2, 3: 3, 5: 3, 6: 3, 7: 4})


@pytest.fixture
def g4gap():
    """Pairs {a,b} and {c,d} jointly demand more than the whole: the
    all-constraints core is empty but the partition-wise core is not."""
    return make_game(
        4,
        {
            1: 0, 2: 0, 4: 0, 8: 0,
            3: 10, 5: 2, 9: 2, 6: 2, 10: 2, 12: 10,
            7: 3, 11: 3, 13: 3, 14: 3,
            15: 12,
        },
    )


def random_exact_game(rng: random.Random, n: int):
    """Arbitrary valid rational-valued game."""
    values = {}
    for mask in range(1, 1 << n):
        if mask.bit_count() == 1:
            values[mask] = Fraction(rng.randrange(0, 7), rng.randrange(1, 4))
        else:
            values[mask] = Fraction(rng.randrange(1, 25), rng.randrange(1, 4))
    return make_game(n, values)


def random_float_game(rng: random.Random, n: int):
    values = {}
    for mask in range(1, 1 << n):
        if mask.bit_count() == 1:
            values[mask] = rng.uniform(0.0, 2.0)
        else:
            values[mask] = rng.uniform(0.1, 8.0) * mask.bit_count()
    return make_game(n, values, mode="float", tol=1e-9)


# ---------------------------------------------------------------------------
# naive oracles shared by the stability and acceptance tests; these restate
# the definitions with literal quantifiers instead of the library's DP


def naive_weak_core_contains(game, shares):
    if not boundary_contains(game, game.grand, shares):
        return False
    sums = {c: sum(shares[i] for i in members(c)) for c in range(1, 1 << game.n)}
    v_n = game.values[game.grand]
    for partition in enumerate_partitions(game.n):
        if partition == (game.grand,):
            continue
        if all(not geq(v_n * sums[c], game.values[c], game.tol) for c in partition):
            return False
    return True


def remap_local(local_mask, mem):
    out = 0
    for j, i in enumerate(mem):
        if local_mask >> j & 1:
            out |= 1 << i
    return out


def naive_fission_resistant(game, partition, shares, kind):
    sums = {c: sum(shares[i] for i in members(c)) for c in range(1, 1 << game.n)}
    for block in partition:
        mem = members(block)
        if len(mem) < 2:
            continue
        v_b = game.values[block]

        def covered(piece):
            return geq(v_b * sums[piece], game.values[piece], game.tol)

        if kind == STRONG:
            for local in range(1, (1 << len(mem)) - 1):
                if not covered(remap_local(local, mem)):
                    return False
        else:
            for local_part in enumerate_partitions(len(mem)):
                pieces = [remap_local(q, mem) for q in local_part]
                if pieces == [block]:
                    continue
                if not any(covered(p) for p in pieces):
                    return False
    return True
