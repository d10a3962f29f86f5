"""Stability notions for fractional solutions.

Strong/weak core membership, resistance of a solution to block fission and
of a partition to block fusion, per-partition patched cores, and the report
that assembles the stable sets.

Weak-sense predicates rest on one structural fact used throughout: once an
allocation is individually rational inside a block, singleton sub-coalitions
can never be part of an all-blocking split, so only splits whose pieces all
have two or more members need to be examined.  In particular blocks of up to
three players can never be split weakly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import linfeas
from .errors import InfeasibleSolution
from .games import (
    EXACT,
    Game,
    boundary_contains,
    check_partition,
    coalitions,
    geq,
    members,
    sample_boundary,
    solution_feasible,
    subgame,
    submasks,
)
from .partitions import (
    DEFAULT_ENUM_CAP,
    Partition,
    enumerate_partitions,
    fusion_neighborhood,
    partition_label,
)

STRONG = "strong"
WEAK = "weak"

NONEMPTY = "nonempty"
EMPTY = "empty"
UNKNOWN = "unknown"

DEFAULT_MAX_EXACT_WEAK_N = 4
DEFAULT_SAMPLES = 200


class ResistanceKind(Enum):
    STRONG_FISSION = "strong-fission"
    WEAK_FISSION = "weak-fission"
    FUSION = "fusion"


def _check_kind(kind: str) -> None:
    if kind not in (STRONG, WEAK):
        raise ValueError(f"kind must be {STRONG!r} or {WEAK!r}, got {kind!r}")


def _share_sums(shares: Sequence, n: int) -> list:
    """sums[mask] = total share of the coalition, for every mask."""
    sums = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + shares[low.bit_length() - 1]
    return sums


# ---------------------------------------------------------------------------
# membership predicates


def _has_blocking_split(game: Game, block: int, sums) -> bool:
    """Whether the block splits into >=2-member pieces that all block, i.e.
    each piece's own value exceeds its scaled in-block share.  Assumes the
    shares are individually rational within the block."""
    k = block.bit_count()
    if k <= 3:
        return False
    v_b = game.values[block]
    tol = game.tol
    values = game.values
    blocking = {}

    def is_blocking(piece: int) -> bool:
        got = blocking.get(piece)
        if got is None:
            got = not geq(v_b * sums[piece], values[piece], tol)
            blocking[piece] = got
        return got

    splittable = {0: True}

    def splits(mask: int) -> bool:
        got = splittable.get(mask)
        if got is not None:
            return got
        low = mask & -mask
        rest = mask ^ low
        result = False
        # every piece must contain the lowest member, have >=2 players, and
        # stay a proper part of the block
        sub = rest
        while sub:
            piece = sub | low
            if piece != block and is_blocking(piece) and splits(mask ^ piece):
                result = True
                break
            sub = (sub - 1) & rest
        splittable[mask] = result
        return result

    return splits(block)


def core_contains(game: Game, shares: Sequence, kind: str = STRONG) -> bool:
    """Grand-coalition core membership.  Strong: every proper coalition's
    scaled share covers its value.  Weak: no partition of the players into
    proper coalitions consists entirely of blocking coalitions.  Infeasible
    share vectors simply fail."""
    _check_kind(kind)
    n = game.n
    full = game.grand
    if not boundary_contains(game, full, shares):
        return False
    if n == 1:
        return True
    sums = _share_sums(shares, n)
    v_n = game.values[full]
    tol = game.tol
    if kind == STRONG:
        values = game.values
        return all(geq(v_n * sums[c], values[c], tol) for c in submasks(full, proper=True))
    return not _has_blocking_split(game, full, sums)


def fission_resistant(game: Game, partition: Sequence[int], shares: Sequence, kind: str = STRONG) -> bool:
    """Whether no block of the partition wants to break apart.

    Strong: within every block, every proper sub-coalition's scaled share
    covers its value.  Weak: no block can be split into sub-coalitions that
    all improve on their in-block shares; equivalently, each block's local
    share vector lies in the weak core of that block's subgame.
    """
    _check_kind(kind)
    if not solution_feasible(game, partition, shares):
        raise InfeasibleSolution("allocation is not feasible for this partition")
    return _fission_resistant_feasible(game, partition, shares, kind)


def _fission_resistant_feasible(game: Game, partition, shares, kind: str) -> bool:
    sums = _share_sums(shares, game.n)
    tol = game.tol
    values = game.values
    for block in partition:
        if block.bit_count() < 2:
            continue
        if kind == STRONG:
            v_b = values[block]
            for piece in submasks(block, proper=True):
                if not geq(v_b * sums[piece], values[piece], tol):
                    return False
        elif _has_blocking_split(game, block, sums):
            return False
    return True


def fusion_resistant(game: Game, partition: Sequence[int]) -> bool:
    """Whether no group of blocks gains by merging: for every union of two
    or more blocks, the blocks' stand-alone values already cover the merged
    value."""
    check_partition(game.n, partition)
    blocks = list(partition)
    tol = game.tol
    values = game.values
    for k in range(2, len(blocks) + 1):
        for combo in combinations(blocks, k):
            union = 0
            total = 0
            for b in combo:
                union |= b
                total += values[b]
            if not geq(total, values[union], tol):
                return False
    return True


def fusion_resistant_by_total(game: Game, partition: Sequence[int]) -> bool:
    """Equivalent formulation: the summed block value does not increase into
    any strict coarsening.  (Group differences telescope into single-merger
    differences, so this agrees with fusion_resistant.)"""
    check_partition(game.n, partition)
    values = game.values
    tol = game.tol
    total = sum(values[b] for b in partition)
    for coarser in fusion_neighborhood(tuple(partition)):
        if not geq(total, sum(values[b] for b in coarser), tol):
            return False
    return True


def is_stable(game: Game, partition: Sequence[int], shares: Sequence, kind: str = STRONG) -> bool:
    """Feasible, fission-resistant in the requested sense, and fusion-
    resistant.  Infeasible solutions are simply not stable."""
    _check_kind(kind)
    if not solution_feasible(game, partition, shares):
        return False
    return _fission_resistant_feasible(game, partition, shares, kind) and fusion_resistant(
        game, partition
    )


# ---------------------------------------------------------------------------
# core regions


@dataclass(frozen=True)
class CoreRegion:
    status: str
    witness: tuple | None = None
    method: str = ""


def _one(game: Game):
    return 1 if game.mode == EXACT else 1.0


def _exact_lower_bounds(game: Game, block: int) -> list[Fraction]:
    v_b = Fraction(game.values[block])
    return [Fraction(game.values[1 << i]) / v_b for i in members(block)]


def boundary_system(game: Game, block: int) -> linfeas.LinearSystem:
    """The split simplex of a block as a linear system over local variables.
    Float values are converted exactly; no tolerance is baked in, so region
    verdicts are exact for the stored values."""
    mem = members(block)
    k = len(mem)
    lbs = _exact_lower_bounds(game, block)
    return linfeas.linear_system(k, lbs, ((1 << k) - 1,))


def core_system(game: Game, kind_masks=None) -> linfeas.LinearSystem:
    """Grand-coalition split simplex plus scaled-share halfspaces for the
    given coalitions (default: all proper ones, the strong core)."""
    n = game.n
    full = game.grand
    lbs = _exact_lower_bounds(game, full)
    v_n = Fraction(game.values[full])
    if kind_masks is None:
        kind_masks = [c for c in coalitions(n) if c != full]
    hs = [(1, c, Fraction(game.values[c]) / v_n) for c in kind_masks]
    return linfeas.linear_system(n, lbs, (full,), hs)


def _centered_boundary_point(game: Game, block: int) -> tuple | None:
    """Max-slack point of a bare split simplex, computed in closed form:
    spread the leftover evenly.  None when the simplex is empty."""
    lbs = _exact_lower_bounds(game, block)
    s = 1 - sum(lbs)
    if s < 0:
        return None
    k = len(lbs)
    point = tuple(lb + Fraction(s, k) for lb in lbs)
    if game.mode == EXACT:
        return point
    return tuple(float(x) for x in point)


def _finish_witness(game: Game, point) -> tuple:
    if game.mode == EXACT:
        return tuple(point)
    return tuple(float(x) for x in point)


def core_region(
    game: Game,
    kind: str = STRONG,
    *,
    max_exact_weak_n: int = DEFAULT_MAX_EXACT_WEAK_N,
    samples: int = DEFAULT_SAMPLES,
    rng: random.Random | None = None,
    canonical_witness: bool = True,
) -> CoreRegion:
    """Decide (non)emptiness of the requested core and produce a witness.

    The strong core is a polytope, decided exactly by LP; its canonical
    witness maximizes the minimum constraint slack.  The weak core is a union
    of polytopes: up to ``max_exact_weak_n`` players it is resolved exactly
    by a search over satisfied-coalition sets, beyond that by the strong-core
    shortcut and random sampling, answering UNKNOWN rather than EMPTY when
    nothing is found.
    """
    _check_kind(kind)
    n = game.n
    if n == 1:
        return CoreRegion(NONEMPTY, (_one(game),), "singleton")
    full = game.grand
    if kind == STRONG:
        if n == 2:
            point = _centered_boundary_point(game, full)
            if point is None:
                return CoreRegion(EMPTY, None, "boundary")
            return CoreRegion(NONEMPTY, point, "boundary")
        system = core_system(game)
        point = linfeas.feasible(system)
        if point is None:
            return CoreRegion(EMPTY, None, "lp")
        if canonical_witness:
            point, _ = linfeas.max_slack_point(system)
        return CoreRegion(NONEMPTY, _finish_witness(game, point), "lp")
    # weak core
    if n <= 3:
        point = _centered_boundary_point(game, full)
        if point is None:
            return CoreRegion(EMPTY, None, "boundary")
        return CoreRegion(NONEMPTY, point, "boundary")
    strong_point = linfeas.feasible(core_system(game))
    if strong_point is not None:
        return CoreRegion(NONEMPTY, _finish_witness(game, strong_point), "strong-subset")
    if n <= max_exact_weak_n:
        return _weak_region_exact(game, canonical_witness)
    if rng is None:
        rng = random.Random(0)
    for _ in range(samples):
        f = sample_boundary(game, full, rng)
        if f is None:
            return CoreRegion(EMPTY, None, "boundary")
        if core_contains(game, f, WEAK):
            return CoreRegion(NONEMPTY, f, f"sampled({samples})")
    return CoreRegion(UNKNOWN, None, f"sampled({samples})")


def _weak_region_exact(game: Game, canonical_witness: bool) -> CoreRegion:
    """Exhaustive search over which block of each non-grand partition gets a
    satisfied constraint.  A branch commits a coalition's halfspace; pruning
    happens on infeasible commitments and on already-failed states."""
    n = game.n
    full = game.grand
    v_n = Fraction(game.values[full])
    ratio = {c: Fraction(game.values[c]) / v_n for c in coalitions(n) if c != full}
    base = boundary_system(game, full)
    start = linfeas.feasible(base)
    if start is None:
        return CoreRegion(EMPTY, None, "boundary")
    parts = [p for p in enumerate_partitions(n) if len(p) > 1]

    def point_satisfies(point, sums_cache, c):
        total = sums_cache.get(c)
        if total is None:
            total = sum(point[i] for i in members(c))
            sums_cache[c] = total
        return total >= ratio[c]

    def system_for(committed):
        hs = [(1, c, ratio[c]) for c in sorted(committed)]
        return linfeas.linear_system(n, base.lower, base.blocks, hs)

    failed: set[tuple[int, frozenset]] = set()

    def search(idx, committed, point, sums_cache):
        if idx == len(parts):
            return committed, point
        blocks = parts[idx]
        if any(b in committed for b in blocks):
            return search(idx + 1, committed, point, sums_cache)
        ordered = sorted(blocks, key=lambda b: not point_satisfies(point, sums_cache, b))
        for b in ordered:
            nxt = committed | {b}
            key = (idx + 1, nxt)
            if key in failed:
                continue
            if point_satisfies(point, sums_cache, b):
                result = search(idx + 1, nxt, point, sums_cache)
            else:
                fresh = linfeas.feasible(system_for(nxt))
                if fresh is None:
                    failed.add(key)
                    continue
                result = search(idx + 1, nxt, fresh, {})
            if result is not None:
                return result
            failed.add(key)
        return None

    result = search(0, frozenset(), start, {})
    if result is None:
        return CoreRegion(EMPTY, None, "exact-search")
    committed, point = result
    if canonical_witness:
        point, _ = linfeas.max_slack_point(system_for(committed))
    return CoreRegion(NONEMPTY, _finish_witness(game, point), "exact-search")


# ---------------------------------------------------------------------------
# patched cores and stable sets


@dataclass(frozen=True)
class PatchedCore:
    partition: Partition
    status: str
    witness: tuple | None
    block_regions: tuple[CoreRegion, ...]


def patched_core(
    game: Game,
    partition: Sequence[int],
    kind: str = STRONG,
    *,
    max_exact_weak_n: int = DEFAULT_MAX_EXACT_WEAK_N,
    samples: int = DEFAULT_SAMPLES,
    rng: random.Random | None = None,
    canonical_witness: bool = True,
) -> PatchedCore:
    """Blockwise product of cores: each block's subgame must have a nonempty
    core of the requested kind.  Any empty block makes the whole product
    empty; otherwise any unresolved block makes it UNKNOWN."""
    _check_kind(kind)
    check_partition(game.n, partition)
    partition = tuple(partition)
    regions = []
    shares: list = [None] * game.n
    status = NONEMPTY
    for block in partition:
        if block.bit_count() == 1:
            region = CoreRegion(NONEMPTY, (_one(game),), "singleton")
        else:
            region = core_region(
                subgame(game, block),
                kind,
                max_exact_weak_n=max_exact_weak_n,
                samples=samples,
                rng=rng,
                canonical_witness=canonical_witness,
            )
        regions.append(region)
        if region.status == EMPTY:
            status = EMPTY
        elif region.status == UNKNOWN and status != EMPTY:
            status = UNKNOWN
        elif region.witness is not None:
            for j, i in enumerate(members(block)):
                shares[i] = region.witness[j]
    witness = tuple(shares) if status == NONEMPTY else None
    return PatchedCore(partition, status, witness, tuple(regions))


@dataclass(frozen=True)
class PartitionRecord:
    partition: Partition
    strong: PatchedCore
    weak: PatchedCore
    fusion_resistant: bool


@dataclass(frozen=True)
class StabilityReport:
    n: int
    players: tuple[str, ...]
    digest: str
    records: tuple[PartitionRecord, ...]

    def partitions_with(self, kind: str, status: str = NONEMPTY) -> list[Partition]:
        side = {STRONG: lambda r: r.strong, WEAK: lambda r: r.weak}[kind]
        return [r.partition for r in self.records if side(r).status == status]

    def fusion_resistant_partitions(self) -> list[Partition]:
        return [r.partition for r in self.records if r.fusion_resistant]

    def stable(self, kind: str) -> list[tuple[Partition, tuple]]:
        """Partitions carrying a patched core of the requested kind that are
        also fusion-resistant, with their witnesses."""
        out = []
        for r in self.records:
            patched = r.strong if kind == STRONG else r.weak
            if r.fusion_resistant and patched.status == NONEMPTY:
                out.append((r.partition, patched.witness))
        return out

    def unknown(self, kind: str) -> list[Partition]:
        return self.partitions_with(kind, UNKNOWN)

    def most_consolidated(self, kind: str = WEAK) -> Partition | None:
        """Stable partition with the fewest blocks; ties broken by canonical
        label order."""
        best = None
        for partition, _ in self.stable(kind):
            key = (len(partition), partition_label(partition, self.players))
            if best is None or key < best[0]:
                best = (key, partition)
        return None if best is None else best[1]

    def to_dict(self) -> dict:
        def num(x):
            if isinstance(x, Fraction):
                return str(x)
            return x

        def region(r: CoreRegion) -> dict:
            return {
                "status": r.status,
                "method": r.method,
                "witness": None if r.witness is None else [num(x) for x in r.witness],
            }

        records = []
        for r in self.records:
            records.append(
                {
                    "partition": partition_label(r.partition, self.players),
                    "strong": {
                        "status": r.strong.status,
                        "witness": None
                        if r.strong.witness is None
                        else [num(x) for x in r.strong.witness],
                        "blocks": [region(b) for b in r.strong.block_regions],
                    },
                    "weak": {
                        "status": r.weak.status,
                        "witness": None
                        if r.weak.witness is None
                        else [num(x) for x in r.weak.witness],
                        "blocks": [region(b) for b in r.weak.block_regions],
                    },
                    "fusion_resistant": r.fusion_resistant,
                }
            )
        label = lambda p: partition_label(p, self.players)
        most = self.most_consolidated(WEAK)
        return {
            "players": list(self.players),
            "game": self.digest,
            "partitions": records,
            "patched_strong_nonempty": [label(p) for p in self.partitions_with(STRONG)],
            "patched_weak_nonempty": [label(p) for p in self.partitions_with(WEAK)],
            "fusion_resistant": [label(p) for p in self.fusion_resistant_partitions()],
            "stable_strong": [
                {"partition": label(p), "witness": [num(x) for x in w]}
                for p, w in self.stable(STRONG)
            ],
            "stable_weak": [
                {"partition": label(p), "witness": [num(x) for x in w]}
                for p, w in self.stable(WEAK)
            ],
            "weak_unknown": [label(p) for p in self.unknown(WEAK)],
            "most_consolidated_weak": None if most is None else label(most),
        }

    def csv_rows(self) -> list[list]:
        header = [
            "partition",
            "blocks",
            "in_patched_strong",
            "in_patched_weak",
            "fusion_resistant",
            "stable_strong",
            "stable_weak",
            "weak_status",
            "witness_strong",
            "witness_weak",
        ]
        rows = [header]
        for r in self.records:
            strong_ok = r.strong.status == NONEMPTY
            weak_ok = r.weak.status == NONEMPTY
            wit = lambda w: "" if w is None else " ".join(str(x) for x in w)
            rows.append(
                [
                    partition_label(r.partition, self.players),
                    len(r.partition),
                    strong_ok,
                    weak_ok,
                    r.fusion_resistant,
                    strong_ok and r.fusion_resistant,
                    weak_ok and r.fusion_resistant,
                    r.weak.status,
                    wit(r.strong.witness),
                    wit(r.weak.witness),
                ]
            )
        return rows


def stable_sets(
    game: Game,
    *,
    cap: int = DEFAULT_ENUM_CAP,
    max_exact_weak_n: int = DEFAULT_MAX_EXACT_WEAK_N,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> StabilityReport:
    """Sweep every partition: patched strong/weak cores and fusion
    resistance.  Stable solutions pair a fusion-resistant partition with any
    point of its nonempty patched core."""
    from .games import game_digest

    rng = random.Random(seed)
    records = []
    for partition in enumerate_partitions(game.n, cap):
        strong = patched_core(
            game,
            partition,
            STRONG,
            max_exact_weak_n=max_exact_weak_n,
            samples=samples,
            rng=rng,
        )
        weak = patched_core(
            game,
            partition,
            WEAK,
            max_exact_weak_n=max_exact_weak_n,
            samples=samples,
            rng=rng,
        )
        records.append(
            PartitionRecord(partition, strong, weak, fusion_resistant(game, partition))
        )
    return StabilityReport(game.n, game.players, game_digest(game), tuple(records))
