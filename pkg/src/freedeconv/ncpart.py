"""Non-crossing partitions, Kreweras complements, and partition-indexed products.

A partition of {1..n} is non-crossing when no two blocks interleave, i.e.
there are no indices a < b < c < d with a, c in one block and b, d in
another.  The lattice NC(n) has Catalan(n) elements and carries the
Kreweras complement, the involution-like map that pairs each partition
with the coarsest partition of an interleaved copy of {1..n} compatible
with it.  These are the index sets of the boxed convolution implemented
in :mod:`freedeconv.series`.
"""

from __future__ import annotations

import math
import os
import threading
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import InsufficientOrderError, MalformedPartitionError, OrderTooLargeError

DEFAULT_MAX_ORDER = 14
_MAX_ORDER_ENV = "FREEDECONV_MAX_NC_ORDER"

_cache_lock = threading.Lock()
_nc_cache: dict[int, tuple["NcPartition", ...]] = {}
_profile_cache: dict[int, tuple[tuple[tuple[int, ...], tuple[int, ...], int], ...]] = {}


def catalan(n: int) -> int:
    """n-th Catalan number (2n choose n)/(n+1)."""
    return math.comb(2 * n, n) // (n + 1)


def _canonical_blocks(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    inner = [tuple(sorted(b)) for b in blocks]
    if any(not b for b in inner):
        raise MalformedPartitionError("empty block")
    return tuple(sorted(inner, key=lambda b: b[0]))


def _validate_partition(n: int, blocks: tuple[tuple[int, ...], ...]) -> None:
    seen: set[int] = set()
    for b in blocks:
        if not b:
            raise MalformedPartitionError("empty block")
        for x in b:
            if not isinstance(x, int) or isinstance(x, bool):
                raise MalformedPartitionError(f"non-integer element {x!r}")
            if x in seen:
                raise MalformedPartitionError(f"element {x} appears in two blocks")
            seen.add(x)
    if seen != set(range(1, n + 1)):
        raise MalformedPartitionError(f"blocks do not cover {{1..{n}}}")


def _crosses(blocks: Sequence[Sequence[int]], n: int) -> bool:
    # Draw a chord between consecutive elements of each block; the partition
    # is non-crossing iff the chords nest like balanced parentheses.
    nxt: dict[int, int] = {}
    for b in blocks:
        for u, v in zip(b, b[1:]):
            nxt[u] = v
    closes = set(nxt.values())
    stack: list[int] = []
    for i in range(1, n + 1):
        if i in closes:
            if not stack or stack[-1] != i:
                return True
            stack.pop()
        if i in nxt:
            stack.append(nxt[i])
    return False


@dataclass(frozen=True)
class NcPartition:
    """A non-crossing partition of {1..n} in canonical block form.

    Blocks are stored sorted by minimum element, ascending within each
    block.  Construction validates both the set-partition property and
    non-crossingness.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise MalformedPartitionError("ground set must be nonempty")
        canon = _canonical_blocks(self.blocks)
        object.__setattr__(self, "blocks", canon)
        _validate_partition(self.n, canon)
        if _crosses(canon, self.n):
            raise MalformedPartitionError(f"partition {canon} has a crossing")

    @classmethod
    def _trusted(cls, n: int, blocks: tuple[tuple[int, ...], ...]) -> "NcPartition":
        # Internal fast path for blocks already canonical and non-crossing.
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "blocks", blocks)
        return obj

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(sorted(len(b) for b in self.blocks))

    def __len__(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


def is_noncrossing(blocks: Iterable[Iterable[int]], n: int | None = None) -> bool:
    """True iff ``blocks`` is a non-crossing set partition of {1..n}.

    ``n`` defaults to the total number of elements.  Raises
    MalformedPartitionError when the blocks do not form a partition at all.
    """
    canon = _canonical_blocks(blocks)
    if n is None:
        n = sum(len(b) for b in canon)
    if n < 1:
        raise MalformedPartitionError("empty partition")
    _validate_partition(n, canon)
    return not _crosses(canon, n)


def _max_order(explicit: int | None = None) -> int:
    if explicit is not None:
        return explicit
    raw = os.environ.get(_MAX_ORDER_ENV)
    if raw is not None:
        return int(raw)
    return DEFAULT_MAX_ORDER


def _raw_nc_blocks(elements: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yield every non-crossing partition of the ordered tuple ``elements``.

    Recursive first-block construction: the block of the smallest element is
    an increasing subsequence, and the gaps it leaves are partitioned
    independently, which is non-crossing by construction and hits each
    partition exactly once.
    """
    if not elements:
        yield ()
        return
    first, rest = elements[0], elements[1:]
    yield from _extend_first_block((first,), rest)


def _extend_first_block(
    block: tuple[int, ...], rest: tuple[int, ...]
) -> Iterator[tuple[tuple[int, ...], ...]]:
    # Close the block here: the remaining elements form their own partition.
    for sub in _raw_nc_blocks(rest):
        yield (block,) + sub
    # Or append rest[i]; the skipped elements rest[:i] are an enclosed gap.
    for i in range(len(rest)):
        for gap in _raw_nc_blocks(rest[:i]):
            for out in _extend_first_block(block + (rest[i],), rest[i + 1:]):
                yield (out[0],) + gap + out[1:]


def enumerate_nc(n: int, max_order: int | None = None) -> tuple[NcPartition, ...]:
    """All non-crossing partitions of {1..n}, lexicographic in canonical form.

    The list has Catalan(n) entries and is cached process-wide.  ``n`` above
    the configured maximum (default 14, overridable via the
    FREEDECONV_MAX_NC_ORDER environment variable or the ``max_order``
    argument) raises OrderTooLargeError to guard the Catalan blow-up.
    """
    limit = _max_order(max_order)
    if n < 1:
        raise MalformedPartitionError("order must be >= 1")
    if n > limit:
        raise OrderTooLargeError(f"NC({n}) exceeds the configured maximum order {limit}")
    cached = _nc_cache.get(n)
    if cached is not None:
        return cached
    with _cache_lock:
        cached = _nc_cache.get(n)
        if cached is not None:
            return cached
        raw = [_canonical_blocks(b) for b in _raw_nc_blocks(tuple(range(1, n + 1)))]
        raw.sort()
        parts = tuple(NcPartition._trusted(n, b) for b in raw)
        _nc_cache[n] = parts
    return parts


def _complement_cycle_sizes(blocks: Sequence[Sequence[int]], n: int) -> tuple[int, ...]:
    # Kreweras complement via permutations: with sigma the cycle-of-blocks
    # permutation and c the long cycle i -> i+1, the complement's blocks are
    # the cycles of sigma^{-1} . c.
    inv = [0] * (n + 1)
    for b in blocks:
        for i, x in enumerate(b):
            inv[b[(i + 1) % len(b)]] = x
    sizes = []
    seen = [False] * (n + 1)
    for start in range(1, n + 1):
        if seen[start]:
            continue
        size = 0
        x = start
        while not seen[x]:
            seen[x] = True
            size += 1
            x = inv[x % n + 1]
        sizes.append(size)
    return tuple(sorted(sizes))


def kreweras(part: NcPartition) -> NcPartition:
    """Kreweras complement of a non-crossing partition.

    The complement is the coarsest partition of the interleaved barred copy
    {1', .., n'} whose union with ``part`` stays non-crossing under the order
    1 <= 1' <= 2 <= 2' <= ... <= n <= n'.  It satisfies
    ``len(part) + len(kreweras(part)) == n + 1``.
    """
    n = part.n
    inv = [0] * (n + 1)
    for b in part.blocks:
        for i, x in enumerate(b):
            inv[b[(i + 1) % len(b)]] = x
    seen = [False] * (n + 1)
    cycles = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = inv[x % n + 1]
        cycles.append(tuple(sorted(cyc)))
    return NcPartition._trusted(n, _canonical_blocks(cycles))


def coef_product(coeffs: Sequence, part: NcPartition):
    """Product of ``coeffs[len(block) - 1]`` over the blocks of ``part``.

    ``coeffs`` is indexed from order 1, i.e. ``coeffs[0]`` is the first
    coefficient.  Raises InsufficientOrderError when a block is larger than
    the available coefficients.
    """
    result = 1
    for b in part.blocks:
        size = len(b)
        if size > len(coeffs):
            raise InsufficientOrderError(
                f"block of size {size} but only {len(coeffs)} coefficients"
            )
        result = result * coeffs[size - 1]
    return result


def convolution_profiles(
    m: int, max_order: int | None = None
) -> tuple[tuple[tuple[int, ...], tuple[int, ...], int], ...]:
    """Aggregated (block sizes, complement block sizes, multiplicity) table.

    For each pi in NC(m) the boxed-convolution summand depends only on the
    multiset of block sizes of pi and of its Kreweras complement, so the sum
    over NC(m) collapses to this table.  Cached per order; the counts add up
    to Catalan(m).
    """
    limit = _max_order(max_order)
    if m > limit:
        raise OrderTooLargeError(f"NC({m}) exceeds the configured maximum order {limit}")
    cached = _profile_cache.get(m)
    if cached is not None:
        return cached
    with _cache_lock:
        cached = _profile_cache.get(m)
        if cached is not None:
            return cached
        counts: Counter = Counter()
        for blocks in _raw_nc_blocks(tuple(range(1, m + 1))):
            pf = tuple(sorted(len(b) for b in blocks))
            pg = _complement_cycle_sizes(blocks, m)
            counts[(pf, pg)] += 1
        table = tuple((pf, pg, c) for (pf, pg), c in sorted(counts.items()))
        _profile_cache[m] = table
    return table
