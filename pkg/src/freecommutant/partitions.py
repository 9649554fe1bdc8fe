"""Set partitions of {1..n} and the combinatorics built on them.

Covers the partition families the cumulant machinery sums over (all set
partitions, non-crossing, interval, interval with blocks of size >= 2,
non-crossing with first and last element joined), the lattice join, the
composition that merges interval blocks along a coarser partition, and the
index-expansion maps used when two-letter words are split into letters.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

from .errors import DomainError, GroundSetError, KindError, SizeLimitError


class PartitionKind(Enum):
    ALL = "all"
    NC = "nc"
    INTERVAL = "interval"
    INTERVAL_MIN2 = "interval-min2"
    NC_IRREDUCIBLE = "nc-irreducible"


# Bell / Catalan growth makes larger ground sets unusable even as streams.
ENUMERATION_CAPS = {
    PartitionKind.ALL: 13,
    PartitionKind.NC: 16,
    PartitionKind.INTERVAL: 24,
    PartitionKind.INTERVAL_MIN2: 24,
    PartitionKind.NC_IRREDUCIBLE: 16,
}


class Partition:
    """A set partition of {1..n} in canonical form.

    Blocks are internally sorted and ordered by least element; equality and
    hashing are structural, so canonicalization is idempotent by
    construction.
    """

    __slots__ = ("n", "blocks")

    def __init__(self, n: int, blocks: Iterable[Iterable[int]]):
        if n < 1:
            raise DomainError(f"ground-set size must be positive, got {n}")
        canon = sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0] if b else 0)
        seen: list[int] = []
        for b in canon:
            if not b:
                raise DomainError("empty block")
            seen.extend(b)
        if sorted(seen) != list(range(1, n + 1)):
            raise DomainError(f"blocks do not partition {{1..{n}}}: {canon}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "blocks", tuple(canon))

    def __setattr__(self, name, value):  # pragma: no cover - guards misuse
        raise AttributeError("Partition is immutable")

    def __getstate__(self):
        return (self.n, self.blocks)

    def __setstate__(self, state):
        object.__setattr__(self, "n", state[0])
        object.__setattr__(self, "blocks", state[1])

    @classmethod
    def full(cls, n: int) -> "Partition":
        return cls(n, [range(1, n + 1)])

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(n, [[i] for i in range(1, n + 1)])

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def block_index(self) -> dict[int, int]:
        """Map each element to the index of its block."""
        owner: dict[int, int] = {}
        for i, b in enumerate(self.blocks):
            for e in b:
                owner[e] = i
        return owner

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self.n == other.n and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash((self.n, self.blocks))

    def __repr__(self) -> str:
        return f"Partition({self.n}, {[list(b) for b in self.blocks]})"


def is_noncrossing(p: Partition) -> bool:
    """True iff no quadruple a<b<c<d has a,c in one block and b,d in another."""
    owner = p.block_index()
    last = {i: b[-1] for i, b in enumerate(p.blocks)}
    stack: list[int] = []
    open_blocks: set[int] = set()
    for e in range(1, p.n + 1):
        b = owner[e]
        if b in open_blocks:
            if stack[-1] != b:
                return False
        else:
            open_blocks.add(b)
            stack.append(b)
        if e == last[b]:
            stack.pop()
            open_blocks.discard(b)
    return True


def is_interval(p: Partition) -> bool:
    """True iff every block is a run of consecutive integers."""
    return all(b[-1] - b[0] + 1 == len(b) for b in p.blocks)


def join(p: Partition, q: Partition) -> Partition:
    """Finest partition refined by neither: connected components of the two
    block systems glued together."""
    if p.n != q.n:
        raise GroundSetError(f"join over mismatched ground sets: {p.n} vs {q.n}")
    parent = list(range(p.n + 1))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for part in (p, q):
        for b in part.blocks:
            r = find(b[0])
            for e in b[1:]:
                parent[find(e)] = r
    groups: dict[int, list[int]] = {}
    for e in range(1, p.n + 1):
        groups.setdefault(find(e), []).append(e)
    return Partition(p.n, groups.values())


def joins_to_full(p: Partition, q: Partition) -> bool:
    """Whether join(p, q) is the one-block partition; short-circuits through
    union-find without materializing the join."""
    if p.n != q.n:
        raise GroundSetError(f"join over mismatched ground sets: {p.n} vs {q.n}")
    parent = list(range(p.n + 1))
    remaining = p.n

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for part in (p, q):
        for b in part.blocks:
            r = find(b[0])
            for e in b[1:]:
                re = find(e)
                if re != r:
                    parent[re] = r
                    remaining -= 1
                    if remaining == 1:
                        return True
    return remaining == 1


def compose_interval(pi: Partition, sigma: Partition) -> Partition:
    """Merge the interval blocks of ``sigma`` along the blocks of ``pi``.

    ``sigma`` must be an interval partition with k blocks and ``pi`` a
    non-crossing partition of {1..k}; block i of the result is the union of
    the sigma-blocks whose indices share a pi-block.
    """
    if not is_interval(sigma):
        raise KindError(f"sigma must be an interval partition, got {sigma!r}")
    k = sigma.num_blocks
    if pi.n != k:
        raise GroundSetError(f"pi partitions {{1..{pi.n}}} but sigma has {k} blocks")
    if not is_noncrossing(pi):
        raise KindError(f"pi must be non-crossing, got {pi!r}")
    merged = [
        sorted(e for j in v for e in sigma.blocks[j - 1])
        for v in pi.blocks
    ]
    rho = Partition(sigma.n, merged)
    assert is_noncrossing(rho)
    return rho


@dataclass(frozen=True)
class ExpansionMaps:
    """Index bookkeeping for doubling the positions of a subset.

    Positions j of {1..n} are laid out left to right on {1..n+|subset|},
    each j in ``subset`` occupying two consecutive slots and every other j
    one slot.  ``tau`` is the interval partition of those slots, ``phi``
    collapses slots back to source positions and ``iota`` takes preimages.
    """

    n: int
    subset: frozenset[int]
    tau: Partition
    phi_table: tuple[int, ...]  # 1-based slot -> source position

    @property
    def ground_size(self) -> int:
        return self.n + len(self.subset)

    def phi(self, slot: int) -> int:
        if not 1 <= slot <= self.ground_size:
            raise DomainError(f"slot {slot} outside {{1..{self.ground_size}}}")
        return self.phi_table[slot - 1]

    def iota(self, positions: Iterable[int]) -> frozenset[int]:
        wanted = set(positions)
        bad = wanted - set(range(1, self.n + 1))
        if bad:
            raise DomainError(f"positions {sorted(bad)} outside {{1..{self.n}}}")
        return frozenset(
            slot for slot in range(1, self.ground_size + 1)
            if self.phi_table[slot - 1] in wanted
        )


def expansion_maps(n: int, subset: Iterable[int]) -> ExpansionMaps:
    """Build tau, iota and phi for doubling the positions in ``subset``."""
    if n < 1:
        raise DomainError(f"ground-set size must be positive, got {n}")
    b = frozenset(subset)
    bad = b - set(range(1, n + 1))
    if bad:
        raise DomainError(f"subset elements {sorted(bad)} outside {{1..{n}}}")
    phi: list[int] = []
    tau_blocks: list[list[int]] = []
    slot = 1
    for j in range(1, n + 1):
        width = 2 if j in b else 1
        tau_blocks.append(list(range(slot, slot + width)))
        phi.extend([j] * width)
        slot += width
    return ExpansionMaps(n=n, subset=b, tau=Partition(n + len(b), tau_blocks), phi_table=tuple(phi))


def assign_by_blocks(block_assignments: Sequence[tuple[Iterable[int], Sequence]]) -> tuple:
    """Fill an n-tuple by cycling each block's symbols along the block.

    The v-th smallest element of a block receives symbol (v-1) mod m where m
    is that block's symbol count; the blocks must partition {1..n}.
    """
    filled: dict[int, object] = {}
    for block, symbols in block_assignments:
        elems = sorted(block)
        if not symbols:
            raise DomainError("empty symbol list")
        if not elems:
            raise DomainError("empty block")
        m = len(symbols)
        for v, e in enumerate(elems):
            if e in filled:
                raise DomainError(f"element {e} assigned twice")
            filled[e] = symbols[v % m]
    n = len(filled)
    if sorted(filled) != list(range(1, n + 1)):
        raise DomainError(f"blocks do not partition {{1..{n}}}")
    return tuple(filled[j] for j in range(1, n + 1))


def _iter_nc_blocklists(lo: int, hi: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    if lo > hi:
        yield ()
        return
    yield from _iter_first_block(lo, hi, span=False)


def _iter_first_block(lo: int, hi: int, span: bool) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Partitions of [lo, hi] listed by the block of ``lo``; with ``span``
    that block is required to contain ``hi``."""

    def grow(members: list[int], nxt: int) -> Iterator[tuple[tuple[int, ...], ...]]:
        if not span or members[-1] == hi:
            block = tuple(members)
            for rest in _iter_nc_blocklists(nxt, hi):
                yield (block,) + rest
        for m in range(nxt, hi + 1):
            for gap in _iter_nc_blocklists(nxt, m - 1):
                members.append(m)
                for out in grow(members, m + 1):
                    yield (out[0],) + gap + out[1:]
                members.pop()

    yield from grow([lo], lo + 1)


def _iter_compositions(total: int, min_part: int) -> Iterator[tuple[int, ...]]:
    if total == 0:
        yield ()
        return
    for first in range(min_part, total + 1):
        for rest in _iter_compositions(total - first, min_part):
            yield (first,) + rest


def _iter_all_blocklists(n: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    # restricted growth strings, lexicographic
    labels = [0] * n

    def rec(i: int, mx: int) -> Iterator[tuple[tuple[int, ...], ...]]:
        if i == n:
            blocks: list[list[int]] = [[] for _ in range(mx + 1)]
            for e in range(n):
                blocks[labels[e]].append(e + 1)
            yield tuple(tuple(b) for b in blocks)
            return
        for v in range(mx + 2):
            labels[i] = v
            yield from rec(i + 1, max(mx, v))

    yield from rec(1, 0) if n > 1 else iter([((1,),)])


def iter_partitions(n: int, kind: PartitionKind) -> Iterator[Partition]:
    """Lazily yield every partition of the kind exactly once, deterministically."""
    cap = ENUMERATION_CAPS[kind]
    if not 1 <= n <= cap:
        raise SizeLimitError(
            f"enumeration of {kind.value} partitions supports 1 <= n <= {cap}, got {n}"
        )
    if kind is PartitionKind.ALL:
        source = _iter_all_blocklists(n)
    elif kind is PartitionKind.NC:
        source = _iter_nc_blocklists(1, n)
    elif kind is PartitionKind.NC_IRREDUCIBLE:
        source = _iter_first_block(1, n, span=True)
    elif kind is PartitionKind.INTERVAL:
        source = _interval_blocklists(n, 1)
    elif kind is PartitionKind.INTERVAL_MIN2:
        source = _interval_blocklists(n, 2)
    else:  # pragma: no cover
        raise DomainError(f"unknown kind {kind!r}")
    for blocks in source:
        yield Partition(n, blocks)


def _interval_blocklists(n: int, min_part: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    for comp in _iter_compositions(n, min_part):
        blocks = []
        start = 1
        for size in comp:
            blocks.append(tuple(range(start, start + size)))
            start += size
        yield tuple(blocks)


def enumerate_partitions(n: int, kind: PartitionKind) -> list[Partition]:
    """Materialized form of :func:`iter_partitions`."""
    return list(iter_partitions(n, kind))
