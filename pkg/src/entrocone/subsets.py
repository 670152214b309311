"""Ground-set and scenario algebra.

Subsets of the ground set [n] = {1, ..., n} are encoded as int bitmasks,
element i occupying bit i-1.  All coordinate vectors over subsets use the
canonical order: by cardinality first, then lexicographically on the sorted
element tuple.  A *scenario* is a downward-closed family of subsets (an
abstract simplicial complex), determined by its maximal members.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DomainError

#: Largest supported ground set.  Coordinate vectors have 2^n entries and the
#: projection step is hopeless long before this, so the cap is a sanity net.
GROUND_SET_CAP = 16


def pack(elements: Iterable[int], n: int | None = None) -> int:
    """Encode a collection of 1-based elements as a bitmask."""
    mask = 0
    for e in elements:
        if e < 1 or (n is not None and e > n):
            raise DomainError(f"element {e} outside ground set [{n}]")
        mask |= 1 << (e - 1)
    return mask


def unpack(mask: int) -> tuple[int, ...]:
    """Decode a bitmask into the sorted tuple of its 1-based elements."""
    out = []
    e = 1
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return tuple(out)


def subset_key(mask: int) -> tuple[int, tuple[int, ...]]:
    """Sort key realizing the canonical subset order."""
    return (mask.bit_count(), unpack(mask))


def sort_subsets(masks: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(masks, key=subset_key))


def all_subsets(n: int) -> tuple[int, ...]:
    """All 2^n subsets of [n] in canonical order."""
    return sort_subsets(range(1 << n))


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"A{i}" for i in range(1, n + 1))


def subset_label(mask: int, labels: Sequence[str]) -> str:
    """Label of a subset: member labels joined without separator; '{}' for the
    empty set."""
    if mask == 0:
        return "{}"
    return "".join(labels[e - 1] for e in unpack(mask))


@dataclass(frozen=True)
class Scenario:
    """A downward-closed family of subsets of [n] with maximal-set generators.

    ``members`` always contains the empty set; ``generators`` are exactly the
    members not strictly contained in another member, in canonical order.
    ``labels`` name the ground-set elements for I/O (defaults to A1..An); the
    combinatorial core only ever sees 1-based indices.
    """

    n: int
    members: frozenset[int]
    generators: tuple[int, ...]
    labels: tuple[str, ...] = field(compare=False, default=())

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", default_labels(self.n))
        if len(self.labels) != self.n:
            raise DomainError(f"expected {self.n} labels, got {len(self.labels)}")
        if len(set(self.labels)) != self.n:
            raise DomainError("labels must be distinct")

    def members_sorted(self) -> tuple[int, ...]:
        return sort_subsets(self.members)

    def nonempty_members(self) -> tuple[int, ...]:
        return tuple(m for m in self.members_sorted() if m)

    def member_label(self, mask: int) -> str:
        return subset_label(mask, self.labels)

    def mask_of(self, names: Iterable[str]) -> int:
        index = {lab: i + 1 for i, lab in enumerate(self.labels)}
        try:
            return pack((index[name] for name in names), self.n)
        except KeyError as exc:
            raise DomainError(f"unknown variable label {exc.args[0]!r}") from None

    def __contains__(self, mask: int) -> bool:
        return mask in self.members


def downward_close(
    generators: Iterable[Iterable[int] | int],
    n: int,
    labels: Sequence[str] | None = None,
) -> Scenario:
    """Smallest downward-closed family containing all generators.

    Generators may be given as element iterables or as bitmasks.  The
    resulting scenario's generator list is recomputed as the maximal members.
    """
    if not 0 <= n <= GROUND_SET_CAP:
        raise DomainError(f"ground-set size {n} outside [0, {GROUND_SET_CAP}]")
    gen_masks = []
    for g in generators:
        mask = g if isinstance(g, int) else pack(g, n)
        if mask >> n:
            raise DomainError(f"generator {unpack(mask)} contains an element > {n}")
        gen_masks.append(mask)

    members = {0}
    for mask in gen_masks:
        elems = unpack(mask)
        for r in range(1, len(elems) + 1):
            for combo in itertools.combinations(elems, r):
                members.add(pack(combo))

    maximal = tuple(
        m for m in sort_subsets(members)
        if not any(m != other and is_subset(m, other) for other in members)
    )
    return Scenario(
        n=n,
        members=frozenset(members),
        generators=maximal,
        labels=tuple(labels) if labels else (),
    )


def full_scenario(n: int, labels: Sequence[str] | None = None) -> Scenario:
    """The scenario 2^[n] in which every joint distribution is observable."""
    return downward_close([(1 << n) - 1] if n else [0], n, labels)


def cycle_scenario(n: int) -> Scenario:
    """The n-cycle scenario: generated by the consecutive pairs {i, i+1 mod n}.

    Has 2n + 1 members: the empty set, n singletons, and n edges.
    """
    if n < 3:
        raise DomainError(f"cycle scenario needs n >= 3, got {n}")
    edges = [(i, i % n + 1) for i in range(1, n + 1)]
    return downward_close(edges, n)


ZY_LABELS = ("w", "x", "y", "z")


def zy_scenario() -> Scenario:
    """The four-variable Zhang-Yeung scenario on {w,x,y,z}: two triangles
    {w,y,z}, {x,y,z} glued along {y,z}, plus the edge {w,x}.  13 members."""
    return downward_close([(1, 3, 4), (2, 3, 4), (1, 2)], 4, labels=ZY_LABELS)
