"""Finite ground sets, named set families and abstract choice functions.

Subsets are plain ``int`` bit-vectors over the positions of a frozen
:class:`GroundSet`: bit ``i`` is set iff the ``i``-th declared element is a
member.  Every checker in the package is a quantifier loop over such masks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import NotInDomainError

SubsetRef = int

CLOSURE_OPS = ("intersection", "union", "difference", "complement")


def bits(mask: int) -> Iterator[int]:
    """Yield the positions of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


class GroundSet:
    """An ordered, immutable universe of distinct string labels."""

    __slots__ = ("elements", "_index")

    def __init__(self, elements: Iterable[str]) -> None:
        elements = tuple(elements)
        for e in elements:
            if not isinstance(e, str):
                raise TypeError(f"ground labels must be strings, got {e!r}")
        index = {e: i for i, e in enumerate(elements)}
        if len(index) != len(elements):
            dup = sorted({e for e in elements if elements.count(e) > 1})
            raise ValueError(f"duplicate ground labels: {dup}")
        self.elements = elements
        self._index = index

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroundSet) and self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        return f"GroundSet({list(self.elements)!r})"

    @property
    def full(self) -> int:
        return (1 << len(self.elements)) - 1

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"{label!r} is not in the ground set") from None

    def subset(self, labels: Iterable[str]) -> SubsetRef:
        mask = 0
        for label in labels:
            mask |= 1 << self.index(label)
        return mask

    def labels(self, mask: SubsetRef) -> list[str]:
        """Labels of ``mask`` in declared order."""
        if mask & ~self.full:
            raise ValueError(f"mask {mask:#x} exceeds the ground set")
        return [self.elements[i] for i in bits(mask)]

    def fmt(self, mask: SubsetRef) -> str:
        return "{" + ",".join(self.labels(mask)) + "}"


class SetFamily:
    """A finite family of subsets of a ground set, each carrying a name.

    Members are deduplicated by extension: when two names denote the same
    subset, the first one wins.  Iteration follows insertion order.
    """

    __slots__ = ("ground", "names", "masks", "_index")

    def __init__(self, ground: GroundSet,
                 members: Mapping[str, SubsetRef] | Iterable[tuple[str, SubsetRef]]) -> None:
        items = members.items() if isinstance(members, Mapping) else members
        names: list[str] = []
        masks: list[int] = []
        index: dict[int, int] = {}
        seen_names: set[str] = set()
        for name, mask in items:
            if mask < 0 or mask & ~ground.full:
                raise ValueError(f"member {name!r} is not a subset of the ground set")
            if mask in index:
                continue
            if name in seen_names:
                raise ValueError(f"duplicate member name {name!r}")
            seen_names.add(name)
            index[mask] = len(masks)
            names.append(name)
            masks.append(mask)
        self.ground = ground
        self.names = tuple(names)
        self.masks = tuple(masks)
        self._index = index

    @classmethod
    def from_labels(cls, ground: GroundSet,
                    members: Mapping[str, Iterable[str]]) -> SetFamily:
        return cls(ground, [(name, ground.subset(ls)) for name, ls in members.items()])

    @classmethod
    def from_masks(cls, ground: GroundSet, masks: Iterable[SubsetRef]) -> SetFamily:
        """Family named by extension, e.g. ``{a,b}``."""
        return cls(ground, [(ground.fmt(m), m) for m in masks])

    @classmethod
    def powerset(cls, ground: GroundSet) -> SetFamily:
        return cls.from_masks(ground, range(1 << len(ground)))

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self) -> Iterator[SubsetRef]:
        return iter(self.masks)

    def __contains__(self, mask: object) -> bool:
        return mask in self._index

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, SetFamily) and self.ground == other.ground
                and self.names == other.names and self.masks == other.masks)

    def __hash__(self) -> int:
        return hash((self.ground, self.masks))

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}={self.ground.fmt(m)}" for n, m in self.items())
        return f"SetFamily({inner})"

    def items(self) -> Iterator[tuple[str, SubsetRef]]:
        return zip(self.names, self.masks)

    def position(self, mask: SubsetRef) -> int:
        try:
            return self._index[mask]
        except KeyError:
            raise NotInDomainError(self.ground.fmt(mask)) from None

    def name_of(self, mask: SubsetRef) -> str:
        return self.names[self.position(mask)]

    def get(self, name: str) -> SubsetRef:
        try:
            return self.masks[self.names.index(name)]
        except ValueError:
            raise KeyError(name) from None

    def same_members(self, other: SetFamily) -> bool:
        return set(self.masks) == set(other.masks)


class ChoiceFunction:
    """A map ``f`` from the members of a family to subsets of the ground set.

    Images need not be members of the family.  ``images`` is aligned with
    ``domain.masks``.
    """

    __slots__ = ("domain", "images")

    def __init__(self, domain: SetFamily,
                 table: Mapping[SubsetRef, SubsetRef] | Sequence[SubsetRef]) -> None:
        full = domain.ground.full
        if isinstance(table, Mapping):
            extra = [m for m in table if m not in domain]
            if extra:
                raise NotInDomainError(domain.ground.fmt(extra[0]))
            missing = [m for m in domain.masks if m not in table]
            if missing:
                raise ValueError(f"choice undefined on {domain.ground.fmt(missing[0])}")
            images = tuple(table[m] for m in domain.masks)
        else:
            images = tuple(table)
            if len(images) != len(domain.masks):
                raise ValueError("image list does not match the domain size")
        for img in images:
            if img < 0 or img & ~full:
                raise ValueError("choice image is not a subset of the ground set")
        self.domain = domain
        self.images = images

    @classmethod
    def identity(cls, domain: SetFamily) -> ChoiceFunction:
        return cls(domain, domain.masks)

    def __call__(self, x: SubsetRef) -> SubsetRef:
        return self.images[self.domain.position(x)]

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, ChoiceFunction) and self.domain == other.domain
                and self.images == other.images)

    def __hash__(self) -> int:
        return hash((self.domain, self.images))

    def __repr__(self) -> str:
        g = self.domain.ground
        inner = ", ".join(f"{n}->{g.fmt(v)}" for n, v in zip(self.domain.names, self.images))
        return f"ChoiceFunction({inner})"

    @property
    def table(self) -> dict[SubsetRef, SubsetRef]:
        return dict(zip(self.domain.masks, self.images))

    def restrict(self, family: SetFamily) -> ChoiceFunction:
        return ChoiceFunction(family, [self(m) for m in family.masks])


def eval_choice(f: ChoiceFunction, x: SubsetRef) -> SubsetRef:
    """Image of ``x`` under ``f``; raises :class:`NotInDomainError` off-domain."""
    return f(x)


def close_under_intersections(family: SetFamily) -> SetFamily:
    """Least superset of ``family`` closed under pairwise intersection.

    A new member is named by joining, with ``&``, the names of all original
    members containing it (their intersection is exactly the new set).  The
    empty set, when produced, is named ``∅``.
    """
    if not len(family):
        raise ValueError("cannot close an empty family")
    gens = list(family.items())
    present = set(family.masks)
    order = list(family.masks)
    frontier = list(family.masks)
    while frontier:
        fresh: set[int] = set()
        for a in frontier:
            for b in order:
                c = a & b
                if c not in present:
                    fresh.add(c)
        frontier = sorted(fresh)
        present.update(frontier)
        order.extend(frontier)
    members = list(family.items())
    for m in order[len(family):]:
        if m == 0:
            name = "∅"
        else:
            name = "&".join(n for n, g in gens if m & ~g == 0)
        members.append((name, m))
    return SetFamily(family.ground, members)


@dataclass(frozen=True)
class ClosureCheck:
    op: str
    holds: bool
    pair: tuple[SubsetRef, SubsetRef | None] | None = None
    missing: SubsetRef | None = None


def _apply(op: str, a: int, b: int, full: int) -> int:
    if op == "intersection":
        return a & b
    if op == "union":
        return a | b
    if op == "difference":
        return a & ~b
    raise ValueError(f"unknown closure operation {op!r}")


def is_closed_under(family: SetFamily, op: str) -> ClosureCheck:
    """Does ``family`` contain ``op`` applied to every (pair of) member(s)?

    ``op`` is one of ``intersection``, ``union``, ``difference`` (A - B) or
    ``complement`` (relative to the ground set).  The first violating pair,
    in family order, is returned together with the missing set.
    """
    full = family.ground.full
    if op == "complement":
        for a in family.masks:
            c = full & ~a
            if c not in family:
                return ClosureCheck(op, False, (a, None), c)
        return ClosureCheck(op, True)
    if op not in CLOSURE_OPS:
        raise ValueError(f"unknown closure operation {op!r}")
    for a in family.masks:
        for b in family.masks:
            c = _apply(op, a, b, full)
            if c not in family:
                return ClosureCheck(op, False, (a, b), c)
    return ClosureCheck(op, True)
