"""Preferential structures with copies and their minimal-element function.

A structure is a set of copies ``(label, index)`` over a ground set and an
arbitrary binary relation on copies.  A pair ``(c1, c2)`` in the relation
reads ``c1 < c2``: ``c1`` is preferred to (lies below) ``c2``.  Nothing is
assumed about the relation: it may be reflexive, cyclic, non-transitive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .sets import ChoiceFunction, GroundSet, SetFamily, SubsetRef, bits

Copy = tuple[str, int]


@dataclass(frozen=True)
class PreferentialStructure:
    ground: GroundSet
    copies: tuple[Copy, ...]
    relation: frozenset[tuple[Copy, Copy]]
    # per copy: ground position, and mask of elements owning a copy below it
    _elem: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _below: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _below_elems: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        copies = tuple((str(e), int(i)) for e, i in self.copies)
        pos = {c: k for k, c in enumerate(copies)}
        if len(pos) != len(copies):
            raise ValueError("duplicate copies")
        elem = tuple(self.ground.index(e) for e, _ in copies)
        below: list[list[int]] = [[] for _ in copies]
        rel = set()
        for lo, hi in self.relation:
            lo, hi = (str(lo[0]), int(lo[1])), (str(hi[0]), int(hi[1]))
            if lo not in pos or hi not in pos:
                raise ValueError(f"relation pair {lo}<{hi} mentions an undeclared copy")
            rel.add((lo, hi))
        for lo, hi in rel:
            below[pos[hi]].append(pos[lo])
        below_t = tuple(tuple(sorted(b)) for b in below)
        below_elems = tuple(_or(1 << elem[k] for k in b) for b in below_t)
        object.__setattr__(self, "copies", copies)
        object.__setattr__(self, "relation", frozenset(rel))
        object.__setattr__(self, "_elem", elem)
        object.__setattr__(self, "_below", below_t)
        object.__setattr__(self, "_below_elems", below_elems)

    @classmethod
    def from_element_relation(cls, ground: GroundSet,
                              pairs: Iterable[tuple[str, str]]) -> PreferentialStructure:
        """One copy (index 0) per element; ``pairs`` are ``(below, above)``."""
        return cls(ground, tuple((e, 0) for e in ground),
                   frozenset(((lo, 0), (hi, 0)) for lo, hi in pairs))

    @property
    def copy_count(self) -> int:
        return len(self.copies)

    def with_relation(self, relation: Iterable[tuple[Copy, Copy]]) -> PreferentialStructure:
        return PreferentialStructure(self.ground, self.copies, frozenset(relation))

    def mu(self, x: SubsetRef) -> SubsetRef:
        out = 0
        elem, below_elems = self._elem, self._below_elems
        for k in range(len(elem)):
            e = 1 << elem[k]
            if x & e and not below_elems[k] & x:
                out |= e
        return out

    def smoothness_violation(self, x: SubsetRef) -> int | None:
        """Index of a copy over ``x`` that is dominated but not by a minimal copy."""
        elem, below, below_elems = self._elem, self._below, self._below_elems
        for k in range(len(elem)):
            if not x >> elem[k] & 1 or not below_elems[k] & x:
                continue
            if not any(x >> elem[d] & 1 and not below_elems[d] & x for d in below[k]):
                return k
        return None


def _or(masks: Iterable[int]) -> int:
    out = 0
    for m in masks:
        out |= m
    return out


def mu(structure: PreferentialStructure, x: SubsetRef) -> SubsetRef:
    """Elements of ``x`` having a copy not dominated by any copy over ``x``."""
    return structure.mu(x)


def mu_without_copies(ground: GroundSet, universe: SubsetRef,
                      pairs: Iterable[tuple[str, str]], x: SubsetRef) -> SubsetRef:
    """Minimal elements in the copy-free reading: ``<U, <>`` on elements.

    ``universe`` plays the role of ``U``; elements outside it are never
    minimal and never minimize.
    """
    rel = [(ground.index(lo), ground.index(hi)) for lo, hi in pairs]
    scope = x & universe
    out = 0
    for i in bits(scope):
        if not any(hi == i and scope >> lo & 1 for lo, hi in rel):
            out |= 1 << i
    return out


@dataclass(frozen=True)
class SmoothnessCheck:
    holds: bool
    set: SubsetRef | None = None
    copy: Copy | None = None


def is_smooth(structure: PreferentialStructure, family: SetFamily) -> SmoothnessCheck:
    """Family-smoothness with copies: every dominated copy over a member X lies
    above some copy that is minimal in X."""
    if family.ground != structure.ground:
        raise ValueError("family and structure use different ground sets")
    for x in family.masks:
        k = structure.smoothness_violation(x)
        if k is not None:
            return SmoothnessCheck(False, x, structure.copies[k])
    return SmoothnessCheck(True)


@dataclass(frozen=True)
class RelationProperties:
    transitive: bool
    irreflexive: bool


def relation_properties(structure: PreferentialStructure) -> RelationProperties:
    rel = structure.relation
    succ: dict[Copy, set[Copy]] = {}
    for lo, hi in rel:
        succ.setdefault(lo, set()).add(hi)
    transitive = all(c in succ.get(a, ()) for a, b in rel for c in succ.get(b, ()))
    irreflexive = all(lo != hi for lo, hi in rel)
    return RelationProperties(transitive, irreflexive)


def transitive_closure(structure: PreferentialStructure) -> PreferentialStructure:
    rel = set(structure.relation)
    while True:
        succ: dict[Copy, set[Copy]] = {}
        for lo, hi in rel:
            succ.setdefault(lo, set()).add(hi)
        extra = {(a, c) for a, b in rel for c in succ.get(b, ()) if (a, c) not in rel}
        if not extra:
            return structure.with_relation(rel)
        rel |= extra


def induced_choice(structure: PreferentialStructure, family: SetFamily) -> ChoiceFunction:
    """The restriction of ``mu`` to ``family``."""
    if family.ground != structure.ground:
        raise ValueError("family and structure use different ground sets")
    return ChoiceFunction(family, [structure.mu(x) for x in family.masks])
