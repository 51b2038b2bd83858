"""Shared generators and converters for the test suite."""

from __future__ import annotations

import json
import random
from pathlib import Path

from hypothesis import strategies as st

from prefsem.preferential import PreferentialStructure
from prefsem.sets import ChoiceFunction, GroundSet, SetFamily, bits

FROZEN = json.loads((Path(__file__).with_name("data") / "oracle_frozen.json").read_text("utf-8"))
LABELS = "abcde"


def fs(ground: GroundSet, mask: int) -> frozenset:
    return frozenset(ground.elements[i] for i in bits(mask))


def table(f: ChoiceFunction) -> dict:
    """Choice function as an oracle table {frozenset: frozenset}."""
    g = f.domain.ground
    return {fs(g, x): fs(g, f(x)) for x in f.domain.masks}


def oracle_structure(s: PreferentialStructure):
    return list(s.copies), set(s.relation)


def random_structure(rng: random.Random, size: int, max_copies: int = 2,
                     density: float = 0.3, mode: str = "any") -> PreferentialStructure:
    """mode: any (arbitrary relation), acyclic, or transitive (closure of an acyclic one)."""
    ground = GroundSet(LABELS[:size])
    copies = [(e, i) for e in ground for i in range(rng.randint(1, max_copies))]
    rank = {c: rng.random() for c in copies}
    rel = set()
    for lo in copies:
        for hi in copies:
            if rng.random() >= density:
                continue
            if mode != "any" and not rank[lo] < rank[hi]:
                continue
            rel.add((lo, hi))
    if mode == "transitive":
        changed = True
        while changed:
            extra = {(a, d) for a, b in rel for c, d in rel if b == c} - rel
            changed = bool(extra)
            rel |= extra
    return PreferentialStructure(ground, tuple(copies), frozenset(rel))


def random_family(rng: random.Random, ground: GroundSet, max_sets: int = 8) -> SetFamily:
    full = ground.full
    k = rng.randint(1, max_sets)
    return SetFamily.from_masks(ground, [rng.randint(0, full) for _ in range(k)])


@st.composite
def structures(draw, max_size: int = 4, max_copies: int = 2):
    size = draw(st.integers(1, max_size))
    ground = GroundSet(LABELS[:size])
    counts = [draw(st.integers(1, max_copies)) for _ in range(size)]
    copies = [(e, i) for e, n in zip(ground, counts) for i in range(n)]
    pairs = [(lo, hi) for lo in copies for hi in copies]
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=len(pairs), unique=True))
    return PreferentialStructure(ground, tuple(copies), frozenset(chosen))


@st.composite
def families(draw, ground: GroundSet, min_sets: int = 1, max_sets: int = 8):
    masks = draw(st.lists(st.integers(0, ground.full), min_size=min_sets, max_size=max_sets))
    return SetFamily.from_masks(ground, masks)


@st.composite
def choices(draw, max_size: int = 3, max_sets: int = 6, inside: bool = True):
    """Arbitrary choice function; images lie inside their set when ``inside``."""
    size = draw(st.integers(1, max_size))
    ground = GroundSet(LABELS[:size])
    family = draw(families(ground, max_sets=max_sets))
    images = []
    for x in family.masks:
        pick = draw(st.integers(0, ground.full))
        images.append(pick & x if inside else pick)
    return ChoiceFunction(family, images)
