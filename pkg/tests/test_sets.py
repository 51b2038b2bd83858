import random

import pytest
from hypothesis import given, strategies as st

import oracle as O
from helpers import FROZEN, fs
from prefsem.construction import build_cum_example
from prefsem.errors import NotInDomainError
from prefsem.sets import (ChoiceFunction, GroundSet, SetFamily, close_under_intersections,
                          is_closed_under)

G = GroundSet("abcde")


def test_ground_set_round_trip():
    m = G.subset(["e", "a"])
    assert G.labels(m) == ["a", "e"]
    assert G.fmt(m) == "{a,e}"
    assert G.full == 0b11111


def test_unknown_label_rejected():
    with pytest.raises(ValueError):
        G.subset(["z"])


def test_family_deduplicates_by_extension():
    fam = SetFamily.from_labels(G, {"A": ["a", "b"], "B": ["b", "a"], "C": ["c"]})
    assert fam.names == ("A", "C")
    assert len(fam) == 2


def test_choice_outside_domain_raises():
    fam = SetFamily.from_labels(G, {"A": ["a"]})
    f = ChoiceFunction.identity(fam)
    with pytest.raises(NotInDomainError):
        f(G.subset(["b"]))


def test_choice_table_must_cover_domain():
    fam = SetFamily.from_labels(G, {"A": ["a"], "B": ["b"]})
    with pytest.raises(ValueError):
        ChoiceFunction(fam, {G.subset(["a"]): 0})


def test_set_operations_agree_with_label_lists():
    rng = random.Random(7)
    for _ in range(1000):
        a, b = rng.randint(0, G.full), rng.randint(0, G.full)
        la, lb = set(G.labels(a)), set(G.labels(b))
        assert set(G.labels(a & b)) == la & lb
        assert set(G.labels(a | b)) == la | lb
        assert set(G.labels(a & ~b)) == la - lb
        assert (a & ~b == 0) == (la <= lb)


def test_ladder_generators_close_with_frozen_additions():
    inst = build_cum_example(1)
    gens = set(inst.generators.masks)
    added = sorted(sorted(G2) for G2 in
                   (inst.closed_family.ground.labels(m) for m in inst.closed_family.masks if m not in gens))
    assert added == FROZEN["ladder_example"]["1"]["added"]


def test_ladder_family_not_union_closed():
    inst = build_cum_example(1)
    assert is_closed_under(inst.closed_family, "intersection").holds
    check = is_closed_under(inst.closed_family, "union")
    assert not check.holds
    a, b = check.pair
    assert check.missing == a | b and check.missing not in inst.closed_family


@given(st.lists(st.integers(0, G.full), min_size=1, max_size=6))
def test_intersection_closure_matches_oracle(masks):
    fam = SetFamily.from_masks(G, masks)
    closed = close_under_intersections(fam)
    assert {fs(G, m) for m in closed} == O.intersection_closure(fs(G, m) for m in masks)
    assert close_under_intersections(closed).same_members(closed)
    assert is_closed_under(closed, "intersection").holds


@given(st.lists(st.integers(0, G.full), min_size=1, max_size=6),
       st.sampled_from(["intersection", "union", "difference", "complement"]))
def test_closure_check_is_exact(masks, op):
    fam = SetFamily.from_masks(G, masks)
    sets = set(fam.masks)
    if op == "complement":
        expected = all(G.full & ~m in sets for m in sets)
    else:
        f = {"intersection": lambda a, b: a & b, "union": lambda a, b: a | b,
             "difference": lambda a, b: a & ~b}[op]
        expected = all(f(a, b) in sets for a in sets for b in sets)
    check = is_closed_under(fam, op)
    assert check.holds == expected
    if not check.holds:
        assert check.missing not in sets
