from hypothesis import given, settings

import oracle as O
from helpers import FROZEN, fs, oracle_structure, structures
from prefsem.conditions import check
from prefsem.preferential import (PreferentialStructure, induced_choice, is_smooth,
                                  mu_without_copies, relation_properties, transitive_closure)
from prefsem.sets import GroundSet, SetFamily


def three():
    g = GroundSet("abc")
    return PreferentialStructure.from_element_relation(g, [("c", "b"), ("b", "a")])


def test_minimal_elements_of_three_element_chain():
    s = three()
    g = s.ground
    assert g.labels(s.mu(g.full)) == FROZEN["fact_three"]["mu_full"] == ["c"]
    for key, expected in FROZEN["fact_three"]["mu"].items():
        assert g.labels(s.mu(g.subset(key))) == expected


def test_mutual_copies_are_not_smooth():
    g = GroundSet("e")
    s = PreferentialStructure(g, (("e", 0), ("e", 1)),
                              frozenset({(("e", 0), ("e", 1)), (("e", 1), ("e", 0))}))
    assert s.mu(g.full) == 0
    res = is_smooth(s, SetFamily.powerset(g))
    assert not res.holds
    assert res.set == g.full and res.copy == ("e", 0)


def test_element_without_copy_is_never_minimal():
    g = GroundSet("ab")
    s = PreferentialStructure(g, (("a", 0),), frozenset())
    assert s.mu(g.full) == g.subset("a")


def test_copy_free_reading_ignores_elements_outside_universe():
    g = GroundSet("abc")
    u = g.subset("ab")
    assert g.labels(mu_without_copies(g, u, [("a", "b"), ("c", "a")], g.full)) == ["a"]


def test_relation_properties_and_closure():
    s = three()
    props = relation_properties(s)
    assert not props.transitive and props.irreflexive
    t = transitive_closure(s)
    assert relation_properties(t).transitive
    assert (("c", 0), ("a", 0)) in t.relation


@given(structures())
def test_mu_matches_oracle(s):
    copies, rel = oracle_structure(s)
    for x in range(s.ground.full + 1):
        assert fs(s.ground, s.mu(x)) == O.mu(copies, rel, fs(s.ground, x))


@given(structures())
def test_smoothness_matches_oracle(s):
    copies, rel = oracle_structure(s)
    fam = SetFamily.powerset(s.ground)
    expected = all(O.smooth_on(copies, rel, fs(s.ground, x)) for x in fam)
    res = is_smooth(s, fam)
    assert res.holds == expected
    if not res.holds:
        assert not O.smooth_on(copies, rel, fs(s.ground, res.set))


@settings(max_examples=60)
@given(structures())
def test_induced_choice_is_preferential(s):
    f = induced_choice(s, SetFamily.powerset(s.ground))
    assert check(f, None, "mu-subset").holds
    assert check(f, None, "mu-PR").holds


@given(structures())
def test_mu_inside_and_monotone_on_subsets(s):
    full = s.ground.full
    for y in range(full + 1):
        my = s.mu(y)
        assert my & ~y == 0
        x = y
        while x:
            assert my & x & ~s.mu(x) == 0
            x = (x - 1) & y
