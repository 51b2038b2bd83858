import pytest
from hypothesis import given, settings, strategies as st

import oracle as O
from helpers import FROZEN, choices, table
from prefsem.conditions import (TAGS, ConditionId, all_condition_ids, check, check_all, check_cum,
                                replay, violation)
from prefsem.construction import build_cum_example, build_fact23_example
from prefsem.preferential import induced_choice
from prefsem.sets import ChoiceFunction, GroundSet, SetFamily


def test_condition_id_parsing():
    assert ConditionId.parse("mu-cum(3)") == ConditionId("mu-cum", 3)
    assert str(ConditionId.parse("mu-cumt:2")) == "mu-cumt(2)"
    with pytest.raises(ValueError):
        ConditionId("mu-cum")
    with pytest.raises(ValueError):
        ConditionId("mu-CUM", 1)
    with pytest.raises(ValueError):
        ConditionId.parse("mu-nothing")


def test_all_ids_are_ordered_and_complete():
    ids = all_condition_ids(2)
    assert [str(i) for i in ids[-6:]] == ["mu-cum(0)", "mu-cum(1)", "mu-cum(2)",
                                          "mu-cumt(0)", "mu-cumt(1)", "mu-cumt(2)"]
    assert len(ids) == len(TAGS) + 6


@pytest.mark.parametrize("cid", [str(c) for c in all_condition_ids(3)])
def test_identity_choice_satisfies_every_condition(cid):
    g = GroundSet("abc")
    f = ChoiceFunction.identity(SetFamily.powerset(g))
    assert check(f, None, cid).holds


def test_ladder_example_cum_reports():
    inst = build_cum_example(1)
    f = inst.choice
    assert check(f, None, "mu-CUM").holds
    assert check_cum(f, None, 0, False).holds
    rep = check_cum(f, None, 1, False)
    assert not rep.holds
    g = inst.closed_family.ground
    w = rep.witness.to_json(inst.closed_family)
    frozen = FROZEN["ladder_example"]["1"]["violation"]
    assert w["element"] == "c" == frozen["offending"][0]
    assert sorted(w["U"]) == frozen["U"]
    assert [sorted(x) for x in w["X"]] == frozen["X"]
    assert rep.witness.bindings["X"][-1] == inst.generators.get("X'_1")
    assert g.labels(rep.witness.bindings["U"]) == ["a", "c", "x0"]


def test_three_element_structure_cumt_failure():
    s, fam = build_fact23_example(1)
    f = induced_choice(s, fam)
    assert check(f, None, "mu-subset").holds and check(f, None, "mu-PR").holds
    rep = check_cum(f, None, 1, True)
    assert not rep.holds
    b = rep.witness.bindings
    g = fam.ground
    meet = b["X"][-1] & f(b["U"])
    assert g.labels(meet) == FROZEN["fact_three"]["X1_meet_muU"] == ["a"]
    assert g.labels(f(b["X"][-1])) == FROZEN["fact_three"]["mu_X1"] == ["b"]
    assert g.elements[rep.witness.element] == "a"
    assert check_cum(f, None, 1, False).holds == FROZEN["fact_three"]["cum1"]


def test_compound_outside_family_is_skipped():
    g = GroundSet("ab")
    fam = SetFamily.from_labels(g, {"A": ["a"], "B": ["b"]})
    f = ChoiceFunction(fam, [0, 0])
    rep = check(f, None, "mu-OR")
    assert rep.holds and rep.skipped > 0


def test_report_json_shape():
    inst = build_cum_example(1)
    js = check(inst.choice, None, "mu-cum(1)").to_json(inst.closed_family)
    assert list(js) == ["condition", "alpha", "verdict", "witness", "tuples", "skipped"]
    assert js["condition"] == "mu-cum" and js["alpha"] == 1 and js["verdict"] == "fails"


def test_check_all_runs_every_condition():
    inst = build_cum_example(2)
    reps = check_all(inst.choice, None, 3)
    by = {str(r.condition): r.holds for r in reps}
    assert by["mu-cumt(0)"] and by["mu-cumt(1)"] and not by["mu-cum(2)"]


@settings(max_examples=150)
@given(choices(), st.sampled_from(sorted(O.CONDITIONS)))
def test_base_conditions_match_oracle(f, tag):
    rep = check(f, None, tag)
    assert rep.holds == O.CONDITIONS[tag](table(f))
    if not rep.holds:
        assert replay(f, tag, rep.witness)


@settings(max_examples=150)
@given(choices(inside=False), st.sampled_from(sorted(O.CONDITIONS)))
def test_base_conditions_match_oracle_without_inclusion(f, tag):
    assert check(f, None, tag).holds == O.CONDITIONS[tag](table(f))


@settings(max_examples=120)
@given(choices(max_sets=5), st.integers(0, 2), st.booleans())
def test_ladder_matches_oracle(f, alpha, only_last):
    rep = check_cum(f, None, alpha, only_last)
    assert rep.holds == O.ladder_holds(table(f), alpha, only_last)
    if not rep.holds:
        assert replay(f, rep.condition, rep.witness)
        assert len(rep.witness.bindings["X"]) == alpha + 1


@settings(max_examples=100)
@given(choices(), st.sampled_from([str(c) for c in all_condition_ids(2)]))
def test_bare_table_entry_agrees(f, cid):
    c = ConditionId.parse(cid)
    fast = violation(f.domain.masks, f.images, f.domain._index, c)
    assert (fast is None) == check(f, None, c).holds


@settings(max_examples=100)
@given(choices(max_sets=5))
def test_ladder_downward_and_transitive_variant(f):
    if not (check(f, None, "mu-subset").holds and check(f, None, "mu-PR").holds):
        return
    cum = [check_cum(f, None, a, False).holds for a in range(3)]
    cumt = [check_cum(f, None, a, True).holds for a in range(3)]
    for a in range(3):
        for b in range(a):
            assert not cum[a] or cum[b]
            assert not cumt[a] or cumt[b]
        assert not cumt[a] or cum[a]
    if cum[0]:
        assert check(f, None, "mu-CUM").holds
