import json

import pytest

from helpers import FROZEN, table
import oracle as O
from prefsem.conditions import check
from prefsem.construction import (build_cum_example, build_fact23_example, mutated_transitive,
                                  verify_cum_example)
from prefsem.errors import ClaimViolatedError, KappaOutOfRangeError
from prefsem.preferential import induced_choice, is_smooth


def test_kappa_one_generators():
    inst = build_cum_example(1)
    g = inst.generators.ground
    named = {n: g.labels(m) for n, m in inst.generators.items()}
    assert named == {"U": ["a", "c", "x0"], "X_0": ["c", "x0", "x1", "x'0"],
                     "X'_1": ["a", "b", "c", "x1", "x2", "x'1"]}


@pytest.mark.parametrize("kappa", [1, 2, 3])
def test_example_matches_frozen_oracle(kappa):
    frozen = FROZEN["ladder_example"][str(kappa)]
    inst = build_cum_example(kappa)
    assert len(inst.closed_family) == frozen["sets"]
    f = table(inst.choice)
    assert O.mu_subset(f) == frozen["mu-subset"]
    rep = verify_cum_example(inst)
    assert rep.confirmed
    assert [r.holds for r in rep.reports["d"]] == frozen["cumt"]
    assert rep.e_report.holds == frozen["cum"][-1]
    assert rep.claims["b"] == frozen["mu-CUM"]
    w = rep.e_report.witness
    fam = inst.closed_family
    assert [sorted(fam.ground.labels(x)) for x in w.bindings["X"]] == frozen["violation"]["X"]


def test_kappa_four_confirmed():
    rep = verify_cum_example(build_cum_example(4))
    assert rep.confirmed and rep.witness_chain_matches


def test_kappa_guard():
    with pytest.raises(KappaOutOfRangeError):
        build_cum_example(0)
    with pytest.raises(KappaOutOfRangeError):
        build_cum_example(7)
    assert build_cum_example(7, max_kappa=7).kappa == 7


def test_kappa_guard_from_environment(monkeypatch):
    monkeypatch.setenv("PREFSEM_KAPPA_MAX", "2")
    with pytest.raises(KappaOutOfRangeError):
        build_cum_example(3)


def test_transitive_mutation_is_reported_violated():
    mutated = mutated_transitive(build_cum_example(1))
    rep = verify_cum_example(mutated, strict=False)
    assert not rep.confirmed
    assert rep.first_failed == "e"
    with pytest.raises(ClaimViolatedError) as err:
        verify_cum_example(mutated)
    assert err.value.claim == "e"


def test_report_is_json_serialisable():
    js = verify_cum_example(build_cum_example(2)).to_json()
    text = json.dumps(js)
    assert js["confirmed"] and js["e_witness_is_full_chain"]
    assert set(js["claims"]) == set("abcde")
    assert "x'2" in text


@pytest.mark.parametrize("alpha", [1, 2, 3])
def test_three_element_example(alpha):
    s, fam = build_fact23_example(alpha)
    assert is_smooth(s, fam).holds == FROZEN["fact_three"]["smooth"]
    f = induced_choice(s, fam)
    rep = check(f, None, f"mu-cumt({alpha})")
    assert not rep.holds
    assert fam.ground.elements[rep.witness.element] == "a"
