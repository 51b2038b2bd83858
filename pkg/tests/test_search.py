import json
from itertools import combinations, product

import pytest

import oracle as O
from helpers import FROZEN, table
from prefsem.conditions import check, replay
from prefsem.errors import SearchSpaceTooLargeError
from prefsem.search import (ImplicationQuery, InstanceSpec, cardinality, enumerate_instances,
                            implication_matrix, load_catalog, select_rows, test_implication)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_cardinality_matches_oracle(g):
    assert cardinality(InstanceSpec(g)) == FROZEN["search_counts"]["arbitrary"][str(g)]


def test_full_powerset_on_two_elements():
    # 1 * 2 * 2 * 4 images for the subsets {}, {a}, {b}, {a,b}
    spec = InstanceSpec(2, ("full-powerset",))
    assert cardinality(spec) == 16
    assert len(list(enumerate_instances(spec))) == 16


def test_unpruned_counts_every_image():
    spec = InstanceSpec(2, ("full-powerset",), pruned=False)
    assert cardinality(spec) == 4 ** 4
    with pytest.raises(ValueError):
        list(enumerate_instances(InstanceSpec(3, pruned=False)))


@pytest.mark.parametrize("g", [1, 2, 3])
def test_filtered_stream_matches_oracle_count(g):
    spec = InstanceSpec(g, required_conditions=("mu-PR",))
    assert sum(1 for _ in enumerate_instances(spec)) == FROZEN["search_counts"]["mu-PR"][str(g)]


def test_stream_is_resumable():
    spec = InstanceSpec(2)
    full = [(i.index, i.choice) for i in enumerate_instances(spec)]
    tail = [(i.index, i.choice) for i in enumerate_instances(spec, start=40)]
    assert [x for x in full if x[0] >= 40] == tail
    assert [i for i, _ in full] == list(range(len(full)))


def test_preferential_stream_contains_three_element_chain():
    spec = InstanceSpec(3, ("full-powerset",), origin="preferential")
    target = frozenset({(("c", 0), ("b", 0)), (("b", 0), ("a", 0))})
    assert any(i.structure.relation == target for i in enumerate_instances(spec))


def test_guards():
    with pytest.raises(SearchSpaceTooLargeError):
        list(enumerate_instances(InstanceSpec(3), limit=100))
    with pytest.raises(SearchSpaceTooLargeError):
        test_implication(ImplicationQuery(("mu-PR",), "mu-CUM"), InstanceSpec(6))
    with pytest.raises(ValueError):
        InstanceSpec(2, ("not-a-constraint",))
    with pytest.raises(ValueError):
        ImplicationQuery((), "mu-CUM")


def _oracle_counterexample(g, premises, conclusion):
    subsets = O.powerset(range(g))
    for r in range(1, len(subsets) + 1):
        for fam in combinations(subsets, r):
            for images in product(*[O.powerset(x) for x in fam]):
                f = dict(zip(fam, images))
                if all(O.CONDITIONS[p](f) for p in premises) and not O.CONDITIONS[conclusion](f):
                    return True
    return False


QUERIES = [
    (("mu-CUT", "mu-CM"), "mu-CUM"),
    (("mu-PR",), "mu-CUT"),
    (("mu-CUM",), "mu-PR"),
    (("mu-PR",), "mu-OR"),
    (("mu-RatM",), "mu-eq"),
    (("mu-subset-supset",), "mu-CUM"),
    (("mu-CUM",), "mu-subset-supset"),
]


@pytest.mark.parametrize("premises,conclusion", QUERIES)
@pytest.mark.parametrize("g", [1, 2])
def test_verdicts_match_brute_force_oracle(premises, conclusion, g):
    res = test_implication(ImplicationQuery(premises, conclusion), InstanceSpec(g))
    assert (res.verdict == "refuted") == _oracle_counterexample(g, premises, conclusion)
    if res.witness is not None:
        f = table(res.witness.choice)
        assert all(O.CONDITIONS[p](f) for p in premises)
        assert not O.CONDITIONS[conclusion](f)
        assert res.replayed


def test_thread_count_does_not_change_result():
    q = ImplicationQuery(("mu-PR",), "mu-CUM")
    one = test_implication(q, InstanceSpec(3), threads=1)
    two = test_implication(q, InstanceSpec(3), threads=2)
    assert json.dumps(one.to_json()) == json.dumps(two.to_json())
    assert one.verdict == "refuted"


def test_catalog_rows_expand():
    rows = load_catalog(2)
    ids = [r.id for r in rows]
    assert len(ids) == len(set(ids))
    assert "mu-base-6" in ids
    assert select_rows(rows, ["mu-base-6"])[0].id == "mu-base-6"
    assert all(r.id.startswith("cum-alpha-1") for r in select_rows(rows, ["cum-alpha-1*"]))


def test_catalog_rows_at_small_scale():
    rows = select_rows(load_catalog(1), ["mu-base-4", "mu-base-6", "mu-base-9", "mu-base-19"])
    out = implication_matrix(rows, InstanceSpec(3))
    by = {m.row.id: m for m in out}
    assert by["mu-base-6"].result.verdict == "confirmed-at-scale"
    assert by["mu-base-4"].result.verdict == "refuted"
    assert by["mu-base-19"].result is None
    for m in out:
        assert m.matches is not False
        if m.result is not None and m.result.witness is not None:
            w = m.result.witness
            rep = check(w.choice, None, m.row.query.conclusion)
            assert replay(w.choice, m.row.query.conclusion, rep.witness)


def test_ladder_row_uses_explicit_witness():
    rows = [r for r in load_catalog(1) if r.base_id == "cum-alpha-3.3"]
    assert rows
    for m in implication_matrix(rows, InstanceSpec(3)):
        assert m.result.verdict == "refuted"
        assert m.result.witness_source.startswith("explicit:ladder")
