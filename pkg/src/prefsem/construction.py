"""Builders for the two concrete structures of the cumulativity ladder.

``build_cum_example(kappa)`` produces, for finite ``kappa >= 1``, a
non-transitive structure and an intersection-closed family on which
``mu-cumt(alpha)`` holds for every ``alpha < kappa`` while ``mu-cum(kappa)``
fails.  ``build_fact23_example(alpha)`` produces the three-element smooth,
non-transitive structure refuting ``mu-cumt(alpha)``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .conditions import ConditionId, ConditionReport, check
from .errors import ClaimViolatedError, KappaOutOfRangeError
from .preferential import PreferentialStructure, induced_choice, transitive_closure
from .sets import ChoiceFunction, GroundSet, SetFamily, close_under_intersections, is_closed_under

DEFAULT_KAPPA_MAX = 6


def kappa_guard() -> int:
    return int(os.environ.get("PREFSEM_KAPPA_MAX", DEFAULT_KAPPA_MAX))


def _x(i: int) -> str:
    return f"x{i}"


def _xp(i: int) -> str:
    return f"x'{i}"


@dataclass(frozen=True)
class CumExampleInstance:
    kappa: int
    structure: PreferentialStructure
    generators: SetFamily
    closed_family: SetFamily
    choice: ChoiceFunction

    def with_structure(self, structure: PreferentialStructure) -> CumExampleInstance:
        """Same sets, different relation (used to mutate the example)."""
        return CumExampleInstance(self.kappa, structure, self.generators, self.closed_family,
                                  induced_choice(structure, self.closed_family))

    def expected_chain(self) -> tuple[int, ...]:
        """U followed by X_0, ..., X_{kappa-1}, X'_kappa."""
        g = self.generators
        names = ["U"] + [f"X_{i}" for i in range(self.kappa)] + [f"X'_{self.kappa}"]
        return tuple(g.get(n) for n in names)


def build_cum_example(kappa: int, max_kappa: int | None = None) -> CumExampleInstance:
    guard = kappa_guard() if max_kappa is None else max_kappa
    if not 1 <= kappa <= guard:
        raise KappaOutOfRangeError(f"kappa={kappa} outside 1..{guard}")
    labels = ["a", "b", "c"] + [_x(i) for i in range(kappa + 2)] + [_xp(i) for i in range(kappa + 1)]
    ground = GroundSet(labels)
    pairs = [("a", "b"), ("b", "c")]
    pairs += [(_x(i), _x(i + 1)) for i in range(kappa + 1)]
    pairs += [(_x(i), _xp(i)) for i in range(kappa + 1)]
    structure = PreferentialStructure.from_element_relation(ground, pairs)
    members = {"U": ["a", "c", _x(0)]}
    for i in range(kappa):
        members[f"X_{i}"] = ["c", _x(i), _xp(i), _x(i + 1)]
    members[f"X'_{kappa}"] = ["a", "b", "c", _x(kappa), _xp(kappa), _x(kappa + 1)]
    generators = SetFamily.from_labels(ground, members)
    closed = close_under_intersections(generators)
    return CumExampleInstance(kappa, structure, generators, closed, induced_choice(structure, closed))


def build_fact23_example(alpha: int) -> tuple[PreferentialStructure, SetFamily]:
    """Structure c < b < a (not transitive) over {a,b,c}, family U={a,c},
    X_0={b,c}, X_1=...=X_alpha={a,b} and their intersections."""
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    ground = GroundSet(["a", "b", "c"])
    structure = PreferentialStructure.from_element_relation(ground, [("c", "b"), ("b", "a")])
    members = {"U": ["a", "c"], "X_0": ["b", "c"]}
    for i in range(1, alpha + 1):
        # X_1..X_alpha coincide; deduplication keeps the name X_1
        members[f"X_{i}"] = ["a", "b"]
    family = close_under_intersections(SetFamily.from_labels(ground, members))
    return structure, family


@dataclass
class CumExampleReport:
    kappa: int
    claims: dict[str, bool] = field(default_factory=dict)
    reports: dict[str, list[ConditionReport]] = field(default_factory=dict)
    witness_chain_matches: bool = False
    family: SetFamily | None = None

    @property
    def confirmed(self) -> bool:
        return all(self.claims.values())

    @property
    def first_failed(self) -> str | None:
        for k in "abcde":
            if not self.claims.get(k, False):
                return k
        return None

    @property
    def e_report(self) -> ConditionReport:
        return self.reports["e"][0]

    def to_json(self) -> dict:
        fam = self.family
        return {
            "kappa": self.kappa,
            "confirmed": self.confirmed,
            "claims": {
                k: {"holds": self.claims[k],
                    "checks": [r.to_json(fam) for r in self.reports.get(k, [])]}
                for k in "abcde"
            },
            "e_witness_is_full_chain": self.witness_chain_matches,
        }


def verify_cum_example(instance: CumExampleInstance, strict: bool = True) -> CumExampleReport:
    """Check claims (a)-(e) on ``instance``.

    (a) mu-subset and mu-PR hold; (b) mu-CUM holds; (c) the family is closed
    under intersections; (d) mu-cumt(alpha) holds for alpha < kappa;
    (e) mu-cum(kappa) fails on the element ``c`` along the chain U, X_0, ...,
    X'_kappa.  With ``strict``, raises :class:`ClaimViolatedError` naming the
    first failed claim.
    """
    f, fam, k = instance.choice, instance.closed_family, instance.kappa
    rep = CumExampleReport(k, family=fam)
    rep.reports["a"] = [check(f, fam, "mu-subset"), check(f, fam, "mu-PR")]
    rep.reports["b"] = [check(f, fam, "mu-CUM")]
    closure = is_closed_under(fam, "intersection")
    rep.reports["c"] = []
    rep.reports["d"] = [check(f, fam, ConditionId("mu-cumt", a)) for a in range(k)]
    rep.reports["e"] = [check(f, fam, ConditionId("mu-cum", k))]
    for key in "abd":
        rep.claims[key] = all(r.holds for r in rep.reports[key])
    rep.claims["c"] = closure.holds
    e = rep.e_report
    c_pos = fam.ground.index("c")
    rep.witness_chain_matches = bool(
        e.witness is not None
        and (e.witness.bindings["U"],) + e.witness.bindings["X"] == instance.expected_chain())
    rep.claims["e"] = (not e.holds and e.witness.element == c_pos and rep.witness_chain_matches)
    if strict and not rep.confirmed:
        raise ClaimViolatedError(rep.first_failed, rep)
    return rep


def mutated_transitive(instance: CumExampleInstance) -> CumExampleInstance:
    return instance.with_structure(transitive_closure(instance.structure))
