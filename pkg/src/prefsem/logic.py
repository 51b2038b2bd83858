"""Finite propositional semantics for choice functions over model sets.

In a finite language every set of models is definable, so a deductively
closed theory is represented losslessly by its model set, and so is a
formula.  Theory operations translate as follows:

* ``T ⊆ S`` (as closed theories)  iff  ``M(S) ⊆ M(T)``
* closure of ``T ∪ S``             has models ``M(T) ∩ M(S)``
* ``T ∨ S`` and ``T ∩ S``          have models ``M(T) ∪ M(S)``
* ``Con(T ∪ S)``                   iff  ``M(T) ∩ M(S) ≠ ∅``

The nonmonotonic closure of ``T`` is ``Th(f(M(T)))``; its model set is
``f(M(T))``.  Rule checkers below are phrased in theory vocabulary and never
call the algebraic checkers of :mod:`prefsem.conditions`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator

from .errors import NotInDomainError
from .sets import ChoiceFunction, GroundSet, SetFamily, SubsetRef, bits

DEFAULT_VARS = 3
MAX_VARS = 4

RULES = (
    "AND", "RW", "CCL", "LLE", "SC", "REF", "CP", "PR", "CUT", "CM", "ResM",
    "CUM", "subset-supset", "RatM", "RatM=", "Log='", "Log-parallel",
    "Log-cup", "Log-cup'", "OR", "wOR", "disjOR",
)

# logical rule -> algebraic condition, for the rows where the two coincide
# on the full powerset of a finite model space
PAIRED = {
    "SC": "mu-subset", "PR": "mu-PR", "CUT": "mu-CUT", "CM": "mu-CM",
    "CUM": "mu-CUM", "subset-supset": "mu-subset-supset", "RatM=": "mu-eq",
}


class PropLanguage:
    """Propositional atoms; model ``m`` makes atom ``i`` true iff bit ``i`` of ``m``."""

    def __init__(self, variables: Iterable[str]) -> None:
        variables = tuple(variables)
        if not variables:
            raise ValueError("a language needs at least one variable")
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variables")
        if len(variables) > MAX_VARS:
            raise ValueError(f"at most {MAX_VARS} variables are supported")
        self.variables = variables
        self.models = GroundSet(self.model_label(m) for m in range(1 << len(variables)))

    @classmethod
    def standard(cls, n: int) -> PropLanguage:
        return cls("pqrs"[:n])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PropLanguage) and self.variables == other.variables

    def __hash__(self) -> int:
        return hash(self.variables)

    def model_label(self, m: int) -> str:
        # a barred letter is a false atom, e.g. "pq̄r"
        return "".join(v if m >> i & 1 else v + "̄" for i, v in enumerate(self.variables))

    def parse_model(self, label: str) -> int:
        """Model from a label such as ``pq̄r``, ``p~qr``, ``p!q r`` or ``p¬qr``.

        Every variable must occur exactly once; a barred or prefixed-negated
        variable is false.
        """
        value = 0
        seen: set[str] = set()
        negate = False
        last: str | None = None
        for ch in label:
            if ch in "~!¬":
                negate = True
            elif ch == "\u0304":
                if last is None:
                    raise ValueError(f"bad model label {label!r}")
                value &= ~(1 << self.variables.index(last))
            elif ch in self.variables:
                if ch in seen:
                    raise ValueError(f"variable {ch!r} repeated in {label!r}")
                seen.add(ch)
                if not negate:
                    value |= 1 << self.variables.index(ch)
                negate = False
                last = ch
            elif ch in " ,":
                continue
            else:
                raise ValueError(f"unknown symbol {ch!r} in model label {label!r}")
        if seen != set(self.variables):
            raise ValueError(f"model label {label!r} must mention every variable once")
        return value

    def atom(self, name: str) -> TheoryRep:
        i = self.variables.index(name)
        return TheoryRep(self, sum(1 << m for m in range(1 << len(self.variables)) if m >> i & 1))

    def top(self) -> TheoryRep:
        return TheoryRep(self, self.models.full)

    def bottom(self) -> TheoryRep:
        return TheoryRep(self, 0)

    def theories(self) -> Iterator[TheoryRep]:
        for m in range(1 << len(self.models)):
            yield TheoryRep(self, m)

    def powerset_family(self) -> SetFamily:
        return SetFamily.powerset(self.models)


@dataclass(frozen=True)
class TheoryRep:
    """A deductively closed theory (or a formula), stored as its model set."""

    language: PropLanguage
    model_set: SubsetRef

    def subtheory_of(self, other: TheoryRep) -> bool:
        """``self ⊆ other`` as sets of formulas, i.e. ``other ⊢ self``."""
        return other.model_set & ~self.model_set == 0

    def entails(self, other: TheoryRep) -> bool:
        return other.subtheory_of(self)

    def union(self, other: TheoryRep) -> TheoryRep:
        """Classical closure of ``self ∪ other``."""
        return TheoryRep(self.language, self.model_set & other.model_set)

    def intersection(self, other: TheoryRep) -> TheoryRep:
        return TheoryRep(self.language, self.model_set | other.model_set)

    def disjunction(self, other: TheoryRep) -> TheoryRep:
        """``{φ ∨ ψ : φ ∈ self, ψ ∈ other}``."""
        return TheoryRep(self.language, self.model_set | other.model_set)

    @property
    def consistent(self) -> bool:
        return self.model_set != 0

    def labels(self) -> list[str]:
        return self.language.models.labels(self.model_set)


def models_of(t: TheoryRep) -> frozenset[str]:
    return frozenset(t.labels())


def theory_of(language: PropLanguage, models: Iterable[str]) -> TheoryRep:
    return TheoryRep(language, language.models.subset(models))


class ConsequenceOp:
    """``T |~ φ`` iff ``f(M(T)) ⊆ M(φ)``, for theories with ``M(T)`` in the domain."""

    def __init__(self, language: PropLanguage, choice: ChoiceFunction) -> None:
        if choice.domain.ground != language.models:
            raise ValueError("choice function is not over the models of the language")
        self.language = language
        self.choice = choice

    def defined(self, t: TheoryRep) -> bool:
        return t.model_set in self.choice.domain

    def theories(self) -> list[TheoryRep]:
        return [TheoryRep(self.language, m) for m in self.choice.domain.masks]

    def closure(self, t: TheoryRep) -> TheoryRep:
        """The nonmonotonic closure of ``t``."""
        return consequences(self, t)

    def infers(self, t: TheoryRep, phi: TheoryRep) -> bool:
        return phi.subtheory_of(self.closure(t))


def consequences(op: ConsequenceOp, t: TheoryRep) -> TheoryRep:
    if not op.defined(t):
        raise NotInDomainError(t.labels())
    return TheoryRep(op.language, op.choice(t.model_set))


# ---------------------------------------------------------------------------
# rule checkers; each returns (witness bindings or None, tuples, skipped)

def _pairs(op: ConsequenceOp) -> Iterator[tuple[TheoryRep, TheoryRep]]:
    ts = op.theories()
    return product(ts, ts)


def _basic_consequences(op: ConsequenceOp, t: TheoryRep) -> list[TheoryRep]:
    """The strongest consequence plus every consequence missing exactly one model.

    Any consequence of ``t`` is the conjunction of some of these, so they
    generate all of them under (AND).
    """
    c = op.closure(t)
    full = op.language.models.full
    out = [c]
    out += [TheoryRep(op.language, full & ~(1 << m)) for m in bits(full & ~c.model_set)]
    return out


def _rule_and(op):
    n = 0
    for t in op.theories():
        acc = _basic_consequences(op, t)
        for p in acc:
            for q in acc:
                n += 1
                if not op.infers(t, p.union(q)):
                    return {"T": t, "psi": p, "psi'": q}, n, 0
    return None, n, 0


def _rule_rw(op):
    n = 0
    for t in op.theories():
        for p in _basic_consequences(op, t):
            if not op.infers(t, p):
                continue
            for q in _weakenings(p):
                n += 1
                if not op.infers(t, q):
                    return {"T": t, "psi": p, "psi'": q}, n, 0
    return None, n, 0


def _weakenings(p: TheoryRep) -> Iterator[TheoryRep]:
    """Formulas entailed by ``p`` (model supersets)."""
    full = p.language.models.full
    free = full & ~p.model_set
    sub = free
    while True:
        yield TheoryRep(p.language, p.model_set | sub)
        if sub == 0:
            return
        sub = (sub - 1) & free


def _rule_ccl(op):
    n = 0
    for t in op.theories():
        n += 1
        c = op.closure(t)
        if theory_of(op.language, models_of(c)) != c:
            return {"T": t}, n, 0
    return None, n, 0


def _rule_lle(op):
    n = 0
    for t, s in _pairs(op):
        n += 1
        if t.subtheory_of(s) and s.subtheory_of(t) and op.closure(t) != op.closure(s):
            return {"T": t, "T'": s}, n, 0
    return None, n, 0


def _rule_sc(op):
    n = 0
    for t in op.theories():
        n += 1
        if not t.subtheory_of(op.closure(t)):
            return {"T": t}, n, 0
    return None, n, 0


def _rule_ref(op):
    # alpha ranges over the formulas missing one model outside M(T); every
    # classical consequence of T is a conjunction of these
    n = 0
    full = op.language.models.full
    for t in op.theories():
        for m in bits(full & ~t.model_set):
            a = TheoryRep(op.language, full & ~(1 << m))
            n += 1
            if not op.infers(t, a):
                return {"T": t, "alpha": a}, n, 0
    return None, n, 0


def _rule_cp(op):
    n = 0
    bottom = op.language.bottom()
    for t in op.theories():
        n += 1
        if op.infers(t, bottom) and t.consistent:
            return {"T": t}, n, 0
    return None, n, 0


def _compound_loop(op, build, body, premise=None):
    """(T, T') loops where the closure of a compound theory is needed."""
    n = s = 0
    for t, u in _pairs(op):
        n += 1
        if premise is not None and not premise(t, u):
            continue
        c = build(t, u)
        if not op.defined(c):
            s += 1
            continue
        if body(t, u, op.closure(c)):
            return {"T": t, "T'": u}, n, s
    return None, n, s


def _rule_pr(op):
    # closure(T ∪ T') ⊆ Cl(closure(T) ∪ T')
    return _compound_loop(
        op, TheoryRep.union,
        lambda t, u, cc: not cc.subtheory_of(op.closure(t).union(u)))


def _cut_premise(op, t, u):
    # T ⊆ Cl(T') ⊆ closure(T)
    return t.subtheory_of(u) and u.subtheory_of(op.closure(t))


def _premise_loop(op, premise, violated):
    n = 0
    for t, u in _pairs(op):
        n += 1
        if premise(t, u) and violated(t, u):
            return {"T": t, "T'": u}, n, 0
    return None, n, 0


def _rule_cut(op):
    return _premise_loop(op, lambda t, u: _cut_premise(op, t, u),
                         lambda t, u: not op.closure(u).subtheory_of(op.closure(t)))


def _rule_cm(op):
    return _premise_loop(op, lambda t, u: _cut_premise(op, t, u),
                         lambda t, u: not op.closure(t).subtheory_of(op.closure(u)))


def _rule_cum(op):
    return _premise_loop(op, lambda t, u: _cut_premise(op, t, u),
                         lambda t, u: op.closure(t) != op.closure(u))


def _rule_subset_supset(op):
    return _premise_loop(
        op, lambda t, u: t.subtheory_of(op.closure(u)) and u.subtheory_of(op.closure(t)),
        lambda t, u: op.closure(t) != op.closure(u))


def _rat_premise(op, t, u):
    # Con(T ∪ closure(T')) and T ⊢ T'
    return t.union(op.closure(u)).consistent and t.entails(u)


def _rule_ratm(op):
    return _premise_loop(op, lambda t, u: _rat_premise(op, t, u),
                         lambda t, u: not op.closure(u).union(t).subtheory_of(op.closure(t)))


def _rule_ratm_eq(op):
    return _premise_loop(op, lambda t, u: _rat_premise(op, t, u),
                         lambda t, u: op.closure(t) != op.closure(u).union(t))


def _rule_log_eq_prime(op):
    # Con(closure(T') ∪ T) => closure(T ∪ T') = Cl(closure(T') ∪ T)
    return _compound_loop(
        op, TheoryRep.union,
        lambda t, u, cc: cc != op.closure(u).union(t),
        premise=lambda t, u: op.closure(u).union(t).consistent)


def _rule_log_parallel(op):
    def body(t, u, cc):
        a, b = op.closure(t), op.closure(u)
        return cc not in (a, b, a.intersection(b))
    return _compound_loop(op, TheoryRep.disjunction, body)


def _cup_premise(op, t, u):
    # Con(closure(T') ∪ T), not Con(closure(T') ∪ closure(T))
    cu = op.closure(u)
    return cu.union(t).consistent and not cu.union(op.closure(t)).consistent


def _rule_log_cup(op):
    return _compound_loop(op, TheoryRep.disjunction,
                          lambda t, u, cc: cc.union(u).consistent,
                          premise=lambda t, u: _cup_premise(op, t, u))


def _rule_log_cup_prime(op):
    return _compound_loop(op, TheoryRep.disjunction,
                          lambda t, u, cc: cc != op.closure(t),
                          premise=lambda t, u: _cup_premise(op, t, u))


def _rule_or(op):
    return _compound_loop(
        op, TheoryRep.disjunction,
        lambda t, u, cc: not op.closure(t).intersection(op.closure(u)).subtheory_of(cc))


def _rule_wor(op):
    return _compound_loop(
        op, TheoryRep.disjunction,
        lambda t, u, cc: not op.closure(t).intersection(u).subtheory_of(cc))


def _rule_disjor(op):
    return _compound_loop(
        op, TheoryRep.disjunction,
        lambda t, u, cc: not op.closure(t).intersection(op.closure(u)).subtheory_of(cc),
        premise=lambda t, u: not t.union(u).consistent)


def _rule_resm(op):
    # T |~ alpha, T |~ beta  =>  T ∪ {alpha} |~ beta.  beta is taken to be the
    # strongest consequence: if any beta fails, that one fails too.
    n = s = 0
    for t in op.theories():
        beta = op.closure(t)
        for a in _weakenings(beta):
            n += 1
            ta = t.union(a)
            if not op.defined(ta):
                s += 1
                continue
            if not op.infers(ta, beta):
                return {"T": t, "alpha": a, "beta": beta}, n, s
    return None, n, s


_RULES = {
    "AND": _rule_and, "RW": _rule_rw, "CCL": _rule_ccl, "LLE": _rule_lle,
    "SC": _rule_sc, "REF": _rule_ref, "CP": _rule_cp, "PR": _rule_pr,
    "CUT": _rule_cut, "CM": _rule_cm, "ResM": _rule_resm, "CUM": _rule_cum,
    "subset-supset": _rule_subset_supset, "RatM": _rule_ratm,
    "RatM=": _rule_ratm_eq, "Log='": _rule_log_eq_prime,
    "Log-parallel": _rule_log_parallel, "Log-cup": _rule_log_cup,
    "Log-cup'": _rule_log_cup_prime, "OR": _rule_or, "wOR": _rule_wor,
    "disjOR": _rule_disjor,
}


@dataclass(frozen=True)
class RuleReport:
    rule: str
    holds: bool
    witness: dict | None = None
    tuples: int = 0
    skipped: int = 0

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else "fails"

    def to_json(self) -> dict:
        w = None
        if self.witness is not None:
            w = {k: v.labels() for k, v in self.witness.items()}
        return {"rule": self.rule, "verdict": self.verdict, "witness": w,
                "tuples": self.tuples, "skipped": self.skipped}


def check_logical_rule(op: ConsequenceOp, rule: str) -> RuleReport:
    try:
        fn = _RULES[rule]
    except KeyError:
        raise ValueError(f"unknown rule {rule!r}; expected one of {', '.join(RULES)}") from None
    w, n, s = fn(op)
    return RuleReport(rule, w is None, w, n, s)
