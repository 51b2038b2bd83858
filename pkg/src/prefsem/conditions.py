"""Algebraic conditions on choice functions and the cumulativity ladder.

Every checker exhaustively quantifies the condition body over the members
of the choice function's domain.  Set variables ``X, Y, A, B, U`` range over
family members.  When a body passes a *compound* set (``X | Y``, ``X & Y``,
``{a, b}``) to ``f`` and that set is not a member, the tuple is skipped and
counted in ``ConditionReport.skipped``; premises not involving ``f`` of the
compound are evaluated first, so vacuous tuples are never counted as skipped.

Witnesses are replayable: :func:`replay` re-evaluates the condition body on
the bindings with ordinary Python sets, independently of the bit-mask loops.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .errors import NotInDomainError
from .sets import ChoiceFunction, SetFamily, bits, lowest

TAGS = (
    "mu-subset", "mu-PR", "mu-PR'", "mu-OR", "mu-wOR", "mu-disjOR",
    "mu-empty", "mu-empty-fin", "mu-CUT", "mu-CM", "mu-ResM", "mu-CUM",
    "mu-subset-supset", "mu-RatM", "mu-eq", "mu-eq'", "mu-parallel",
    "mu-cup", "mu-cup'", "mu-in",
)
LADDER_TAGS = ("mu-cum", "mu-cumt")

_ID_RE = re.compile(r"^(mu-cumt?)\s*[(:]\s*(\d+)\s*\)?$")


@dataclass(frozen=True, order=True)
class ConditionId:
    tag: str
    alpha: int | None = None

    def __post_init__(self) -> None:
        if self.tag in LADDER_TAGS:
            if self.alpha is None or self.alpha < 0:
                raise ValueError(f"{self.tag} needs a natural-number alpha")
        elif self.tag in TAGS:
            if self.alpha is not None:
                raise ValueError(f"{self.tag} takes no alpha")
        else:
            raise ValueError(f"unknown condition {self.tag!r}")

    def __str__(self) -> str:
        return self.tag if self.alpha is None else f"{self.tag}({self.alpha})"

    @classmethod
    def parse(cls, text: str) -> ConditionId:
        text = text.strip()
        m = _ID_RE.match(text)
        if m:
            return cls(m.group(1), int(m.group(2)))
        return cls(text)


def cond(text: str) -> ConditionId:
    return ConditionId.parse(text)


def all_condition_ids(alpha_max: int) -> list[ConditionId]:
    ids = [ConditionId(t) for t in TAGS]
    ids += [ConditionId("mu-cum", a) for a in range(alpha_max + 1)]
    ids += [ConditionId("mu-cumt", a) for a in range(alpha_max + 1)]
    return ids


@dataclass(frozen=True)
class Witness:
    """Quantifier bindings refuting a condition.

    ``bindings`` maps variable names to subset masks; for the ladder the key
    ``X`` holds the whole sequence as a tuple of masks.  ``element`` is a
    ground position (the offending element), when the body has one.
    """

    bindings: dict
    element: int | None = None

    def to_json(self, family: SetFamily) -> dict:
        g = family.ground
        out: dict = {}
        for k, v in self.bindings.items():
            if isinstance(v, tuple):
                out[k] = [g.labels(m) for m in v]
            elif k in ("a", "b"):
                out[k] = g.elements[v]
            else:
                out[k] = g.labels(v)
        if self.element is not None:
            out["element"] = g.elements[self.element]
        return out


@dataclass(frozen=True)
class ConditionReport:
    condition: ConditionId
    holds: bool
    witness: Witness | None = None
    tuples: int = 0
    skipped: int = 0

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else "fails"

    def to_json(self, family: SetFamily) -> dict:
        return {
            "condition": self.condition.tag,
            "alpha": self.condition.alpha,
            "verdict": self.verdict,
            "witness": self.witness.to_json(family) if self.witness else None,
            "tuples": self.tuples,
            "skipped": self.skipped,
        }


class _Ctx:
    __slots__ = ("ms", "im", "idx", "n")

    def __init__(self, f: ChoiceFunction) -> None:
        self.ms = f.domain.masks
        self.im = f.images
        self.idx = f.domain._index
        self.n = len(self.ms)


# Each checker returns (witness or None, tuples examined, tuples skipped).
Result = tuple["Witness | None", int, int]


def _w(element_mask: int = 0, **bindings) -> Witness:
    return Witness(bindings, lowest(element_mask) if element_mask else None)


def _mu_subset(c: _Ctx) -> Result:
    for i in range(c.n):
        v = c.im[i] & ~c.ms[i]
        if v:
            return _w(v, X=c.ms[i]), i + 1, 0
    return None, c.n, 0


def _mu_pr(c: _Ctx) -> Result:
    t = 0
    for i, x in enumerate(c.ms):
        fx = c.im[i]
        for j, y in enumerate(c.ms):
            t += 1
            if x & ~y == 0:
                v = c.im[j] & x & ~fx
                if v:
                    return _w(v, X=x, Y=y), t, 0
    return None, t, 0


def _pairs_with_compound(c: _Ctx, combine: Callable[[int, int], int],
                         premise, body) -> Result:
    """Loop (X, Y) where ``f`` is applied to ``combine(X, Y)``."""
    t = s = 0
    ms, im, idx = c.ms, c.im, c.idx
    for i, x in enumerate(ms):
        fx = im[i]
        for j, y in enumerate(ms):
            t += 1
            fy = im[j]
            if premise is not None and not premise(x, fx, y, fy):
                continue
            z = combine(x, y)
            k = idx.get(z)
            if k is None:
                s += 1
                continue
            w = body(x, fx, y, fy, im[k])
            if w is not None:
                return w, t, s
    return None, t, s


def _union(x: int, y: int) -> int:
    return x | y


def _inter(x: int, y: int) -> int:
    return x & y


def _mu_pr_prime(c: _Ctx) -> Result:
    def body(x, fx, y, fy, fz):
        v = fx & y & ~fz
        return _w(v, X=x, Y=y) if v else None
    return _pairs_with_compound(c, _inter, None, body)


def _mu_or(c: _Ctx) -> Result:
    def body(x, fx, y, fy, fz):
        v = fz & ~(fx | fy)
        return _w(v, X=x, Y=y) if v else None
    return _pairs_with_compound(c, _union, None, body)


def _mu_wor(c: _Ctx) -> Result:
    def body(x, fx, y, fy, fz):
        v = fz & ~(fx | y)
        return _w(v, X=x, Y=y) if v else None
    return _pairs_with_compound(c, _union, None, body)


def _mu_disjor(c: _Ctx) -> Result:
    def body(x, fx, y, fy, fz):
        v = fz & ~(fx | fy)
        return _w(v, X=x, Y=y) if v else None
    return _pairs_with_compound(c, _union, lambda x, fx, y, fy: x & y == 0, body)


def _mu_empty(c: _Ctx) -> Result:
    for i in range(c.n):
        if c.im[i] == 0 and c.ms[i] != 0:
            return _w(X=c.ms[i]), i + 1, 0
    return None, c.n, 0


def _cut_like(c: _Ctx, violation: Callable[[int, int], int]) -> Result:
    """Bodies with premise f(X) <= Y <= X."""
    t = 0
    for i, x in enumerate(c.ms):
        fx = c.im[i]
        for j, y in enumerate(c.ms):
            t += 1
            if fx & ~y == 0 and y & ~x == 0:
                v = violation(fx, c.im[j])
                if v:
                    return _w(v, X=x, Y=y), t, 0
    return None, t, 0


def _mu_cut(c: _Ctx) -> Result:
    return _cut_like(c, lambda fx, fy: fx & ~fy)


def _mu_cm(c: _Ctx) -> Result:
    return _cut_like(c, lambda fx, fy: fy & ~fx)


def _mu_cum(c: _Ctx) -> Result:
    return _cut_like(c, lambda fx, fy: fx ^ fy)


def _mu_resm(c: _Ctx) -> Result:
    t = s = 0
    ms, im, idx = c.ms, c.im, c.idx
    for i, x in enumerate(ms):
        fx = im[i]
        for a in ms:
            for b in ms:
                t += 1
                if fx & ~(a & b):
                    continue
                k = idx.get(x & a)
                if k is None:
                    s += 1
                    continue
                v = im[k] & ~b
                if v:
                    return _w(v, X=x, A=a, B=b), t, s
    return None, t, s


def _mu_subset_supset(c: _Ctx) -> Result:
    t = 0
    for i, x in enumerate(c.ms):
        fx = c.im[i]
        for j, y in enumerate(c.ms):
            t += 1
            fy = c.im[j]
            if fx & ~y == 0 and fy & ~x == 0:
                v = fx ^ fy
                if v:
                    return _w(v, X=x, Y=y), t, 0
    return None, t, 0


def _rat_like(c: _Ctx, violation: Callable[[int, int, int], int]) -> Result:
    """Bodies with premise X <= Y and X & f(Y) nonempty."""
    t = 0
    for i, x in enumerate(c.ms):
        fx = c.im[i]
        for j, y in enumerate(c.ms):
            t += 1
            fy = c.im[j]
            if x & ~y == 0 and x & fy:
                v = violation(x, fx, fy)
                if v:
                    return _w(v, X=x, Y=y), t, 0
    return None, t, 0


def _mu_ratm(c: _Ctx) -> Result:
    return _rat_like(c, lambda x, fx, fy: fx & ~(fy & x))


def _mu_eq(c: _Ctx) -> Result:
    return _rat_like(c, lambda x, fx, fy: fx ^ (fy & x))


def _mu_eq_prime(c: _Ctx) -> Result:
    # f(Y) & X nonempty => f(Y & X) = f(Y) & X
    def body(x, fx, y, fy, fz):
        v = fz ^ (fy & x)
        return _w(v, X=x, Y=y) if v else None
    return _pairs_with_compound(c, _inter, lambda x, fx, y, fy: fy & x, body)


def _mu_parallel(c: _Ctx) -> Result:
    def body(x, fx, y, fy, fz):
        if fz != fx and fz != fy and fz != fx | fy:
            return _w(X=x, Y=y)
        return None
    return _pairs_with_compound(c, _union, None, body)


def _cup_premise(x, fx, y, fy):
    return fy & x & ~fx


def _mu_cup(c: _Ctx) -> Result:
    def body(x, fx, y, fy, fz):
        v = fz & y
        return _w(v, X=x, Y=y) if v else None
    return _pairs_with_compound(c, _union, _cup_premise, body)


def _mu_cup_prime(c: _Ctx) -> Result:
    def body(x, fx, y, fy, fz):
        v = fz ^ fx
        return _w(v, X=x, Y=y) if v else None
    return _pairs_with_compound(c, _union, _cup_premise, body)


def _mu_in(c: _Ctx) -> Result:
    # a in X - f(X) => exists b in X with a not in f({a,b}); b ranges over the
    # elements whose pair {a,b} is a member.  No such b: the tuple is skipped.
    t = s = 0
    ms, im, idx = c.ms, c.im, c.idx
    for i, x in enumerate(ms):
        for a in bits(x & ~im[i]):
            t += 1
            abit = 1 << a
            found = False
            escape = False
            for b in bits(x):
                k = idx.get(abit | 1 << b)
                if k is None:
                    continue
                found = True
                if not im[k] & abit:
                    escape = True
                    break
            if not found:
                s += 1
            elif not escape:
                return Witness({"X": x, "a": a}, a), t, s
    return None, t, s


_CHECKERS: dict[str, Callable[[_Ctx], Result]] = {
    "mu-subset": _mu_subset,
    "mu-PR": _mu_pr,
    "mu-PR'": _mu_pr_prime,
    "mu-OR": _mu_or,
    "mu-wOR": _mu_wor,
    "mu-disjOR": _mu_disjor,
    "mu-empty": _mu_empty,
    "mu-empty-fin": _mu_empty,
    "mu-CUT": _mu_cut,
    "mu-CM": _mu_cm,
    "mu-ResM": _mu_resm,
    "mu-CUM": _mu_cum,
    "mu-subset-supset": _mu_subset_supset,
    "mu-RatM": _mu_ratm,
    "mu-eq": _mu_eq,
    "mu-eq'": _mu_eq_prime,
    "mu-parallel": _mu_parallel,
    "mu-cup": _mu_cup,
    "mu-cup'": _mu_cup_prime,
    "mu-in": _mu_in,
}


def _cum(c: _Ctx, alpha: int, transitive: bool) -> Result:
    """Sequences (U, X_0..X_alpha) with repetitions; depth-first, pruned at
    the first failed prerequisite f(X_b) <= U | X_0 | ... | X_{b-1}."""
    ms, im, n = c.ms, c.im, c.n
    tuples = 0
    seq = [0] * (alpha + 1)

    def rec(depth: int, union: int, inter: int, fu: int):
        nonlocal tuples
        for k in range(n):
            if im[k] & ~union:
                continue
            x = ms[k]
            cap = inter & x
            seq[depth] = k
            if depth == alpha:
                tuples += 1
                v = (x if transitive else cap) & fu & ~im[k]
                if v:
                    return v
            elif transitive or cap & fu:
                v = rec(depth + 1, union | x, cap, fu)
                if v:
                    return v
        return 0

    for u in range(n):
        fu = im[u]
        if not fu:
            continue
        v = rec(0, ms[u], -1, fu)
        if v:
            return _w(v, U=ms[u], X=tuple(ms[k] for k in seq)), tuples, 0
    return None, tuples, 0


def violation(masks: tuple[int, ...], images: tuple[int, ...], index: dict[int, int],
              condition: ConditionId) -> Witness | None:
    """Bare-table entry point for tight loops: ``images[k]`` is the value on
    ``masks[k]`` and ``index`` maps each mask to its position.  No validation."""
    ctx = _Ctx.__new__(_Ctx)
    ctx.ms, ctx.im, ctx.idx, ctx.n = masks, images, index, len(masks)
    if condition.tag in LADDER_TAGS:
        return _cum(ctx, condition.alpha, condition.tag == "mu-cumt")[0]
    return _CHECKERS[condition.tag](ctx)[0]


def _resolve(f: ChoiceFunction, family: SetFamily | None) -> ChoiceFunction:
    if family is None or family == f.domain:
        return f
    return f.restrict(family)


def check(f: ChoiceFunction, family: SetFamily | None, condition: ConditionId | str) -> ConditionReport:
    """Exhaustively check ``condition`` for ``f`` over ``family``.

    ``family`` defaults to the domain of ``f``; a sub-family restricts ``f``.
    """
    if isinstance(condition, str):
        condition = ConditionId.parse(condition)
    f = _resolve(f, family)
    ctx = _Ctx(f)
    if condition.tag in LADDER_TAGS:
        w, t, s = _cum(ctx, condition.alpha, condition.tag == "mu-cumt")
    else:
        w, t, s = _CHECKERS[condition.tag](ctx)
    return ConditionReport(condition, w is None, w, t, s)


def check_cum(f: ChoiceFunction, family: SetFamily | None, alpha: int,
              transitive_variant: bool) -> ConditionReport:
    return check(f, family, ConditionId("mu-cumt" if transitive_variant else "mu-cum", alpha))


def check_all(f: ChoiceFunction, family: SetFamily | None, alpha_max: int) -> list[ConditionReport]:
    return [check(f, family, cid) for cid in all_condition_ids(alpha_max)]


def holds(f: ChoiceFunction, condition: ConditionId | str) -> bool:
    return check(f, None, condition).holds


# ---------------------------------------------------------------------------
# replay: direct re-evaluation of condition bodies on Python sets

def _s(f: ChoiceFunction, mask: int) -> frozenset[int]:
    return frozenset(bits(mask))


def _fs(f: ChoiceFunction, s: frozenset[int]) -> frozenset[int] | None:
    mask = sum(1 << i for i in s)
    if mask not in f.domain:
        return None
    return frozenset(bits(f(mask)))


def replay(f: ChoiceFunction, condition: ConditionId | str, witness: Witness) -> bool:
    """True iff the condition body is violated at ``witness`` for ``f``."""
    if isinstance(condition, str):
        condition = ConditionId.parse(condition)
    b = witness.bindings
    tag = condition.tag
    try:
        if tag in LADDER_TAGS:
            return _replay_cum(f, condition, b)
        if tag == "mu-in":
            x = _s(f, b["X"])
            a = b["a"]
            if a not in x or a in _fs(f, x):
                return False
            options = [_fs(f, frozenset({a, bb})) for bb in x]
            options = [o for o in options if o is not None]
            return bool(options) and all(a in o for o in options)
        X = _s(f, b["X"])
        fX = _fs(f, X)
        if tag == "mu-subset":
            return not fX <= X
        if tag in ("mu-empty", "mu-empty-fin"):
            return not fX and bool(X)
        if tag == "mu-ResM":
            A, B = _s(f, b["A"]), _s(f, b["B"])
            return fX <= A & B and not _fs(f, X & A) <= B
        Y = _s(f, b["Y"])
        fY = _fs(f, Y)
        if tag == "mu-PR":
            return X <= Y and not fY & X <= fX
        if tag == "mu-PR'":
            return not fX & Y <= _fs(f, X & Y)
        if tag == "mu-OR":
            return not _fs(f, X | Y) <= fX | fY
        if tag == "mu-wOR":
            return not _fs(f, X | Y) <= fX | Y
        if tag == "mu-disjOR":
            return not X & Y and not _fs(f, X | Y) <= fX | fY
        if tag in ("mu-CUT", "mu-CM", "mu-CUM"):
            if not fX <= Y <= X:
                return False
            return {"mu-CUT": not fX <= fY, "mu-CM": not fY <= fX, "mu-CUM": fX != fY}[tag]
        if tag == "mu-subset-supset":
            return fX <= Y and fY <= X and fX != fY
        if tag == "mu-RatM":
            return X <= Y and bool(X & fY) and not fX <= fY & X
        if tag == "mu-eq":
            return X <= Y and bool(X & fY) and fX != fY & X
        if tag == "mu-eq'":
            return bool(fY & X) and _fs(f, Y & X) != fY & X
        if tag == "mu-parallel":
            fu = _fs(f, X | Y)
            return fu not in (fX, fY, fX | fY)
        if tag == "mu-cup":
            return bool(fY & (X - fX)) and bool(_fs(f, X | Y) & Y)
        if tag == "mu-cup'":
            return bool(fY & (X - fX)) and _fs(f, X | Y) != fX
    except (NotInDomainError, TypeError):
        # a compound outside the domain cannot witness anything
        return False
    raise ValueError(f"no replay rule for {condition}")


def _replay_cum(f: ChoiceFunction, condition: ConditionId, b: dict) -> bool:
    U = _s(f, b["U"])
    xs = [_s(f, m) for m in b["X"]]
    if len(xs) != condition.alpha + 1:
        return False
    for beta, xb in enumerate(xs):
        allowed = U.union(*xs[:beta])
        if not _fs(f, xb) <= allowed:
            return False
    last = xs[-1]
    lhs = last if condition.tag == "mu-cumt" else frozenset.intersection(*xs)
    return not lhs & _fs(f, U) <= _fs(f, last)
