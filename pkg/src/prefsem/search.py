"""Exhaustive search over small choice-function systems.

Instances are enumerated in a canonical order: families by their encoding
(bit ``m`` of the code set iff the subset with mask ``m`` is a member), the
members of a family in increasing mask order, and choice tables
lexicographically (each image ranging over subsets in increasing mask order).
For preferential origins the choice table is replaced by a copy-count vector
and a relation on copies, both enumerated in increasing order.

The tool refutes or fails to refute; "confirmed-at-scale" is never a proof.
"""

from __future__ import annotations

import json
import math
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from itertools import product
from typing import Iterable, Iterator, Sequence

from .conditions import ConditionId, check, replay, violation
from .construction import build_cum_example, build_fact23_example
from .errors import SearchSpaceTooLargeError
from .preferential import PreferentialStructure, induced_choice, is_smooth, relation_properties
from .sets import ChoiceFunction, GroundSet, SetFamily, bits

ORIGINS = ("arbitrary-choice", "preferential", "smooth-preferential", "smooth-transitive-preferential")
CONSTRAINTS = ("intersection-closed", "union-closed", "difference-closed",
               "contains-singletons", "full-powerset")
MAX_GROUND = 5
DEFAULT_LIMIT = 5_000_000
UNPRUNED_MAX_GROUND = 2
NOT_PROOF = "confirmed-at-scale means no counterexample in the enumerated space; it is not a proof"


def ground_guard() -> int:
    return int(os.environ.get("PREFSEM_GROUND_MAX", MAX_GROUND))


def alpha_guard() -> int:
    return int(os.environ.get("PREFSEM_ALPHA_MAX", 2))


def thread_default() -> int:
    return int(os.environ.get("PREFSEM_THREADS", 1))


@dataclass(frozen=True)
class InstanceSpec:
    ground_size: int
    family_constraints: tuple[str, ...] = ()
    origin: str = "arbitrary-choice"
    required_conditions: tuple[ConditionId, ...] = ()
    max_copies: int = 1
    pruned: bool = True

    def __post_init__(self) -> None:
        if self.ground_size < 1:
            raise ValueError("ground_size must be at least 1")
        if self.origin not in ORIGINS:
            raise ValueError(f"unknown origin {self.origin!r}")
        bad = [c for c in self.family_constraints if c not in CONSTRAINTS]
        if bad:
            raise ValueError(f"unknown family constraints {bad}")
        if not 1 <= self.max_copies <= 2:
            raise ValueError("max_copies must be 1 or 2")
        object.__setattr__(self, "family_constraints", tuple(sorted(set(self.family_constraints))))
        object.__setattr__(self, "required_conditions",
                           tuple(ConditionId.parse(c) if isinstance(c, str) else c
                                 for c in self.required_conditions))

    @property
    def ground(self) -> GroundSet:
        return GroundSet("abcde"[: self.ground_size] if self.ground_size <= 5
                         else [f"e{i}" for i in range(self.ground_size)])

    def with_constraints(self, extra: Iterable[str]) -> InstanceSpec:
        return InstanceSpec(self.ground_size, tuple(self.family_constraints) + tuple(extra),
                            self.origin, self.required_conditions, self.max_copies, self.pruned)

    def with_origin(self, origin: str) -> InstanceSpec:
        return InstanceSpec(self.ground_size, self.family_constraints, origin,
                            self.required_conditions, self.max_copies, self.pruned)


@dataclass(frozen=True)
class ImplicationQuery:
    premises: tuple[ConditionId, ...]
    conclusion: ConditionId
    family_constraints: tuple[str, ...] = ()
    unconditional: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "premises", tuple(
            ConditionId.parse(p) if isinstance(p, str) else p for p in self.premises))
        if isinstance(self.conclusion, str):
            object.__setattr__(self, "conclusion", ConditionId.parse(self.conclusion))
        if not self.premises and not self.unconditional:
            raise ValueError("a query without premises must be marked unconditional")


@dataclass(frozen=True)
class Instance:
    index: int
    family: SetFamily
    choice: ChoiceFunction
    structure: PreferentialStructure | None = None


# ---------------------------------------------------------------------------
# family-level enumeration

def _subsets(mask: int) -> list[int]:
    out = []
    sub = mask
    while True:
        out.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & mask
    out.reverse()
    return out


def _members(code: int) -> tuple[int, ...]:
    return tuple(bits(code))


def _family_ok(ms: Sequence[int], present: set[int], g: int, constraints: Sequence[str]) -> bool:
    for c in constraints:
        if c == "full-powerset":
            if len(ms) != 1 << g:
                return False
        elif c == "contains-singletons":
            if any(1 << e not in present for e in range(g)):
                return False
        else:
            for a in ms:
                for b in ms:
                    z = a & b if c == "intersection-closed" else a | b if c == "union-closed" else a & ~b
                    if z not in present:
                        return False
    return True


def _family_codes(g: int, constraints: Sequence[str]) -> Iterator[int]:
    total = 1 << (1 << g)
    if "full-powerset" in constraints:
        code = total - 1
        ms = _members(code)
        if _family_ok(ms, set(ms), g, constraints):
            yield code
        return
    for code in range(1, total):
        ms = _members(code)
        if _family_ok(ms, set(ms), g, constraints):
            yield code


def _copy_vectors(g: int, max_copies: int) -> list[tuple[int, ...]]:
    return list(product(range(1, max_copies + 1), repeat=g))


def _family_count(ms: Sequence[int], spec: InstanceSpec) -> int:
    g = spec.ground_size
    if spec.origin == "arbitrary-choice":
        if spec.pruned:
            return math.prod(1 << bin(x).count("1") for x in ms)
        return (1 << g) ** len(ms)
    return sum(1 << (sum(v) ** 2) for v in _copy_vectors(g, spec.max_copies))


def cardinality(spec: InstanceSpec) -> int:
    """Number of instances before ``required_conditions`` filtering.

    Exact whenever families can be listed (ground size at most 4, or a full
    powerset); otherwise the unconstrained count, an upper bound.
    """
    g = spec.ground_size
    if g <= 4 or "full-powerset" in spec.family_constraints:
        return sum(_family_count(_members(c), spec) for c in _family_codes(g, spec.family_constraints))
    subsets = range(1 << g)
    if spec.origin == "arbitrary-choice":
        per = [(1 << bin(x).count("1")) if spec.pruned else 1 << g for x in subsets]
        return math.prod(1 + p for p in per) - 1
    return ((1 << (1 << g)) - 1) * _family_count((), spec)


def check_guards(spec: InstanceSpec, limit: int = DEFAULT_LIMIT) -> int:
    if spec.ground_size > ground_guard():
        raise SearchSpaceTooLargeError(cardinality_hint(spec), limit)
    if not spec.pruned and spec.ground_size > UNPRUNED_MAX_GROUND:
        raise ValueError(f"unpruned enumeration is limited to ground size {UNPRUNED_MAX_GROUND}")
    n = cardinality(spec)
    if n > limit:
        raise SearchSpaceTooLargeError(n, limit)
    return n


def cardinality_hint(spec: InstanceSpec) -> int:
    # only the closed form: listing families can itself be infeasible here
    g = spec.ground_size
    per = [1 << bin(x).count("1") for x in range(1 << g)]
    return math.prod(1 + p for p in per) - 1


class _Prefs:
    """Copy bookkeeping for one copy-count vector."""

    def __init__(self, g: int, counts: Sequence[int]) -> None:
        self.elem = [e for e, c in enumerate(counts) for _ in range(c)]
        self.k = len(self.elem)

    def decode(self, rel: int) -> tuple[list[int], list[int]]:
        """Per copy: mask of elements with a copy below it; mask of copies below it."""
        k, elem = self.k, self.elem
        below_el = [0] * k
        below_cp = [0] * k
        pos = 0
        while rel:
            if rel & 1:
                lo, hi = divmod(pos, k)
                below_el[hi] |= 1 << elem[lo]
                below_cp[hi] |= 1 << lo
            rel >>= 1
            pos += 1
        return below_el, below_cp

    def mu(self, below_el: list[int], x: int) -> int:
        out = 0
        for c, e in enumerate(self.elem):
            if x >> e & 1 and not below_el[c] & x:
                out |= 1 << e
        return out

    def smooth(self, below_el: list[int], below_cp: list[int], x: int) -> bool:
        elem = self.elem
        minimal = 0
        for c, e in enumerate(elem):
            if x >> e & 1 and not below_el[c] & x:
                minimal |= 1 << c
        for c, e in enumerate(elem):
            if x >> e & 1 and below_el[c] & x and not below_cp[c] & minimal:
                return False
        return True

    def transitive(self, below_cp: list[int]) -> bool:
        # d < c and e < d imply e < c
        for c in range(self.k):
            for d in bits(below_cp[c]):
                if below_cp[d] & ~below_cp[c]:
                    return False
        return True

    def structure(self, ground: GroundSet, rel: int) -> PreferentialStructure:
        seen: dict[int, int] = {}
        copies = []
        for e in self.elem:
            copies.append((ground.elements[e], seen.get(e, 0)))
            seen[e] = seen.get(e, 0) + 1
        k = self.k
        pairs = frozenset((copies[p // k], copies[p % k]) for p in bits(rel))
        return PreferentialStructure(ground, tuple(copies), pairs)


def _tables(ms: tuple[int, ...], spec: InstanceSpec) -> Iterator[tuple[tuple[int, ...], object]]:
    """Choice tables of one family, each with the data needed to rebuild its origin."""
    g = spec.ground_size
    if spec.origin == "arbitrary-choice":
        full = (1 << g) - 1
        options = [_subsets(x if spec.pruned else full) for x in ms]
        for images in product(*options):
            yield images, None
        return
    smooth = spec.origin != "preferential"
    transitive = spec.origin == "smooth-transitive-preferential"
    for counts in _copy_vectors(g, spec.max_copies):
        pr = _Prefs(g, counts)
        for rel in range(1 << (pr.k * pr.k)):
            below_el, below_cp = pr.decode(rel)
            if transitive and not pr.transitive(below_cp):
                continue
            if smooth and not all(pr.smooth(below_el, below_cp, x) for x in ms):
                continue
            yield tuple(pr.mu(below_el, x) for x in ms), (counts, rel)


def _rebuild(spec: InstanceSpec, ms: tuple[int, ...], images, meta, index: int) -> Instance:
    ground = spec.ground
    family = SetFamily.from_masks(ground, ms)
    choice = ChoiceFunction(family, list(images))
    structure = None
    if meta is not None:
        counts, rel = meta
        structure = _Prefs(spec.ground_size, counts).structure(ground, rel)
    return Instance(index, family, choice, structure)


def _passes(ms, images, idx, conds: Sequence[ConditionId]) -> bool:
    return all(violation(ms, images, idx, c) is None for c in conds)


def enumerate_instances(spec: InstanceSpec, start: int = 0,
                        limit: int = DEFAULT_LIMIT) -> Iterator[Instance]:
    """Deterministic stream of instances; ``start`` resumes at that index.

    Indices count every enumerated instance, including those filtered out by
    ``required_conditions``, so a cursor stays valid under any filter.
    """
    check_guards(spec, limit)
    index = 0
    for code in _family_codes(spec.ground_size, spec.family_constraints):
        ms = _members(code)
        if spec.origin == "arbitrary-choice":
            n = _family_count(ms, spec)
            if index + n <= start:
                index += n
                continue
        idx = {m: i for i, m in enumerate(ms)}
        for images, meta in _tables(ms, spec):
            if index >= start and _passes(ms, images, idx, spec.required_conditions):
                yield _rebuild(spec, ms, images, meta, index)
            index += 1


# ---------------------------------------------------------------------------
# implication testing

@dataclass(frozen=True)
class _FamilyResult:
    instances: int
    premise_sat: int
    hit: tuple | None  # (images, meta) of the first counterexample


def _scan_family(ms: tuple[int, ...], spec: InstanceSpec, premises: Sequence[ConditionId],
                 conclusion: ConditionId) -> _FamilyResult:
    idx = {m: i for i, m in enumerate(ms)}
    n = sat = 0
    for images, meta in _tables(ms, spec):
        n += 1
        if not _passes(ms, images, idx, premises):
            continue
        sat += 1
        if violation(ms, images, idx, conclusion) is not None:
            return _FamilyResult(n, sat, (images, meta))
    return _FamilyResult(n, sat, None)


def _scan_chunk(args) -> list[_FamilyResult]:
    codes, spec, premises, conclusion = args
    out = []
    for code in codes:
        r = _scan_family(_members(code), spec, premises, conclusion)
        out.append(r)
        if r.hit is not None:
            break
    return out


@dataclass
class ImplicationResult:
    query: ImplicationQuery
    spec: InstanceSpec
    verdict: str  # confirmed-at-scale | refuted | not-testable
    instances: int = 0
    premise_satisfied: int = 0
    witness: Instance | None = None
    witness_source: str | None = None
    witness_report: dict | None = None
    replayed: bool | None = None
    note: str | None = None
    elapsed: float = 0.0

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "premises": [str(p) for p in self.query.premises],
            "constraints": list(self.query.family_constraints),
            "conclusion": str(self.query.conclusion),
            "ground_size": self.spec.ground_size,
            "origin": self.spec.origin,
            "pruned": self.spec.pruned,
            "verdict": self.verdict,
            "instances": self.instances,
            "premise_satisfied": self.premise_satisfied,
        }
        if self.verdict == "confirmed-at-scale":
            out["note"] = NOT_PROOF
        elif self.note:
            out["note"] = self.note
        if self.witness is not None:
            w = self.witness
            g = w.family.ground
            out["witness"] = {
                "source": self.witness_source,
                "index": w.index,
                "ground": list(g.elements),
                "family": {n: g.labels(m) for n, m in w.family.items()},
                "choice": {n: g.labels(w.choice(m)) for n, m in w.family.items()},
                "violation": self.witness_report,
                "replayed": self.replayed,
            }
            if w.structure is not None:
                out["witness"]["structure"] = {
                    "copies": [list(c) for c in w.structure.copies],
                    "relation": sorted([list(lo), list(hi)] for lo, hi in w.structure.relation),
                }
        if timing:
            out["elapsed_s"] = round(self.elapsed, 3)
        return out


def _finish_witness(res: ImplicationResult, inst: Instance, source: str) -> ImplicationResult:
    rep = check(inst.choice, None, res.query.conclusion)
    res.verdict = "refuted"
    res.witness = inst
    res.witness_source = source
    res.witness_report = rep.to_json(inst.family)
    res.replayed = (not rep.holds) and replay(inst.choice, res.query.conclusion, rep.witness)
    return res


def test_implication(query: ImplicationQuery, spec: InstanceSpec, threads: int = 1,
                     limit: int = DEFAULT_LIMIT,
                     explicit: Sequence[tuple[str, Instance]] = ()) -> ImplicationResult:
    """Search for an instance satisfying all premises but not the conclusion.

    The space is ``spec`` with the query's family constraints added.  The
    first counterexample in canonical order is returned, independent of
    ``threads``.  ``explicit`` instances (name, instance) are tried after an
    unsuccessful enumeration.
    """
    t0 = time.perf_counter()
    spec = spec.with_constraints(query.family_constraints)
    premises = tuple(spec.required_conditions) + query.premises
    check_guards(spec, limit)
    codes = list(_family_codes(spec.ground_size, spec.family_constraints))
    res = ImplicationResult(query, spec, "confirmed-at-scale")

    if threads <= 1 or len(codes) < 2:
        chunks = [_scan_chunk((codes, spec, premises, query.conclusion))]
        per_family = chunks[0]
    else:
        size = max(1, math.ceil(len(codes) / (threads * 4)))
        parts = [codes[i:i + size] for i in range(0, len(codes), size)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            per_family = [r for chunk in pool.map(
                _scan_chunk, [(p, spec, premises, query.conclusion) for p in parts]) for r in chunk]

    index = 0
    for code, r in zip(codes, per_family):
        res.instances += r.instances
        res.premise_satisfied += r.premise_sat
        if r.hit is not None:
            images, meta = r.hit
            inst = _rebuild(spec, _members(code), images, meta, index + r.instances - 1)
            _finish_witness(res, inst, "enumeration")
            break
        index += r.instances

    if res.witness is None:
        for name, inst in explicit:
            f = inst.choice
            fam_ok = _family_ok(f.domain.masks, set(f.domain.masks), len(f.domain.ground),
                                query.family_constraints)
            if fam_ok and _origin_ok(inst, spec.origin) and all(check(f, None, p).holds for p in premises) \
                    and not check(f, None, query.conclusion).holds:
                _finish_witness(res, inst, f"explicit:{name}")
                break
    res.elapsed = time.perf_counter() - t0
    return res


# pytest would otherwise collect the function when tests import it
test_implication.__test__ = False


def _origin_ok(inst: Instance, origin: str) -> bool:
    if origin == "arbitrary-choice":
        return True
    if inst.structure is None:
        return False
    if origin != "preferential" and not is_smooth(inst.structure, inst.family).holds:
        return False
    if origin == "smooth-transitive-preferential" and not relation_properties(inst.structure).transitive:
        return False
    return True


# ---------------------------------------------------------------------------
# catalog

_PLACEHOLDER = re.compile(r"\{([ab])\}")
_BELOW = re.compile(r"^(mu-cumt?)\(<\{a\}\)$")


@dataclass(frozen=True)
class CatalogRow:
    id: str
    query: ImplicationQuery
    expect: str
    origin: str = "arbitrary-choice"
    not_testable: str | None = None
    explicit: tuple[dict, ...] = ()

    @property
    def base_id(self) -> str:
        return self.id.split("[", 1)[0]


def load_catalog_data() -> dict:
    text = resources.files("prefsem").joinpath("data/catalog.json").read_text(encoding="utf-8")
    return json.loads(text)


def _fill(text: str, a: int | None, b: int | None) -> list[str]:
    m = _BELOW.match(text)
    if m:
        return [f"{m.group(1)}({k})" for k in range(a)]
    return [_PLACEHOLDER.sub(lambda mm: str(a if mm.group(1) == "a" else b), text)]


def expand_catalog(data: dict, alpha_max: int = 2) -> list[CatalogRow]:
    """Instantiate ladder placeholders for ``alpha_min <= a <= alpha_max`` and ``0 <= b <= a``."""
    rows: list[CatalogRow] = []
    for raw in data["rows"]:
        texts = raw.get("assume", []) + raw.get("premises", []) + [raw["conclusion"]]
        blob = " ".join(texts) + json.dumps(raw.get("explicit", []))
        uses_a = "{a}" in blob
        uses_b = "{b}" in blob
        combos: list[tuple[int | None, int | None]] = [(None, None)]
        if uses_a:
            combos = [(a, b) for a in range(raw.get("alpha_min", 0), alpha_max + 1)
                      for b in (range(a + 1) if uses_b else [None])]
        for a, b in combos:
            prem = [p for t in raw.get("assume", []) + raw.get("premises", []) for p in _fill(t, a, b)]
            concl = _fill(raw["conclusion"], a, b)[0]
            suffix = "" if a is None else (f"[a={a}]" if b is None else f"[a={a},b={b}]")
            explicit = tuple({k: (int(_fill(v, a, b)[0]) if isinstance(v, str) and "{" in v else v)
                              for k, v in e.items()} for e in raw.get("explicit", []))
            rows.append(CatalogRow(
                raw["id"] + suffix,
                ImplicationQuery(tuple(prem), concl, tuple(raw.get("constraints", [])),
                                 unconditional=not prem),
                raw["expect"], raw.get("origin", "arbitrary-choice"),
                raw.get("not_testable"), explicit))
    return rows


def load_catalog(alpha_max: int = 2) -> list[CatalogRow]:
    return expand_catalog(load_catalog_data(), alpha_max)


def select_rows(rows: Sequence[CatalogRow], selectors: Sequence[str]) -> list[CatalogRow]:
    """Rows whose full id or base id equals a selector, or whose id starts with ``selector*``."""
    out = []
    for r in rows:
        for s in selectors:
            if s.endswith("*") and r.id.startswith(s[:-1]) or s in (r.id, r.base_id):
                out.append(r)
                break
    return out


def _explicit_instances(row: CatalogRow) -> list[tuple[str, Instance]]:
    out = []
    for e in row.explicit:
        if e["builder"] == "three-element":
            st, fam = build_fact23_example(e["alpha"])
            out.append((f"three-element(alpha={e['alpha']})",
                        Instance(-1, fam, induced_choice(st, fam), st)))
        elif e["builder"] == "ladder":
            inst = build_cum_example(e["kappa"])
            out.append((f"ladder(kappa={e['kappa']})",
                        Instance(-1, inst.closed_family, inst.choice, inst.structure)))
        else:
            raise ValueError(f"unknown builder {e['builder']!r}")
    return out


@dataclass
class MatrixRow:
    row: CatalogRow
    result: ImplicationResult | None

    @property
    def matches(self) -> bool | None:
        if self.result is None:
            return None
        if self.row.expect == "implies":
            return self.result.verdict == "confirmed-at-scale"
        return self.result.verdict == "refuted" and bool(self.result.replayed)

    def to_json(self, timing: bool = False) -> dict:
        out = {"id": self.row.id, "expect": self.row.expect}
        if self.result is None:
            out.update({
                "verdict": "not-testable", "reason": self.row.not_testable,
                "premises": [str(p) for p in self.row.query.premises],
                "conclusion": str(self.row.query.conclusion),
            })
        else:
            out.update(self.result.to_json(timing))
        out["matches_expectation"] = self.matches
        return out


def implication_matrix(rows: Sequence[CatalogRow], spec: InstanceSpec, threads: int = 1,
                       limit: int = DEFAULT_LIMIT) -> list[MatrixRow]:
    """One verdict per row; a row's own origin replaces ``spec.origin``."""
    out = []
    for row in rows:
        if row.not_testable:
            out.append(MatrixRow(row, None))
            continue
        s = spec.with_origin(row.origin) if row.origin != spec.origin else spec
        res = test_implication(row.query, s, threads, limit, _explicit_instances(row))
        out.append(MatrixRow(row, res))
    return out
