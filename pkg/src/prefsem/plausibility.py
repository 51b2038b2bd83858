"""Plausibility logic: sequents ``X |~ Y`` over a finite set of atoms.

Sequents are read as ``⋀X |~ ⋁Y``.  Derivability under the rules

* PlI   ``X |~ a`` for ``a ∈ X``
* PlRM  ``X |~ Y  ⇒  X |~ Y ∪ {a}``
* PlCLM ``X |~ a, X |~ Y  ⇒  X ∪ {a} |~ Y``
* PlCC  ``X ∪ A |~ Y`` and ``X |~ {a} ∪ Y`` for each ``a ∈ A``  ``⇒  X |~ Y``

is computed by saturating a table that holds, for each left side ``X``, an
integer whose bit ``Y`` marks ``X |~ Y``.  Atom subsets are bitmasks over the
language's atom order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

from .conditions import Witness, replay
from .errors import AtomUnknownError, PreconditionError
from .preferential import Copy, PreferentialStructure, SmoothnessCheck, is_smooth
from .sets import ChoiceFunction, GroundSet, SetFamily, bits

MAX_ATOMS = 10
RULE_NAMES = ("PlI", "PlRM", "PlCLM", "PlCC")
TURNSTILE = "|~"


class PlLanguage:
    def __init__(self, atoms: Iterable[str]) -> None:
        atoms = tuple(str(a) for a in atoms)
        if len(set(atoms)) != len(atoms):
            raise ValueError("duplicate atoms")
        if len(atoms) > MAX_ATOMS:
            raise ValueError(f"at most {MAX_ATOMS} atoms are supported")
        self.atoms = atoms
        self._index = {a: i for i, a in enumerate(atoms)}

    def __len__(self) -> int:
        return len(self.atoms)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PlLanguage) and self.atoms == other.atoms

    def __hash__(self) -> int:
        return hash(self.atoms)

    @property
    def full(self) -> int:
        return (1 << len(self.atoms)) - 1

    def mask(self, atoms: Iterable[str]) -> int:
        m = 0
        for a in atoms:
            try:
                m |= 1 << self._index[a]
            except KeyError:
                raise AtomUnknownError(f"atom {a!r} is not declared") from None
        return m

    def labels(self, mask: int) -> list[str]:
        return [self.atoms[i] for i in bits(mask)]

    def fmt(self, mask: int) -> str:
        return " ".join(self.labels(mask))


@dataclass(frozen=True, order=True)
class Sequent:
    left: int
    right: int

    def text(self, language: PlLanguage) -> str:
        lhs, rhs = language.fmt(self.left), language.fmt(self.right)
        return f"{lhs} {TURNSTILE} {rhs}".strip()


def _split_atoms(language: PlLanguage, side: str) -> list[str]:
    out: list[str] = []
    for tok in re.split(r"[\s,]+", side.strip()):
        if not tok:
            continue
        if tok in language._index:
            out.append(tok)
        elif all(ch in language._index for ch in tok):
            # juxtaposed single-letter atoms, as in "fd"
            out.extend(tok)
        else:
            raise AtomUnknownError(f"atom {tok!r} is not declared")
    return out


def parse_sequent(language: PlLanguage, text: str) -> Sequent:
    if text.count(TURNSTILE) != 1:
        raise ValueError(f"expected exactly one {TURNSTILE!r} in {text!r}")
    lhs, rhs = text.split(TURNSTILE)
    return Sequent(language.mask(_split_atoms(language, lhs)),
                   language.mask(_split_atoms(language, rhs)))


def parse_axioms(text: str, atoms: Sequence[str] | None = None) -> tuple[PlLanguage, list[Sequent]]:
    """Parse an axiom file: one sequent per line, ``#`` comments, and optional
    ``atoms: a b c`` header lines declaring the language.

    Without any declaration (neither header nor ``atoms``) the language is
    the set of whitespace-separated tokens in order of first appearance.
    """
    declared = list(atoms) if atoms is not None else []
    lines: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("atoms:"):
            declared += [a for a in re.split(r"[\s,]+", line[6:].strip()) if a]
            continue
        lines.append(line)
    if not declared:
        for line in lines:
            for tok in re.split(r"[\s,]+", line.replace(TURNSTILE, " ")):
                if tok and tok not in declared:
                    declared.append(tok)
    language = PlLanguage(dict.fromkeys(declared))
    return language, [parse_sequent(language, line) for line in lines]


@dataclass(frozen=True)
class SequentTable:
    language: PlLanguage
    rows: tuple[int, ...]
    axioms: tuple[Sequent, ...] = ()
    rules: tuple[str, ...] = RULE_NAMES
    rounds: int = 0

    def derivable(self, seq: Sequent) -> bool:
        return bool(self.rows[seq.left] >> seq.right & 1)

    def query(self, text: str) -> bool:
        return self.derivable(parse_sequent(self.language, text))

    def sequents(self) -> Iterator[Sequent]:
        for x, row in enumerate(self.rows):
            for y in bits(row):
                yield Sequent(x, y)

    def count(self) -> int:
        return sum(bin(r).count("1") for r in self.rows)

    def same_table(self, other: SequentTable) -> bool:
        return self.language == other.language and self.rows == other.rows

    def first_difference(self, other: SequentTable) -> Sequent | None:
        for x, (a, b) in enumerate(zip(self.rows, other.rows)):
            if a != b:
                return Sequent(x, next(bits(a ^ b)))
        return None


class _Masks:
    """Per-language bit-vector helpers over the right-hand-side index space."""

    def __init__(self, n: int) -> None:
        size = 1 << n
        self.n = n
        self.size = size
        self.with_atom = [sum(1 << y for y in range(size) if y >> a & 1) for a in range(n)]
        self.all_ys = (1 << size) - 1
        self.without_atom = [self.all_ys & ~w for w in self.with_atom]

    def upward(self, row: int) -> int:
        for a in range(self.n):
            row |= (row & self.without_atom[a]) << (1 << a)
        return row

    def cut_side(self, row: int, a: int) -> int:
        """Bits Y such that ``{a} ∪ Y`` is marked in ``row``."""
        return (row & self.with_atom[a]) | ((row >> (1 << a)) & self.without_atom[a])

    def meets(self, m: int) -> int:
        """Bits Y with ``Y ∩ m ≠ ∅``."""
        return self.all_ys & ~sum(1 << y for y in range(self.size) if not y & m)


def _check_rules(rules: Iterable[str]) -> tuple[str, ...]:
    rules = tuple(rules)
    bad = [r for r in rules if r not in RULE_NAMES]
    if bad:
        raise ValueError(f"unknown rules {bad}; expected a subset of {RULE_NAMES}")
    return tuple(r for r in RULE_NAMES if r in rules)


def _check_axioms(language: PlLanguage, axioms: Iterable[Sequent]) -> tuple[Sequent, ...]:
    axioms = tuple(axioms)
    for s in axioms:
        if (s.left | s.right) & ~language.full:
            raise AtomUnknownError(f"sequent {s} mentions atoms outside the language")
    return axioms


def saturate(language: PlLanguage, axioms: Iterable[Sequent],
             rules: Iterable[str] = RULE_NAMES) -> SequentTable:
    """Least table containing ``axioms`` and closed under ``rules``."""
    rules = _check_rules(rules)
    axioms = _check_axioms(language, axioms)
    n = len(language)
    mk = _Masks(n)
    size = mk.size
    d = [0] * size
    for s in axioms:
        d[s.left] |= 1 << s.right
    if "PlI" in rules:
        for x in range(size):
            for a in bits(x):
                d[x] |= 1 << (1 << a)
    full = language.full
    rounds = 0
    while True:
        rounds += 1
        before = list(d)
        if "PlRM" in rules:
            d = [mk.upward(r) for r in d]
        if "PlCLM" in rules:
            for x in range(size):
                row = d[x]
                for a in bits(full & ~x):
                    if row >> (1 << a) & 1:
                        d[x | 1 << a] |= row
        if "PlCC" in rules:
            for x in range(size):
                row = d[x]
                side = [mk.cut_side(row, a) for a in range(n)]
                rest = full & ~x
                add = 0
                sub = rest
                while sub:
                    acc = d[x | sub]
                    for a in bits(sub):
                        acc &= side[a]
                        if not acc:
                            break
                    add |= acc
                    sub = (sub - 1) & rest
                d[x] = row | add
        if d == before:
            return SequentTable(language, tuple(d), axioms, rules, rounds)


def naive_saturate(language: PlLanguage, axioms: Iterable[Sequent],
                   rules: Iterable[str] = RULE_NAMES) -> SequentTable:
    """Reference saturation on frozenset pairs, one rule after another."""
    rules = _check_rules(rules)
    axioms = _check_axioms(language, axioms)
    atoms = list(range(len(language)))
    subsets = [frozenset(i for i in atoms if m >> i & 1) for m in range(1 << len(atoms))]
    derived = {(frozenset(bits(s.left)), frozenset(bits(s.right))) for s in axioms}
    rounds = 0
    while True:
        rounds += 1
        new: set = set()
        if "PlI" in rules:
            new |= {(x, frozenset({a})) for x in subsets for a in x}
        if "PlRM" in rules:
            new |= {(x, y | {a}) for x, y in derived for a in atoms}
        if "PlCLM" in rules:
            new |= {(x | {a}, y) for x, y in derived for a in atoms
                    if (x, frozenset({a})) in derived}
        if "PlCC" in rules:
            for x in subsets:
                for extra in subsets:
                    if not extra or extra & x:
                        continue
                    for y in subsets:
                        if (x | extra, y) in derived and all((x, y | {a}) in derived for a in extra):
                            new.add((x, y))
        if new <= derived:
            break
        derived |= new
    rows = [0] * len(subsets)
    for x, y in derived:
        rows[sum(1 << i for i in x)] |= 1 << sum(1 << i for i in y)
    return SequentTable(language, tuple(rows), axioms, rules, rounds)


# ---------------------------------------------------------------------------
# semantics

@dataclass(frozen=True)
class PlStructure:
    """A preferential structure whose ground elements are named models.

    ``models[i]`` is the atom mask of ground element ``i``.
    """

    language: PlLanguage
    structure: PreferentialStructure
    models: tuple[int, ...]
    _cover: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.models) != len(self.structure.ground):
            raise ValueError("one atom set per ground element is required")
        # _cover[a]: ground elements whose model contains atom a
        cover = tuple(sum(1 << i for i, m in enumerate(self.models) if m >> a & 1)
                      for a in range(len(self.language)))
        object.__setattr__(self, "_cover", cover)

    @classmethod
    def build(cls, language: PlLanguage, models: Mapping[str, Iterable[str]],
              relation: Iterable[tuple[Copy, Copy]],
              copies: Iterable[Copy] | None = None) -> PlStructure:
        ground = GroundSet(models)
        if copies is None:
            copies = tuple((lab, 0) for lab in ground)
        structure = PreferentialStructure(ground, tuple(copies), frozenset(relation))
        return cls(language, structure, tuple(language.mask(models[lab]) for lab in ground))

    @property
    def ground(self) -> GroundSet:
        return self.structure.ground

    def model_set(self, x: int) -> int:
        """``M(X)``: ground elements whose model contains every atom of ``x``."""
        out = (1 << len(self.models)) - 1
        for a in bits(x):
            out &= self._cover[a]
        return out

    def covered(self, y: int) -> int:
        """``⋃{M(b) : b ∈ Y}``."""
        out = 0
        for a in bits(y):
            out |= self._cover[a]
        return out

    def mu(self, x: int) -> int:
        return self.structure.mu(self.model_set(x))

    def left_family(self) -> SetFamily:
        """All sets ``M(X)``."""
        return SetFamily.from_masks(self.ground, [self.model_set(x) for x in range(1 << len(self.language))])

    def is_smooth(self) -> SmoothnessCheck:
        return is_smooth(self.structure, self.left_family())


def _holds_pointwise(s: PlStructure, x: int, y: int) -> bool:
    return all(s.models[m] & y for m in bits(s.mu(x)))


def _holds_by_cover(s: PlStructure, x: int, y: int) -> bool:
    return s.mu(x) & ~s.covered(y) == 0


def semantic_holds(s: PlStructure, x: int, y: int) -> bool:
    """``X |= Y`` in ``s``: every minimal model of ``X`` contains an atom of ``Y``."""
    a = _holds_pointwise(s, x, y)
    b = _holds_by_cover(s, x, y)
    if a != b:
        raise AssertionError(f"semantic evaluations disagree on X={x}, Y={y}")
    return a


def semantic_table(s: PlStructure) -> SequentTable:
    """All sequents valid in ``s``, in the same layout as :func:`saturate`."""
    mk = _Masks(len(s.language))
    meets = [mk.meets(m) for m in s.models]
    rows = []
    for x in range(mk.size):
        row = mk.all_ys
        for m in bits(s.mu(x)):
            row &= meets[m]
        rows.append(row)
    return SequentTable(s.language, tuple(rows), (), (), 0)


@dataclass(frozen=True)
class SoundnessReport:
    sound: bool
    witness: Sequent | None
    smooth: bool
    checked: int
    empty_right_axioms: int = 0

    def to_json(self, language: PlLanguage) -> dict:
        return {
            "sound": self.sound,
            "witness": self.witness.text(language) if self.witness else None,
            "smooth": self.smooth,
            "checked": self.checked,
            "empty_right_axioms": self.empty_right_axioms,
        }


def soundness_check(s: PlStructure, table: SequentTable) -> SoundnessReport:
    """Does every sequent derivable in ``table`` hold in ``s``?

    ``s`` must validate every axiom of the table, otherwise
    :class:`PreconditionError` is raised.  PlCLM is only sound for smooth
    structures, so a non-smooth structure can legitimately fail against a
    table closed under it.
    """
    if s.language != table.language:
        raise ValueError("structure and table use different languages")
    for ax in table.axioms:
        if not semantic_holds(s, ax.left, ax.right):
            raise PreconditionError(f"structure does not validate axiom {ax.text(s.language)!r}")
    sem = semantic_table(s)
    smooth = s.is_smooth().holds
    checked = table.count()
    empty = sum(1 for ax in table.axioms if ax.right == 0)
    for x, (derived, valid) in enumerate(zip(table.rows, sem.rows)):
        bad = derived & ~valid
        if bad:
            return SoundnessReport(False, Sequent(x, next(bits(bad))), smooth, checked, empty)
    return SoundnessReport(True, None, smooth, checked, empty)


# ---------------------------------------------------------------------------
# the non-representability argument, replayed by exhaustive search

@dataclass
class RepresentationSearchReport:
    pool: list[int]
    max_copies: int
    max_total: int
    examined: int = 0
    countermodels: int = 0
    smooth_countermodels: int = 0
    cum1_witnessed: int = 0
    exact_matches: int = 0
    first: PlStructure | None = None

    @property
    def argument_confirmed(self) -> bool:
        """Countermodels exist, none is smooth, each violates the cumulativity instance."""
        return (self.countermodels > 0 and self.smooth_countermodels == 0
                and self.cum1_witnessed == self.countermodels)

    def to_json(self, language: PlLanguage) -> dict:
        first = None
        if self.first is not None:
            st = self.first.structure
            first = {
                "copies": [list(c) for c in st.copies],
                "relation": sorted([list(lo), list(hi)] for lo, hi in st.relation),
            }
        return {
            "pool": [language.fmt(m) for m in self.pool],
            "max_copies": self.max_copies,
            "max_total": self.max_total,
            "examined": self.examined,
            "countermodels": self.countermodels,
            "smooth_countermodels": self.smooth_countermodels,
            "cum1_witnessed": self.cum1_witnessed,
            "exact_matches": self.exact_matches,
            "argument_confirmed": self.argument_confirmed,
            "first_countermodel": first,
        }


def _model_label(language: PlLanguage, m: int) -> str:
    return "".join(language.labels(m)) if all(len(a) == 1 for a in language.atoms) \
        else ",".join(language.labels(m))


def search_smooth_representation(
    language: PlLanguage,
    axioms: Sequence[Sequent],
    refuted: Sequent,
    pool: Sequence[int],
    cum_sets: tuple[int, int, int],
    max_copies: int = 2,
    max_total: int = 4,
) -> RepresentationSearchReport:
    """Enumerate structures over ``pool`` that validate ``axioms`` and refute
    ``refuted``, and test each against the cumulativity instance with
    ``U, X_0, X_1`` given by the atom sets ``cum_sets``.

    Every model of the pool receives 0..``max_copies`` copies, at most
    ``max_total`` in all, and every relation on those copies is tried.
    """
    pool = list(pool)
    target = saturate(language, axioms)
    labels = [_model_label(language, m) for m in pool]
    ground = GroundSet(labels)
    report = RepresentationSearchReport(pool, max_copies, max_total)

    base = PlStructure(language, PreferentialStructure(ground, (), frozenset()), tuple(pool))
    need = [(base.model_set(x), base.covered(y), True) for x, y in ((a.left, a.right) for a in axioms)]
    need.append((base.model_set(refuted.left), base.covered(refuted.right), False))
    u_set, x0_set, x1_set = (base.model_set(m) for m in cum_sets)
    cum_family = SetFamily.from_masks(ground, [u_set, x0_set, x1_set])
    smooth_family = SetFamily.from_masks(ground, [x0_set, x1_set])

    for counts in product(range(max_copies + 1), repeat=len(pool)):
        total = sum(counts)
        if not 1 <= total <= max_total:
            continue
        copies = [(labels[i], j) for i, c in enumerate(counts) for j in range(c)]
        elem = [ground.index(lab) for lab, _ in copies]
        k = len(copies)
        for rel in range(1 << (k * k)):
            report.examined += 1
            # bit lo*k+hi set means copies[lo] lies below copies[hi]
            below = [0] * k
            r, pos = rel, 0
            while r:
                if r & 1:
                    lo, hi = divmod(pos, k)
                    below[hi] |= 1 << elem[lo]
                r >>= 1
                pos += 1

            def mu(xs: int) -> int:
                out = 0
                for c in range(k):
                    e = 1 << elem[c]
                    if xs & e and not below[c] & xs:
                        out |= e
                return out

            if not all((mu(ms) & ~cov == 0) == want for ms, cov, want in need):
                continue
            report.countermodels += 1
            pairs = frozenset((copies[lo], copies[hi])
                              for lo in range(k) for hi in range(k) if rel >> (lo * k + hi) & 1)
            st = PlStructure(language, PreferentialStructure(ground, tuple(copies), pairs), tuple(pool))
            if report.first is None:
                report.first = st
            if is_smooth(st.structure, smooth_family).holds:
                report.smooth_countermodels += 1
            f = ChoiceFunction(cum_family, [st.structure.mu(m) for m in cum_family.masks])
            if replay(f, "mu-cum(1)", Witness({"U": u_set, "X": (x0_set, x1_set)})):
                report.cum1_witnessed += 1
            if semantic_table(st).same_table(target):
                report.exact_matches += 1
    return report


PLAUSI1_AXIOMS = """\
atoms: a b c d e f
a |~ b
b |~ a
a |~ c
a |~ f d
d c |~ b a
d c |~ e
f c b a |~ e
"""


def plausi1_search(max_copies: int = 2, max_total: int = 4) -> tuple[PlLanguage, RepresentationSearchReport]:
    """Countermodel search for the seven-axiom example over the models
    ``abcd``, ``bcde`` and ``abcde``, with ``U=M(a)``, ``X_0=M(b)``, ``X_1=M(cd)``."""
    language, axioms = parse_axioms(PLAUSI1_AXIOMS)
    m = language.mask
    pool = [m("abcd"), m("bcde"), m("abcde")]
    rep = search_smooth_representation(
        language, axioms, parse_sequent(language, "a |~ e"), pool,
        (m("a"), m("b"), m("cd")), max_copies, max_total)
    return language, rep
