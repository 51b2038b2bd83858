"""JSON interchange for families, choice functions and structures.

Family file::

    {"ground": ["a", "b"], "family": {"U": ["a"]}, "choice": {"U": ["a"]}}

Structure file::

    {"ground": [...], "copies": [["x", 0], ...], "relation": [[["x", 0], ["y", 0]], ...]}

``copies`` is optional (one copy per element); a relation endpoint may also
be a bare label, meaning copy 0.  Structures for sequent semantics add
``"atoms": [...]`` and ``"models": {"label": [atoms...]}``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .logic import PropLanguage
from .plausibility import PlLanguage, PlStructure
from .preferential import PreferentialStructure
from .sets import ChoiceFunction, GroundSet, SetFamily

FORMAT = 1


class InputError(ValueError):
    """Malformed or inconsistent input file."""


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def dumps(report: dict) -> str:
    """Serialize a report with the format tag first; stable across runs."""
    body = {"format": FORMAT}
    body.update(report)
    return json.dumps(body, indent=2, ensure_ascii=False) + "\n"


def _require(data: Any, key: str, kind: type) -> Any:
    if not isinstance(data, dict):
        raise InputError("top-level JSON value must be an object")
    if key not in data:
        raise InputError(f"missing key {key!r}")
    value = data[key]
    if not isinstance(value, kind):
        raise InputError(f"{key!r} must be a JSON {kind.__name__}")
    return value


def _labels(value: Any, what: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise InputError(f"{what} must be a list of labels")
    return value


def ground_from_json(data: Any) -> GroundSet:
    try:
        return GroundSet(_labels(_require(data, "ground", list), "'ground'"))
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None


def family_from_json(data: Any, ground: GroundSet | None = None) -> tuple[SetFamily, ChoiceFunction | None]:
    ground = ground or ground_from_json(data)
    members = _require(data, "family", dict)
    try:
        family = SetFamily(ground, [(name, ground.subset(_labels(ls, f"member {name!r}")))
                                    for name, ls in members.items()])
        choice = None
        if "choice" in data:
            table = _require(data, "choice", dict)
            unknown = [n for n in table if n not in members]
            if unknown:
                raise InputError(f"choice names unknown members: {unknown}")
            images = {}
            for name, ls in table.items():
                mask = ground.subset(_labels(ls, f"choice for {name!r}"))
                images[ground.subset(members[name])] = mask
            choice = ChoiceFunction(family, images)
    except InputError:
        raise
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc)) from None
    return family, choice


def family_to_json(family: SetFamily, choice: ChoiceFunction | None = None) -> dict:
    g = family.ground
    out = {"ground": list(g.elements), "family": {n: g.labels(m) for n, m in family.items()}}
    if choice is not None:
        out["choice"] = {n: g.labels(choice(m)) for n, m in family.items()}
    return out


def _copy(value: Any) -> tuple[str, int]:
    if isinstance(value, str):
        return value, 0
    if (isinstance(value, list) and len(value) == 2 and isinstance(value[0], str)
            and isinstance(value[1], int)):
        return value[0], value[1]
    raise InputError(f"bad copy {value!r}; expected [label, index] or label")


def structure_from_json(data: Any, ground: GroundSet | None = None) -> PreferentialStructure:
    ground = ground or ground_from_json(data)
    relation = _require(data, "relation", list)
    if "copies" in data:
        copies = tuple(_copy(c) for c in _require(data, "copies", list))
    else:
        copies = tuple((e, 0) for e in ground)
    pairs = []
    for p in relation:
        if not isinstance(p, list) or len(p) != 2:
            raise InputError(f"bad relation pair {p!r}; expected [below, above]")
        pairs.append((_copy(p[0]), _copy(p[1])))
    try:
        return PreferentialStructure(ground, copies, frozenset(pairs))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def structure_to_json(structure: PreferentialStructure) -> dict:
    return {
        "ground": list(structure.ground.elements),
        "copies": [list(c) for c in structure.copies],
        "relation": sorted([list(lo), list(hi)] for lo, hi in structure.relation),
    }


def pl_structure_from_json(data: Any, language: PlLanguage | None = None) -> PlStructure:
    """Structure whose ground elements are models (atom sets).

    ``models`` maps each ground label to its atoms; when absent a label is
    read as its atoms, comma-separated or juxtaposed single letters.
    """
    ground = ground_from_json(data)
    if language is None:
        language = PlLanguage(_labels(_require(data, "atoms", list), "'atoms'"))
    raw = data.get("models")
    models = {}
    for lab in ground:
        if raw is not None:
            if lab not in raw:
                raise InputError(f"no atoms given for model {lab!r}")
            models[lab] = _labels(raw[lab], f"atoms of {lab!r}")
        else:
            models[lab] = [a for a in lab.split(",") if a] if "," in lab else list(lab)
    structure = structure_from_json(data, ground)
    try:
        return PlStructure(language, structure, tuple(language.mask(models[lab]) for lab in ground))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def logic_structure_from_json(data: Any, language: PropLanguage) -> PreferentialStructure:
    """Structure over the models of ``language``; ground labels are read by
    :meth:`PropLanguage.parse_model` and renamed to canonical model labels."""
    ground = ground_from_json(data)
    try:
        rename = {lab: language.model_label(language.parse_model(lab)) for lab in ground}
    except ValueError as exc:
        raise InputError(str(exc)) from None
    st = structure_from_json(data, ground)
    copies = tuple((rename[e], i) for e, i in st.copies)
    rel = frozenset(((rename[a], i), (rename[b], j)) for (a, i), (b, j) in st.relation)
    return PreferentialStructure(language.models, copies, rel)


def logic_family_from_json(data: Any, language: PropLanguage) -> tuple[SetFamily, ChoiceFunction]:
    """Family file whose ground labels name models (any spelling accepted by
    :meth:`PropLanguage.parse_model`), moved onto ``language.models``."""
    ground = ground_from_json(data)
    family, choice = family_from_json(data, ground)
    if choice is None:
        raise InputError("missing key 'choice'")
    try:
        models = [language.parse_model(lab) for lab in ground]
    except ValueError as exc:
        raise InputError(str(exc)) from None

    def move(mask: int) -> int:
        return sum(1 << models[i] for i in range(len(ground)) if mask >> i & 1)

    target = SetFamily(language.models, [(n, move(m)) for n, m in family.items()])
    return target, ChoiceFunction(target, {move(m): move(choice(m)) for m in family})
