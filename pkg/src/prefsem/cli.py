"""Command-line entry point.

Every command prints a JSON report (``"format": 1``) to stdout or ``--out``
and a one-line summary to stderr.  Exit codes: 0 success, 1 a claim or
expectation was not met, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from . import conditions, construction, logic, plausibility, search
from .errors import (AtomUnknownError, ClaimViolatedError, KappaOutOfRangeError,
                     NotInDomainError, PreconditionError, SearchSpaceTooLargeError)
from .io import (InputError, dumps, family_from_json, family_to_json, logic_family_from_json,
                 logic_structure_from_json, pl_structure_from_json, read_json, structure_from_json, structure_to_json)
from .preferential import induced_choice, is_smooth, relation_properties
from .sets import CLOSURE_OPS, ChoiceFunction, SetFamily, close_under_intersections, is_closed_under

GUARD_ENV = {
    "kappa_max": "PREFSEM_KAPPA_MAX",
    "ground_max": "PREFSEM_GROUND_MAX",
    "alpha_max": "PREFSEM_ALPHA_MAX",
    "threads": "PREFSEM_THREADS",
}
GUARD_DEFAULTS = {"kappa_max": construction.DEFAULT_KAPPA_MAX, "ground_max": search.MAX_GROUND,
                  "alpha_max": 2, "threads": 1}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    out: Path | None
    kappa_max: int
    ground_max: int
    alpha_max: int
    threads: int
    quiet: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        guards = {}
        for key, env in GUARD_ENV.items():
            flag = getattr(args, key, None)
            if flag is None:
                raw = os.environ.get(env)
                try:
                    flag = int(raw) if raw is not None else GUARD_DEFAULTS[key]
                except ValueError:
                    raise UsageError(f"{env} must be an integer, got {raw!r}") from None
            if flag < 1:
                raise UsageError(f"{key.replace('_', '-')} must be positive")
            guards[key] = flag
        out = Path(args.out) if getattr(args, "out", None) else None
        if out is not None and not out.parent.exists():
            raise UsageError(f"output directory {out.parent} does not exist")
        command = " ".join(p for p in (args.command, getattr(args, "sub", None)) if p)
        return cls(command, out, quiet=args.quiet, **guards)

    @contextmanager
    def guards_exported(self):
        """Library guards read the environment; expose the resolved values
        there for the duration of one command."""
        saved = {env: os.environ.get(env) for env in GUARD_ENV.values()}
        os.environ.update({env: str(getattr(self, key)) for key, env in GUARD_ENV.items()})
        try:
            yield
        finally:
            for env, value in saved.items():
                if value is None:
                    os.environ.pop(env, None)
                else:
                    os.environ[env] = value


def _emit(cfg: RunConfig, report: dict, summary: str) -> None:
    text = dumps(report)
    if cfg.out is not None:
        cfg.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if not cfg.quiet:
        print(f"{cfg.command}: {summary}", file=sys.stderr)


def _load_family(path: str, need_choice: bool = True):
    data = read_json(path)
    family, choice = family_from_json(data)
    if need_choice and choice is None:
        raise InputError(f"{path}: no 'choice' table")
    return family, choice


def _choice_from_args(args) -> tuple[SetFamily, object, object]:
    """(family, choice, structure or None) from --input or --structure [--family]."""
    if args.input:
        family, choice = _load_family(args.input)
        return family, choice, None
    if not args.structure:
        raise UsageError("give --input or --structure")
    data = read_json(args.structure)
    structure = structure_from_json(data)
    if args.family:
        family, _ = family_from_json(read_json(args.family), structure.ground)
    elif "family" in data:
        family, _ = family_from_json(data, structure.ground)
    else:
        family = SetFamily.powerset(structure.ground)
    return family, induced_choice(structure, family), structure


# ---------------------------------------------------------------------------
# commands

def cmd_construct(args, cfg: RunConfig) -> int:
    if args.example == "ladder":
        inst = construction.build_cum_example(args.kappa, cfg.kappa_max)
        report = {"example": "ladder", "kappa": args.kappa,
                  "structure": structure_to_json(inst.structure),
                  "generators": family_to_json(inst.generators)["family"]}
        report.update(family_to_json(inst.closed_family, inst.choice))
        _emit(cfg, report, f"ladder example for kappa={args.kappa}, "
                           f"{len(inst.closed_family)} sets")
    else:
        st, fam = construction.build_fact23_example(args.alpha)
        report = {"example": "three-element", "alpha": args.alpha,
                  "structure": structure_to_json(st)}
        report.update(family_to_json(fam, induced_choice(st, fam)))
        _emit(cfg, report, f"three-element example, {len(fam)} sets")
    return 0


def cmd_verify(args, cfg: RunConfig) -> int:
    kappas = range(1, args.kappa + 1) if args.up_to else [args.kappa]
    reports, ok = [], True
    for k in kappas:
        inst = construction.build_cum_example(k, cfg.kappa_max)
        if args.transitive:
            inst = construction.mutated_transitive(inst)
        rep = construction.verify_cum_example(inst, strict=False)
        reports.append(rep.to_json())
        ok = ok and rep.confirmed
    body = {"reports": reports, "confirmed": ok}
    if not ok:
        first = next(r for r in reports if not r["confirmed"])
        failed = next(c for c in "abcde" if not first["claims"][c]["holds"])
        body["claim_violated"] = {"kappa": first["kappa"], "claim": failed}
    _emit(cfg, body, "claims (a)-(e) confirmed" if ok
          else f"claim ({body['claim_violated']['claim']}) violated at kappa={body['claim_violated']['kappa']}")
    return 0 if ok else 1


def cmd_mu(args, cfg: RunConfig) -> int:
    data = read_json(args.structure)
    st = structure_from_json(data)
    g = st.ground
    sets = []
    for text in args.set:
        labels = [x for x in text.replace(" ", "").split(",") if x]
        sets.append(g.subset(labels))
    if not sets:
        sets = list(range(1 << len(g))) if len(g) <= 10 else []
    rows = [{"set": g.labels(x), "mu": g.labels(st.mu(x))} for x in sets]
    props = relation_properties(st)
    _emit(cfg, {"ground": list(g.elements), "transitive": props.transitive,
                "irreflexive": props.irreflexive, "mu": rows}, f"{len(rows)} sets evaluated")
    return 0


def cmd_check(args, cfg: RunConfig) -> int:
    family, choice, structure = _choice_from_args(args)
    if args.condition:
        ids = [conditions.ConditionId.parse(c) for c in args.condition]
    else:
        ids = conditions.all_condition_ids(cfg.alpha_max)
    reps = [conditions.check(choice, family, c) for c in ids]
    report = {"sets": len(family), "reports": [r.to_json(family) for r in reps]}
    if structure is not None:
        sm = is_smooth(structure, family)
        report["smooth"] = sm.holds
        if not sm.holds:
            report["smoothness_witness"] = {"set": family.ground.labels(sm.set), "copy": list(sm.copy)}
    failing = [str(r.condition) for r in reps if not r.holds]
    _emit(cfg, report, f"{len(reps) - len(failing)}/{len(reps)} conditions hold"
          + (f"; failing: {', '.join(failing)}" if failing else ""))
    return 0


def cmd_closure(args, cfg: RunConfig) -> int:
    family, _ = _load_family(args.input, need_choice=False)
    ops = args.op or list(CLOSURE_OPS)
    checks = []
    for op in ops:
        c = is_closed_under(family, op)
        entry = {"op": op, "holds": c.holds}
        if not c.holds:
            a, b = c.pair
            entry["pair"] = [family.ground.labels(a), None if b is None else family.ground.labels(b)]
            entry["missing"] = family.ground.labels(c.missing)
        checks.append(entry)
    report = {"checks": checks}
    if args.close:
        report["closed"] = family_to_json(close_under_intersections(family))["family"]
    closed = [c["op"] for c in checks if c["holds"]]
    _emit(cfg, report, f"closed under: {', '.join(closed) or 'none'}")
    return 0


def cmd_logic_check(args, cfg: RunConfig) -> int:
    lang = logic.PropLanguage.standard(args.vars)
    if args.input:
        family, choice = logic_family_from_json(read_json(args.input), lang)
    elif args.structure:
        st = logic_structure_from_json(read_json(args.structure), lang)
        family = lang.powerset_family()
        choice = induced_choice(st, family)
    else:
        family = lang.powerset_family()
        choice = ChoiceFunction.identity(family)
    op = logic.ConsequenceOp(lang, choice)
    rules = logic.RULES if not args.rule or "all" in args.rule else args.rule
    reps = [logic.check_logical_rule(op, r) for r in rules]
    out = {"variables": list(lang.variables), "theories": len(family),
           "reports": [r.to_json() for r in reps]}
    if args.paired:
        pairs = []
        for r in reps:
            if r.rule in logic.PAIRED:
                alg = conditions.check(choice, family, logic.PAIRED[r.rule])
                pairs.append({"rule": r.rule, "condition": logic.PAIRED[r.rule],
                              "rule_holds": r.holds, "condition_holds": alg.holds,
                              "agree": r.holds == alg.holds})
        out["paired"] = pairs
    failing = [r.rule for r in reps if not r.holds]
    _emit(cfg, out, f"{len(reps) - len(failing)}/{len(reps)} rules hold"
          + (f"; failing: {', '.join(failing)}" if failing else ""))
    return 0


def _read_axioms(args):
    try:
        text = Path(args.axioms).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {args.axioms}: {exc.strerror}") from None
    atoms = args.atoms.replace(",", " ").split() if args.atoms else None
    return plausibility.parse_axioms(text, atoms)


def cmd_plausi_close(args, cfg: RunConfig) -> int:
    lang, axioms = _read_axioms(args)
    table = plausibility.saturate(lang, axioms, args.rules or plausibility.RULE_NAMES)
    queries = []
    for q in args.query or []:
        seq = plausibility.parse_sequent(lang, q)
        entry = {"query": seq.text(lang),
                 "result": "derivable" if table.derivable(seq) else "not derivable"}
        if seq.right == 0:
            entry["note"] = "empty right-hand side"
        queries.append(entry)
    report = {"atoms": list(lang.atoms), "axioms": [a.text(lang) for a in axioms],
              "rules": list(table.rules), "rounds": table.rounds,
              "derivable_sequents": table.count(), "queries": queries}
    empty = [a.text(lang) for a in axioms if a.right == 0]
    if empty:
        report["empty_right_axioms"] = empty
    summary = "; ".join(f"{q['query']}: {q['result']}" for q in queries) or \
        f"{table.count()} derivable sequents after {table.rounds} rounds"
    _emit(cfg, report, summary)
    return 0


def cmd_plausi_model_check(args, cfg: RunConfig) -> int:
    lang, axioms = _read_axioms(args)
    st = pl_structure_from_json(read_json(args.structure), lang)
    table = plausibility.saturate(lang, axioms, args.rules or plausibility.RULE_NAMES)
    rep = plausibility.soundness_check(st, table)
    _emit(cfg, {"atoms": list(lang.atoms), "rules": list(table.rules), **rep.to_json(lang)},
          "sound" if rep.sound else f"unsound at {rep.witness.text(lang)}")
    return 0


def cmd_plausi_countermodels(args, cfg: RunConfig) -> int:
    lang, rep = plausibility.plausi1_search(args.max_copies, args.max_total)
    _emit(cfg, rep.to_json(lang),
          f"{rep.countermodels} countermodels, {rep.smooth_countermodels} smooth; "
          f"argument {'confirmed' if rep.argument_confirmed else 'NOT confirmed'}")
    return 0 if rep.argument_confirmed else 1


def _search_spec(args, cfg: RunConfig) -> search.InstanceSpec:
    return search.InstanceSpec(args.size, tuple(args.constraint or ()), args.origin,
                               tuple(args.require or ()), args.max_copies, not args.unpruned)


def cmd_search(args, cfg: RunConfig) -> int:
    spec = _search_spec(args, cfg)
    if args.conclusion:
        if args.row:
            raise UsageError("give either --row or --conclusion, not both")
        q = search.ImplicationQuery(tuple(args.premise or ()), args.conclusion,
                                    unconditional=not args.premise)
        res = search.test_implication(q, spec, cfg.threads, args.limit)
        _emit(cfg, {"rows": [res.to_json(args.timing)]}, res.verdict)
        return 0
    rows = search.load_catalog(cfg.alpha_max)
    if args.sub == "implication":
        if not args.row:
            raise UsageError("give --row (repeatable; a trailing * matches a prefix) or --conclusion")
        chosen = search.select_rows(rows, args.row)
        if not chosen:
            raise UsageError(f"no catalog row matches {args.row}")
        rows = chosen
    table = search.implication_matrix(rows, spec, cfg.threads, args.limit)
    js = [r.to_json(args.timing) for r in table]
    mismatches = [r["id"] for r in js if r["matches_expectation"] is False]
    _emit(cfg, {"ground_size": spec.ground_size, "note": search.NOT_PROOF, "rows": js,
                "mismatches": mismatches},
          f"{len(js)} rows, {len(mismatches)} mismatching expectation"
          + (f": {', '.join(mismatches)}" if mismatches else ""))
    return 1 if mismatches else 0


# ---------------------------------------------------------------------------
# parser

def _guard_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("guards (override PREFSEM_* environment variables)")
    g.add_argument("--kappa-max", type=int, dest="kappa_max")
    g.add_argument("--ground-max", type=int, dest="ground_max")
    g.add_argument("--alpha-max", type=int, dest="alpha_max",
                   help="largest alpha for ladder conditions and catalog rows")
    g.add_argument("--threads", type=int)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--quiet", action="store_true", help="no summary on stderr")
    _guard_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prefsem", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build an example structure and family")
    p.add_argument("--example", choices=("ladder", "three-element"), default="ladder")
    p.add_argument("--kappa", type=int, default=1)
    p.add_argument("--alpha", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="check claims (a)-(e) of the ladder example")
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--up-to", action="store_true", help="verify every kappa from 1 to --kappa")
    p.add_argument("--transitive", action="store_true",
                   help="verify the transitively closed variant (expected to fail)")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mu", help="minimal elements of sets in a structure")
    p.add_argument("--structure", required=True)
    p.add_argument("--set", action="append", default=[], help="comma-separated labels; repeatable")
    _common(p)
    p.set_defaults(func=cmd_mu)

    p = sub.add_parser("check", help="check algebraic conditions")
    p.add_argument("--input", help="family file with a choice table")
    p.add_argument("--structure", help="structure file; choice is its mu")
    p.add_argument("--family", help="family file used with --structure (default: powerset)")
    p.add_argument("--condition", action="append", help="condition id, e.g. mu-CUM or mu-cum(2)")
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("closure", help="closure properties of a family")
    p.add_argument("--input", required=True)
    p.add_argument("--op", action="append", choices=CLOSURE_OPS)
    p.add_argument("--close", action="store_true", help="also print the intersection closure")
    _common(p)
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("logic", help="propositional consequence rules")
    lsub = p.add_subparsers(dest="sub", required=True)
    q = lsub.add_parser("check")
    q.add_argument("--vars", type=int, default=logic.DEFAULT_VARS)
    q.add_argument("--structure", help="structure over model labels such as p~qr")
    q.add_argument("--input", help="family file over model labels, with a choice table")
    q.add_argument("--rule", action="append", help="rule name or 'all'; repeatable")
    q.add_argument("--paired", action="store_true", help="compare with the algebraic conditions")
    _common(q)
    q.set_defaults(func=cmd_logic_check)

    p = sub.add_parser("plausi", help="plausibility logic")
    psub = p.add_subparsers(dest="sub", required=True)
    for name, func, help_ in (("close", cmd_plausi_close, "saturate axioms and answer queries"),
                              ("model-check", cmd_plausi_model_check, "soundness of a structure")):
        q = psub.add_parser(name, help=help_)
        q.add_argument("--axioms", required=True)
        q.add_argument("--atoms", help="declare the language, e.g. 'a b c'")
        q.add_argument("--rules", nargs="+", choices=plausibility.RULE_NAMES)
        if name == "close":
            q.add_argument("--query", action="append", help='e.g. "a |~ e"; repeatable')
        else:
            q.add_argument("--structure", required=True)
        _common(q)
        q.set_defaults(func=func)
    q = psub.add_parser("countermodels",
                        help="search countermodels of the seven-axiom example and test smoothness")
    q.add_argument("--max-copies", type=int, default=2)
    q.add_argument("--max-total", type=int, default=4)
    _common(q)
    q.set_defaults(func=cmd_plausi_countermodels)

    p = sub.add_parser("search", help="brute-force implication testing")
    ssub = p.add_subparsers(dest="sub", required=True)
    for name in ("implication", "matrix"):
        q = ssub.add_parser(name)
        q.add_argument("--size", type=int, default=3, help="ground size")
        q.add_argument("--origin", choices=search.ORIGINS, default="arbitrary-choice")
        q.add_argument("--constraint", action="append", choices=search.CONSTRAINTS)
        q.add_argument("--require", action="append", help="condition every instance must satisfy")
        q.add_argument("--max-copies", type=int, default=1)
        q.add_argument("--unpruned", action="store_true",
                       help="allow images outside their set (ground size <= 2)")
        q.add_argument("--limit", type=int, default=search.DEFAULT_LIMIT)
        q.add_argument("--timing", action="store_true", help="include wall time per row")
        if name == "implication":
            q.add_argument("--row", action="append")
            q.add_argument("--premise", action="append")
            q.add_argument("--conclusion")
        _common(q)
        q.set_defaults(func=cmd_search, row=None, conclusion=None, premise=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig.from_args(args)
        with cfg.guards_exported():
            return args.func(args, cfg)
    except ClaimViolatedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, InputError, KappaOutOfRangeError, SearchSpaceTooLargeError,
            AtomUnknownError, PreconditionError, NotInDomainError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
