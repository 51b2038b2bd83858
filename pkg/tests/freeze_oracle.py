"""Regenerate tests/data/oracle_frozen.json from the naive oracle.

Run ``python3 tests/freeze_oracle.py``.  The package is not imported.
"""

from __future__ import annotations

import json
from pathlib import Path

import oracle as O

OUT = Path(__file__).with_name("data") / "oracle_frozen.json"


def srt(s):
    return sorted(s)


def ladder_example(kappa):
    """The ladder example typed in from its definition: a<b<c, x_i<x_{i+1}, x_i<x'_i."""
    xs = [f"x{i}" for i in range(kappa + 2)]
    xps = [f"x'{i}" for i in range(kappa + 1)]
    rel = {(("a", 0), ("b", 0)), (("b", 0), ("c", 0))}
    rel |= {((xs[i], 0), (xs[i + 1], 0)) for i in range(kappa + 1)}
    rel |= {((xs[i], 0), (xps[i], 0)) for i in range(kappa + 1)}
    copies = [(e, 0) for e in ["a", "b", "c"] + xs + xps]
    gens = [O.FS({"a", "c", xs[0]})]
    gens += [O.FS({"c", xs[i], xps[i], xs[i + 1]}) for i in range(kappa)]
    gens.append(O.FS({"a", "b", "c", xs[kappa], xps[kappa], xs[kappa + 1]}))
    return copies, rel, gens


def example_values(kappa):
    copies, rel, gens = ladder_example(kappa)
    fam = O.intersection_closure(gens)
    f = {x: O.mu(copies, rel, x) for x in fam}
    out = {
        "sets": len(fam),
        "added": sorted(srt(s) for s in fam - set(gens)),
        "mu-subset": O.mu_subset(f),
        "mu-PR": O.mu_pr(f),
        "mu-CUM": O.mu_cum(f),
        "cumt": [O.ladder_holds(f, a, only_last=True) for a in range(kappa)],
        "cum": [O.ladder_holds(f, a) for a in range(kappa + 1)],
    }
    u, seq = O.ladder_violation(f, kappa, only_last=False)
    out["violation"] = {
        "U": srt(u), "X": [srt(x) for x in seq],
        "offending": srt(O.FS.intersection(*seq) & f[u] - f[seq[-1]]),
    }
    return out


def fact_three_values():
    copies = [("a", 0), ("b", 0), ("c", 0)]
    rel = {(("c", 0), ("b", 0)), (("b", 0), ("a", 0))}
    gens = [O.FS("ac"), O.FS("bc"), O.FS("ab")]
    fam = O.intersection_closure(gens)
    f = {x: O.mu(copies, rel, x) for x in fam}
    return {
        "mu": {"".join(srt(x)): srt(f[x]) for x in sorted(fam, key=lambda s: (len(s), srt(s)))},
        "mu_full": srt(O.mu(copies, rel, "abc")),
        "smooth": all(O.smooth_on(copies, rel, x) for x in fam),
        "transitive": O.transitive(rel),
        "cumt1": O.ladder_holds(f, 1, only_last=True),
        "cum1": O.ladder_holds(f, 1),
        "X1_meet_muU": srt(O.FS("ab") & f[O.FS("ac")]),
        "mu_X1": srt(f[O.FS("ab")]),
    }


def plausi_values():
    axioms = [("a", "b"), ("b", "a"), ("a", "c"), ("a", "fd"), ("dc", "ba"), ("dc", "e"), ("fcba", "e")]
    table = O.saturate("abcdef", axioms)
    queries = {"a |~ e": ("a", "e"), "a |~ b": ("a", "b"), "a |~ d f": ("a", "df"),
               "a |~ b e": ("a", "be"), "c d |~ a b e": ("cd", "abe"), "a b c d |~ e": ("abcd", "e")}
    return {
        "derivable_count": len(table),
        "queries": {q: (O.FS(l), O.FS(r)) in table for q, (l, r) in queries.items()},
        "no_axioms_count": {str(n): len(O.saturate("abc"[:n], [])) for n in (1, 2, 3)},
    }


def main():
    data = {
        "ladder_example": {str(k): example_values(k) for k in (1, 2, 3)},
        "fact_three": fact_three_values(),
        "search_counts": {
            "arbitrary": {str(g): O.count_choice_tables(g) for g in (1, 2, 3)},
            "mu-PR": {str(g): O.count_choice_tables(g, ("mu-PR",)) for g in (1, 2, 3)},
        },
        "plausi": plausi_values(),
    }
    OUT.parent.mkdir(exist_ok=True)
    OUT.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
