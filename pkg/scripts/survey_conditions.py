"""Tabulate the two decomposition hypotheses over a directory of presentations.

    python scripts/survey_conditions.py [tests/data/corpus tests/data/catalog]
"""
import argparse
from collections import Counter
from pathlib import Path

from noether.decomp import (DecompositionFailed, HypothesisRefusal, check_lcs_condition,
                            check_power_condition, decompose_H)
from noether.pgroup import PreconditionError, default_alpha, default_H
from noether.presfile import load_presentation


def survey(path: Path) -> tuple[str, str]:
    pres = load_presentation(path)
    G = pres.group
    try:
        H = pres.H() or default_H(G)
        alpha = pres.alpha if pres.alpha is not None else default_alpha(G, H)
    except PreconditionError as exc:
        return "no-H", str(exc)
    c1 = check_lcs_condition(G)
    c2, bad = check_power_condition(G, H, alpha)
    try:
        dec = decompose_H(G, H, alpha)
    except HypothesisRefusal as exc:
        return "refused", exc.reason
    except DecompositionFailed as exc:
        return "failed", str(exc)
    kinds = ",".join(f.kind + "(" + "x".join(map(str, f.invariants)) + ")" for f in dec.factors)
    return "decomposed", f"cond1={c1} cond2={c2} violators={bad} factors={kinds}"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dirs", nargs="*", type=Path,
                    default=[Path("tests/data/corpus"), Path("tests/data/catalog")])
    args = ap.parse_args()
    tally = Counter()
    for d in args.dirs:
        for f in sorted(d.glob("*.pres")):
            status, detail = survey(f)
            tally[status] += 1
            print(f"{f.name:<40} {status:<11} {detail}")
    print("\n" + ", ".join(f"{k}: {v}" for k, v in sorted(tally.items())))


if __name__ == "__main__":
    main()
