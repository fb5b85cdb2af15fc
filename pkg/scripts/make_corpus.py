"""Write the seeded test corpus and the catalog presentations.

    python scripts/make_corpus.py [--seed 20261015] [--out tests/data]
"""
from __future__ import annotations

import argparse
import random
from pathlib import Path

from noether import library as L
from noether.cases5 import CATALOG
from noether.presfile import Presentation, emit_presentation, presentation_digest

SHAPES = {3: [[1, 1], [2], [2, 1], [1, 1, 1], [2, 2], [3, 1], [2, 1, 1], [1, 1, 1, 1], [3]],
          5: [[1, 1], [2], [2, 1], [1, 1, 1]]}
# (p, count of semidirect groups, pc group sizes)
PLAN = [(3, 150, [3, 4, 5]), (5, 30, [3, 4])]


def write(path: Path, pres: Presentation) -> None:
    path.write_text(emit_presentation(pres), encoding="utf-8")


def corpus(rng, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    seen, count = set(), 0

    def keep(G, name, family, sub=None, alpha=None):
        nonlocal count
        d = presentation_digest(G)
        if d in seen:
            return
        seen.add(d)
        write(out / f"{name}.pres", Presentation(G, name, family, sub or [], alpha))
        count += 1

    for p in (3, 5):
        keep(L.heisenberg(p), f"heisenberg-p{p}", "synthetic")
        keep(L.modular(p), f"modular-p{p}", "synthetic")
        keep(L.abelian(p, [2, 1]), f"abelian-p{p}-21", "synthetic")
    for p, nsd, sizes in PLAN:
        for k in range(nsd):
            G, exps, M, ap = L.random_semidirect(rng, p, SHAPES[p], twisted=0.3)
            keep(G, f"sd-p{p}-{k:03d}", "semidirect", G.gens[1:], G.gen(0))
        for n in sizes:
            for k in range(8 if p == 3 else 4):
                G = L.random_pc_group(rng, p, n)
                keep(G, f"pc-p{p}-n{n}-{k:02d}", "random-pc")
    return count


def catalog(out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    n = 0
    for e in CATALOG:
        if e.builder is None:
            continue
        for p in ((3,) if e.primes == "p=3" else (3, 5)):
            G, named = e.builder(p)
            safe = e.name.replace("(", "_").replace(")", "").replace("^", "")
            write(out / f"{safe}-p{p}.pres", Presentation(G, e.name, e.family))
            n += 1
    return n


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=20261015)
    ap.add_argument("--out", default="tests/data")
    args = ap.parse_args()
    out = Path(args.out)
    n1 = corpus(random.Random(args.seed), out / "corpus")
    n2 = catalog(out / "catalog")
    print(f"wrote {n1} corpus and {n2} catalog presentations under {out}")


if __name__ == "__main__":
    main()
