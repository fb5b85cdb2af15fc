"""Replay every case and certify every catalog entry that has a presentation.

    python scripts/run_catalog.py [--primes 3 5] [--out-dir certs/]
"""
import argparse
import json
import time
from pathlib import Path

from noether.cases5 import CATALOG, dispatch_route, run_case, verify_normal_subgroup_claim
from noether.certify import CertifyOptions, Refusal, certify_group, dumps, verify_certificate

CASE_PRIMES = {"I": None, "II": None, "III": None, "IV": None, "V": None,
               "VI": [3], "VII": [3], "VIII": [3]}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--primes", type=int, nargs="+", default=[3, 5])
    ap.add_argument("--out-dir", type=Path, default=None)
    args = ap.parse_args()
    if args.out_dir:
        args.out_dir.mkdir(parents=True, exist_ok=True)

    print("case replays")
    for cid, fixed in CASE_PRIMES.items():
        for p in fixed or args.primes:
            t = time.perf_counter()
            run = run_case(cid, p)
            n = sum(s.entries_checked for s in run.steps)
            print(f"  case-{cid:<4} p={p}: {len(run.steps)} stages, {n} entries matched "
                  f"({time.perf_counter() - t:.2f} s)")

    print("catalog")
    for e in CATALOG:
        try:
            route = dispatch_route(e)
        except Exception as exc:  # out of scope or refused
            print(f"  {e.name:<22} {type(exc).__name__}: {exc}")
            continue
        if e.builder is None:
            print(f"  {e.name:<22} route {route}; claim {verify_normal_subgroup_claim(e)}")
            continue
        for p in args.primes:
            try:
                G, _ = e.builder(p)
            except ValueError:
                continue
            claim = verify_normal_subgroup_claim(e, p=p)
            try:
                cert = certify_group(G, CertifyOptions(name=e.name))
            except Refusal as exc:
                print(f"  {e.name:<22} p={p}: refused ({exc})")
                continue
            v = verify_certificate(cert, G)
            print(f"  {e.name:<22} p={p}: claim {claim}, route {cert['route']}, "
                  f"{len(cert['steps'])} steps, accepted {v.accepted}")
            if args.out_dir:
                safe = e.name.replace("(", "_").replace(")", "").replace("^", "")
                (args.out_dir / f"{safe}-p{p}.json").write_text(dumps(cert))
                (args.out_dir / f"{safe}-p{p}.verdict.json").write_text(
                    json.dumps(v.to_json(), sort_keys=True))


if __name__ == "__main__":
    main()
