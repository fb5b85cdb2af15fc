"""Command-line interface: ``python -m noether <command>``.

Exit codes: 0 success or accept, 2 hypothesis refusal, 3 verification
reject (or oracle disagreement), 4 input error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import certify as cert_mod
from .presfile import FormatError, load_presentation, presentation_digest

EXIT_OK, EXIT_REFUSED, EXIT_REJECTED, EXIT_INPUT = 0, 2, 3, 4


class InputError(Exception):
    pass


def _vec_str(x) -> str:
    items = [f"g{i + 1}^{e}" if e != 1 else f"g{i + 1}" for i, e in enumerate(x) if e]
    return " ".join(items) or "1"


def _load(path):
    try:
        return load_presentation(path)
    except FormatError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _indices(text: str, n: int, what: str) -> list[int]:
    try:
        idx = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"{what} expects comma-separated generator indices") from None
    if not idx or any(not 1 <= i <= n for i in idx):
        raise InputError(f"{what} indices must lie in 1..{n}")
    return idx


def _subgroup_and_alpha(pres, args):
    from .pgroup import default_alpha, default_H, subgroup_closure
    G = pres.group
    if getattr(args, "subgroup", None):
        H = subgroup_closure(G, [G.gen(i - 1) for i in _indices(args.subgroup, G.ngens, "--subgroup")])
    elif pres.subgroup:
        H = pres.H()
    else:
        H = default_H(G)
    if getattr(args, "alpha", None):
        alpha = G.gen(_indices(args.alpha, G.ngens, "--alpha")[0] - 1)
    elif pres.alpha is not None:
        alpha = pres.alpha
    else:
        alpha = default_alpha(G, H)
    return H, alpha


def _header(pres, out):
    G = pres.group
    out.append(f"group: {pres.name or '(unnamed)'}")
    out.append(f"p = {G.p}, ngens = {G.ngens}, order = {G.order}")
    out.append(f"digest: {presentation_digest(G)}")


# -- analyze -----------------------------------------------------------------

def cmd_analyze(args) -> int:
    from .decomp import (
        DecompositionFailed, HypothesisRefusal, check_lcs_condition, check_power_condition,
        decompose_H,
    )
    from .pgroup import (PreconditionError, abelian_basis, abelian_invariants, is_normal,
                         lower_central_series)
    pres = _load(args.file)
    G = pres.group
    out = []
    _header(pres, out)
    try:
        H, alpha = _subgroup_and_alpha(pres, args)
    except PreconditionError as exc:
        out.append(f"refused: {exc}")
        print("\n".join(out))
        return EXIT_REFUSED
    out.append(f"H = <{', '.join(_vec_str(x) for x in H.gens)}>, order {H.order}, "
               f"normal {is_normal(H, G)}, abelian {H.is_abelian()}")
    if H.is_abelian():
        out.append(f"H invariants: {abelian_invariants(H)}")
    out.append(f"alpha = {_vec_str(alpha)}")
    lcs = [S.order for S in lower_central_series(G)]
    c1 = check_lcs_condition(G)
    out.append(f"condition (1) G_(p) = 1: {'holds' if c1 else 'fails'} "
               f"(lower central series orders {' '.join(map(str, lcs))})")
    status = EXIT_OK
    try:
        c2, bad = check_power_condition(G, H, alpha)
        if c2:
            out.append("condition (2) H_j & H^p = H_j^p for some basis: holds")
        else:
            basis = abelian_basis(H)
            out.append("condition (2) H_j & H^p = H_j^p for some basis: fails "
                       f"(violators in basis [{', '.join(_vec_str(b) for b in basis)}]: "
                       f"{', '.join(_vec_str(basis[j]) for j in bad)})")
    except PreconditionError as exc:
        out.append(f"condition (2): not applicable ({exc})")
    try:
        res = decompose_H(G, H, alpha)
        out.append("decomposition:")
        for j, f in enumerate(res.factors, start=1):
            out.append(f"  H_{j}: kind {f.kind}, type {list(f.invariants)}, "
                       f"i = {f.top_exponent}, k = {f.k - 1}, "
                       f"basis [{', '.join(_vec_str(b) for b in f.basis)}]"
                       + (f", chain [{', '.join(_vec_str(b) for b in f.chain)}]" if f.chain else ""))
        out.append(f"  s = {res.s}, t = {res.t}, r = {res.r}")
    except (HypothesisRefusal, PreconditionError) as exc:
        out.append(f"refused: {exc}" if hasattr(exc, "reason") else f"refused: precondition: {exc}")
        status = EXIT_REFUSED
    except DecompositionFailed as exc:
        out.append(f"decomposition failed: {exc}")
        status = EXIT_REFUSED
    print("\n".join(out))
    return status


# -- certify / verify ------------------------------------------------------------

def cmd_certify(args) -> int:
    from .pgroup import PreconditionError
    pres = _load(args.file)
    G = pres.group
    opts = cert_mod.CertifyOptions(char_p=args.char_p, name=pres.name)
    if pres.subgroup or args.subgroup:
        H, alpha = _subgroup_and_alpha(pres, args)
        opts.H, opts.alpha = list(H.gens), alpha
    try:
        cert = cert_mod.certify_group(G, opts)
    except cert_mod.Refusal as exc:
        print(json.dumps({"refused": True, "reason": exc.reason, "detail": exc.detail},
                         sort_keys=True, indent=1))
        return EXIT_REFUSED
    except PreconditionError as exc:
        print(json.dumps({"refused": True, "reason": "precondition", "detail": str(exc)},
                         sort_keys=True, indent=1))
        return EXIT_REFUSED
    text = cert_mod.dumps(cert)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"certificate written to {args.out} (route {cert['route']}, "
              f"{len(cert['steps'])} steps, digest {cert['digest']})")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    pres = _load(args.file)
    try:
        with open(args.cert, encoding="utf-8") as fh:
            cert = json.load(fh)
    except OSError as exc:
        raise InputError(f"{args.cert}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.cert}: not JSON ({exc})") from exc
    if not isinstance(cert, dict):
        raise InputError(f"{args.cert}: certificate must be a JSON object")
    v = cert_mod.verify_certificate(cert, pres.group)
    print(json.dumps(v.to_json(), sort_keys=True))
    return EXIT_OK if v.accepted else EXIT_REJECTED


# -- catalog ---------------------------------------------------------------------

def cmd_catalog(args) -> int:
    from .cases5 import CATALOG, CaseReplayMismatch, catalog_entry, run_case
    if args.action in (None, "list"):
        width = max(len(e.name) for e in CATALOG)
        for e in CATALOG:
            print(f"{e.name:<{width}}  family {e.family:<9} {e.primes:<5} {e.provenance:<13} {e.route}")
        return EXIT_OK
    if args.action == "show":
        if not args.name:
            raise InputError("catalog show needs an entry name")
        try:
            e = catalog_entry(args.name)
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from exc
        print(f"name: {e.name}")
        print(f"family: {e.family}")
        print(f"primes: {e.primes}")
        print(f"provenance: {e.provenance}")
        print(f"route: {e.route}")
        if e.claim_gens:
            print(f"claimed normal subgroup: <{', '.join(e.claim_gens)}> of type "
                  f"{' x '.join(map(str, e.claim_type))}")
        if e.note:
            print(f"note: {e.note}")
        p = args.p or 3
        from .cases5 import verify_normal_subgroup_claim
        if e.primes == "p=3" and p != 3:
            p = 3
        print(f"claim status (p = {p}): {verify_normal_subgroup_claim(e, p=p)}")
        return EXIT_OK
    if args.action == "run":
        names = []
        if args.all:
            names = ["I", "II", "III", "IV", "V", "VI", "VII", "VIII"]
        elif args.name:
            names = [args.name]
        else:
            raise InputError("catalog run needs a case name or --all")
        status = EXIT_OK
        for nm in names:
            case = nm
            if not nm.lower().startswith("case-") and nm.upper() not in (
                    "I", "II", "III", "IV", "V", "VI", "VII", "VIII"):
                try:
                    e = catalog_entry(nm)
                except KeyError as exc:
                    raise InputError(str(exc.args[0])) from exc
                if e.route == "rejected":
                    print(f"{e.name}: out-of-scope-group: {e.note}")
                    status = EXIT_REFUSED
                    continue
                if not e.route.startswith("case-"):
                    raise InputError(f"{e.name} has route {e.route}, not a case replay")
                case = e.route
            cid = case.upper().removeprefix("CASE-")
            p = args.p or 3
            if args.all and cid in ("VI", "VII", "VIII"):
                p = 3
            try:
                run = run_case(cid, p)
            except CaseReplayMismatch as exc:
                print(f"case-{cid} p={p}: case-replay-mismatch: {exc}")
                status = EXIT_REJECTED
                continue
            except ValueError as exc:
                raise InputError(str(exc)) from exc
            _print_run(run)
        return status
    raise InputError(f"unknown catalog action {args.action!r}")


def _print_run(run):
    print(f"case-{run.case_id} p={run.p}" + (f" {run.params}" if run.params else ""))
    act = run.initial
    print(f"  initial variables: {' '.join(act.names)}")
    for rec in run.steps:
        print(f"  [{rec.rule}] {rec.stage}: {' '.join(rec.action.names)}")
        print(f"    alpha: {'; '.join(rec.action.describe('alpha'))}")
    for c in run.checks:
        print(f"  ok: {c}")


# -- oracle ----------------------------------------------------------------------

def cmd_oracle(args) -> int:
    from .oracle import CHECKS, OracleBoundExceeded, compare
    from .pgroup import PreconditionError
    pres = _load(args.file)
    G = pres.group
    checks = tuple(c.strip() for c in args.check.split(",") if c.strip())
    if any(c != "all" and c not in CHECKS for c in checks):
        raise InputError(f"--check takes all or a subset of {','.join(sorted(CHECKS))}")
    try:
        H, alpha = _subgroup_and_alpha(pres, args)
        res = compare(G, H, alpha, checks=checks)
    except OracleBoundExceeded as exc:
        print(f"refused: {exc}")
        return EXIT_REFUSED
    except PreconditionError as exc:
        print(f"refused: {exc}")
        return EXIT_REFUSED
    for k in sorted(res.brute):
        a, b = res.algebraic.get(k), res.brute[k]
        print(f"{k}: {b}" + ("" if a == b else f"  MISMATCH (algebraic {a})"))
    print("diffs: " + (", ".join(res.mismatches) if res.mismatches else "none"))
    return EXIT_OK if res.agree else EXIT_REJECTED


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="noether", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="check the two conditions and decompose H")
    a.add_argument("file")
    a.add_argument("--subgroup", help="comma-separated generator indices generating H")
    a.add_argument("--alpha", help="generator index of alpha")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("certify", help="emit a rationality certificate or a refusal")
    c.add_argument("file")
    c.add_argument("--char-p", action="store_true", help="work over a field of characteristic p")
    c.add_argument("--subgroup")
    c.add_argument("--alpha")
    c.add_argument("--out")
    c.set_defaults(func=cmd_certify)

    v = sub.add_parser("verify", help="re-check a certificate against a presentation")
    v.add_argument("cert")
    v.add_argument("file")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("catalog", help="order-p^5 catalog entries and case replays")
    k.add_argument("action", nargs="?", choices=["list", "show", "run"])
    k.add_argument("name", nargs="?")
    k.add_argument("-p", type=int, default=None)
    k.add_argument("--all", action="store_true")
    k.set_defaults(func=cmd_catalog)

    o = sub.add_parser("oracle", help="diff algebraic results against enumeration")
    o.add_argument("file")
    o.add_argument("--check", default="all")
    o.add_argument("--subgroup")
    o.add_argument("--alpha")
    o.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
