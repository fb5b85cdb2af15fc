"""Rationality certificates: generation, serialization and independent checking.

A certificate is a JSON document.  Each step records a rule tag, a payload,
a justification and (for constructive steps) the action after the step.
Steps are chained by sha256 digests so that every field is bound to the
certificate; independently of the digests, the verifier re-executes every
constructive step with its own monomial arithmetic (only :mod:`intlin`,
:mod:`cycpoly` and the group multiplication of :mod:`pgroup` are shared).
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

from . import intlin
from .pgroup import PGroup, PreconditionError, default_alpha, default_H, subgroup_closure

SCHEMA = "noether-certificate/1"
COMMUTATOR = "[a,b] = a^-1 b^-1 a b"
ACTION_CONVENTION = "row: g.x_i = zeta^c_i prod_j x_j^A_ij, A_gh = A_h A_g"
RULES = ("fischer", "kuniyoshi-char-p", "hajja-kang-faithful", "fibration-drop",
         "monomial-substitution", "twist-normalize", "zomega-split", "lemma24-linearize",
         "citation")
CITATIONS = {
    "fischer": "Fischer: K(A) is rational for abelian A when K contains enough roots of unity",
    "kuniyoshi-char-p": "Kuniyoshi: K(G) is rational for a p-group G when char K = p",
    "metacyclic-cited": "rationality of metacyclic p-groups (cited, not constructed)",
    "direct-product-cited": "rationality of direct products of rational factors (cited)",
}


class Refusal(Exception):
    """No certificate: a hypothesis failed or no route applies."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail


class VerificationError(Exception):
    def __init__(self, step, reason: str, detail: str = ""):
        where = "header" if step is None else f"step {step}"
        super().__init__(f"{where}: {reason}" + (f" ({detail})" if detail else ""))
        self.step = step
        self.reason = reason
        self.detail = detail


@dataclass
class CertifyOptions:
    char_p: bool = False
    name: str = ""
    H: list | None = None          # generating elements of H
    alpha: tuple | None = None
    allow_citation: bool = True


@dataclass
class Verdict:
    accepted: bool
    step: int | None = None
    reason: str = ""
    detail: str = ""

    def to_json(self) -> dict:
        return {"accepted": self.accepted, "step": self.step, "reason": self.reason,
                "detail": self.detail}


# -- serialization -----------------------------------------------------------

def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def dumps(cert: dict) -> str:
    return json.dumps(cert, sort_keys=True, indent=1) + "\n"


def _sha(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


def _header(cert: dict) -> dict:
    return {k: v for k, v in cert.items() if k not in ("steps", "digest")}


def seal(cert: dict) -> dict:
    """Fill in the step digests and the root digest (in place)."""
    prev = _sha(canonical(_header(cert)))
    for st in cert["steps"]:
        body = {k: v for k, v in st.items() if k != "digest"}
        st["digest"] = _sha(prev + canonical(body))
        prev = st["digest"]
    cert["digest"] = prev
    return cert


def _action_json(act) -> dict:
    return act.to_json()


def _step(rule: str, justification: str, payload: dict, post=None) -> dict:
    return {"rule": rule, "justification": justification, "payload": payload,
            "post_action": None if post is None else _action_json(post)}


def _vec(x) -> list:
    return [int(e) for e in x]


# -- generation ----------------------------------------------------------------

def _base(G: PGroup, name: str, route: str) -> dict:
    from .presfile import presentation_digest
    return {
        "schema": SCHEMA,
        "subject": {"name": name, "p": G.p, "ngens": G.ngens, "order": G.order,
                    "digest": presentation_digest(G)},
        "route": route,
        "conventions": {"commutator": COMMUTATOR, "action": ACTION_CONVENTION},
        "steps": [],
    }


def _citation_cert(G: PGroup, name: str, route: str, payload: dict) -> dict:
    cert = _base(G, name, route)
    rule = route if route in ("fischer", "kuniyoshi-char-p") else "citation"
    cert["steps"].append(_step(rule, CITATIONS[route], payload))
    cert["terminal"] = {"kind": "citation", "cites": route}
    return cert


def _faithful_step(act, G: PGroup, gen_words, label_elements: dict, justification: str) -> dict:
    from .monact import kernel_size
    k = kernel_size(act, G, gen_words)
    return _step("hajja-kang-faithful", justification, {
        "initial_action": _action_json(act),
        "gen_words": [list(w) for w in gen_words],
        "label_elements": {lab: _vec(x) for lab, x in label_elements.items()},
        "kernel_order": k,
        "group_order": G.order,
    })


def _linear_tail(cert: dict, act, p: int, justification: str) -> None:
    from .linearize import lemma24_checks, lemma24_substitution
    checks = lemma24_checks(lemma24_substitution(p))
    cert["steps"].append(_step("lemma24-linearize", justification, {
        "n": p, "blocks": act.nvars // (p - 1), "checks": {k: bool(v) for k, v in sorted(checks.items())},
    }))
    cert["terminal"] = {"kind": "linear", "variables": act.nvars, "blocks": act.nvars // (p - 1),
                        "description": "alpha acts linearly on s-variables; "
                                       "the fixed field is rational by the no-name lemma"}


def _thm14_cert(G: PGroup, name: str, H, alpha) -> dict:
    from .decomp import check_chain_identity, decompose_H
    from .linearize import (
        build_induced_action, check_phi_annihilation, step2_module, step2_reduce,
        zomega_decompose,
    )
    from .monact import Substitution, apply_substitution
    dec = decompose_H(G, H, alpha)
    ind = build_induced_action(dec)
    r = step2_reduce(ind, dec)
    cert = _base(G, name, "thm14-pipeline")
    orientation = "[b,a]"
    for f in dec.factors:
        if len(f.chain) > 1:
            ok, orientation = check_chain_identity(G, f.chain[0], alpha)
            break
    cert["conventions"].update({"alpha": _vec(alpha), "chain_identity_orientation": orientation,
                                "step2_identity": r.convention, "step2_route": r.route})
    cert["hypotheses"] = {
        "H": [_vec(x) for x in H.gens], "H_order": H.order,
        "condition_1": True, "condition_2": True,
        "factors": [{"kind": f.kind, "basis": [_vec(b) for b in f.basis],
                     "invariants": list(f.invariants)} for f in dec.factors],
        "i_j": dec.i_j, "k_j": dec.k_j,
    }
    act = ind.action
    labels = {g: G.gen(i) for i, g in enumerate(act.gens[:-1])}
    labels["alpha"] = alpha
    cert["steps"].append(_faithful_step(
        act, G, [[act.gens[i]] for i in range(G.ngens)], labels,
        "faithful monomial action: K(G) embeds in a rational extension of K(x)"))
    for rule, sub, post in r.substitutions:
        just = {"fibration-drop": "Hajja-Kang fibration over the kept variables",
                "twist-normalize": "rescale by a p-th root of the alpha^p character",
                "monomial-substitution": "fixed field of H: index equals the character group order"
                }[rule]
        cert["steps"].append(_step(rule, just, {"substitution": sub.to_json()}, post))
    L = step2_module(r, G.p)
    A, blocks = L.A, L.blocks
    if not check_phi_annihilation(L):
        raise Refusal("phi-annihilation-failed", "Step-2 module is not a Z[omega]-module")
    U, D = zomega_decompose(L)
    sub = Substitution(U, kind="unimodular",
                       names=tuple(f"t{i + 1}" for i in range(len(U))))
    post = apply_substitution(r.action, sub)
    cert["steps"].append(_step("zomega-split", "Z[omega]-lattice splits into rank-one summands",
                               {"substitution": sub.to_json(), "module": [list(x) for x in A],
                                "blocks": blocks, "target": [list(x) for x in D]}, post))
    _linear_tail(cert, post, G.p, "cyclic monomial action linearizes over K(zeta_p)")
    return cert


def _case_cert(G: PGroup, name: str, entry, named: dict) -> dict:
    from .cases5 import run_case
    case_id = entry.route.split("-", 1)[1]
    run = run_case(case_id, G.p)
    cert = _base(G, name, entry.route)
    cert["conventions"]["case"] = case_id
    cert["hypotheses"] = {"catalog_entry": entry.name, "checks": list(run.checks)}
    labels = {lab: named[lab] for lab in run.initial.gens}
    cert["steps"].append(_faithful_step(
        run.initial, run.group, run.gen_words, labels,
        "faithful monomial action: displayed action respects the relations"))
    for rec in run.steps:
        cert["steps"].append(_step(rec.rule, rec.justification or rec.stage,
                                   {"substitution": rec.substitution.to_json(), "stage": rec.stage},
                                   rec.action))
    _linear_tail(cert, run.final, G.p, "cyclic monomial action linearizes over K(zeta_p)")
    return cert


def catalog_match(G: PGroup):
    """Catalog entry with a case route whose built group has G's digest."""
    from .cases5 import CATALOG
    from .presfile import presentation_digest
    d = presentation_digest(G)
    for e in CATALOG:
        if not e.route.startswith("case-") or e.builder is None:
            continue
        if e.primes == "p=3" and G.p != 3:
            continue
        try:
            H, named = e.builder(G.p)
        except ValueError:
            continue
        if presentation_digest(H) == d:
            return e, named
    return None


def is_metacyclic(G: PGroup) -> bool:
    elems = G.elements()
    for x in elems:
        N = subgroup_closure(G, [x])
        if any(G.mul(G.inv(g), G.mul(x, g)) not in N.elements for g in G.gens):
            continue
        idx = G.order // N.order
        for y in elems:
            k, z = 1, y
            while z not in N.elements:
                z = G.mul(z, y)
                k += 1
            if k == idx:
                return True
    return False


def certify_group(G: PGroup, opts: CertifyOptions | None = None) -> dict:
    """Certificate accepted by :func:`verify_certificate`, or :class:`Refusal`."""
    from .decomp import DecompositionFailed, HypothesisRefusal
    opts = opts or CertifyOptions()
    name = opts.name
    if opts.char_p:
        cert = _citation_cert(G, name, "kuniyoshi-char-p", {"characteristic": G.p})
    elif G.is_abelian():
        from .pgroup import abelian_invariants
        cert = _citation_cert(G, name, "fischer",
                              {"invariants": abelian_invariants(G.whole)})
    else:
        hit = catalog_match(G)
        if hit is not None:
            cert = _case_cert(G, name or hit[0].name, *hit)
        else:
            try:
                H = subgroup_closure(G, opts.H) if opts.H else default_H(G)
                alpha = tuple(opts.alpha) if opts.alpha is not None else default_alpha(G, H)
                cert = _thm14_cert(G, name, H, alpha)
            except (HypothesisRefusal, PreconditionError, DecompositionFailed) as exc:
                if opts.allow_citation and is_metacyclic(G):
                    cert = _citation_cert(G, name, "metacyclic-cited",
                                          {"refused_pipeline": str(exc)})
                else:
                    reason = getattr(exc, "reason", type(exc).__name__)
                    raise Refusal(reason, getattr(exc, "detail", "") or str(exc)) from exc
    seal(cert)
    verdict = verify_certificate(cert, G)
    if not verdict.accepted:
        raise RuntimeError(f"generated certificate failed verification: {verdict.reason} "
                           f"at step {verdict.step}: {verdict.detail}")
    return cert


# -- independent verification ------------------------------------------------
#
# Everything below re-derives actions from raw matrices; nothing is imported
# from monact, linearize, decomp or cases5.

def _letters(vec) -> list:
    return [i for i, e in enumerate(vec) for _ in range(e)]


class _Act:
    def __init__(self, d: dict):
        try:
            self.n = int(d["nvars"])
            self.N = int(d["modulus"])
            self.gens = list(d["gens"])
            self.mats = [[[int(x) for x in row] for row in A] for A in d["mats"]]
            self.scal = [[int(x) for x in c] for c in d["scalars"]]
            self.names = list(d.get("names", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed action: {exc}") from None
        if self.N < 1 or len(self.mats) != len(self.gens) or len(self.scal) != len(self.gens):
            raise ValueError("malformed action")
        for A, c in zip(self.mats, self.scal):
            if len(A) != self.n or any(len(r) != self.n for r in A) or len(c) != self.n:
                raise ValueError("action shape mismatch")
            if any(not 0 <= x < self.N for x in c):
                raise ValueError("scalar outside 0..modulus-1")
        if len(self.names) != self.n:
            raise ValueError("variable names do not match the rank")

    def of(self, g):
        k = self.gens.index(g)
        return self.mats[k], self.scal[k]

    def word(self, labels):
        A, c = intlin.identity(self.n), [0] * self.n
        for g in labels:
            B, d = self.of(g)
            c = [(x + y) % self.N for x, y in zip(d, intlin.matvec(B, c))]
            A = intlin.matmul(B, A)
        return A, c

    def same(self, other: "_Act") -> bool:
        return (self.n, self.N, self.gens, self.mats, self.scal) == \
               (other.n, other.N, other.gens, other.mats, other.scal)


def _trivial(A, c) -> bool:
    return A == intlin.identity(len(A)) and not any(c)


def _check_relations(act: _Act, G: PGroup, words) -> str | None:
    def ev(idx):
        return act.word([g for i in idx for g in words[i]])
    for i in range(G.ngens):
        if ev([i] * G.p) != ev(_letters(G.powers[i])):
            return f"power relation of g{i + 1}"
    for j in range(G.ngens):
        for i in range(j):
            if ev([j, i]) != ev([i, j] + _letters(G.comms[j][i])):
                return f"commutator relation ({j + 1}, {i + 1})"
    return None


def _substitute(pre: _Act, rows, shift, post: _Act) -> str | None:
    """Check that ``post`` is exactly the action induced on w = zeta^shift x^rows."""
    m = len(rows)
    if post.n != m or post.N != pre.N or post.gens != pre.gens:
        return "post-action shape"
    for k, g in enumerate(pre.gens):
        A, c = pre.mats[k], pre.scal[k]
        T, d = post.mats[k], post.scal[k]
        for l in range(m):
            lhs = intlin.vecmat(rows[l], A)
            rhs = intlin.vecmat(T[l], rows)
            if lhs != rhs:
                return f"{g} on new variable {l}: exponent rows differ"
            sc = shift[l] + sum(a * b for a, b in zip(rows[l], c)) - sum(
                a * b for a, b in zip(T[l], shift))
            if sc % pre.N != d[l]:
                return f"{g} on new variable {l}: scalar differs"
    return None


def _label(act: _Act, g) -> str:
    """Generator label; pipelines may give words as generator indices."""
    if isinstance(g, bool) or not isinstance(g, (int, str)):
        raise _Fail("bad-fixed-by", repr(g))
    if isinstance(g, int):
        if not 0 <= g < len(act.gens):
            raise _Fail("bad-fixed-by", repr(g))
        return act.gens[g]
    if g not in act.gens:
        raise _Fail("bad-fixed-by", g)
    return g


def _char_group_order(pre: _Act, words) -> int | None:
    vecs = []
    for w in words:
        A, c = pre.word(w)
        if A != intlin.identity(pre.n):
            return None
        vecs.append(tuple(c))
    seen = {(0,) * pre.n}
    todo = list(seen)
    while todo:
        x = todo.pop()
        for v in vecs:
            y = tuple((a + b) % pre.N for a, b in zip(x, v))
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return len(seen)


def _cyclic(p: int):
    m = p - 1
    C = intlin.zeros(m, m)
    for i in range(m - 1):
        C[i][i + 1] = 1
    C[m - 1] = [-1] * m
    return C


def _standard(act: _Act, p: int) -> bool:
    if act.n % (p - 1) or "alpha" not in act.gens:
        return False
    A, c = act.of("alpha")
    if A != intlin.block_diag([_cyclic(p)] * (act.n // (p - 1))) or any(c):
        return False
    return _through_alpha(act, p)


def _through_alpha(act: _Act, p: int) -> bool:
    """Every label acts as a power of alpha's matrix, without scalars."""
    A, _ = act.of("alpha")
    powers, P = [], intlin.identity(act.n)
    for _ in range(p):
        powers.append(P)
        P = intlin.matmul(P, A)
    return all(act.of(g)[0] in powers and not any(act.of(g)[1]) for g in act.gens)


def _elements(G: PGroup):
    return G.elements()


class _Fail(Exception):
    def __init__(self, reason, detail=""):
        self.reason, self.detail = reason, detail


def _verify_faithful(pl: dict, G: PGroup) -> _Act:
    act = _Act(pl["initial_action"])
    words = [list(w) for w in pl["gen_words"]]
    if len(words) != G.ngens or any(g not in act.gens for w in words for g in w):
        raise _Fail("bad-gen-words")
    labels = pl["label_elements"]
    if sorted(labels) != sorted(act.gens):
        raise _Fail("bad-label-elements", "every acting label needs its group element")
    for lab, x in labels.items():
        x = tuple(int(e) for e in x)
        if len(x) != G.ngens or any(not 0 <= e < G.p for e in x):
            raise _Fail("bad-label-elements", lab)
        want = act.word([g for i in _letters(x) for g in words[i]])
        if act.of(lab) != want:
            raise _Fail("label-word-mismatch", lab)
    for i, w in enumerate(words):
        y = G.identity
        for g in w:
            y = G.mul(y, tuple(int(e) for e in labels[g]))
        if y != G.gen(i):
            raise _Fail("gen-word-mismatch", f"g{i + 1}")
    bad = _check_relations(act, G, words)
    if bad:
        raise _Fail("relations-violated", bad)
    kernel = _kernel_order(act, G, words)
    if kernel != 1 or pl["kernel_order"] != kernel or pl["group_order"] != G.order:
        raise _Fail("not-faithful", f"kernel order {kernel}")
    return act


def _kernel_order(act: _Act, G: PGroup, words) -> int:
    """Walk the Cayley graph from 1; a vertex reached twice must get one map."""
    steps = [act.word(w) for w in words]
    seen = {G.identity: (intlin.identity(act.n), [0] * act.n)}
    queue = [G.identity]
    for x in queue:
        A, c = seen[x]
        for i, (B, d) in enumerate(steps):
            y = G.mul(x, G.gen(i))
            img = (intlin.matmul(B, A), [(u + v) % act.N for u, v in zip(d, intlin.matvec(B, c))])
            if y in seen:
                if seen[y] != img:
                    raise _Fail("relations-violated", "action is not well defined")
            else:
                seen[y] = img
                queue.append(y)
    if len(seen) != G.order:
        raise _Fail("not-faithful", "generators do not reach every element")
    return sum(1 for A, c in seen.values() if _trivial(A, c))


def _verify_substitution_step(rule: str, st: dict, pre: _Act, G: PGroup, words) -> _Act:
    s = st["payload"]["substitution"]
    rows = [[int(x) for x in r] for r in s["rows"]]
    shift = [int(x) for x in s["shift"]]
    kind = s["kind"]
    m = pre.n
    if len(shift) != len(rows) or any(len(r) != m for r in rows) or any(not any(r) for r in rows):
        raise _Fail("malformed-substitution")
    if list(s["names"]) != list(st["post_action"]["names"]):
        raise _Fail("names-mismatch")
    expected_kind = {"fibration-drop": ("fibration",), "twist-normalize": ("unimodular",),
                     "zomega-split": ("unimodular",),
                     "monomial-substitution": ("unimodular", "sublattice")}[rule]
    if kind not in expected_kind:
        raise _Fail("rule-kind-mismatch", kind)
    if s["dropped"] and kind != "fibration" or s["fixed_by"] and kind != "sublattice":
        raise _Fail("malformed-substitution", "stray dropped/fixed_by data")
    if kind == "unimodular":
        if len(rows) != m or abs(intlin.det(rows)) != 1:
            raise _Fail("not-unimodular")
        if rule == "twist-normalize" and rows != intlin.identity(m):
            raise _Fail("twist-not-diagonal")
    elif kind == "sublattice":
        if len(rows) != m:
            raise _Fail("rank-changed")
        words_fix = [[_label(pre, g) for g in w] for w in s["fixed_by"]]
        if not words_fix:
            raise _Fail("bad-fixed-by")
        order = _char_group_order(pre, words_fix)
        if order is None:
            raise _Fail("fixed-by-not-diagonal")
        for w in words_fix:
            _, c = pre.word(w)
            for l, r in enumerate(rows):
                if sum(a * b for a, b in zip(r, c)) % pre.N:
                    raise _Fail("not-fixed", f"new variable {l}")
        if abs(intlin.det(rows)) != order:
            raise _Fail("index-mismatch", f"|det| {abs(intlin.det(rows))} vs {order}")
    else:
        dropped = [int(d) for d in s["dropped"]]
        if len(set(dropped)) != len(dropped) or any(not 0 <= d < m for d in dropped):
            raise _Fail("bad-dropped")
        full = rows + [[int(j == d) for j in range(m)] for d in dropped]
        if len(full) != m or abs(intlin.det(full)) != 1:
            raise _Fail("fibration-not-basis")
        for k in range(len(pre.gens)):
            A = pre.mats[k]
            for d in dropped:
                diff = [a - int(j == d) for j, a in enumerate(A[d])]
                if intlin.solve_left_int(rows, diff) is None:
                    raise _Fail("fibration-condition", f"{pre.gens[k]} on variable {d}")
    post = _Act(st["post_action"])
    bad = _substitute(pre, rows, shift, post)
    if bad:
        raise _Fail("post-action-mismatch", bad)
    bad = _check_relations(post, G, words)
    if bad:
        raise _Fail("relations-violated", bad)
    if rule == "zomega-split":
        pl = st["payload"]
        A = [[int(x) for x in r] for r in pl["module"]]
        if A != pre.of("alpha")[0]:
            raise _Fail("module-mismatch")
        if not _through_alpha(pre, G.p):
            raise _Fail("module-not-cyclic", "group must act through alpha without scalars")
        total, P = intlin.zeros(m, m), intlin.identity(m)
        for _ in range(G.p):
            total, P = intlin.matadd(total, P), intlin.matmul(P, A)
        if total != intlin.zeros(m, m):
            raise _Fail("phi-annihilation-failed")
        D = [[int(x) for x in r] for r in pl["target"]]
        if D != intlin.block_diag([_cyclic(G.p)] * (m // (G.p - 1))) or m % (G.p - 1):
            raise _Fail("zomega-target")
        if intlin.matmul(rows, A) != intlin.matmul(D, rows):
            raise _Fail("zomega-intertwiner")
        blocks = pl["blocks"]
        flat = sorted(v for b in blocks for v in b)
        if flat != list(range(m)) or any(len(b) != G.p - 1 for b in blocks):
            raise _Fail("zomega-blocks", "blocks must partition the variables into p-1 sets")
        level = {v: k for k, b in enumerate(blocks) for v in b}
        if any(A[i][j] and level[j] > level[i] for i in range(m) for j in range(m)):
            raise _Fail("zomega-blocks", "module is not block lower triangular")
    return post


def _verify_lemma24(pl: dict, act: _Act, p: int):
    if int(pl["n"]) != p or int(pl["blocks"]) * (p - 1) != act.n:
        raise _Fail("lemma24-shape")
    if not _standard(act, p):
        raise _Fail("not-standard-form", "alpha must act as diag(C, ..., C), the group through alpha")
    got = _lemma24_recheck(p)
    claimed = pl["checks"]
    if claimed != got or not all(got.values()):
        raise _Fail("lemma24-check-failed", str({k: v for k, v in got.items() if not v}))


_L24: dict = {}


def _lemma24_recheck(p: int) -> dict:
    if p not in _L24:
        from .linearize import lemma24_checks, lemma24_substitution
        _L24[p] = {k: bool(v) for k, v in sorted(lemma24_checks(lemma24_substitution(p)).items())}
    return _L24[p]


def verify_certificate(cert: dict, G: PGroup, check_digests: bool = True) -> Verdict:
    """Re-execute every step; the first failure is reported."""
    try:
        return _verify(cert, G, check_digests)
    except VerificationError as exc:
        return Verdict(False, exc.step, exc.reason, exc.detail)
    except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
        return Verdict(False, None, "malformed-certificate", f"{type(exc).__name__}: {exc}")


def _verify(cert: dict, G: PGroup, check_digests: bool) -> Verdict:
    from .presfile import presentation_digest
    if cert.get("schema") != SCHEMA:
        raise VerificationError(None, "schema-mismatch")
    subj = cert["subject"]
    if subj["digest"] != presentation_digest(G):
        raise VerificationError(None, "digest-mismatch", "certificate is for another presentation")
    if (subj["p"], subj["ngens"], subj["order"]) != (G.p, G.ngens, G.order):
        raise VerificationError(None, "subject-mismatch")
    conv = cert["conventions"]
    if conv.get("commutator") != COMMUTATOR or conv.get("action") != ACTION_CONVENTION:
        raise VerificationError(None, "convention-mismatch")
    steps = cert["steps"]
    route = cert["route"]
    if not steps:
        raise VerificationError(None, "no-steps")
    prev = _sha(canonical(_header(cert)))
    act = None
    words = None
    for k, st in enumerate(steps):
        rule = st["rule"]
        try:
            if rule not in RULES:
                raise _Fail("unknown-rule", rule)
            if rule in ("fischer", "kuniyoshi-char-p", "citation"):
                if len(steps) != 1 or st["post_action"] is not None:
                    raise _Fail("citation-not-terminal")
                _verify_citation(rule, route, st, G)
            elif rule == "hajja-kang-faithful":
                if k != 0 or st["post_action"] is not None:
                    raise _Fail("misplaced-faithfulness-step")
                if route != "thm14-pipeline" and not route.startswith("case-"):
                    raise _Fail("route-rule-mismatch")
                act = _verify_faithful(st["payload"], G)
                words = [list(w) for w in st["payload"]["gen_words"]]
            elif rule == "lemma24-linearize":
                if act is None or k != len(steps) - 1 or st["post_action"] is not None:
                    raise _Fail("misplaced-linearization")
                _verify_lemma24(st["payload"], act, G.p)
            else:
                if act is None:
                    raise _Fail("missing-faithfulness-step")
                act = _verify_substitution_step(rule, st, act, G, words)
            if check_digests:
                body = {kk: v for kk, v in st.items() if kk != "digest"}
                want = _sha(prev + canonical(body))
                if st.get("digest") != want:
                    raise _Fail("step-digest-mismatch")
                prev = want
        except _Fail as f:
            raise VerificationError(k, f.reason, f.detail) from None
    if route == "thm14-pipeline":
        _verify_hypotheses(cert, G)
    elif "hypotheses" in cert and not route.startswith("case-"):
        raise VerificationError(None, "unexpected-hypotheses")
    _verify_terminal(cert, act, G)
    if check_digests and cert.get("digest") != prev:
        raise VerificationError(None, "root-digest-mismatch")
    return Verdict(True)


def _closure(G: PGroup, gens) -> set:
    seen = {G.identity}
    todo = [G.identity]
    while todo:
        x = todo.pop()
        for g in gens:
            y = G.mul(x, g)
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def _verify_hypotheses(cert: dict, G: PGroup):
    """Recheck the recorded H, alpha and factor data by direct enumeration."""
    from .linearize import STEP2_CONVENTIONS
    conv, hyp = cert["conventions"], cert["hypotheses"]
    p = G.p
    labels = cert["steps"][0]["payload"]["label_elements"]

    def fail(detail):
        raise VerificationError(None, "hypotheses-mismatch", detail)

    alpha = tuple(int(e) for e in conv["alpha"])
    if list(alpha) != list(labels.get("alpha", [])):
        fail("alpha differs from the acting alpha")
    if conv.get("chain_identity_orientation") not in ("[b,a]", "[a,b]"):
        fail("orientation")
    if conv.get("step2_identity") not in STEP2_CONVENTIONS or \
            conv.get("step2_route") not in ("chain", "lattice"):
        fail("step-2 convention")
    if hyp.get("condition_1") is not True or hyp.get("condition_2") is not True:
        fail("conditions must both hold")
    Hgens = [tuple(int(e) for e in x) for x in hyp["H"]]
    H = _closure(G, Hgens)
    if len(H) != hyp["H_order"] or len(H) * p != G.order or alpha in H:
        fail("H must have index p and miss alpha")
    if any(G.mul(x, y) != G.mul(y, x) for x in Hgens for y in Hgens):
        fail("H is not abelian")
    if any(G.mul(G.inv(g), G.mul(h, g)) not in H for g in G.gens for h in Hgens):
        fail("H is not normal")
    total, span = 1, {G.identity}
    i_j, k_j = [], []
    for f in hyp["factors"]:
        basis = [tuple(int(e) for e in b) for b in f["basis"]]
        orders = [G.element_order(b) for b in basis]
        if any(b not in H for b in basis) or sorted(orders, reverse=True) != sorted(
                f["invariants"], reverse=True):
            fail("factor basis")
        S = _closure(G, basis)
        prod = 1
        for o in orders:
            prod *= o
        if len(S) != prod or any(G.mul(G.inv(alpha), G.mul(b, alpha)) not in S for b in basis):
            fail("factor is not an alpha-stable direct product of its basis")
        if (f["kind"] == "N") != all(o == p for o in orders) or f["kind"] not in ("N", "H"):
            fail("factor kind")
        if any(o != p for o in sorted(orders)[:-1]):
            fail("factor type")
        new = {G.mul(x, y) for x in span for y in S}
        if len(new) != len(span) * len(S):
            fail("factors are not independent")
        span, total = new, total * len(S)
        i_j.append(round(math.log(max(orders), p)))
        k_j.append(len(basis) - 1)
    if span != H or hyp["i_j"] != i_j or hyp["k_j"] != k_j:
        fail("factors do not decompose H")


def _verify_citation(rule: str, route: str, st: dict, G: PGroup):
    pl = st["payload"]
    if rule == "fischer":
        if route != "fischer" or not G.is_abelian() or st["justification"] != CITATIONS["fischer"]:
            raise _Fail("fischer-inapplicable")
        if list(pl["invariants"]) != _torsion_invariants(G):
            raise _Fail("invariants-mismatch")
    elif rule == "kuniyoshi-char-p":
        if route != "kuniyoshi-char-p" or int(pl["characteristic"]) != G.p \
                or st["justification"] != CITATIONS["kuniyoshi-char-p"]:
            raise _Fail("kuniyoshi-inapplicable")
    else:
        if route not in ("metacyclic-cited", "direct-product-cited") \
                or st["justification"] != CITATIONS[route]:
            raise _Fail("citation-route-mismatch")
        if route == "metacyclic-cited" and not is_metacyclic(G):
            raise _Fail("not-metacyclic")


def _torsion_invariants(G: PGroup) -> list[int]:
    """Invariants of an abelian G from the sizes of its p^k-torsion subgroups."""
    p = G.p
    orders = [G.element_order(x) for x in G.elements()]
    logs, k = [], 0
    while True:
        c = sum(1 for o in orders if p ** k % o == 0)
        logs.append(round(math.log(c, p)))
        if c == G.order:
            break
        k += 1
    ge = [logs[i] - logs[i - 1] for i in range(1, len(logs))]
    out = []
    for i in range(len(ge), 0, -1):
        more = ge[i] if i < len(ge) else 0
        out.extend([p ** i] * (ge[i - 1] - more))
    return out


def _verify_terminal(cert: dict, act, G: PGroup):
    term = cert["terminal"]
    steps = cert["steps"]
    last = steps[-1]["rule"]
    if term.get("kind") == "citation":
        if last not in ("fischer", "kuniyoshi-char-p", "citation") or term.get("cites") != cert["route"]:
            raise VerificationError(None, "terminal-mismatch")
    elif term.get("kind") == "linear":
        if last != "lemma24-linearize" or act is None:
            raise VerificationError(None, "terminal-mismatch")
        if (term["variables"], term["blocks"]) != (act.n, act.n // (G.p - 1)):
            raise VerificationError(None, "terminal-mismatch")
    else:
        raise VerificationError(None, "terminal-mismatch")


def single_entry_mutations(cert: dict):
    """Yield ``(path, mutated copy)`` for every leaf: integers +1, strings
    suffixed, booleans flipped, nulls replaced."""
    def leaves(obj, path):
        if isinstance(obj, dict):
            for k in sorted(obj):
                yield from leaves(obj[k], path + (k,))
        elif isinstance(obj, list):
            for i, x in enumerate(obj):
                yield from leaves(x, path + (i,))
        else:
            yield path, obj

    def changed(v):
        if isinstance(v, bool):
            return not v
        if isinstance(v, int):
            return v + 1
        if isinstance(v, str):
            return v + "~"
        return 0

    for path, v in list(leaves(cert, ())):
        c = json.loads(canonical(cert))
        tgt = c
        for k in path[:-1]:
            tgt = tgt[k]
        tgt[path[-1]] = changed(v)
        yield path, c
