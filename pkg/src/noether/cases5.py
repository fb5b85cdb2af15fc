"""Order-p^5 special cases: displayed actions, substitution chains and catalog.

Every case is a list of stages.  A stage defines new variables as monomials
in the current ones, applies the substitution, and compares the result
against a transcribed display, entry for entry.  Displays use a small text
notation::

    "x0 -> Z x0, u1 -> u2 -> (u1 u2)^-1"

``Z`` is the primitive root of unity of order ``modulus`` and ``z`` the
primitive p-th root ``Z^(modulus/p)``.  A chain ``a -> b -> c`` asserts
``g(a) = b`` and ``g(b) = c``; sources need not be single variables.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from . import intlin
from .library import sd_element, semidirect
from .linearize import induced_from_characters
from .monact import (
    MonomialAction, Substitution, SubstitutionInvalid, alpha_blocks, apply_substitution,
    compose_actions, cyclic_form, kernel_size, normalize_alpha_twist, verify_relations,
)
from .pgroup import (
    PGroup, abelian_invariants, is_normal, subgroup_closure,
)


class CaseReplayMismatch(RuntimeError):
    reason = "case-replay-mismatch"


class OutOfScope(RuntimeError):
    reason = "out-of-scope-group"


LABELS = ("alpha1", "alpha2", "alpha")

# -- display notation ----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\^)\s*(-?\d+)|([A-Za-z][A-Za-z0-9_]*)|([()]))")


def _tokens(text: str):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse monomial near {text[pos:]!r}")
        pos = m.end()
        if m.group(1):
            out.append(("pow", int(m.group(2))))
        elif m.group(3):
            out.append(("name", m.group(3)))
        else:
            out.append(("paren", m.group(4)))
    return out


def parse_monomial(text: str, modulus: int, p: int) -> tuple[int, dict]:
    """``(scalar exponent mod modulus, {variable: exponent})``."""
    toks = _tokens(text)
    k = 0

    def factors(depth):
        nonlocal k
        sc, ex = 0, {}
        while k < len(toks):
            kind, val = toks[k]
            if kind == "paren" and val == ")":
                if depth == 0:
                    raise ValueError("unbalanced ')'")
                return sc, ex
            if kind == "paren":
                k += 1
                isc, iex = factors(depth + 1)
                if k >= len(toks) or toks[k] != ("paren", ")"):
                    raise ValueError("missing ')'")
                k += 1
                e = 1
                if k < len(toks) and toks[k][0] == "pow":
                    e = toks[k][1]
                    k += 1
                sc += e * isc
                for v, x in iex.items():
                    ex[v] = ex.get(v, 0) + e * x
                continue
            if kind == "pow":
                raise ValueError("dangling exponent")
            k += 1
            e = 1
            if k < len(toks) and toks[k][0] == "pow":
                e = toks[k][1]
                k += 1
            if val == "Z":
                sc += e
            elif val == "z":
                sc += e * (modulus // p)
            elif val == "one":
                pass
            else:
                ex[val] = ex.get(val, 0) + e
        if depth:
            raise ValueError("missing ')'")
        return sc, ex

    sc, ex = factors(0)
    if text.strip() == "1":
        return 0, {}
    return sc % modulus, {v: e for v, e in ex.items() if e}


def _vec(ex: dict, names) -> list[int]:
    idx = {n: i for i, n in enumerate(names)}
    v = [0] * len(names)
    for name, e in ex.items():
        if name not in idx:
            raise KeyError(f"unknown variable {name!r}")
        v[idx[name]] += e
    return v


def image_of(act: MonomialAction, g, scalar: int, row: list[int]) -> tuple[int, list[int]]:
    """``g . (Z^scalar x^row)`` as ``(scalar, row)``."""
    A, c = act.of(g)
    N = act.modulus
    return (scalar + sum(r * x for r, x in zip(row, c))) % N, intlin.vecmat(row, A)


def parse_display(text: str):
    """``[[link, link, ...], ...]``: comma-separated chains of ``->`` links."""
    return [[t.strip() for t in chain.split("->")] for chain in text.split(",") if chain.strip()]


def check_display(act: MonomialAction, display: dict, p: int, where: str) -> int:
    """Raise CaseReplayMismatch at the first displayed entry that differs.

    Returns the number of entries compared.
    """
    N = act.modulus
    count = 0
    for g, text in display.items():
        for chain in parse_display(text):
            for src, dst in zip(chain, chain[1:]):
                s_sc, s_ex = parse_monomial(src, N, p)
                d_sc, d_ex = parse_monomial(dst, N, p)
                got = image_of(act, g, s_sc, _vec(s_ex, act.names))
                want = (d_sc, _vec(d_ex, act.names))
                if got != want:
                    raise CaseReplayMismatch(
                        f"{where}: {g}({src}) should be {dst}, replay gives "
                        f"{format_monomial(got, act.names, N, p)}")
                count += 1
    return count


def format_monomial(mono, names, N: int, p: int) -> str:
    sc, row = mono
    parts = []
    if sc:
        parts.append(f"Z^{sc}" if sc % (N // p) else f"z^{sc // (N // p)}")
    for n, e in zip(names, row):
        if e:
            parts.append(n if e == 1 else f"{n}^{e}")
    return " ".join(parts) or "1"


def action_from_display(display: dict, names, modulus: int, p: int,
                        labels=LABELS) -> MonomialAction:
    """The action whose every variable image is listed in ``display``."""
    n = len(names)
    mats, scal = [], []
    for g in labels:
        A = [None] * n
        c = [0] * n
        for chain in parse_display(display[g]):
            for src, dst in zip(chain, chain[1:]):
                s_sc, s_ex = parse_monomial(src, modulus, p)
                if s_sc or len(s_ex) != 1 or list(s_ex.values()) != [1]:
                    continue
                i = list(names).index(next(iter(s_ex)))
                d_sc, d_ex = parse_monomial(dst, modulus, p)
                A[i] = _vec(d_ex, names)
                c[i] = d_sc
        missing = [names[i] for i in range(n) if A[i] is None]
        if missing:
            raise ValueError(f"display for {g} misses {missing}")
        mats.append(A)
        scal.append(c)
    return MonomialAction(n, modulus, tuple(labels), mats, scal, tuple(names))


# -- stages --------------------------------------------------------------------

@dataclass
class Stage:
    name: str
    rule: str                        # fibration-drop | monomial-substitution | twist-normalize
    kind: str = "unimodular"
    defs: list = field(default_factory=list)        # [(new name, monomial text)]
    rows_fn: Callable | None = None                 # act -> [(new name, row)]
    fixed_by: tuple = ()
    dropped: tuple = ()
    display: dict = field(default_factory=dict)
    justification: str = ""


@dataclass
class StepRecord:
    stage: str
    rule: str
    substitution: Substitution
    action: MonomialAction
    justification: str
    entries_checked: int


@dataclass
class CaseRun:
    case_id: str
    p: int
    params: dict
    initial: MonomialAction
    steps: list
    checks: list
    group: PGroup | None = None
    gen_words: list | None = None

    @property
    def final(self) -> MonomialAction:
        return self.steps[-1].action if self.steps else self.initial


def build_rows(act: MonomialAction, stage: Stage):
    N, names = act.modulus, act.names
    rows, shifts, new_names = [], [], []
    if stage.rows_fn is not None:
        for nm, r in stage.rows_fn(act):
            new_names.append(nm)
            rows.append(list(r))
            shifts.append(0)
        return rows, shifts, new_names
    local: dict = {}
    for nm, text in stage.defs:
        sc, ex = parse_monomial(text, N, N)
        r = [0] * act.nvars
        for v, e in ex.items():
            if v in local:
                r = [a + e * b for a, b in zip(r, local[v])]
            else:
                r[names.index(v)] += e
        local[nm] = r
        new_names.append(nm)
        rows.append(r)
        shifts.append(sc)
    return rows, shifts, new_names


def run_stage(act: MonomialAction, stage: Stage, p: int) -> StepRecord:
    if stage.rule == "twist-normalize":
        new, sub = normalize_alpha_twist(act, "alpha", p)
        sub = Substitution(sub.rows, sub.shift, sub.kind, names=new.names)
    else:
        rows, shifts, names = build_rows(act, stage)
        dropped = tuple(act.names.index(d) for d in stage.dropped)
        sub = Substitution(rows, tuple(shifts), stage.kind, tuple(map(tuple, stage.fixed_by)),
                           dropped, tuple(names))
        try:
            new = apply_substitution(act, sub)
        except SubstitutionInvalid as exc:
            raise CaseReplayMismatch(f"{stage.name}: {exc}") from exc
    n = check_display(new, stage.display, p, stage.name)
    return StepRecord(stage.name, stage.rule, sub, new, stage.justification, n)


def is_standard_form(act: MonomialAction, p: int, alpha="alpha") -> list[str]:
    """alpha acts as diag(C, ..., C) without scalars; every other label trivially."""
    problems = []
    A, c = act.of(alpha)
    m = act.nvars
    if m % (p - 1):
        return [f"rank {m} is not a multiple of p-1"]
    if A != intlin.block_diag([cyclic_form(p)] * (m // (p - 1))) or any(c):
        problems.append("alpha is not in standard cyclic form")
    for g in act.gens:
        if g == alpha:
            continue
        B, d = act.of(g)
        if B != intlin.identity(m) or any(d):
            problems.append(f"{g} does not act trivially")
    return problems


def replay(case_id: str, p: int, params: dict, initial: MonomialAction, stages: list,
           initial_display: dict | None = None, group=None, gen_words=None,
           extra_checks: Callable | None = None) -> CaseRun:
    checks = []
    if initial_display:
        n = check_display(initial, initial_display, p, "initial")
        checks.append(f"initial display: {n} entries match")
    act = initial
    steps = []
    for st in stages:
        rec = run_stage(act, st, p)
        steps.append(rec)
        act = rec.action
        if st.display:
            checks.append(f"{st.name}: {rec.entries_checked} displayed entries match")
    run = CaseRun(case_id, p, dict(params), initial, steps, checks, group, gen_words)
    if extra_checks:
        extra_checks(run)
    bad = is_standard_form(run.final, p)
    if bad:
        raise CaseReplayMismatch(f"{case_id}: final action not standard: {'; '.join(bad)}")
    checks.append("final action: alpha = diag(C, ..., C), all other generators trivial")
    return run


# -- Φ4 family, Cases I-V ------------------------------------------------------

def _cyc(prefix: str, p: int, start: int = 1) -> str:
    names = [f"{prefix}{i}" for i in range(start, p)]
    prod = " ".join(names)
    return " -> ".join(names) + f" -> ({prod})^-1"


def _uv_display(p: int, a1: tuple, a2: tuple, u="u", v="v") -> dict:
    """alpha_g scales every u_i by z^a_g[0] and v_i by z^a_g[1]."""
    def diag(a):
        items = [f"{u}{i} -> z^{a[0]} {u}{i}" for i in range(1, p)]
        items += [f"{v}{i} -> z^{a[1]} {v}{i}" for i in range(1, p)]
        return ", ".join(items)
    return {"alpha1": diag(a1), "alpha2": diag(a2), "alpha": _cyc(u, p) + ", " + _cyc(v, p)}


def _U_display(p: int, U="U") -> str:
    """alpha on U_1 = u_1^p, U_i = u_i/u_(i-1) as displayed for Case I."""
    first = f"{U}1 -> {U}1 {U}2^{p}"
    wrap = f"({U}1 " + " ".join(f"{U}{i}^{p + 1 - i}" for i in range(2, p)) + ")^-1"
    second = f"{U}1 " + " ".join(f"{U}{i}^{p - i}" for i in range(2, p))
    chain = " -> ".join([f"{U}{i}" for i in range(2, p)] + [wrap, second, f"{U}2"])
    return first + ", " + chain


def _fixed_UV_stage(p: int, u="u", v="v", fixed_by=(("alpha1",), ("alpha2",))) -> Stage:
    defs = [("U1", f"{u}1^{p}")] + [(f"U{i}", f"{u}{i} {u}{i - 1}^-1") for i in range(2, p)]
    defs += [("V1", f"{v}1^{p}")] + [(f"V{i}", f"{v}{i} {v}{i - 1}^-1") for i in range(2, p)]
    return Stage("U/V", "monomial-substitution", "sublattice", defs, fixed_by=fixed_by,
                 display={"alpha": _U_display(p, "U") + ", " + _U_display(p, "V")},
                 justification="fixed field of <alpha1, alpha2> on the u/v lattice")


def _orbit_rows(src: str, prefix: str, p: int):
    def fn(act):
        A, _ = act.of("alpha")
        e = [int(n == src) for n in act.names]
        out = []
        for i in range(1, p):
            out.append((f"{prefix}{i}", e))
            e = intlin.vecmat(e, A)
        return out
    return fn


def _WZ_stage(p: int) -> Stage:
    def rows(act):
        return _orbit_rows("U2", "W", p)(act) + _orbit_rows("V2", "Z", p)(act)
    return Stage("W/Z", "monomial-substitution", "unimodular", rows_fn=rows,
                 display={"alpha": _cyc("W", p) + ", " + _cyc("Z", p)},
                 justification="W_i = alpha^(i-1) U_2, Z_i = alpha^(i-1) V_2")


def _check_U1_recovery(run: CaseRun):
    """``U_1 = (W_(p-1) W_1^(p-1) W_2^(p-2) ... W_(p-2)^2)^-1`` on the lattice."""
    p = run.p
    wz = next(s for s in run.steps if s.stage == "W/Z")
    prev = run.steps[run.steps.index(wz) - 1].action
    S = [list(r) for r in wz.substitution.rows]
    for lead, new in (("U", "W"), ("V", "Z")):
        e = [int(n == f"{lead}1") for n in prev.names]
        t = intlin.solve_left(S, e)
        want = [0] * len(S)
        names = wz.action.names
        want[names.index(f"{new}{p - 1}")] -= 1
        for i in range(1, p - 1):
            want[names.index(f"{new}{i}")] -= p - i
        if t != want:
            raise CaseReplayMismatch(f"{lead}1 recovery identity fails: {t}")
    run.checks.append("U_1 and V_1 recovered from W and Z as displayed")


def case_I_group(p: int, ell: int) -> PGroup:
    """Smallest group for which the Case I display is a faithful action:
    ``(C_(p^2))^2 x| <alpha>`` with ``alpha^-1 a_1 alpha = a_1^(1+ell p)``,
    ``alpha^-1 a_2 alpha = a_2^(1+p)``, ``alpha^p = 1``."""
    return semidirect(p, [2, 2], [[1 + ell * p, 0], [0, 1 + p]])


def _label_words(G: PGroup) -> list:
    """pc generators of a two-generator semidirect group as words in LABELS."""
    tops = G._cache["semidirect"]["tops"]
    words = [["alpha"]]
    for t in tops:
        words.append(["alpha1"] * t[0] + ["alpha2"] * t[1])
    return words


def relation_action(G: PGroup, modulus: int) -> MonomialAction:
    """Induced action on x_i = alpha^i Y_1, y_i = alpha^i Y_2 from the relations."""
    p = G.p
    mods = [p ** a for a in G._cache["semidirect"]["exps"]]
    coords = {}
    for a in range(mods[0]):
        for b in range(mods[1]):
            coords[sd_element(G, 0, [a, b])] = (a, b)
    H = frozenset(coords)
    alpha = G.gen(0)
    elements = [sd_element(G, 0, [1, 0]), sd_element(G, 0, [0, 1]), alpha]
    names = [f"x{i}" for i in range(p)] + [f"y{i}" for i in range(p)]
    chars = [[modulus // mods[0], 0], [0, modulus // mods[1]]]
    return induced_from_characters(G, H, alpha, chars, coords, modulus, names,
                                   elements=elements, labels=list(LABELS))


def _faithful_check(run: CaseRun):
    G, words = run.group, run.gen_words
    if not verify_relations(run.initial, G, words):
        raise CaseReplayMismatch("initial action violates the group relations")
    k = kernel_size(run.initial, G, words)
    if k != 1:
        raise CaseReplayMismatch(f"initial action has kernel of order {k}")
    run.checks.append(f"initial action: relations hold, faithful on all {G.order} elements")


def run_case_I(p: int, ell: int = 1) -> CaseRun:
    if p < 3 or ell % p == 0:
        raise ValueError("Case I needs an odd prime p and ell prime to p")
    N = p * p
    names = [f"x{i}" for i in range(p)] + [f"y{i}" for i in range(p)]
    disp = {
        "alpha1": ", ".join([f"x{i} -> Z^{1 + i * ell * p} x{i}" for i in range(p)]
                            + [f"y{i} -> y{i}" for i in range(p)]),
        "alpha2": ", ".join([f"x{i} -> x{i}" for i in range(p)]
                            + [f"y{i} -> Z^{1 + i * p} y{i}" for i in range(p)]),
        "alpha": " -> ".join(f"x{i}" for i in range(p)) + " -> x0, "
                 + " -> ".join(f"y{i}" for i in range(p)) + " -> y0",
    }
    act = action_from_display(disp, names, N, p)
    G = case_I_group(p, ell)
    derived = relation_action(G, N)
    if derived != act:
        raise CaseReplayMismatch("Case I display differs from the relation-derived action")
    ratio = Stage("u/v", "fibration-drop", "fibration",
                  [(f"u{i}", f"x{i} x{i - 1}^-1") for i in range(1, p)]
                  + [(f"v{i}", f"y{i} y{i - 1}^-1") for i in range(1, p)],
                  dropped=("x0", "y0"),
                  display=_uv_display(p, (ell, 0), (0, 1)),
                  justification="Hajja-Kang fibration: x0, y0 split off over K(u, v)")
    stages = [ratio, _fixed_UV_stage(p), _WZ_stage(p)]

    def extra(run):
        _faithful_check(run)
        _check_U1_recovery(run)
    return replay("I", p, {"ell": ell}, act, stages, disp, G, _label_words(G), extra)


def _uv_initial(p: int, a1, a2) -> tuple[MonomialAction, dict]:
    names = [f"u{i}" for i in range(1, p)] + [f"v{i}" for i in range(1, p)]
    disp = _uv_display(p, a1, a2)
    act = action_from_display(disp, names, p * p, p)
    _check_commuting(act)
    return act, disp


def _check_commuting(act: MonomialAction):
    for a in act.gens:
        for b in act.gens:
            if compose_actions(act, [a, b]) != compose_actions(act, [b, a]):
                raise CaseReplayMismatch(f"{a} and {b} do not commute on the displayed action")


def run_case_II(p: int) -> CaseRun:
    act, disp = _uv_initial(p, (1, 0), (0, 1))
    return replay("II", p, {}, act, [_fixed_UV_stage(p), _WZ_stage(p)], disp,
                  extra_checks=_check_U1_recovery)


def run_case_III(p: int, mu: int = 1) -> CaseRun:
    if mu % p == 0:
        raise ValueError("mu must be prime to p")
    act, disp = _uv_initial(p, (0, mu), (1, 0))
    return replay("III", p, {"mu": mu}, act, [_fixed_UV_stage(p), _WZ_stage(p)], disp,
                  extra_checks=_check_U1_recovery)


def default_s(p: int) -> int:
    """s with (-1/4) s = 1 mod p."""
    return (-4) % p


def run_case_IV(p: int, s: int | None = None, case_id: str = "IV") -> CaseRun:
    s = default_s(p) if s is None else s
    act, disp = _uv_initial(p, (-s, 1), (s, 0))
    w = Stage("w", "monomial-substitution", "unimodular",
              [(f"w{i}", f"u{i} v{i}^{s}") for i in range(1, p)]
              + [(f"v{i}", f"v{i}") for i in range(1, p)],
              display={
                  "alpha1": ", ".join([f"w{i} -> w{i}" for i in range(1, p)]
                                      + [f"v{i} -> z v{i}" for i in range(1, p)]),
                  "alpha2": ", ".join([f"w{i} -> z^{s} w{i}" for i in range(1, p)]
                                      + [f"v{i} -> v{i}" for i in range(1, p)]),
              },
              justification="w_i = u_i v_i^s")
    stages = [w, _fixed_UV_stage(p, u="w"), _WZ_stage(p)]
    return replay(case_id, p, {"s": s}, act, stages, disp, extra_checks=_check_U1_recovery)


def run_case_V(p: int, s: int | None = None) -> CaseRun:
    return run_case_IV(p, s, case_id="V")


# -- Φ9 at p = 3, Cases VI-VIII ------------------------------------------------

M_VI = [[1, -3], [1, -2]]     # alpha^-1 a_j alpha, columns = images of a_1, a_2
M_VIII = [[1, -3], [1, 4]]

DISPLAY_VI = {
    "x": {
        "alpha1": "x0 -> Z x0, x1 -> Z x1, x2 -> Z^-2 x2, y0 -> y0, y1 -> Z y1, y2 -> Z^-1 y2",
        "alpha2": "x0 -> x0, x1 -> z^-1 x1, x2 -> z x2, y0 -> Z y0, y1 -> Z^-2 y1, y2 -> Z y2",
        "alpha": "x0 -> x1 -> x2 -> x0, y0 -> y1 -> y2 -> y0",
    },
    "u/v": {
        "alpha1": "u1 -> u1, u2 -> z^-1 u2, v1 -> Z v1, v2 -> Z^-2 v2",
        "alpha2": "u1 -> z^-1 u1, u2 -> z^-1 u2, v1 -> z^-1 v1, v2 -> z v2",
        "alpha": "u1 -> u2 -> (u1 u2)^-1, v1 -> v2 -> (v1 v2)^-1",
    },
    "w": {
        "alpha1": "u1 -> u1, u2 -> z^-1 u2, w1 -> z w1, w2 -> z^-1 w2",
        "alpha2": "u1 -> z^-1 u1, u2 -> z^-1 u2, w1 -> w1, w2 -> z^-1 w2",
        "alpha": "u1 -> u2 -> (u1 u2)^-1, w1 -> w2^3 w1, w2 -> (w1 w2^2)^-1",
    },
    "V": {
        "alpha1": "u1 -> u1, u2 -> z^-1 u2, V1 -> z^-1 V1, V2 -> z V2",
        "alpha2": "u1 -> z^-1 u1, u2 -> z^-1 u2, V1 -> z^-1 V1, V2 -> z^-1 V2",
        "alpha": "u1 -> u2 -> (u1 u2)^-1, V1 -> V2 -> (V1 V2)^-1",
    },
    "U/W": {
        "alpha1": "U1 -> U1, U2 -> z^-1 U2, W1 -> z^-1 W1, W2 -> z^-1 W2",
        "alpha": "U1 -> U2^3 U1, U2 -> (U1 U2^2)^-1, W1 -> W2 -> (W1 W2)^-1",
    },
    "tu/tv": {
        "alpha1": "tu1 -> z^-1 tu1, tu2 -> z^-1 tu2, tv1 -> tv1, tv2 -> tv2",
        "alpha": "tu1 -> tu2 -> (tu1 tu2)^-1, tv1 -> tv2 -> (tv1 tv2)^-1",
    },
    "TU": {
        "alpha": "TU1 -> TU2^3 TU1, TU2 -> (TU1 TU2^2)^-1, tv1 -> tv2 -> (tv1 tv2)^-1",
    },
    "tw": {
        "alpha": "tw2 -> (tw1 tw2)^-1",
    },
}

DISPLAY_VIII = {
    "x": {
        "alpha1": "x0 -> Z x0, x1 -> Z x1, x2 -> Z^-2 x2, y0 -> y0, y1 -> Z y1, y2 -> Z^-4 y2",
        "alpha2": "x0 -> x0, x1 -> z^-1 x1, x2 -> z x2, y0 -> Z y0, y1 -> Z^4 y1, y2 -> Z^4 y2",
        "alpha": "x0 -> x1 -> x2 -> x0, y0 -> y1 -> y2 -> y0",
    },
    "u/v": {
        "alpha1": "u1 -> u1, u2 -> z^-1 u2, v1 -> Z v1, v2 -> Z^4 v2",
        "alpha2": "u1 -> z^-1 u1, u2 -> z^-1 u2, v1 -> z v1, v2 -> v2",
        "alpha": "u1 -> u2 -> (u1 u2)^-1, v1 -> v2 -> (v1 v2)^-1",
    },
    "V": {
        "alpha1": "u1 -> u1, u2 -> z^-1 u2, V1 -> z V1, V2 -> V2",
        "alpha2": "u1 -> z^-1 u1, u2 -> z^-1 u2, V1 -> z^-1 V1, V2 -> z^-1 V2",
        "alpha": "u1 -> u2 -> (u1 u2)^-1, V1 -> V2 -> (V1 V2)^-1",
    },
    "U/W": {
        "alpha1": "U1 -> U1, U2 -> z^-1 U2, W1 -> z W1, W2 -> z W2",
        "alpha": "U1 -> U2^3 U1, U2 -> (U1 U2^2)^-1, W1 -> W2 -> (W1 W2)^-1",
    },
    "tu/tv": {
        "alpha1": "tu1 -> z^-1 tu1, tu2 -> z^-1 tu2, tv1 -> tv1, tv2 -> tv2",
        "alpha": "tu1 -> tu2 -> (tu1 tu2)^-1, tv1 -> tv2 -> (tv1 tv2)^-1",
    },
    "TU": {
        "alpha": "TU1 -> TU2^3 TU1, TU2 -> (TU1 TU2^2)^-1, tv1 -> tv2 -> (tv1 tv2)^-1",
    },
    "tw": {
        "alpha": "tw2 -> (tw1 tw2)^-1",
    },
}


def phi9_group(M, alpha_p=None) -> PGroup:
    return semidirect(3, [2, 2], M, alpha_p)


def _phi9_tail(disp: dict, tv_sign: int) -> list:
    """Stages from u/v onwards; ``tv_sign`` is the exponent of tu in tv."""
    sgn = "" if tv_sign == 1 else "^-1"
    if "w" in disp:
        fix_w = [Stage("w", "monomial-substitution", "sublattice",
                       [("u1", "u1"), ("u2", "u2"), ("w1", "v1^3"), ("w2", "v2 v1^-1")],
                       fixed_by=(("alpha1",) * 3,), display=disp["w"],
                       justification="fixed field of <alpha1^3>"),
                 Stage("V", "monomial-substitution", "unimodular",
                       [("u1", "u1"), ("u2", "u2"), ("V1", "w2"), ("V2", "(w1 w2^2)^-1")],
                       display=disp["V"], justification="V_1 = w_2, V_2 = (w_1 w_2^2)^-1")]
    else:
        fix_w = [Stage("V", "monomial-substitution", "sublattice",
                       [("u1", "u1"), ("u2", "u2"), ("V1", "v2 v1^-1"), ("V2", "v1^-3 (v2 v1^-1)^-2")],
                       fixed_by=(("alpha1",) * 3,), display=disp["V"],
                       justification="fixed field of <alpha1^3> via w_1 = v_1^3, w_2 = v_2/v_1")]
    return fix_w + [
        Stage("U/W", "monomial-substitution", "sublattice",
              [("U1", "u1^3"), ("U2", "u2 u1^-1"), ("W1", "V1 u1^-1"), ("W2", "V2 u2^-1")],
              fixed_by=(("alpha2",),), display=disp["U/W"], justification="fixed field of <alpha2>"),
        Stage("tu/tv", "monomial-substitution", "unimodular",
              [("tu1", "U2"), ("tu2", "(U1 U2^2)^-1"),
               ("tv1", f"W1 tu1{sgn}"), ("tv2", f"W2 tu2{sgn}")],
              display=disp["tu/tv"], justification="change of generators"),
        Stage("TU", "monomial-substitution", "sublattice",
              [("TU1", "tu1^3"), ("TU2", "tu2 tu1^-1"), ("tv1", "tv1"), ("tv2", "tv2")],
              fixed_by=(("alpha1",),), display=disp["TU"], justification="fixed field of <alpha1>"),
        Stage("tw", "monomial-substitution", "unimodular",
              [("tw1", "TU2"), ("tw2", "(TU1 TU2^2)^-1"), ("tv1", "tv1"), ("tv2", "tv2")],
              display=disp["tw"], justification="change of generators"),
    ]


def _phi9_x_to_uv(disp_uv: dict) -> Stage:
    return Stage("u/v", "fibration-drop", "fibration",
                 [("u1", "x1 x0^-1"), ("u2", "x2 x1^-1"), ("v1", "y1 y0^-1"), ("v2", "y2 y1^-1")],
                 dropped=("x0", "y0"), display=disp_uv,
                 justification="Hajja-Kang fibration: x0, y0 split off over K(u, v)")


def _run_phi9(case_id: str, M, disp: dict, tv_sign: int) -> CaseRun:
    names = [f"x{i}" for i in range(3)] + [f"y{i}" for i in range(3)]
    act = action_from_display(disp["x"], names, 9, 3)
    G = phi9_group(M)
    derived = relation_action(G, 9)
    if derived != act:
        raise CaseReplayMismatch(f"Case {case_id}: display differs from the relation-derived action")
    stages = [_phi9_x_to_uv(disp["u/v"])] + _phi9_tail(disp, tv_sign)
    run = replay(case_id, 3, {}, act, stages, disp["x"], G, _label_words(G), _faithful_check)
    run.checks.insert(0, "initial action equals the one derived from the printed relations")
    return run


def run_case_VI(p: int = 3) -> CaseRun:
    if p != 3:
        raise ValueError("Case VI is stated for p = 3 only")
    return _run_phi9("VI", M_VI, DISPLAY_VI, -1)


def run_case_VIII(p: int = 3) -> CaseRun:
    if p != 3:
        raise ValueError("Case VIII is stated for p = 3 only")
    return _run_phi9("VIII", M_VIII, DISPLAY_VIII, 1)


def case_VII_group() -> PGroup:
    """Case VI's action with ``alpha^3 = a_2^3`` (the only nontrivial choice
    of alpha^3 in H fixed by the action, up to powers)."""
    return phi9_group(M_VI, [0, 3])


def run_case_VII(p: int = 3) -> CaseRun:
    """Twist alpha^3 away and continue with the Case VI chain."""
    if p != 3:
        raise ValueError("Case VII is stated for p = 3 only")
    G = case_VII_group()
    act = relation_action(G, 9)
    stages = [
        Stage("u/v", "fibration-drop", "fibration",
              [("u1", "x1 x0^-1"), ("u2", "x2 x1^-1"), ("v1", "y1 y0^-1"), ("v2", "y2 y1^-1")],
              dropped=("x0", "y0"), justification="Hajja-Kang fibration: x0, y0 split off over K(u, v)"),
        Stage("twist", "twist-normalize", display=DISPLAY_VI["u/v"],
              justification="divide by a p-th root of the alpha^p character; reduces to Case VI"),
    ] + _phi9_tail(DISPLAY_VI, -1)
    run = replay("VII", 3, {}, act, stages, None, G, _label_words(G), _faithful_check)
    run.checks.insert(0, "after twist normalization the u/v action equals Case VI's display")
    return run


CASES = {
    "I": run_case_I, "II": run_case_II, "III": run_case_III, "IV": run_case_IV,
    "V": run_case_V, "VI": run_case_VI, "VII": run_case_VII, "VIII": run_case_VIII,
}


def run_case(case_id: str, p: int, **params) -> CaseRun:
    case_id = case_id.upper().removeprefix("CASE-")
    if case_id not in CASES:
        raise KeyError(f"unknown case {case_id!r}")
    return CASES[case_id](p, **params)


# -- catalog -------------------------------------------------------------------

ROUTES = ("fischer", "kuniyoshi-char-p", "metacyclic-cited", "direct-product-cited",
          "thm14-pipeline") + tuple(f"case-{c}" for c in CASES) + ("rejected",)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    family: str
    primes: str                       # "p>=3", "p=3", "p>=5"
    provenance: str                   # paper-inlined | display-only | external | synthetic
    route: str
    claim_gens: tuple = ()            # named generators of the claimed normal subgroup
    claim_type: tuple = ()            # e.g. ("p", "p^3") or (9, 9) at fixed p
    note: str = ""
    builder: Callable | None = None   # p -> (PGroup, named elements dict)

    def presentation(self, p: int):
        if self.builder is None:
            return None
        return self.builder(p)


def _named_phi9(M, alpha_p=None, a3_from=None):
    def build(p):
        if p != 3:
            raise ValueError("family 9 entries are inlined for p = 3 only")
        G = phi9_group(M, alpha_p)
        a1, a2 = sd_element(G, 0, [1, 0]), sd_element(G, 0, [0, 1])
        a4 = G.inv(G.pow(a2, 3))
        a3 = a3_from(G, a1, a4)
        return G, {"alpha": G.gen(0), "alpha1": a1, "alpha2": a2, "alpha3": a3, "alpha4": a4}
    return build


def _named_simple(factory, names):
    def build(p):
        G = factory(p)
        return G, {n: G.gen(i) for i, n in enumerate(names)}
    return build


def _named_sd(exps, M):
    def build(p):
        G = semidirect(p, exps, M)
        named = {"alpha": G.gen(0)}
        for j in range(len(exps)):
            named[f"alpha{j + 1}"] = sd_element(G, 0, [int(i == j) for i in range(len(exps))])
        return G, named
    return build


def _abelian_93(p):
    from .library import abelian
    G = abelian(p, [2, 1])
    return G, {"alpha1": G.gen(0), "alpha2": G.gen(2)}


def _case_I_named(p):
    G = case_I_group(p, 1)
    return G, {"alpha": G.gen(0), "alpha1": sd_element(G, 0, [1, 0]),
               "alpha2": sd_element(G, 0, [0, 1])}


def _catalog() -> list[CatalogEntry]:
    from .library import heisenberg, modular
    E = CatalogEntry
    ext = "external"
    out = [
        E("Phi1", "1", "p>=3", "display-only", "fischer", note="abelian family"),
        E("Phi2-direct-products", "2", "p>=3", ext, "direct-product-cited",
          note="direct products of smaller groups in family 2"),
        E("Phi3-direct-products", "3", "p>=3", ext, "direct-product-cited",
          note="direct products of smaller groups in family 3"),
        E("Phi2(41)", "2", "p>=3", ext, "metacyclic-cited"),
        E("Phi2(32)a1", "2", "p>=3", ext, "metacyclic-cited"),
        E("Phi2(32)a2", "2", "p>=3", ext, "metacyclic-cited"),
        E("Phi8(32)", "8", "p>=3", ext, "metacyclic-cited"),
        E("Phi2(311)b", "2", "p>=3", ext, "thm14-pipeline", ("alpha1", "gamma"), ("p", "p^3")),
        E("Phi2(311)c", "2", "p>=3", ext, "thm14-pipeline", ("alpha2", "alpha"), ("p", "p^3")),
        E("Phi2(221)c", "2", "p>=3", ext, "thm14-pipeline", ("gamma", "alpha1", "alpha^p"),
          ("p^2", "p", "p")),
        E("Phi2(221)d", "2", "p>=3", ext, "thm14-pipeline", ("alpha1", "alpha2", "alpha^p"),
          ("p^2", "p", "p")),
        E("Phi3(311)a", "3", "p>=3", ext, "thm14-pipeline", ("alpha^p", "alpha1", "alpha2"),
          ("p^2", "p", "p")),
        E("Phi3(311)b_r", "3", "p>=3", ext, "thm14-pipeline", ("alpha1", "alpha2"), ("p^3", "p")),
        E("Phi3(221)a", "3", "p>=3", ext, "thm14-pipeline", ("alpha1", "alpha2", "alpha^p"),
          ("p^2", "p", "p")),
        E("Phi3(221)b_r", "3", "p>=3", ext, "thm14-pipeline", ("alpha1", "alpha2", "alpha^p"),
          ("p^2", "p", "p")),
        E("Phi3(2111)c", "3", "p>=3", ext, "thm14-pipeline", ("gamma", "alpha1", "alpha2"),
          ("p^2", "p", "p")),
        E("Phi3(2111)d", "3", "p>=3", ext, "thm14-pipeline",
          ("alpha1", "alpha2", "alpha3", "alpha^p"), ("p", "p", "p", "p")),
        E("Phi3(2111)e", "3", "p>=3", ext, "thm14-pipeline", ("alpha1", "alpha2", "alpha3"),
          ("p^2", "p", "p")),
        E("Phi4(221)a", "4", "p>=3", ext, "thm14-pipeline", note="H = (C_p)^4 or C_p^2 x (C_p)^2"),
        E("Phi4(221)b", "4", "p>=3", ext, "thm14-pipeline", note="H = (C_p)^4 or C_p^2 x (C_p)^2"),
        E("Phi4(2111)a", "4", "p>=3", ext, "thm14-pipeline", note="H = (C_p)^4 or C_p^2 x (C_p)^2"),
        E("Phi4(2111)b", "4", "p>=3", ext, "thm14-pipeline", note="H = (C_p)^4 or C_p^2 x (C_p)^2"),
        E("Phi4(2111)c", "4", "p>=3", ext, "thm14-pipeline", note="H = (C_p)^4 or C_p^2 x (C_p)^2"),
        E("Phi4(1^5)", "4", "p>=3", ext, "thm14-pipeline", note="H = (C_p)^4 or C_p^2 x (C_p)^2"),
        E("Phi9-p>=5", "9", "p>=5", ext, "thm14-pipeline",
          ("alpha1", "alpha2", "alpha3", "alpha4"), ("p", "p", "p", "p")),
        E("Phi4(221)c", "4", "p>=3", "display-only", "case-II",
          ("alpha1", "alpha2"), ("p^2", "p^2")),
        E("Phi4(221)d_r", "4", "p>=3", "display-only", "case-I",
          ("alpha1", "alpha2"), ("p^2", "p^2"),
          note="group rebuilt from the displayed faithful action (ell = 1)", builder=_case_I_named),
        E("Phi4(221)e", "4", "p>=3", "display-only", "case-IV", ("alpha1", "alpha2"),
          ("p^2", "p^2")),
        E("Phi4(221)f_0", "4", "p>=3", "display-only", "case-III", ("alpha1", "alpha2"),
          ("p^2", "p^2")),
        E("Phi4(221)f_r", "4", "p>=3", "display-only", "case-V", ("alpha1", "alpha2"),
          ("p^2", "p^2")),
        E("Phi9(1^5)", "9", "p=3", "paper-inlined", "case-VI",
          ("alpha1", "alpha2", "alpha3", "alpha4"), (9, 9),
          builder=_named_phi9(M_VI, None,
                              lambda G, a1, a4: G.mul(a4, G.inv(G.pow(a1, 3))))),
        E("Phi9(2111)a", "9", "p=3", "synthetic", "case-VII",
          ("alpha1", "alpha2", "alpha3", "alpha4"), (9, 9),
          note="Case VI action with alpha^3 = alpha2^3 (reduction target of Case VII)",
          builder=_named_phi9(M_VI, [0, 3],
                              lambda G, a1, a4: G.mul(a4, G.inv(G.pow(a1, 3))))),
        E("Phi9(2111)b_r", "9", "p=3", "paper-inlined", "case-VIII",
          ("alpha1", "alpha2", "alpha3", "alpha4"), (9, 9),
          builder=_named_phi9(M_VIII, None,
                              lambda G, a1, a4: G.inv(G.mul(G.pow(a1, 3), a4)))),
        E("Phi10", "10", "p>=3", ext, "rejected",
          note="not rational: the unramified Brauer group is nontrivial (negative result, cited)"),
        E("heisenberg", "synthetic", "p>=3", "synthetic", "thm14-pipeline",
          ("alpha1", "alpha2"), ("p", "p"),
          builder=_named_simple(heisenberg, ["alpha", "alpha1", "alpha2"])),
        E("modular27", "synthetic", "p>=3", "synthetic", "thm14-pipeline",
          ("alpha1",), ("p^2",), builder=_named_simple(modular, ["alpha", "alpha1", "alpha1p"])),
        E("abelian-9x3", "synthetic", "p>=3", "synthetic", "fischer",
          ("alpha1",), ("p^2",), builder=_abelian_93),
        E("sd81-nonchain", "synthetic", "p=3", "synthetic", "thm14-pipeline",
          ("alpha1", "alpha2"), (9, 3), note="factor without a chain basis",
          builder=_named_sd([2, 1], [[7, 6], [0, 1]])),
        E("sd81-jordan", "synthetic", "p=3", "synthetic", "thm14-pipeline",
          ("alpha1", "alpha2", "alpha3"), (3, 3, 3), note="one chain of length 3",
          builder=_named_sd([1, 1, 1], [[1, 0, 0], [1, 1, 0], [0, 1, 1]])),
        E("sd243-diag", "synthetic", "p=3", "synthetic", "thm14-pipeline",
          ("alpha1", "alpha2"), (9, 9), note="two cyclic factors",
          builder=_named_sd([2, 2], [[4, 0], [0, 1]])),
        E("sd243-mixed", "synthetic", "p=3", "synthetic", "thm14-pipeline",
          ("alpha1", "alpha2", "alpha3"), (9, 3, 3), note="chain plus a trivial factor",
          builder=_named_sd([2, 1, 1], [[1, 0, 0], [3, 1, 0], [0, 1, 1]])),
    ]
    return out


CATALOG = _catalog()


def catalog_entry(name: str) -> CatalogEntry:
    for e in CATALOG:
        if e.name.lower() == name.lower():
            return e
    raise KeyError(f"no catalog entry named {name!r}")


def _type_orders(claim_type, p: int) -> list[int]:
    out = []
    for t in claim_type:
        if isinstance(t, int):
            out.append(t)
        else:
            out.append(p ** (int(t.split("^")[1]) if "^" in t else 1))
    return sorted(out, reverse=True)


def verify_normal_subgroup_claim(entry: CatalogEntry, G: PGroup | None = None,
                                 named: dict | None = None, p: int = 3,
                                 claim_type=None) -> str:
    """``"verified"``, ``"refuted"`` or ``"unverified-external"``."""
    if G is None:
        built = entry.presentation(p)
        if built is None:
            return "unverified-external"
        G, named = built
    if named is None:
        return "unverified-external"
    gens = []
    for g in entry.claim_gens:
        base, _, pw = g.partition("^")
        if base not in named:
            return "unverified-external"
        x = named[base]
        gens.append(G.pow(x, G.p) if pw == "p" else x)
    S = subgroup_closure(G, gens)
    want = _type_orders(claim_type or entry.claim_type, G.p)
    ok = (S.is_abelian() and is_normal(S, G) and S.order * G.p == G.order
          and abelian_invariants(S) == want)
    return "verified" if ok else "refuted"


def dispatch_route(entry: CatalogEntry, G: PGroup | None = None, char_p: bool = False) -> str:
    """Route for an entry; groups with a presentation are re-checked."""
    from .decomp import HypothesisRefusal, decompose_H
    from .pgroup import PreconditionError, default_H
    if entry.route == "rejected":
        raise OutOfScope(f"{entry.name}: {entry.note}")
    if char_p:
        return "kuniyoshi-char-p"
    if G is None:
        built = entry.presentation(3) if entry.builder else None
        G = built[0] if built else None
    if G is not None and G.is_abelian():
        return "fischer"
    if entry.route == "thm14-pipeline" and G is not None:
        try:
            decompose_H(G, default_H(G))
        except (HypothesisRefusal, PreconditionError) as exc:
            raise OutOfScope(f"{entry.name}: {exc}") from exc
    return entry.route
