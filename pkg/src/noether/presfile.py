"""Text format for pc presentations (1-based generator indices).

Grammar (one statement per line, ``#`` starts a comment)::

    file      := line*
    line      := "name" TEXT | "family" TEXT | "p" INT | "ngens" INT
               | "power" INT "=" word
               | "comm" INT INT "=" word
               | "subgroup" element ("," element)*
               | "alpha" element
    word      := "1" | item+            (indices strictly increasing)
    item      := INT "^" INT            (generator ^ exponent, 0 < exponent < p)
    element   := word

``power i = w`` gives g_i^p; ``comm j i = w`` (j > i) gives [g_j, g_i].
Relation words may only use generators of larger index than the left-hand
side (for ``comm j i``, larger than j).  Omitted relations are trivial.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .pgroup import PGroup, PresentationError, Subgroup, subgroup_closure


class FormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        where = f"line {line}" + (f", column {col}" if col else "") if line else ""
        super().__init__(f"{where}: {msg}" if where else msg)
        self.line = line
        self.col = col


@dataclass
class Presentation:
    group: PGroup
    name: str = ""
    family: str = ""
    subgroup: list = field(default_factory=list)   # elements (exponent tuples)
    alpha: tuple | None = None

    def H(self) -> Subgroup | None:
        return subgroup_closure(self.group, self.subgroup) if self.subgroup else None

    @property
    def digest(self) -> str:
        return presentation_digest(self.group)


def _parse_word(text: str, n: int, p: int, lineno: int, col: int) -> tuple:
    vec = [0] * n
    text = text.strip()
    if text in ("", "1"):
        return tuple(vec)
    last = 0
    for tok in text.split():
        if "^" not in tok:
            raise FormatError(f"word item {tok!r} needs an explicit exponent", lineno, col)
        g, _, e = tok.partition("^")
        try:
            gi, ei = int(g), int(e)
        except ValueError:
            raise FormatError(f"bad word item {tok!r}", lineno, col) from None
        if not 1 <= gi <= n:
            raise FormatError(f"generator {gi} out of range 1..{n}", lineno, col)
        if gi <= last:
            raise FormatError("word items must have strictly increasing generator indices",
                              lineno, col)
        if not 0 < ei < p:
            raise FormatError(f"exponent {ei} outside 1..{p - 1}", lineno, col)
        vec[gi - 1] = ei
        last = gi
    return tuple(vec)


def parse_presentation(text: str, check: bool = True) -> Presentation:
    meta = {"name": "", "family": ""}
    p = n = None
    powers: dict = {}
    comms: dict = {}
    sub_lines: list = []
    alpha_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        col = raw.find(rest) + 1 if rest else None
        if key in ("name", "family"):
            meta[key] = rest
        elif key in ("p", "ngens"):
            try:
                v = int(rest)
            except ValueError:
                raise FormatError(f"{key} expects an integer", lineno, col) from None
            if key == "p":
                if v < 2 or any(v % d == 0 for d in range(2, int(v ** 0.5) + 1)):
                    raise FormatError(f"p = {v} is not prime", lineno, col)
                p = v
            else:
                if v < 0:
                    raise FormatError("ngens must be nonnegative", lineno, col)
                n = v
        elif key in ("power", "comm"):
            if p is None or n is None:
                raise FormatError("relations must follow the p and ngens lines", lineno)
            lhs, eq, rhs = rest.partition("=")
            if not eq:
                raise FormatError("relation needs '='", lineno)
            idx = lhs.split()
            try:
                idx = [int(t) for t in idx]
            except ValueError:
                raise FormatError("relation indices must be integers", lineno, col) from None
            rcol = raw.find("=") + 2
            word = _parse_word(rhs, n, p, lineno, rcol)
            if key == "power":
                if len(idx) != 1 or not 1 <= idx[0] <= n:
                    raise FormatError("power expects one generator index", lineno, col)
                i = idx[0]
                if any(word[:i]):
                    raise FormatError(f"power {i}: word must use generators > {i}", lineno, rcol)
                if i - 1 in powers:
                    raise FormatError(f"duplicate power relation for {i}", lineno)
                powers[i - 1] = word
            else:
                if len(idx) != 2 or not all(1 <= t <= n for t in idx):
                    raise FormatError("comm expects two generator indices", lineno, col)
                j, i = idx
                if j <= i:
                    raise FormatError("comm j i requires j > i", lineno, col)
                if any(word[:j]):
                    raise FormatError(f"comm {j} {i}: word must use generators > {j}",
                                      lineno, rcol)
                if (j - 1, i - 1) in comms:
                    raise FormatError(f"duplicate commutator relation for ({j}, {i})", lineno)
                comms[(j - 1, i - 1)] = word
        elif key == "subgroup":
            sub_lines.append((lineno, rest))
        elif key == "alpha":
            alpha_line = (lineno, rest)
        else:
            raise FormatError(f"unknown statement {key!r}", lineno, 1)
    if p is None or n is None:
        raise FormatError("missing p or ngens line")
    try:
        G = PGroup.from_relations(p, n, powers, comms, check=check)
    except PresentationError as exc:
        raise FormatError(str(exc)) from exc

    def element(txt, lineno):
        # element words may be in any order; collect them
        vec = G.identity
        if txt.strip() == "1":
            return vec
        for tok in txt.split():
            g, sep, e = tok.partition("^")
            if not sep:
                raise FormatError(f"element item {tok!r} needs an explicit exponent", lineno)
            try:
                gi, ei = int(g), int(e)
            except ValueError:
                raise FormatError(f"bad element item {tok!r}", lineno) from None
            if not 1 <= gi <= n:
                raise FormatError(f"generator {gi} out of range", lineno)
            vec = G.mul(vec, G.pow(G.gen(gi - 1), ei))
        return vec

    subgroup = []
    for lineno, txt in sub_lines:
        subgroup.extend(element(t, lineno) for t in txt.split(",") if t.strip())
    alpha = element(alpha_line[1], alpha_line[0]) if alpha_line else None
    return Presentation(G, meta["name"], meta["family"], subgroup, alpha)


def _emit_word(vec) -> str:
    items = [f"{i + 1}^{e}" for i, e in enumerate(vec) if e]
    return " ".join(items) if items else "1"


def relations_text(G: PGroup) -> str:
    """Canonical text of the relations alone (the digest input)."""
    lines = [f"p {G.p}", f"ngens {G.ngens}"]
    for i in range(G.ngens):
        if any(G.powers[i]):
            lines.append(f"power {i + 1} = {_emit_word(G.powers[i])}")
    for j in range(G.ngens):
        for i in range(j):
            if any(G.comms[j][i]):
                lines.append(f"comm {j + 1} {i + 1} = {_emit_word(G.comms[j][i])}")
    return "\n".join(lines) + "\n"


def emit_presentation(pres: Presentation | PGroup) -> str:
    if isinstance(pres, PGroup):
        pres = Presentation(pres)
    head = []
    if pres.name:
        head.append(f"name {pres.name}")
    if pres.family:
        head.append(f"family {pres.family}")
    tail = []
    if pres.subgroup:
        tail.append("subgroup " + ", ".join(_emit_word(x) for x in pres.subgroup))
    if pres.alpha is not None:
        tail.append(f"alpha {_emit_word(pres.alpha)}")
    body = relations_text(pres.group)
    return "\n".join(head + [body.rstrip("\n")] + tail) + "\n"


def presentation_digest(G: PGroup) -> str:
    return "sha256:" + hashlib.sha256(relations_text(G).encode()).hexdigest()


def load_presentation(path) -> Presentation:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read())
