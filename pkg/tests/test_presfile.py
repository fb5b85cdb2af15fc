import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DATA, corpus_files
from noether.library import random_pc_group
from noether.presfile import (FormatError, Presentation, emit_presentation, load_presentation,
                              parse_presentation, presentation_digest)

HEIS = """# Heisenberg group of order 27
name heisenberg
p 3
ngens 3
comm 2 1 = 3^1
subgroup 2^1, 3^1
alpha 1^1
"""


def test_heisenberg_file():
    pres = parse_presentation(HEIS)
    G = pres.group
    assert G.order == 27 and pres.name == "heisenberg"
    assert pres.alpha == (1, 0, 0)
    assert pres.H().order == 9


def test_cyclic_of_order_p():
    pres = parse_presentation("p 3\nngens 1\n")
    assert pres.group.order == 3 and pres.group.is_abelian()


def test_round_trip_is_identity():
    pres = parse_presentation(HEIS)
    text = emit_presentation(pres)
    again = parse_presentation(text)
    assert emit_presentation(again) == text
    assert again.digest == pres.digest


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_corpus_round_trip(path):
    pres = load_presentation(path)
    assert emit_presentation(parse_presentation(emit_presentation(pres))) == emit_presentation(pres)


def test_rhs_must_use_larger_generators():
    with pytest.raises(FormatError) as exc:
        parse_presentation("p 3\nngens 3\ncomm 3 2 = 1^1\n")
    assert exc.value.line == 3
    with pytest.raises(FormatError):
        parse_presentation("p 3\nngens 2\npower 2 = 1^1\n")


@pytest.mark.parametrize("text,line", [
    ("p 4\nngens 1\n", 1),
    ("p 3\nngens 2\ncomm 1 2 = 1\n", 3),
    ("p 3\nngens 2\npower 1 = 2^3\n", 3),
    ("p 3\nngens 2\npower 1 = 2\n", 3),
    ("p 3\nngens 2\nfrob 1\n", 3),
    ("p 3\nngens 2\npower 1 = 2^1\npower 1 = 2^2\n", 4),
])
def test_format_errors_carry_line(text, line):
    with pytest.raises(FormatError) as exc:
        parse_presentation(text)
    assert exc.value.line == line


def test_missing_header():
    with pytest.raises(FormatError):
        parse_presentation("ngens 2\n")


def test_digest_ignores_metadata():
    a = parse_presentation(HEIS)
    b = parse_presentation("p 3\nngens 3\ncomm 2 1 = 3^1\n")
    assert a.digest == b.digest
    c = parse_presentation("p 3\nngens 3\npower 2 = 3^1\ncomm 2 1 = 3^1\n")
    assert c.digest != a.digest


def test_fixture_file_loads():
    pres = load_presentation(DATA / "cond2-violator-p3.pres")
    assert pres.group.order == 243 and pres.H().order == 81


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([3, 5]), st.integers(1, 4))
def test_random_round_trip(seed, p, n):
    import random
    G = random_pc_group(random.Random(seed), p, n)
    text = emit_presentation(Presentation(G))
    H = parse_presentation(text).group
    assert presentation_digest(H) == presentation_digest(G)
    assert H.powers == G.powers and H.comms == G.comms
