import copy

import pytest

from noether import cases5
from noether.cases5 import (CATALOG, ROUTES, CaseReplayMismatch, OutOfScope, catalog_entry,
                            dispatch_route, format_monomial, is_standard_form, parse_monomial,
                            run_case, verify_normal_subgroup_claim)
from noether.monact import cyclic_form

NAMED_GROUPS = [
    "Phi1", "Phi2-direct-products", "Phi3-direct-products", "Phi2(41)", "Phi2(32)a1",
    "Phi2(32)a2", "Phi8(32)", "Phi2(311)b", "Phi2(311)c", "Phi2(221)c", "Phi2(221)d",
    "Phi3(311)a", "Phi3(311)b_r", "Phi3(221)a", "Phi3(221)b_r", "Phi3(2111)c",
    "Phi3(2111)d", "Phi3(2111)e", "Phi4(221)a", "Phi4(221)b", "Phi4(2111)a", "Phi4(2111)b",
    "Phi4(2111)c", "Phi4(1^5)", "Phi9-p>=5", "Phi4(221)c", "Phi4(221)d_r", "Phi4(221)e",
    "Phi4(221)f_0", "Phi4(221)f_r", "Phi9(1^5)", "Phi9(2111)b_r", "Phi10",
]


def test_parse_monomial():
    sc, ex = parse_monomial("Z^-2 (x1 x2)^-1", 9, 3)
    assert sc == 7 and ex == {"x1": -1, "x2": -1}
    sc, ex = parse_monomial("z x0", 9, 3)
    assert sc == 3 and ex == {"x0": 1}
    assert parse_monomial("one", 9, 3) == (0, {})


def test_format_round_trip():
    text = format_monomial((3, [1, -2]), ["a", "b"], 9, 3)
    sc, ex = parse_monomial(text, 9, 3)
    assert sc == 3 and ex == {"a": 1, "b": -2}


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("case", ["I", "II", "III", "IV", "V"])
def test_cases_replay(case, p):
    run = run_case(case, p)
    assert is_standard_form(run.final, p) == []
    assert run.checks


@pytest.mark.parametrize("p", [3, 5])
def test_case_I_all_ell(p):
    for ell in range(1, p):
        run = run_case("I", p, ell=ell)
        assert run.params == {"ell": ell}


@pytest.mark.parametrize("p", [3, 5])
def test_case_III_all_mu(p):
    for mu in range(1, p):
        run = run_case("III", p, mu=mu)
        A, c = run.initial.of("alpha1")
        u = [i for i, n in enumerate(run.initial.names) if n.startswith("u")]
        v = [i for i, n in enumerate(run.initial.names) if n.startswith("v")]
        assert all(c[i] == 0 for i in u)
        assert all(c[i] == mu * p % (p * p) for i in v)


@pytest.mark.parametrize("p", [3, 5])
def test_case_IV_all_s(p):
    for s in range(1, p):
        run = run_case("IV", p, s=s)
        assert is_standard_form(run.final, p) == []


@pytest.mark.parametrize("case", ["VI", "VII", "VIII"])
def test_phi9_cases(case):
    run = run_case(f"case-{case}", 3)
    assert is_standard_form(run.final, 3) == []
    assert run.group.order == 243


def test_case_I_final_cyclic():
    run = run_case("I", 3)
    A, c = run.final.of("alpha")
    assert A == [[0, 1, 0, 0], [-1, -1, 0, 0], [0, 0, 0, 1], [0, 0, -1, -1]]
    assert run.final.names[:2] == ("W1", "W2")


def test_case_VI_stage_order():
    run = run_case("VI", 3)
    stages = [s.stage for s in run.steps]
    assert stages[0] == "u/v" and stages[-1] == "tw"
    A, _ = run.steps[-1].action.of("alpha")
    tw = run.steps[-1].action.names
    i1, i2 = tw.index("tw1"), tw.index("tw2")
    assert (A[i2][i1], A[i2][i2]) == (-1, -1)


def test_phi9_rejects_other_primes():
    with pytest.raises(ValueError):
        run_case("VI", 5)


def test_display_mutation_detected(monkeypatch):
    disp = copy.deepcopy(cases5.DISPLAY_VI)
    disp["V"]["alpha1"] = disp["V"]["alpha1"].replace("V2 -> z V2", "V2 -> V2")
    monkeypatch.setattr(cases5, "DISPLAY_VI", disp)
    with pytest.raises(CaseReplayMismatch) as exc:
        cases5.run_case_VI(3)
    assert "V2" in str(exc.value)


def test_initial_mutation_detected(monkeypatch):
    disp = copy.deepcopy(cases5.DISPLAY_VIII)
    disp["x"]["alpha1"] = disp["x"]["alpha1"].replace("y2 -> Z^-4 y2", "y2 -> Z^-2 y2")
    monkeypatch.setattr(cases5, "DISPLAY_VIII", disp)
    with pytest.raises(CaseReplayMismatch):
        cases5.run_case_VIII(3)


def test_wrong_sign_detected():
    with pytest.raises(CaseReplayMismatch):
        cases5._run_phi9("VI", cases5.M_VI, cases5.DISPLAY_VI, 1)


def test_standard_form_check():
    from noether.monact import MonomialAction
    act = MonomialAction(2, 3, ("alpha", "b"), [cyclic_form(3), [[1, 0], [0, 1]]],
                         [[0, 0], [1, 0]])
    assert is_standard_form(act, 3) == ["b does not act trivially"]


def test_claims():
    assert verify_normal_subgroup_claim(catalog_entry("heisenberg")) == "verified"
    assert verify_normal_subgroup_claim(catalog_entry("Phi9(1^5)")) == "verified"
    assert verify_normal_subgroup_claim(catalog_entry("heisenberg"), claim_type=(9, 3)) == "refuted"
    assert verify_normal_subgroup_claim(catalog_entry("Phi2(311)b")) == "unverified-external"


@pytest.mark.parametrize("entry", [e for e in CATALOG if e.builder], ids=lambda e: e.name)
def test_built_claims_hold(entry):
    assert verify_normal_subgroup_claim(entry) == "verified"


def test_dispatch_examples():
    assert dispatch_route(catalog_entry("abelian-9x3")) == "fischer"
    assert dispatch_route(catalog_entry("Phi1")) == "fischer"
    assert dispatch_route(catalog_entry("heisenberg")) == "thm14-pipeline"
    assert dispatch_route(catalog_entry("Phi4(221)d_r")) == "case-I"
    assert dispatch_route(catalog_entry("Phi2(41)")) == "metacyclic-cited"
    assert dispatch_route(catalog_entry("heisenberg"), char_p=True) == "kuniyoshi-char-p"
    with pytest.raises(OutOfScope):
        dispatch_route(catalog_entry("Phi10"))


def test_route_coverage():
    names = [e.name for e in CATALOG]
    assert len(names) == len(set(names))
    for n in NAMED_GROUPS:
        assert names.count(n) == 1, n
    assert all(e.route in ROUTES for e in CATALOG)
    cases = {e.route for e in CATALOG if e.route.startswith("case-")}
    assert cases == {f"case-{c}" for c in ("I", "II", "III", "IV", "V", "VI", "VII", "VIII")}


def test_unknown_entry():
    with pytest.raises(KeyError):
        catalog_entry("Phi11")
