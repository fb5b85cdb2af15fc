import copy
import json

import pytest

from noether.cases5 import catalog_entry
from noether.certify import (SCHEMA, CertifyOptions, Refusal, certify_group, dumps,
                             single_entry_mutations, verify_certificate)
from noether.library import abelian, heisenberg, modular


def first_step(cert, rule):
    return next(i for i, s in enumerate(cert["steps"]) if s["rule"] == rule)


@pytest.fixture(scope="module")
def heis_cert():
    return certify_group(heisenberg(3), CertifyOptions(name="heisenberg"))


def test_abelian_single_fischer_step():
    G = abelian(3, [2, 1])
    cert = certify_group(G)
    assert cert["schema"] == SCHEMA
    assert [s["rule"] for s in cert["steps"]] == ["fischer"]
    assert verify_certificate(cert, G).accepted


def test_char_p_single_citation():
    G = heisenberg(5)
    cert = certify_group(G, CertifyOptions(char_p=True))
    assert [s["rule"] for s in cert["steps"]] == ["kuniyoshi-char-p"]
    assert verify_certificate(cert, G).accepted


def test_heisenberg_pipeline(heis_cert):
    rules = [s["rule"] for s in heis_cert["steps"]]
    assert heis_cert["route"] == "thm14-pipeline"
    assert rules[0] == "hajja-kang-faithful" and rules[-1] == "lemma24-linearize"
    assert "zomega-split" in rules
    assert verify_certificate(heis_cert, heisenberg(3)).accepted


def test_matrix_entry_mutation_rejected_at_step(heis_cert):
    bad = copy.deepcopy(heis_cert)
    k = first_step(bad, "monomial-substitution")
    bad["steps"][k]["payload"]["substitution"]["rows"][0][0] += 1
    v = verify_certificate(bad, heisenberg(3), check_digests=False)
    assert not v.accepted and v.step == k
    v = verify_certificate(bad, heisenberg(3))
    assert not v.accepted


def test_other_presentation_rejected(heis_cert):
    v = verify_certificate(heis_cert, modular(3))
    assert not v.accepted and v.step is None and "digest" in v.reason


def test_deterministic():
    a = dumps(certify_group(heisenberg(3)))
    b = dumps(certify_group(heisenberg(3)))
    assert a == b
    json.loads(a)


def test_every_single_mutation_rejected(heis_cert):
    G = heisenberg(3)
    n = 0
    for path, bad in single_entry_mutations(heis_cert):
        assert not verify_certificate(bad, G).accepted, path
        n += 1
    assert n > 500


def test_modular_certificate():
    G = modular(3)
    cert = certify_group(G)
    assert cert["route"] == "thm14-pipeline"
    assert verify_certificate(cert, G).accepted


@pytest.mark.parametrize("name", ["Phi9(1^5)", "Phi9(2111)a", "Phi9(2111)b_r", "Phi4(221)d_r"])
def test_case_certificates(name):
    entry = catalog_entry(name)
    G, _ = entry.builder(3)
    cert = certify_group(G)
    assert cert["route"] == entry.route
    assert verify_certificate(cert, G).accepted


def test_refusal_lists_violators(cond2_violator):
    pr = cond2_violator
    with pytest.raises(Refusal) as exc:
        certify_group(pr.group, CertifyOptions(H=pr.subgroup, alpha=pr.alpha))
    assert exc.value.reason == "condition-(2)-failed"
    assert "[0, 1]" in exc.value.detail


def test_semantic_rejection_of_scalar(heis_cert):
    bad = copy.deepcopy(heis_cert)
    k = first_step(bad, "twist-normalize")
    post = bad["steps"][k]["post_action"]
    post["scalars"][0][0] = (post["scalars"][0][0] + 1) % post["modulus"]
    v = verify_certificate(bad, heisenberg(3), check_digests=False)
    assert not v.accepted and v.step is not None and v.step >= k
