"""Golden-file tests for every CLI path.

Regenerate with ``NOETHER_UPDATE_GOLDEN=1 pytest tests/test_cli.py``.
"""
import json
import os
from pathlib import Path

import pytest

from conftest import GOLDEN
from noether.certify import dumps, single_entry_mutations
from noether.cli import main

TESTS = Path(__file__).parent
UPDATE = os.environ.get("NOETHER_UPDATE_GOLDEN") == "1"

CAT = "data/catalog"
HEIS = f"{CAT}/heisenberg-p3.pres"

CASES = [
    ("analyze-heisenberg", ["analyze", HEIS], 0),
    ("analyze-modular-explicit", ["analyze", f"{CAT}/modular27-p3.pres", "--subgroup", "2,3",
                                  "--alpha", "1"], 0),
    ("analyze-phi9", ["analyze", f"{CAT}/Phi9_15-p3.pres"], 2),
    ("analyze-violator", ["analyze", "data/cond2-violator-p3.pres"], 2),
    ("analyze-no-abelian-H", ["analyze", "data/corpus/pc-p3-n5-02.pres"], 2),
    ("certify-heisenberg", ["certify", HEIS], 0),
    ("certify-abelian", ["certify", f"{CAT}/abelian-9x3-p3.pres"], 0),
    ("certify-char-p", ["certify", "--char-p", f"{CAT}/sd81-jordan-p3.pres"], 0),
    ("certify-case", ["certify", f"{CAT}/Phi9_2111b_r-p3.pres"], 0),
    ("certify-out", ["certify", f"{CAT}/modular27-p3.pres", "--out", "{tmp}/m.json"], 0),
    ("certify-violator", ["certify", "data/cond2-violator-p3.pres"], 2),
    ("certify-phi9-long-series", ["certify", "data/corpus/sd-p3-036.pres"], 2),
    ("verify-accept", ["verify", "{tmp}/good.json", HEIS], 0),
    ("verify-mutated", ["verify", "{tmp}/bad.json", HEIS], 3),
    ("verify-other-group", ["verify", "{tmp}/good.json", f"{CAT}/modular27-p3.pres"], 3),
    ("verify-not-json", ["verify", HEIS, HEIS], 4),
    ("catalog-list", ["catalog", "list"], 0),
    ("catalog-default", ["catalog"], 0),
    ("catalog-show-phi9", ["catalog", "show", "Phi9(1^5)"], 0),
    ("catalog-show-external", ["catalog", "show", "Phi2(311)b"], 0),
    ("catalog-show-unknown", ["catalog", "show", "Phi11"], 4),
    ("catalog-run-case-VI", ["catalog", "run", "case-VI", "-p", "3"], 0),
    ("catalog-run-entry-p5", ["catalog", "run", "Phi4(221)d_r", "-p", "5"], 0),
    ("catalog-run-all", ["catalog", "run", "--all", "-p", "3"], 0),
    ("catalog-run-rejected", ["catalog", "run", "Phi10"], 2),
    ("catalog-run-citation", ["catalog", "run", "Phi2(41)"], 4),
    ("catalog-run-bad-prime", ["catalog", "run", "case-VI", "-p", "5"], 4),
    ("oracle-heisenberg", ["oracle", HEIS], 0),
    ("oracle-modular-power", ["oracle", f"{CAT}/modular27-p3.pres", "--check", "power"], 0),
    ("oracle-bound", ["oracle", "data/corpus/pc-p5-n4-00.pres", "--check", "series"], 2),
    ("oracle-bad-check", ["oracle", HEIS, "--check", "nope"], 4),
    ("error-missing-file", ["analyze", "data/none.pres"], 4),
    ("error-no-command", [], 4),
    ("error-bad-subgroup", ["analyze", HEIS, "--subgroup", "7"], 4),
]


@pytest.fixture
def certs(tmp_path):
    from noether.certify import certify_group
    from noether.library import heisenberg
    cert = certify_group(heisenberg(3))
    (tmp_path / "good.json").write_text(dumps(cert))
    k = next(i for i, s in enumerate(cert["steps"]) if s["rule"] == "zomega-split")
    path, bad = next((p, c) for p, c in single_entry_mutations(cert)
                     if p[:2] == ("steps", k) and "module" in p)
    (tmp_path / "bad.json").write_text(json.dumps(bad))
    return tmp_path


@pytest.mark.parametrize("name,argv,code", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv, code, certs, capsys, monkeypatch):
    monkeypatch.chdir(TESTS)
    tmp = str(certs)
    argv = [a.replace("{tmp}", tmp) for a in argv]
    got_code = main(argv)
    out, err = capsys.readouterr()
    text = f"$ noether {' '.join(argv)}\n{out}--- stderr\n{err}--- exit {got_code}\n"
    text = text.replace(tmp, "<tmp>")
    golden = GOLDEN / f"{name}.txt"
    if UPDATE:
        GOLDEN.mkdir(exist_ok=True)
        golden.write_text(text)
    assert got_code == code
    assert golden.exists(), f"missing golden file {golden.name}"
    assert text == golden.read_text()


def test_out_file_is_certificate(tmp_path, monkeypatch):
    monkeypatch.chdir(TESTS)
    out = tmp_path / "c.json"
    assert main(["certify", HEIS, "--out", str(out)]) == 0
    cert = json.loads(out.read_text())
    assert main(["verify", str(out), HEIS]) == 0
    assert cert["route"] == "thm14-pipeline"


def test_reports_deterministic(capsys, monkeypatch):
    monkeypatch.chdir(TESTS)
    runs = []
    for _ in range(2):
        main(["certify", HEIS])
        runs.append(capsys.readouterr().out)
    assert runs[0] == runs[1]
