import io
import json

import pytest

from odes import EXP2_PHI, EXP2_S2, PERF_PHI, WORKED_I, WORKED_PHI, corpus_entries
from sfint.cli import FAILED, OK, USAGE, UsageError, corpus_run, load_corpus, parse_ode, run
from sfint.pipeline import Report, functionally_dependent, without_timing
from sfint.symcore import normalize_ratfunc, parse_expr


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv, "--json")
    return code, json.loads(out)


def test_parse_ode_forms():
    a = parse_ode(f"z' = {WORKED_PHI}")
    b = parse_ode(f"y'' = {WORKED_PHI}")
    c = parse_ode(WORKED_PHI)
    assert a == b == c
    with pytest.raises(UsageError):
        parse_ode("w' = x")


def test_invade_worked_example():
    code, doc = call_json("invade", "--ode", f"z' = {WORKED_PHI}")
    assert code == OK
    assert functionally_dependent(parse_expr(doc["first_integral"]), parse_expr(WORKED_I))[0]
    assert set(doc) >= {"ode", "options", "stages", "s_functions", "associated_odes",
                        "h_functions", "reduced_ode", "first_integral", "verification", "exit"}


def test_sfunction_s2_of_exp2():
    code, doc = call_json("sfunction", "--sn", "2", "--ode", f"z' = {EXP2_PHI}")
    assert code == OK
    found = [normalize_ratfunc(parse_expr(s["S"])) for s in doc["s_functions"] if s["k"] == 2]
    assert normalize_ratfunc(parse_expr(EXP2_S2)) in found


def test_sfunction_s3_of_perf_text_output():
    code, out, _ = call("sfunction", "--sn", "3", "--den", "x", "--ode", f"z' = {PERF_PHI}")
    assert code == OK
    assert "4*y/x" in out


def test_dx_and_verify():
    code, doc = call_json("dx", "--ode", "z' = z", "--expr", "z - y")
    assert code == OK and doc["dx"] == "0"
    code, doc = call_json("verify", "--ode", f"z' = {WORKED_PHI}", "--expr", WORKED_I)
    assert code == OK and doc["passed"]
    code, doc = call_json("verify", "--ode", f"z' = {WORKED_PHI}", "--expr", "x*y")
    assert code == FAILED and not doc["passed"]


def test_ode_from_file(tmp_path):
    f = tmp_path / "ode.txt"
    f.write_text(f"z' = {WORKED_PHI}\n")
    code, doc = call_json("exodes", "--ode", str(f))
    assert code == OK
    assert doc["associated_odes"][0].startswith("dz/dy")


def test_m_and_n_flags():
    code, doc = call_json("invade", "--M", "0", "--N", "1")
    assert code == OK and doc["first_integral"] == "z"


def test_clean_failure_exit_code():
    code, doc = call_json("sfunction", "--ode", f"z' = {EXP2_PHI}", "--max-deg", "1")
    assert code == FAILED


@pytest.mark.parametrize("argv", [
    ("bogus",),
    ("invade",),
    ("invade", "--ode", "w' = x"),
    ("invade", "--ode", "z' = x", "--M", "x", "--N", "1"),
    ("invade", "--ode", "z' = x +* 2"),
    ("sfunction", "--ode", "z' = x", "--deg", "0"),
    ("sfunction", "--ode", "z' = x", "--sn", "5"),
])
def test_usage_errors(argv):
    code, out, err = call(*argv)
    assert code == USAGE


def test_report_json_round_trip_and_determinism():
    _, a = call_json("invade", "--ode", f"z' = {WORKED_PHI}")
    _, b = call_json("invade", "--ode", f"z' = {WORKED_PHI}")
    assert without_timing(a) == without_timing(b)
    rep = Report.from_json(a)
    assert json.loads(json.dumps(rep.to_json(), sort_keys=True)) == a


def test_empty_corpus(tmp_path):
    f = tmp_path / "empty.jsonl"
    f.write_text("")
    code, summary = corpus_run(str(f))
    assert code == OK
    assert (summary["passed"], summary["total"]) == (0, 0)


def test_corrupted_corpus_entry_fails(tmp_path):
    entry = dict(corpus_entries()[0])
    entry["expected_s1"] = "(z - x)/(x^5 - y)"
    f = tmp_path / "bad.jsonl"
    f.write_text(json.dumps(entry) + "\n")
    code, summary = corpus_run(str(f))
    assert code != OK
    assert summary["passed"] == 0
    code, _, _ = call("corpus", str(f))
    assert code != OK


def test_malformed_corpus_is_a_usage_error(tmp_path):
    f = tmp_path / "broken.jsonl"
    f.write_text('{"id": "a"}\n')
    with pytest.raises(ValueError):
        load_corpus(str(f))
    code, _, _ = call("corpus", str(f))
    assert code == USAGE


def test_duplicate_ids_rejected(tmp_path):
    line = json.dumps(corpus_entries()[0])
    f = tmp_path / "dup.jsonl"
    f.write_text(line + "\n" + line + "\n")
    with pytest.raises(ValueError):
        load_corpus(str(f))
