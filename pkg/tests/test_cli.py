"""Exit codes and JSON output of every CLI subcommand."""

import json

import pytest

from topodyn.cli import main
from topodyn.formula import parse


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_json(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


@pytest.fixture()
def pdl_file(tmp_path):
    return write_json(tmp_path, "pdl.json", {
        "type": "pdl", "points": 2, "serial": True,
        "programs": {
            "rand": {"rel": [[0, 0], [0, 1], [1, 0], [1, 1]]},
            "at": {"rel": [[0, 0], [1, 1]]},
        },
        "valuation": {"zero": [0], "one": [1]},
    })


@pytest.fixture()
def swap_file(tmp_path):
    return write_json(tmp_path, "swap.json", {
        "type": "dtl",
        "space": {"points": 2, "opens": [[], [1], [0, 1]]},
        "programs": {"a": {"map": [1, 0]}},
        "valuation": {"p": [1]},
    })


@pytest.fixture()
def ident_file(tmp_path):
    return write_json(tmp_path, "ident.json", {
        "type": "dtl",
        "space": {"points": 2, "opens": [[], [1], [0, 1]]},
        "programs": {"a": {"map": [0, 1]}},
        "valuation": {"p": [1]},
    })


@pytest.fixture()
def subset_file(tmp_path):
    return write_json(tmp_path, "subset.json", {
        "type": "subset",
        "space": {"points": 2, "opens": [[], [1], [0, 1]]},
        "programs": {"a": {"map": [1, 1]}},
        "valuation": {"p": [1]},
    })


@pytest.fixture()
def nonserial_file(tmp_path):
    return write_json(tmp_path, "nonserial.json", {
        "type": "pdl", "points": 2, "serial": False,
        "programs": {"a": {"rel": [[0, 1]]}},
        "valuation": {"p": [0]},
    })


# --- parse ------------------------------------------------------------------------


def test_parse_round_trips_through_printed_text(capsys):
    code, out, _ = run(capsys, ["parse", "-f", "O[a;b] (p -> K q)"])
    assert code == 0
    payload = json.loads(out)
    assert parse(payload["text"]) == parse("O[a;b] (p -> K q)")
    assert payload["ast"]["type"] == "next"


def test_parse_error_reports_position(capsys):
    code, out, err = run(capsys, ["parse", "-f", "p -> ->"])
    assert code == 2
    assert out == ""
    assert "line 1, column 6" in err


# --- eval -------------------------------------------------------------------------


def test_eval_relational_point(capsys, pdl_file):
    code, out, _ = run(capsys, ["eval", "-m", pdl_file, "-f", "<rand>one", "--at", "0"])
    assert code == 0 and json.loads(out) == {"truth": True, "at": 0}
    code, out, _ = run(capsys, ["eval", "-m", pdl_file, "-f", "[rand]one", "--at", "0"])
    assert code == 1 and json.loads(out) == {"truth": False, "at": 0}


def test_eval_relational_extension(capsys, pdl_file):
    code, out, _ = run(capsys, ["eval", "-m", pdl_file, "-f", "<rand>one"])
    assert code == 0 and json.loads(out) == {"extension": [0, 1]}


def test_eval_dtl_point(capsys, swap_file):
    code, out, _ = run(capsys, ["eval", "-m", swap_file, "-f", "O[a] p", "--at", "0"])
    assert code == 0 and json.loads(out)["truth"] is True


def test_eval_point_out_of_range(capsys, pdl_file):
    code, _, err = run(capsys, ["eval", "-m", pdl_file, "-f", "one", "--at", "7"])
    assert code == 2 and "out of range" in err


def test_eval_subset_scenario(capsys, subset_file):
    # scenario is "x,i" where i indexes opens sorted by size then bitmask
    code, out, _ = run(capsys, ["eval", "-m", subset_file, "-f", "K p", "--scenario", "1,1"])
    assert code == 0
    assert json.loads(out) == {"truth": True, "scenario": {"x": 1, "u": [1]}}
    code, out, _ = run(capsys, ["eval", "-m", subset_file, "-f", "K p", "--scenario", "1,2"])
    assert code == 1
    assert json.loads(out)["scenario"]["u"] == [0, 1]


def test_eval_subset_needs_scenario(capsys, subset_file):
    code, _, err = run(capsys, ["eval", "-m", subset_file, "-f", "p"])
    assert code == 2 and "--scenario" in err
    code, _, err = run(capsys, ["eval", "-m", subset_file, "-f", "p", "--scenario", "1,9"])
    assert code == 2 and "out of range" in err


# --- frame ------------------------------------------------------------------------


def test_frame_continuity_verdicts(capsys, swap_file, ident_file):
    code, out, _ = run(capsys, ["frame", "-m", ident_file, "--prop", "continuity"])
    assert code == 0 and json.loads(out)["holds"] is True
    code, out, _ = run(capsys, ["frame", "-m", swap_file, "--prop", "continuity"])
    assert code == 1
    payload = json.loads(out)
    assert payload["programs"]["a"]["witness"] == {"open_set": [1], "point": 0}


def test_frame_openness_verdicts(capsys, swap_file, ident_file):
    assert run(capsys, ["frame", "-m", ident_file, "--prop", "openness"])[0] == 0
    code, out, _ = run(capsys, ["frame", "-m", swap_file, "--prop", "openness"])
    assert code == 1 and json.loads(out)["programs"]["a"]["witness"]["open_set"] == [1]


def test_frame_scheme_route_agrees(capsys, swap_file):
    code, out, _ = run(capsys, ["frame", "-m", swap_file, "--prop", "continuity", "--scheme"])
    assert code == 1
    entry = json.loads(out)["programs"]["a"]
    assert entry["routes_agree"] is True
    assert entry["scheme"]["holds"] is False


def test_frame_seriality(capsys, pdl_file, nonserial_file, swap_file):
    assert run(capsys, ["frame", "-m", pdl_file, "--prop", "seriality"])[0] == 0
    code, out, _ = run(capsys, ["frame", "-m", nonserial_file, "--prop", "seriality"])
    assert code == 1
    assert json.loads(out)["witness"] == {"point": 1, "program": "a"}
    code, _, err = run(capsys, ["frame", "-m", swap_file, "--prop", "seriality"])
    assert code == 2 and "relational" in err


def test_frame_continuity_needs_total_maps(capsys, tmp_path):
    partial = write_json(tmp_path, "partial.json", {
        "type": "subset",
        "space": {"points": 2, "opens": [[], [1], [0, 1]]},
        "programs": {"a": {"map": [None, 1]}},
        "valuation": {"p": [1]},
    })
    code, _, err = run(capsys, ["frame", "-m", partial, "--prop", "continuity"])
    assert code == 2 and "total" in err
    assert run(capsys, ["frame", "-m", partial, "--prop", "openness"])[0] == 0


# --- transform --------------------------------------------------------------------


def test_transform_reports_strata(capsys, pdl_file):
    code, out, _ = run(capsys, ["transform", "-m", pdl_file, "--depth", "2"])
    assert code == 0
    payload = json.loads(out)
    assert payload["stratum_sizes"] == [2, 4, 16]
    assert payload["network_space"]["space"]["points"] == 22


def test_transform_check_preserves_truth(capsys, pdl_file):
    code, out, _ = run(capsys, [
        "transform", "-m", pdl_file, "--depth", "2",
        "--check", "zero; <rand>one", "--check", "[at]zero",
    ])
    assert code == 0
    report = json.loads(out)["preservation"]
    assert report == {"checked": 48, "disagreements": [], "ok": True}


def test_transform_wrong_model_kind(capsys, swap_file):
    code, _, err = run(capsys, ["transform", "-m", swap_file, "--depth", "1"])
    assert code == 2 and "relational" in err


def test_transform_requires_serial(capsys, nonserial_file):
    code, _, err = run(capsys, ["transform", "-m", nonserial_file, "--depth", "2"])
    assert code == 2 and "serial" in err


def test_transform_check_rejects_sequencing(capsys, pdl_file):
    # the ';' separator splits the chunk, leaving an unparseable fragment
    code, _, _ = run(capsys, ["transform", "-m", pdl_file, "--depth", "1",
                              "--check", "<rand;at>one"])
    assert code == 2


# --- announce ---------------------------------------------------------------------


def test_announce_identity_agrees(capsys, subset_file):
    code, out, _ = run(capsys, [
        "announce", "-m", subset_file, "--phi", "p", "--psi", "K p", "--scenario", "1,2",
    ])
    assert code == 0
    assert json.loads(out) == {
        "identity_agrees": True,
        "precondition_holds": True,
        "updated": {"x": 1, "u": [1]},
    }


def test_announce_failed_precondition(capsys, subset_file):
    code, out, _ = run(capsys, [
        "announce", "-m", subset_file, "--phi", "~p", "--psi", "p", "--scenario", "1,2",
    ])
    assert code == 0
    payload = json.loads(out)
    assert payload["precondition_holds"] is False and payload["updated"] is None


def test_announce_fragment_violation(capsys, subset_file):
    code, _, err = run(capsys, [
        "announce", "-m", subset_file, "--phi", "K p", "--psi", "p", "--scenario", "1,2",
    ])
    assert code == 2 and "box/next" in err


# --- prove ------------------------------------------------------------------------


BOX_DIST_JSON = {
    "system": "SPDL0",
    "steps": [
        {"formula": "p & q -> q", "by": {"axiom": "CPL"}},
        {"formula": "[a] (p & q -> q)", "by": {"nec": {"mod": "a", "from": 1}}},
        {"formula": "[a] (p & q -> q) -> [a] (p & q) -> [a] q", "by": {"axiom": "K"}},
        {"formula": "[a] (p & q) -> [a] q", "by": {"mp": [2, 3]}},
    ],
}


def test_prove_accepts_valid_derivation(capsys, tmp_path):
    path = write_json(tmp_path, "deriv.json", BOX_DIST_JSON)
    code, out, _ = run(capsys, ["prove", "-d", path])
    assert code == 0 and json.loads(out) == {"ok": True}


def test_prove_rejects_bad_step(capsys, tmp_path):
    bad = json.loads(json.dumps(BOX_DIST_JSON))
    bad["steps"][3]["by"]["mp"] = [3, 2]
    path = write_json(tmp_path, "bad.json", bad)
    code, out, _ = run(capsys, ["prove", "-d", path])
    assert code == 1
    payload = json.loads(out)
    assert payload["ok"] is False
    assert payload["step"] == 4 and payload["error"] == "BadRuleApplication"


def test_prove_input_errors(capsys, tmp_path):
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{nope", encoding="utf-8")
    assert run(capsys, ["prove", "-d", str(garbled)])[0] == 2
    assert run(capsys, ["prove", "-d", str(tmp_path / "missing.json")])[0] == 2


# --- audit ------------------------------------------------------------------------


def test_audit_clean_run(capsys):
    code, out, err = run(capsys, [
        "audit", "--system", "SPDL0", "--trials", "10", "--seed", "9", "--points", "4",
    ])
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] is True and payload["violations"] == []
    assert payload["checked"] == 90
    assert err.startswith("elapsed:")


def test_audit_repeat_runs_print_identical_reports(capsys):
    argv = ["audit", "--system", "DTEL", "--trials", "15", "--seed", "4", "--points", "4"]
    _, first, _ = run(capsys, argv)
    _, second, _ = run(capsys, argv)
    assert first == second


def test_audit_flags_unsound_pairing(capsys):
    code, out, _ = run(capsys, [
        "audit", "--system", "SPDL0_SEQ", "--model-class", "dtl",
        "--trials", "40", "--seed", "3", "--points", "4", "--scheme", "Seq",
    ])
    assert code == 1
    assert json.loads(out)["violations"]


# --- refute -----------------------------------------------------------------------


def test_refute_finds_minimal_countermodel(capsys):
    code, out, _ = run(capsys, ["refute", "-f", "p -> box p", "--bound", "2"])
    assert code == 1
    payload = json.loads(out)
    assert payload["found"] is True and payload["point"] == 0
    assert payload["model"] == {
        "type": "dtl",
        "space": {"points": 2, "opens": [[], [1], [0, 1]]},
        "programs": {},
        "valuation": {"p": [0]},
    }


def test_refute_exhausts_bound(capsys):
    code, out, _ = run(capsys, ["refute", "-f", "box p -> p", "--bound", "3"])
    assert code == 0
    assert json.loads(out) == {"bound": 3, "found": False, "model_class": "dtl"}


def test_refute_repeat_runs_print_identical_output(capsys):
    argv = ["refute", "-f", "<a;b>p <-> <a><b>p", "--bound", "3"]
    _, first, _ = run(capsys, argv)
    _, second, _ = run(capsys, argv)
    assert first == second and json.loads(first)["found"] is True


# --- global limits and usage ------------------------------------------------------


def test_max_points_cap(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("TOPODYN_MAX_POINTS", "3")
    code, _, err = run(capsys, ["audit", "--system", "SPDL0", "--trials", "1", "--points", "6"])
    assert code == 2 and "TOPODYN_MAX_POINTS" in err
    code, _, err = run(capsys, ["refute", "-f", "p -> box p", "--bound", "5"])
    assert code == 2 and "TOPODYN_MAX_POINTS" in err
    big = write_json(tmp_path, "big.json", {
        "type": "dtl",
        "space": {"points": 4, "opens": [[], [0, 1, 2, 3]]},
        "programs": {},
        "valuation": {},
    })
    code, _, err = run(capsys, ["eval", "-m", big, "-f", "top"])
    assert code == 2 and "TOPODYN_MAX_POINTS" in err


def test_max_points_must_be_numeric(capsys, monkeypatch):
    monkeypatch.setenv("TOPODYN_MAX_POINTS", "plenty")
    code, _, err = run(capsys, ["refute", "-f", "p", "--bound", "2"])
    assert code == 2 and "integer" in err


def test_invalid_model_file(capsys, tmp_path):
    claims_serial = write_json(tmp_path, "claims.json", {
        "type": "pdl", "points": 2, "serial": True,
        "programs": {"a": {"rel": [[0, 1]]}},
        "valuation": {"p": [0]},
    })
    code, _, err = run(capsys, ["eval", "-m", claims_serial, "-f", "p"])
    assert code == 2 and "SerialityFailure" in err


def test_usage_errors_and_help(capsys):
    assert run(capsys, ["frobnicate"])[0] == 2
    assert run(capsys, [])[0] == 2
    assert run(capsys, ["eval", "-f", "p"])[0] == 2  # missing -m
    code, out, _ = run(capsys, ["--help"])
    assert code == 0
    assert "usage" in out
