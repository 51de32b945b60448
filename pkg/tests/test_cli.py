import json

import pytest

from chromalg.cli import main
from chromalg.fgl import fgl_honda
from chromalg.power_series import Series


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_pseries_kn(capsys):
    assert run_json(capsys, "fgl", "pseries", "--law", "kn", "--p", "3", "--n", "1") == (0, {"series": "v1*s^3"})


def test_derive(capsys):
    code, out = run_json(capsys, "coop", "derive", "--p", "3", "--n", "2", "--json")
    assert code == 0
    assert out["pi_values"] == {"1": 1, "2": 4, "3": 13}
    assert out["text"][-1] == "b1^12*[v2] -> v2*b1^4"
    assert set(out["final_relation"]) == {"lhs", "rhs"}
    lhs = out["final_relation"]["lhs"][0]
    assert lhs["b"] == {"1": 12} and lhs["v"] == {"2": 1}
    assert out["final_relation"]["rhs"][0]["b"] == {"1": 4}


def test_deloop(capsys):
    argv = ["deloop", "--k", "0", "--l", "0", "--m", "0", "--h", "1", "--p", "3", "--n", "1", "--json"]
    assert run_json(capsys, *argv) == (0, {"i": 1, "j": 4, "sign": 1})


def test_split_verify(capsys):
    code, out = run_json(capsys, "split", "verify", "--p", "3", "--n", "1", "--h", "1")
    assert code == 0 and out["ok"] and len(out["checks"]) == 4


def test_split_destab(capsys):
    code, out = run_json(capsys, "split", "destab", "--t", "6", "--k", "2")
    assert code == 0 and out["stabilises_back"] and out["in_sigma_h_image"]


@pytest.mark.parametrize("what", ["check", "vcoeffs", "height", "tail"])
def test_fgl_subcommands(capsys, what):
    code, out = run_json(capsys, "fgl", what, "--law", "honda", "--p", "5")
    assert code == 0


def test_nseries(capsys):
    assert run_json(capsys, "fgl", "nseries", "--law", "mult", "--m", "2", "--prec", "4") == (
        0, {"m": 2, "series": "2*s + s^2"})


@pytest.mark.parametrize("what", ["bseries", "rwcheck", "height"])
def test_coop_subcommands(capsys, what):
    code, _ = run_json(capsys, "coop", what)
    assert code == 0


def test_text_output(capsys):
    code, out = run(capsys, "fgl", "pseries", "--law", "kn", "--text")
    assert (code, out.strip()) == (0, "v1*s^3")


@pytest.mark.parametrize("argv", [
    ["fgl", "check", "--p", "4"],
    ["fgl", "check", "--p", "2"],
    ["fgl", "check", "--n", "0"],
    ["fgl", "check", "--prec", "2"],
    ["fgl", "check", "--law", "file"],
    ["fgl", "check", "--file", "/does/not/exist.json"],
    ["split", "verify", "--h", "9"],
])
def test_usage_errors(capsys, argv):
    assert main(argv) == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["fgl", "bogus"])
    assert exc.value.code == 2


def test_file_law_round_trip(tmp_path, capsys):
    path = tmp_path / "law.json"
    path.write_text(json.dumps(fgl_honda(3, 1, 9).series.to_json()))
    code, out = run_json(capsys, "fgl", "pseries", "--file", str(path))
    assert (code, out) == (0, {"series": "s^3"})


def test_bad_file_law_fails_check(tmp_path, capsys):
    from chromalg.fgl import prime_field

    bad = Series(prime_field(3), ("x1", "x2"), 6, {(1, 0): 1, (0, 1): 1, (2, 0): 1})
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad.to_json()))
    code, out = run_json(capsys, "fgl", "check", "--file", str(path))
    assert code == 1 and out["unitality"]["where"] == "x1^2"
    assert main(["fgl", "pseries", "--file", str(path)]) == 1


def test_series_json_schema_round_trip(capsys):
    code, out = run_json(capsys, "coop", "derive", "--p", "3", "--n", "1")
    from chromalg.coop_algebra import CoopAlgebra
    from chromalg.fgl import kn_ring

    alg = CoopAlgebra(kn_ring(3, 1), 3)
    rhs = alg.element_from_json(out["final_relation"]["rhs"])
    assert str(rhs) == "v1*b1"
    assert rhs.to_json() == out["final_relation"]["rhs"]


def test_verify_all_deterministic(capsys):
    code1, out1 = run_json(capsys, "verify-all", "--seed", "3")
    code2, out2 = run_json(capsys, "verify-all", "--seed", "3")
    assert code1 == code2 == 0
    assert out1 == out2
