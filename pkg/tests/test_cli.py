import json
import subprocess
import sys

import pytest

from snalip import fixtures as fx
from snalip import io
from snalip.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_ud(capsys):
    code, out, _ = _run(capsys, "gen", "--kind", "ud", "--n", "2")
    assert code == 0
    assert json.loads(out)["dist"][0][1] == "3/2"


def test_certify_exit_codes(capsys):
    code, out, _ = _run(capsys, "certify", "--family", "@tent_disjoint")
    assert code == 0 and json.loads(out)["verdict"] == "certified"
    code, out, _ = _run(capsys, "certify", "--family", "@violating_spikes")
    rep = json.loads(out)
    assert code == 1 and rep["pair"] == ["p1", "p3"] and rep["excess"] == "1/24"


def test_refute_exit_codes(capsys):
    assert _run(capsys, "refute", "--family", "@violating_spikes")[0] == 1
    assert _run(capsys, "refute", "--family", "@tent_disjoint")[0] == 0
    assert _run(capsys, "refute", "--family", "@tent_disjoint", "--mode", "ud")[0] == 2


def test_not_normalized_exit_code(tmp_path, capsys):
    from snalip.lipschitz import FunctionFamily, LipschitzFunction

    sp = fx.two_point()
    fam = FunctionFamily([LipschitzFunction.from_values(sp, {"y": 3}, "f")])
    path = tmp_path / "f.json"
    path.write_text(io.dump_family(fam))
    code, out, _ = _run(capsys, "certify", "--family", str(path))
    assert code == 2 and json.loads(out)["verdict"] == "not-normalized"


def test_bad_input_exit_codes(tmp_path, capsys):
    assert _run(capsys, "certify", "--family", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "explicit", "points": ["a", "b", "c"], "base": "a", '
                   '"dist": [["0","1","5"],["1","0","1"],["5","1","0"]]}')
    code, _, err = _run(capsys, "petr", "--space", str(bad))
    assert code == 2 and "triangle" in err
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--kind", "ud"])
    assert exc.value.code == 2


def test_lipnorm_sna_tent_spike(tmp_path, capsys):
    assert _run(capsys, "lipnorm", "--family", "@violating_spikes")[0] == 0
    assert _run(capsys, "sna", "--family", "@tent_disjoint")[0] == 0
    space = tmp_path / "s.json"
    space.write_text(io.dump_space(fx.line_part(6, den=1)))
    code, out, _ = _run(capsys, "tent", "--space", str(space), "--pairs", "q0:q1,q3:q4")
    assert code == 0 and len(json.loads(out)["functions"]) == 2
    assert _run(capsys, "tent", "--space", str(space), "--pairs", "q0:q2,q3:q5")[0] == 2
    assert _run(capsys, "spike", "--kind", "triple", "--levels", "3")[0] == 0


def test_gamma_and_petr_and_case1(tmp_path, capsys):
    sp, marks = fx.gamma_marks(4)
    path = tmp_path / "g.json"
    path.write_text(io.dump_space(sp))
    out_path = tmp_path / "fam.json"
    code, _, _ = _run(capsys, "gamma", "--space", str(path), "--closeness", "1/4",
                      "--marks", ",".join(marks), "--out", str(out_path))
    assert code == 0
    assert _run(capsys, "certify", "--family", str(out_path))[0] == 0
    assert _run(capsys, "gamma", "--space", str(path), "--closeness", "1/2", "--marks", ",".join(marks))[0] == 2
    code, out, _ = _run(capsys, "petr", "--space", str(path))
    assert code == 0 and "result" in json.loads(out)
    code, out, _ = _run(capsys, "case1", "--count", "3")
    assert code == 0 and json.loads(out)["provenance"]["margins"][0] == "3/128"


def test_selftest_subset(capsys):
    code, out, _ = _run(capsys, "selftest", "--only", "11")
    assert code == 0 and out.startswith("[PASS] 11.")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "snalip", "gen", "--kind", "ud", "--n", "3"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and '"p3"' in res.stdout
