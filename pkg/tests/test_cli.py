import io
import json
import subprocess
import sys

import pytest

from nwgames import nwa as N
from nwgames.cli import BUDGET, FALSE, OK, USAGE, main
from nwgames.games import JULIET, Strategy, parse_game
from nwgames.nwt import parse_nwt, run_outputs
from nwgames.words import format_word, parse_word, word_sort_key


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run("--json", *argv)
    data = json.loads(text)
    assert data["exit_code"] == code
    return code, data


def test_accept(data):
    assert run_json("accept", data / "A1.nwa", "<a></a>") == (OK, {"command": "accept", "accepted": True, "exit_code": 0})
    code, d = run_json("accept", data / "A2.dnwa", "<b></b>")
    assert code == FALSE and d["accepted"] is False


def test_word_from_file(data):
    code, d = run_json("accept", data / "A1.nwa", data / "a.nw")
    assert code == OK


def test_usage_errors(data, capsys):
    assert run("accept", data / "missing.nwa", "<a></a>")[0] == USAGE
    assert "cannot read" in capsys.readouterr().err
    code, d = run_json("solve", data / "ab.g", "<a>")
    assert code == USAGE and "well-nested" in d["error"]
    assert run("no-such-command")[0] == USAGE
    assert run("solve", data / "ab.g", "<a></a>", "--depth", "-1")[0] == USAGE
    assert run("solve", data / "A1.nwa", "<a></a>")[0] == USAGE


def test_validate(data, tmp_path):
    code, d = run_json("validate", data / "swap.g", data / "tab.nwt", data / "A2.dnwa", data / "a.nw")
    assert code == OK and all(f["ok"] for f in d["files"])
    assert [f["kind"] for f in d["files"]] == ["game", "transducer", "automaton", "word"]
    bad = tmp_path / "bad.nw"
    bad.write_text("<a></b>\n")
    code, d = run_json("validate", bad)
    assert code == USAGE and d["files"][0]["defects"]


def test_transduce(data):
    code, d = run_json("transduce", data / "tab.nwt", "<a></a>", "--max-len", 4)
    assert code == OK
    assert d["transducts"] == ["<a></a>", "<b></b>", "<a></a><a></a>", "<b></b><b></b>"]
    assert d["complete"] is False and d["max_len"] == 4
    code, d = run_json("transduce", data / "ab_R.nwt", "<a></a>")
    assert d["transducts"] == ["<b></b>"] and d["complete"] is True


def test_compose_round_trip(data, tmp_path):
    dest = tmp_path / "c.nwt"
    code, d = run_json("compose", data / "ab_R.nwt", data / "ab_R.nwt", "-o", dest)
    assert code == OK and d["output"] == str(dest)
    C = parse_nwt(dest.read_text())
    R = parse_nwt((data / "ab_R.nwt").read_text())
    w = parse_word("<a><b></b></a>")
    expected = set()
    for u in run_outputs(R, w):
        expected |= run_outputs(R, u)
    assert run_outputs(C, w) == expected


def test_typecheck(data, tmp_path):
    code, d = run_json("typecheck", data / "tab.nwt", data / "A1.nwa", data / "A2.dnwa")
    assert code == FALSE and d["holds"] is False
    assert isinstance(d["counterexample"], str)
    code, d = run_json("typecheck", data / "ab_R.nwt", data / "ab_T.dnwa", data / "ab_T.dnwa")
    assert d["holds"] is (code == OK)


def test_solve(data, tmp_path):
    code, d = run_json("solve", data / "ab.g", "<a></a>", "--depth", 1)
    assert code == OK and d["verdict"] == "JulietWins"
    assert d["constraints"]["depth"] == 1 and d["witness"]["player"] == "juliet"
    assert set(d["stats"]) >= {"explored", "configurations", "frontier"}
    code, d = run_json("solve", data / "swap.g", "<a></a>")
    assert code == FALSE and d["verdict"] == "RomeoWins"
    for algo in ("replay-free", "single-call", "write-once"):
        code, d = run_json("solve", data / "ab.g", "<a><a></a></a>", "--algorithm", algo)
        assert code == FALSE and d["verdict"] == "RomeoWins" and d["algorithm"] == algo
    code, d = run_json("solve", data / "ab.g", "<a></a>", "--write-once")
    assert d["constraints"]["write_once"] and d["constraints"]["depth"] == 1


def test_solve_budget(tmp_path):
    code, d = run_json("gen-doubling", "--k", 2, "--n", 2, "--out", tmp_path)
    assert code == OK
    code, d = run_json("solve", tmp_path / "game.g", tmp_path / "word.nw", "--depth", 2,
                       "--state-budget", 20)
    assert code == BUDGET and d["verdict"] == "BudgetExhausted"


def test_witness_file_and_trace(data, tmp_path):
    wit = tmp_path / "w.strategy"
    code, _ = run("solve", data / "ab.g", "<a></a>", "--depth", 1, "--witness-out", wit)
    assert code == OK
    s = Strategy.from_text(wit.read_text())
    assert s.player == JULIET and "call" in s.moves.values()
    code, d = run_json("trace", data / "ab.g", "<a></a>", "--depth", 1, "--strategy", wit)
    assert code == OK and d["final_word"] == "<b></b>" and d["winner"] == "juliet"
    assert d["steps"][0]["u"] == "" and d["steps"][-1]["move"] is None
    assert [s["step"] for s in d["steps"]] == list(range(len(d["steps"])))
    # without a strategy Juliet just reads
    code, d = run_json("trace", data / "ab.g", "<a></a>", "--depth", 1, "--strategy",
                       _write(tmp_path / "empty.strategy", "strategy juliet\n"))
    assert code == FALSE and d["final_word"] == "<a></a>"


def _write(path, text):
    path.write_text(text)
    return path


def test_show_trace(data):
    code, text = run("solve", data / "ab.g", "<a></a>", "--depth", 1, "--show-trace")
    assert code == OK and "JulietWins" in text and "Juliet:" in text


@pytest.mark.parametrize("k,n,final", [(1, 1, 4), (1, 3, 16), (2, 2, 32)])
def test_gen_doubling(tmp_path, k, n, final):
    code, d = run_json("gen-doubling", "--k", k, "--n", n, "--out", tmp_path, "--run-script")
    assert code == OK
    assert d["final_length"] == d["expected_final_length"] == final
    assert d["script_wins"] is True and d["input_length"] == 2 * (n + 2 * k - 1)
    g = parse_game((tmp_path / "game.g").read_text(), tmp_path)
    w = parse_word((tmp_path / "word.nw").read_text())
    assert len(w) == d["input_length"] and g.cls.deterministic
    code, _ = run("validate", *(tmp_path / f for f in d["files"]))
    assert code == OK


def test_gen_doubling_size_limit():
    code, d = run_json("gen-doubling", "--k", 3, "--n", 3)
    assert code == BUDGET and "error" in d


def test_enum(data):
    code, d = run_json("enum", data / "A2.dnwa", "--max-len", 4)
    assert code == OK and d["words"] == ["<a></a>", "<a><a></a></a>"]
    code, d = run_json("enum", data / "tab.nwt", "--max-len", 2, "--word", "<a></a>")
    assert d["words"] == ["<a></a>", "<b></b>"]
    A = N.parse_nwa((data / "A1.nwa").read_text())
    code, d = run_json("enum", data / "A1.nwa", "--max-len", 6)
    assert d["words"] == [format_word(w) for w in sorted(N.enumerate_language(A, 6), key=word_sort_key)]


def test_module_entry_point(data):
    r = subprocess.run([sys.executable, "-m", "nwgames", "accept", str(data / "A1.nwa"), "<a></a>"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()


def test_validate_strategy(data, tmp_path):
    good = tmp_path / "good.strategy"
    assert run("solve", data / "ab.g", "<a></a>", "--witness-out", good)[0] == OK
    code, d = run_json("validate", good)
    assert code == OK and d["files"][0]["kind"] == "strategy"
    code, d = run_json("validate", _write(tmp_path / "bad.strategy", "strategy juliet\nabc\n"))
    assert code == USAGE and d["files"][0]["defects"]


def test_empty_word_argument(data):
    code, d = run_json("accept", data / "A1.nwa", "")
    assert code == OK and d["accepted"] is True
