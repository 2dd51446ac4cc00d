import json
import subprocess
import sys

import pytest

from twicemarked.cli import main
from twicemarked.graph import cycle_graph, marked_cycle
from twicemarked.serialize import marked_to_json


@pytest.fixture
def files(tmp_path):
    def write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)

    return write


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


@pytest.fixture
def c7_files(files):
    return (
        files("c7.json", marked_to_json(marked_cycle(1, 6))),
        files("d.json", {"coeffs": {"0": 2, "3": 1}}),
    )


def test_rank(c7_files, capsys):
    g, d = c7_files
    code, out = run(["rank", "--graph", g, "--divisor", d], capsys)
    assert code == 0
    assert json.loads(out) == {"rank": 2, "degree": 3, "genus": 1}


def test_reduce(c7_files, capsys):
    g, d = c7_files
    code, out = run(["reduce", "--graph", g, "--divisor", d, "--base", "2"], capsys)
    assert code == 0
    assert json.loads(out)["reduced"] == {"coeffs": {"2": 2, "6": 1}}


def test_tau_seven_cycle_example(c7_files, capsys):
    g, d = c7_files
    code, out = run(["tau", "--graph", g, "--divisor", d], capsys)
    data = json.loads(out)
    assert code == 0 and data["k"] == 7 and data["inv_k"] == 1
    assert data["tau"] == {"kind": "periodic", "period": 7, "values": [-2, -1, 1, 0, 2, 3, 4]}


def test_certify(c7_files, capsys):
    g, _ = c7_files
    code, out = run(["certify", "--graph", g], capsys)
    data = json.loads(out)
    assert code == 0
    assert (data["pass"], data["k"], data["max_inv_k"]) == (True, 7, 1)


def test_certify_dump_and_cap(c7_files, capsys):
    g, _ = c7_files
    code, out = run(["certify", "--graph", g, "--dump-perms"], capsys)
    assert code == 0 and len(json.loads(out)["permutations"]) == 7
    code, out = run(["certify", "--graph", g, "--cap", "3"], capsys)
    assert code == 2 and json.loads(out)["type"] == "ResourceLimitError"


def test_certify_equivalent_marks_is_usage_error(files, capsys):
    g = files("p.json", {"vertices": 3, "edges": [[0, 1, 1], [1, 2, 1]], "marks": {"v": 0, "w": 2}})
    code, _ = run(["certify", "--graph", g], capsys)
    assert code == 2


def test_demazure_idempotent(files, capsys):
    s0 = files("s0.json", {"kind": "periodic", "period": 3, "values": [1, 0, 2]})
    code, out = run(["demazure", "--left", s0, "--right", s0, "--oracle"], capsys)
    data = json.loads(out)
    assert code == 0 and data["agrees"] is True
    assert data["product"] == {"kind": "periodic", "period": 3, "values": [1, 0, 2]}


def test_demazure_shift_finite(files, capsys):
    p = files("p.json", {"kind": "shift-finite", "shift": 0, "exceptions": {"0": 1, "1": 0}})
    q = files("q.json", {"kind": "shift-finite", "shift": 1, "exceptions": {}})
    code, out = run(["demazure", "--left", p, "--right", q, "--oracle"], capsys)
    assert code == 0 and json.loads(out)["agrees"] is True


def test_chain_all_xi(files, capsys):
    spec = files("ch.json", {"loops": [{"l1": 1, "l2": 2}, {"l1": 1, "l2": 2}]})
    code, out = run(["chain", "--spec", spec, "--all-xi"], capsys)
    data = json.loads(out)
    assert code == 0
    assert len(data["entries"]) == 9
    assert data["all_agree"] is True
    assert all(e["agrees"] is True for e in data["entries"])


def test_chain_single(files, capsys):
    spec = files("ch.json", {"loops": [{"l1": 1, "l2": 2}], "xi": [1]})
    code, out = run(["chain", "--spec", spec], capsys)
    assert code == 0 and json.loads(out)["entry"]["agrees"] is True


def test_glue(files, capsys):
    left = files("l.json", marked_to_json(marked_cycle(1, 2)))
    right = files("r.json", marked_to_json(marked_cycle(2, 2)))
    d1 = files("d1.json", {"coeffs": {"1": 1}})
    d2 = files("d2.json", {"coeffs": {"3": 1}})
    code, out = run(
        ["glue", "--left", left, "--right", right, "--d1", d1, "--d2", d2, "--verify-chaining"], capsys
    )
    data = json.loads(out)
    assert code == 0
    assert data["glue_rank"] == data["rank"]
    assert data["chaining"]["tables_agree"] is True


def test_splitting(files, capsys):
    g = files("g.json", {"vertices": 2, "edges": [[0, 1, 2]], "marks": {"v": 0, "w": 1}})
    d = files("d.json", {"coeffs": {"1": 1}})
    code, out = run(["splitting", "--graph", g, "--divisor", d], capsys)
    data = json.loads(out)
    assert code == 0 and data["mu"] == [-1, 0] and data["codim"] == 0


def test_bn_check(files, capsys):
    g = files("g.json", marked_to_json(marked_cycle(1, 2)))
    d = files("d.json", {"coeffs": {"0": 2}})
    code, out = run(["bn-check", "--graph", g, "--divisor", d], capsys)
    data = json.loads(out)
    assert code == 0
    assert (data["a"], data["b"], data["rho"], data["S"]) == ([0, 2], [0, 1], 0, 0)


def test_usage_errors(files, capsys):
    code, out = run(["rank", "--graph", "missing.json", "--divisor", "missing.json"], capsys)
    assert code == 2 and "error" in json.loads(out)
    bad = files("bad.json", {"vertices": 3, "edges": [[0, 1, 1]]})
    d = files("d.json", {"coeffs": {}})
    code, _ = run(["rank", "--graph", bad, "--divisor", d], capsys)
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_rank_degree_cap_flag(files, capsys):
    g = files("g.json", {"vertices": 3, "edges": [[0, 1, 1], [1, 2, 1], [2, 0, 1]]})
    d = files("d.json", {"coeffs": {"0": 5}})
    code, out = run(["--rank-degree-cap", "4", "rank", "--graph", g, "--divisor", d], capsys)
    assert code == 2 and json.loads(out)["type"] == "ResourceLimitError"
    code, _ = run(["rank", "--graph", g, "--divisor", d], capsys)
    assert code == 0


def test_text_format(c7_files, capsys):
    g, d = c7_files
    code, out = run(["--format", "text", "rank", "--graph", g, "--divisor", d], capsys)
    assert code == 0
    assert out.splitlines() == ["degree: 3", "genus: 1", "rank: 2"]


def test_byte_identical_output(c7_files):
    g, _ = c7_files
    cmd = [sys.executable, "-m", "twicemarked.cli", "certify", "--graph", g, "--dump-perms"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first
