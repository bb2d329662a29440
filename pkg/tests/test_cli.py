import json
import subprocess
import sys


from relrank.cli import main, run


def _json(capsys, argv):
    code = main(argv + ["--format", "json"])
    return code, json.loads(capsys.readouterr().out)


def test_antichain(capsys):
    code, rep = _json(capsys, ["ukm", "antichain", "--i", "3"])
    assert code == 0 and rep["schema"] == "1"
    assert len(rep["checks"]) == 6 and all(c["verdict"] == "pass" for c in rep["checks"])
    assert sum(not v for row in rep["result"]["matrix"] for v in row) == 6


def test_oracle_ideal(capsys):
    code, rep = _json(capsys, ["oracle", "ideal", "--n", "3", "--k", "2"])
    assert code == 0 and rep["status"] == "pass"


def test_oracle_saturate_serializes_arrays(capsys):
    code, rep = _json(capsys, ["oracle", "saturate", "--n", "3", "--gens", "cyc,transp,const0"])
    assert code == 0 and rep["result"]["size"] == 9
    assert [0, 1, 2] in rep["result"]["maps"]


def test_oracle_contains(capsys):
    code, rep = _json(capsys, ["oracle", "contains", "--n", "3", "--U", "all", "--V", "rank<=2"])
    assert rep["result"]["contained"] is False
    _, rep = _json(capsys, ["oracle", "contains", "--n", "3", "--U", "all", "--V", "rank<=2",
                            "--C", "cyc,transp"])
    assert rep["result"]["contained"] is True


def test_construct(capsys):
    code, rep = _json(capsys, ["construct", "banach", "--g", "identity,const:5", "--prefix-len", "500"])
    assert code == 0 and len(rep["checks"]) == 2
    code, rep = _json(capsys, ["construct", "zerofamily", "--us", "succ,identity"])
    assert code == 0


def test_ukm_commands(capsys):
    code, rep = _json(capsys, ["ukm", "order", "--k", "2", "--m", "3", "--l", "0", "--n", "3"])
    assert code == 0 and rep["result"]["below"] is False
    code, rep = _json(capsys, ["ukm", "embed", "--k", "1", "--m", "2", "--l", "2", "--n", "3"])
    assert rep["result"]["g"][:4] == [0, 3, 4, 5]
    code, rep = _json(capsys, ["ukm", "transport", "--k", "1", "--m", "2", "--l", "2", "--n", "3",
                               "--verify-len", "10000"])
    assert code == 0 and all(c["bound"] == 10000 for c in rep["checks"])


def test_family_commands(capsys):
    code, rep = _json(capsys, ["family", "branch", "--paths", "0,01,1(1)"])
    assert rep["result"]["intersections"] == {"0,1": ["exact", 1], "0,2": ["exact", 0],
                                              "1,2": ["exact", 0]}
    code, rep = _json(capsys, ["family", "check", "--pair", "0", "1", "--bound", "4096"])
    assert code == 0


def test_perfect_commands(capsys):
    code, rep = _json(capsys, ["perfect", "kernel", "--tree", "branch-family", "--depth", "8"])
    assert code == 0 and rep["result"]["branches"] == 256
    assert "sigma" in rep["result"]["kernel"]
    code, rep = _json(capsys, ["perfect", "kernel", "--tree", "binary", "--depth", "3",
                               "--budget", "500"])
    assert code == 0 and rep["inconclusive"] is True


def test_diagonal_commands(capsys):
    code, rep = _json(capsys, ["diagonal", "findone", "--A", "evens", "--family", "branch:4",
                               "--xs", "identity"])
    assert code == 0
    cells = rep["result"]["cells"]
    assert cells and all(c["case"] in (2, 3) and c["tag"] == "bound-assumed" for c in cells)
    assert all(s["index"] is not None for c in cells for s in c["separations"])
    code, rep = _json(capsys, ["diagonal", "twochoices", "--word", "identity,evens,identity",
                               "--assumed", "evens", "--N", "evens"])
    assert rep["result"]["classification"]["kind"] == "composite"
    code, rep = _json(capsys, ["diagonal", "twochoices", "--word", "identity,evens,identity",
                               "--assumed", "evens", "--N", "naturals"])
    assert code == 1 and rep["checks"][0]["witness"] is not None
    code, rep = _json(capsys, ["diagonal", "case", "--us", "const0,identity"])
    assert code == 0 and rep["result"]["case"] == "a"


def test_table_format(capsys):
    assert main(["ukm", "antichain", "--i", "2"]) == 0
    out = capsys.readouterr().out
    assert "U(0,3) not below U(2,2)" in out and out.startswith("ukm antichain")


def test_global_flags_either_side(capsys):
    a = _json(capsys, ["--seed", "3", "construct", "zerofamily"])[1]
    b = _json(capsys, ["construct", "zerofamily", "--seed", "3"])[1]
    assert a == b and a["parameters"]["seed"] == 3


def test_usage_errors(capsys):
    assert main(["ukm", "embed", "--k", "2", "--m", "3", "--l", "0", "--n", "3"]) == 2
    assert main(["nonsense"]) == 2
    assert main(["oracle", "saturate", "--n", "3", "--gens", "bogus"]) == 2
    assert main(["verify", "all", "--suite", "nope"]) == 2
    capsys.readouterr()


def test_verify_all_deterministic(capsys):
    argv = ["verify", "all", "--prefix-len", "1000", "--seed", "7", "--format", "json"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first
    rep = json.loads(first)
    assert rep["status"] == "pass"
    assert {c["name"].split(".")[0] for c in rep["checks"]} == {
        "natfn", "sets", "sierpinski", "families", "ukm", "perfect", "diagonal", "oracle"}


def test_timing_is_opt_in():
    rep, _ = run(["oracle", "ideal", "--n", "2", "--k", "1"])
    assert "wall_time" not in rep.to_json()
    rep, _ = run(["oracle", "ideal", "--n", "2", "--k", "1", "--timing"])
    assert rep.to_json()["wall_time"] >= 0


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "relrank", "ukm", "antichain", "--i", "2",
                          "--format", "json"], capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["status"] == "pass"
