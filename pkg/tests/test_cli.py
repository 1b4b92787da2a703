import json

import pytest

from wefchores.cli import main
from wefchores.core import load_allocation, load_instance
from wefchores.fixtures import table1


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def table1_file(tmp_path, capsys):
    path = tmp_path / "t1.json"
    assert run(capsys, "generate", "--kind", "fixture", "--name", "table1", "-o", str(path))[0] == 0
    return path


def test_generate_round_trip(table1_file):
    assert load_instance(table1_file.read_text()) == table1()


def test_allocate_and_verify(tmp_path, capsys, table1_file):
    alloc_path, seq_path = tmp_path / "a.json", tmp_path / "seq.txt"
    code, _, _ = run(capsys, "allocate", "--algo", "rwps", "-i", str(table1_file), "-o", str(alloc_path), "--sequence", str(seq_path))
    assert code == 0
    assert seq_path.read_text().strip() == "1 2 2"
    alloc = load_allocation(alloc_path.read_text(), table1())
    assert alloc.describe() == "X1={e3} X2={e1,e2}"
    for notion in ("wef1", "po", "wprop1"):
        code, out, _ = run(capsys, "verify", "--notion", notion, "-i", str(table1_file), "-a", str(alloc_path))
        assert code == 0
        assert json.loads(out)["verdict"] == "pass"


def test_verify_failure_exit_code(tmp_path, capsys, table1_file):
    alloc_path, report = tmp_path / "a.json", tmp_path / "r.json"
    alloc_path.write_text(json.dumps({"allocation": {"1": [1], "2": [2, 3]}}))
    code, out, _ = run(capsys, "verify", "--notion", "wef1", "-i", str(table1_file), "-a", str(alloc_path), "-r", str(report))
    assert code == 1
    assert out.strip() == "WEF1: fail"
    assert json.loads(report.read_text())["witness"] is not None


def test_bivalued_certificate(tmp_path, capsys):
    inst = tmp_path / "b.json"
    run(capsys, "generate", "--kind", "bivalued", "--n", "3", "--m", "5", "--seed", "2", "--k", "3", "-o", str(inst))
    cert = tmp_path / "cert.json"
    code, out, _ = run(capsys, "allocate", "--algo", "bivalued", "-i", str(inst), "--cert", str(cert))
    assert code == 0
    assert "allocation" in json.loads(out)
    assert "prices" in json.loads(cert.read_text())


def test_cert_needs_bivalued(capsys):
    assert run(capsys, "allocate", "--algo", "waw", "--fixture", "table1", "--cert", "x.json")[0] == 2


def test_oracle_aps(capsys):
    code, out, _ = run(capsys, "oracle", "--task", "aps", "--fixture", "table4", "--param", "n=3")
    assert code == 0
    assert set(json.loads(out)["aps"].values()) == {"1/3"}


def test_oracle_pof(capsys):
    code, out, _ = run(capsys, "oracle", "--task", "pof", "--fixture", "table3")
    assert json.loads(out)["pof"] == "19/13"


def test_pof_command(capsys):
    code, out, _ = run(capsys, "pof", "--fixture", "table3")
    data = json.loads(out)
    assert (data["sc"], data["opt"], data["bound"]) == ("19/25", "13/25", "3/2")


def test_batch(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"instances": [{"kind": "random", "n": 2, "m": 3, "count": 4}], "algorithms": ["rwps", "waw"]}))
    rep = tmp_path / "r.json"
    code, _, err = run(capsys, "batch", "-c", str(cfg), "-r", str(rep))
    assert code == 0
    assert err.startswith("8 rows")
    assert json.loads(rep.read_text())["summary"]["failures"] == 0


def test_fixtures_list_and_show(capsys):
    code, out, _ = run(capsys, "fixtures", "list")
    assert code == 0 and "table4 [n]" in out
    code, out, _ = run(capsys, "fixtures", "show", "table5")
    assert len(json.loads(out)["agents"]) == 2


@pytest.mark.parametrize(
    "doc",
    ['{"agents": [{"id": 1, "weight": "1"}], "items": ["e1"], "costs": [["-1"]]}', "not json"],
)
def test_bad_input_exit_two(tmp_path, capsys, doc):
    path = tmp_path / "bad.json"
    path.write_text(doc)
    code, _, err = run(capsys, "allocate", "--algo", "rwps", "-i", str(path))
    assert code == 2
    assert err.startswith("error:")


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "allocate", "--algo", "rwps", "-i", str(tmp_path / "nope.json"))[0] == 2


def test_input_required(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["allocate", "--algo", "rwps"])
    assert exc.value.code == 2
