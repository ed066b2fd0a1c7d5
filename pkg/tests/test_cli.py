import csv
import io
import json
import subprocess
import sys

import pytest

from cqi.cli import SweepConfig, cmd_sweep, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", "Z(12)+Z(3)")
    data = json.loads(out)
    assert code == 0
    assert data["cqi"] is True
    assert data["order"] == 36
    assert set(data["components"]) == {"2", "3"}
    code, out, _ = run(capsys, "analyze", "Z(2)+Z(4)")
    assert json.loads(out)["cqi"] is False


def test_count_primary(capsys):
    code, out, _ = run(capsys, "count", '{"p": 3, "parts": [[2, 1], [5, 1]]}')
    data = json.loads(out)
    assert code == 0
    assert (data["classes"], data["subgroups"]) == (7, 10)
    assert data["method"] == "closed_form"


def test_count_composite_with_oracle(capsys):
    code, out, _ = run(capsys, "count", "Z(6)+Z(12)", "--oracle")
    data = json.loads(out)
    assert code == 0
    assert data["subgroups"] == 5 and data["oracle"]["subgroups"] == 5
    assert data["classes"] == "undefined"


def test_count_csv(capsys):
    code, out, _ = run(capsys, "count", "p=2: 4^1+32^1", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows == [["spec", "p", "classes", "subgroups", "cqi"], ["p=2: 4^1+32^1", "2", "7", "7", "false"]]


def test_oracle_cap_exit_code(capsys):
    code, _, err = run(capsys, "count", "p=2: 4+32", "--oracle", "--cap-end", "10")
    assert code == 3
    assert "not run" in err


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "p=2: 2+4")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert {c["name"] for c in data["checks"]} >= {"formula_vs_oracle", "closed_vs_enumeration", "fiber_sum"}


def test_verify_skips_warn(capsys):
    code, out, err = run(capsys, "verify", "p=2: 4+32", "--cap-end", "10")
    assert code == 0 and "skipped" in err
    code, out, err = run(capsys, "verify", "p=2: 4+32", "--cap-end", "10", "--oracle")
    assert code == 3


def test_verify_composite(capsys):
    code, out, _ = run(capsys, "verify", "Z(6)+Z(12)")
    data = json.loads(out)
    assert code == 0
    names = [c["name"] for c in data["checks"]]
    assert "inclusion_exclusion" in names and "cqi_decision" in names


def test_perm(capsys):
    code, out, _ = run(capsys, "perm", "3")
    data = json.loads(out)
    assert code == 0
    assert data == {"n": 3, "brute": 7, "closed": 7, "classes": 7, "y_size": 7, "equal": True}


def test_perm_too_large(capsys):
    code, _, err = run(capsys, "perm", "11")
    assert code == 2 and "error" in err


@pytest.mark.parametrize("spec", ["Z(0)", "p=4: 16", "nonsense", "{"])
def test_parse_errors(capsys, spec):
    code, out, err = run(capsys, "count", spec)
    assert code == 2 and out == "" and "error" in err


def test_out_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "analyze", "Z(6)", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["spec"] == "Z(6)"


def test_timestamps(capsys):
    _, out, _ = run(capsys, "analyze", "Z(6)", "--timestamps")
    assert "timestamp" in json.loads(out)
    _, out, _ = run(capsys, "analyze", "Z(6)")
    assert "timestamp" not in json.loads(out)


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "--max-order", "16", "--primes", "2,3", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["spec", "p", "classes", "subgroups", "cqi"]
    # p-groups of order <= 16: 2, 4 (x2), 8 (x3), 16 (x5), 3, 9 (x2)
    assert len(rows) - 1 == 1 + 2 + 3 + 5 + 1 + 2
    row = {r[0]: r for r in rows[1:]}
    assert row["p=2: 2^1+4^1"][3] == "1"


def test_sweep_verify_and_parallel_order():
    cfg = SweepConfig(max_order=16, primes=(2, 3), modes=frozenset({"classes", "subgroups", "cqi", "verify"}))
    serial = list(cmd_sweep(cfg, 1))
    parallel = list(cmd_sweep(cfg, 2))
    assert serial == parallel
    assert all(r["verified"] is True for r in serial)


def test_sweep_rejects_bad_config(capsys):
    code, _, err = run(capsys, "sweep", "--max-order", "0")
    assert code == 2
    code, _, err = run(capsys, "sweep", "--max-order", "8", "--modes", "bogus")
    assert code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cqi", "analyze", "Z(4)"], capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["cqi"] is True


def test_sweep_small_orders_are_homocyclic(capsys):
    code, out, _ = run(capsys, "sweep", "--max-order", "4", "--primes", "2")
    rows = json.loads(out)["rows"]
    assert [r["spec"] for r in rows] == ["p=2: 2^1", "p=2: 2^2", "p=2: 4^1"]
    assert all(r["subgroups"] == 0 and r["cqi"] for r in rows)


def test_json_output_is_deterministic(capsys):
    _, a, _ = run(capsys, "count", "Z(6)+Z(12)")
    _, b, _ = run(capsys, "count", "Z(6)+Z(12)")
    assert a == b
