import json
import subprocess
import sys

import pytest

from pollrout import io
from pollrout.cli import main
from pollrout.model import validate


@pytest.fixture
def inst_file(tmp_path):
    path = tmp_path / "inst.txt"
    assert main(["gen", "--n", "6", "--class", "B", "--seed", "3", "--out", str(path)]) == 0
    return path


def test_speedopt_writes_valid_solution(inst_file, tmp_path):
    out = tmp_path / "s.txt"
    assert main(["speedopt", "--instance", str(inst_file), "--route", "0,1,2,0", "--out", str(out)]) == 0
    sol = io.parse_solution(out)
    inst = io.parse_instance(inst_file)
    assert sol.routes[0].visits == (0, 1, 2, 0)
    assert [v for v in validate(sol, inst) if v.kind != "coverage"] == []


def test_speedopt_infeasible_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("POLLROUT-INSTANCE 1\nNAME bad\nFLEET 1 100\n"
                    "PARAMS w1=0.00101763908 w2=5.33605218e-05 w3=8.40323178e-09 w4=1.41223439e-07 "
                    "fc=1.4 fd=0.00222222222 vmin=5.5 vmax=25\n"
                    "NODES 2\n0 0 0 0 0 1000 0\n1 100000 0 1 0 100 0\nEND\n")
    assert main(["speedopt", "--instance", str(path), "--route", "0,1,0"]) == 1
    assert "infeasible" in capsys.readouterr().err


def test_verify(inst_file, capsys):
    assert main(["verify", "--instance", str(inst_file), "--route", "0,2,0", "--grid", "200"]) == 0
    assert "overall        PASS" in capsys.readouterr().out


def test_input_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "broken.txt"
    bad.write_text("POLLROUT-INSTANCE 1\nNAME x\nFLEET two 10\n")
    assert main(["speedopt", "--instance", str(bad), "--route", "0,1,0"]) == 2
    assert "line 3" in capsys.readouterr().err
    assert main(["verify", "--instance", str(tmp_path / "missing.txt"), "--route", "0,1,0"]) == 2


def test_solve_validate_and_sidecar(inst_file, tmp_path):
    sol, rep = tmp_path / "sol.txt", tmp_path / "rep.csv"
    args = ["solve", "--instance", str(inst_file), "--seeds", "2", "--iterations", "5",
            "--restarts", "2", "--out", str(sol), "--report", str(rep)]
    assert main(args) == 0
    meta = json.loads((tmp_path / "rep.csv.meta.json").read_text())
    assert meta["seeds"] == [0, 1] and len(meta["config_hash"]) == 12
    assert io.parse_report(rep)[0].mode == "free"
    assert main(["validate", "--instance", str(inst_file), "--solution", str(sol)]) == 0
    first = sol.read_text()
    assert main(args) == 0
    assert sol.read_text() == first


def test_validate_flags_tampered_solution(inst_file, tmp_path):
    sol = tmp_path / "sol.txt"
    main(["solve", "--instance", str(inst_file), "--seeds", "1", "--iterations", "3",
          "--restarts", "1", "--out", str(sol)])
    text = sol.read_text().replace("TOTAL ", "TOTAL 1")
    sol.write_text(text)
    assert main(["validate", "--instance", str(inst_file), "--solution", str(sol)]) == 1


def test_compare_and_bench(inst_file, tmp_path):
    out = tmp_path / "cmp.csv"
    common = ["--seeds", "1", "--iterations", "3", "--restarts", "1"]
    assert main(["compare", "--instance", str(inst_file), "--out", str(out)] + common) == 0
    rows = io.parse_report(out)
    assert [r.mode for r in rows] == ["fixed", "free", "fixed", "free"]
    assert rows[1].gap_pct is not None
    base = tmp_path / "bks.csv"
    base.write_text(f"instance,cost\n{rows[0].instance},{rows[0].best_cost}\n")
    out2 = tmp_path / "bench.csv"
    assert main(["bench", "--instance", str(inst_file), "--baseline", str(base),
                 "--mode", "fixed", "--out", str(out2)] + common) == 0
    assert io.parse_report(out2)[0].gap_pct == pytest.approx(0.0, abs=1e-4)


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "pollrout", "gen", "--n", "2"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("POLLROUT-INSTANCE 1")
