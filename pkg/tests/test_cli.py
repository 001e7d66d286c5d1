import json
import subprocess
import sys

import numpy as np
import pytest

from detpath import io
from detpath.cli import main


@pytest.fixture
def mats(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    io.write_matrix(np.eye(2), a)
    io.write_matrix(-np.eye(2) + 1e-2 * np.diag([1.0, -1.0]), b)
    return str(a), str(b)


def test_path_command(mats, tmp_path):
    out = tmp_path / "cert.json"
    assert main(["path", "--n", "2", "--a", mats[0], "--b", mats[1], "--eps", "1e-3", "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["feasible"] and rec["ratio"] >= 1 and rec["n"] == 2
    assert set(rec) >= {"endpoints", "nodes", "d_ext", "length", "min_det", "min_margin", "eps_used", "seed"}


def test_split_and_project(mats, capsys):
    main(["split", "--n", "2", "--a", mats[0], "--b=-1,0;0,-1"])
    rec = json.loads(capsys.readouterr().out)
    assert rec["signs"] == ["+", "+"] and rec["crossings"] == pytest.approx([0.5])
    main(["project", "--n", "2", "--a", "3,0;0,1", "--rank", "1"])
    rec = json.loads(capsys.readouterr().out)
    assert rec["matrix"] == [[3.0, 0.0], [0.0, 0.0]] and rec["distance"] == pytest.approx(1.0)


def test_cusp_command(tmp_path):
    out = tmp_path / "cusp.csv"
    main(["cusp-demo", "--h-list", "0.4,0.2", "--csv", str(out)])
    lines = out.read_text().splitlines()
    assert lines[0] == "h,resolution,d_ext,d_int,ratio" and len(lines) == 3


def test_estimate_deterministic(tmp_path):
    outs = []
    for jobs in ("1", "2"):
        j, c = tmp_path / f"o{jobs}.json", tmp_path / f"o{jobs}.csv"
        main(["estimate-c", "--n", "2", "--samples", "30", "--seed", "77", "--eps", "1e-3",
              "--out", str(j), "--csv", str(c), "--jobs", jobs])
        outs.append((j.read_bytes(), c.read_bytes()))
    assert outs[0] == outs[1]
    rec = json.loads(outs[0][0])
    assert rec["samples"] == 30 and rec["seed"] == 77


def test_errors_exit_2(mats):
    with pytest.raises(SystemExit) as exc:
        main(["path", "--n", "3", "--a", mats[0], "--b", mats[1]])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["estimate-c", "--n", "2", "--samples", "5", "--seed", "-1"])


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "detpath", "project", "--n", "1", "--a", "2", "--rank", "0"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["distance"] == 2.0
