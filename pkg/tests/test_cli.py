import json
import math
import os
import subprocess
import sys

import pytest

from gouq.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def js(text):
    return json.loads(text)


def test_classify_r_gt_pq(capsys):
    code, out, _ = run(["classify", "--c", "2", "--q", "0.4", "--r", "0.2"], capsys)
    body = js(out)
    assert code == 0
    assert body["id_mu"] == "No" and body["id_rho"] == "No"
    assert set(body) >= {"id_rho", "id_mu", "id_sym", "continuity", "dim_bound", "reasons"}


def test_classify_pisot(capsys):
    _, out, _ = run(["classify", "--c", "3", "--q", "0.5", "--r", "0"], capsys)
    body = js(out)
    assert body["continuity"] == "ContinuousSingular"
    assert body["reasons"]["continuity"]["rule"] == "pisot"


def test_classify_small_q(capsys):
    _, out, _ = run(["classify", "--c", "2.718281828", "--q", "0.3", "--r", "0"], capsys)
    body = js(out)
    assert body["continuity"] == "ContinuousSingular"
    assert "small-q" in body["reasons"]["continuity"]["reasons"]


def test_classify_with_poly_and_rates(capsys):
    _, out, _ = run(["classify", "--c", "1.618033988749895", "--pisot-poly", "1,-1,-1",
                     "--u", "1", "--v", "2", "--w", "0"], capsys)
    body = js(out)
    assert body["continuity"] == "ContinuousSingular"
    assert body["meta"]["params"]["c"]["poly"] == [1, -1, -1]


def test_rational_c(capsys):
    _, out, _ = run(["classify", "--c-num", "5", "--c-den", "2", "--q", "0.5", "--r", "0"], capsys)
    assert js(out)["meta"]["params"]["c"]["kind"] == "rational"


@pytest.mark.parametrize("argv", [
    ["classify", "--c", "2", "--q", "1.2", "--r", "0"],
    ["classify", "--c", "0.5", "--q", "0.5", "--r", "0"],
    ["classify", "--c", "2", "--q", "0.5"],
    ["classify", "--c", "2", "--q", "0", "--r", "1"],
    ["cf", "--c", "2", "--q", "0.5", "--r", "0", "--zmin", "3", "--zmax", "1"],
    ["cf", "--c", "2", "--q", "0.5", "--r", "0", "--zmax", "inf"],
    ["levy", "--c", "2", "--p", "0", "--q", "0.5"],
    ["tevolution", "--c", "3", "--q", "0.4", "--r", "0.2"],
])
def test_invalid_exits_2(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2
    assert out == ""
    assert err.startswith("gouq ")


def test_invalid_leaves_no_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, _, _ = run(["classify", "--c", "2", "--q", "1.5", "--r", "0", "--out", str(target)], capsys)
    assert code == 2
    assert not target.exists()
    assert list(tmp_path.iterdir()) == []


def test_cf_grid(capsys):
    _, out, _ = run(["cf", "--c", "2", "--q", "0.5", "--r", "0.25", "--zmin", "-5", "--zmax", "5",
                     "--steps", "11"], capsys)
    lines = out.strip().split("\n")
    assert lines[0].startswith("# {")
    assert lines[1] == "z,re,im,abs"
    rows = [list(map(float, ln.split(","))) for ln in lines[2:]]
    assert len(rows) == 11
    mid = rows[5]
    assert mid[0] == 0.0 and mid[3] == pytest.approx(1.0)
    for a, b in zip(rows, rows[::-1]):
        assert a[1] == pytest.approx(b[1], abs=1e-15) and a[2] == pytest.approx(-b[2], abs=1e-15)


def test_cf_pisot_non_decay(capsys):
    zs = [2 * math.pi * 2 ** k for k in (8, 9)]
    _, out, _ = run(["cf", "--c", "2", "--q", "0.5", "--r", "0", "--zmin", str(zs[0]),
                     "--zmax", str(zs[1]), "--steps", "2"], capsys)
    mods = [float(ln.split(",")[3]) for ln in out.strip().split("\n")[2:]]
    assert min(mods) > 0.05


def test_katti(capsys):
    _, out, _ = run(["katti", "--q", "0.5", "--r", "0.2", "--p", "0.3", "--n", "10"], capsys)
    body = js(out)
    assert body["first_negative_index"] == 2
    assert len(body["q"]) == 10
    assert body["meta"]["params"]["c"] is None


def test_entropy(capsys):
    _, out, _ = run(["entropy", "--q", "0.5", "--r", "0"], capsys)
    assert js(out)["entropy"] == pytest.approx(2 * math.log(2), abs=1e-12)
    _, out, _ = run(["entropy", "--q", "0.5", "--r", "0", "--t", "0.5"], capsys)
    body = js(out)
    assert body["power_entropy"] <= body["power_entropy_bound"]


def test_tevolution(capsys):
    _, out, _ = run(["tevolution", "--c", "3", "--q", "0.5", "--r", "0"], capsys)
    body = js(out)
    assert 0 < body["t_low"] < 1
    assert body["rule"] == "entropy-bisection" and len(body["trace"]) > 5
    _, out, _ = run(["tevolution", "--c", "3", "--q", "0.5", "--r", "0", "--pisot-poly", "1,-3"], capsys)
    assert js(out)["t_low"] == "inf"


def test_levy(capsys):
    _, out, _ = run(["levy", "--c", "2", "--p", "0.3", "--q", "0.5", "--r", "0.2", "--nmax", "20",
                     "--mmax", "100", "--location", "2"], capsys)
    body = js(out)
    assert body["mode"] == "exact-rational"
    assert body["certificate"]["certified_negative"] is True


def test_pisot(capsys):
    _, out, _ = run(["pisot", "--c", "1.324717957244746", "--pisot-poly", "1,0,-1,-1"], capsys)
    body = js(out)
    assert body["pisot"] is True and all(r["ok"] for r in body["trace_check"])
    _, out, _ = run(["pisot", "--c", "1.4142135623730951", "--pisot-poly", "1,0,-2"], capsys)
    assert js(out)["pisot"] is False
    _, out, _ = run(["pisot", "--c", "2"], capsys)
    assert js(out)["pisot"] is True


def test_sample_reproducible_with_env_seed(capsys, monkeypatch):
    argv = ["sample", "--c", "2", "--q", "0.5", "--r", "0.25", "--n", "50"]
    monkeypatch.setenv("GOUQ_SEED", "17")
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    _, c, _ = run(argv + ["--seed", "18"], capsys)
    assert a == b and a != c
    assert '"seed": 17' in a.split("\n")[0]
    assert len(a.strip().split("\n")) == 52


def test_simulate_path_and_reports(capsys, tmp_path):
    target = tmp_path / "path.csv"
    code, _, _ = run(["simulate", "--c", "2", "--u", "1", "--v", "2", "--w", "1", "--horizon", "5",
                      "--seed", "3", "--out", str(target)], capsys)
    text = target.read_text()
    assert code == 0 and text.split("\n")[1] == "time,mark,N,Y,integral"
    code, out, _ = run(["simulate", "--c", "2", "--u", "3", "--v", "5", "--w", "2", "--validate",
                        "innovation", "--n", "200000", "--seed", "1"], capsys)
    assert code == 0 and js(out)["report"]["passed"] is True


def test_simulate_failure_exit_3(capsys):
    # 50 samples cannot reach TV < 0.005
    code, out, _ = run(["simulate", "--c", "2", "--u", "3", "--v", "5", "--w", "2", "--validate",
                        "innovation", "--n", "50", "--seed", "1"], capsys)
    assert code == 3 and js(out)["report"]["passed"] is False


def test_outputs_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        run(["sample", "--c", "3", "--q", "0.4", "--r", "0.1", "--n", "100", "--seed", "2", "--out", str(path)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "gouq", "entropy", "--q", "0.5", "--r", "0"],
                         capture_output=True, text=True, env=dict(os.environ))
    assert res.returncode == 0
    assert "1.386294" in res.stdout
