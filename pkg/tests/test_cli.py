import json
import math
import subprocess
import sys

import numpy as np
import pytest

from coopifc import gdof
from coopifc.cli import main, parse_grid, reproduce_fig


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def decoupled_file(tmp_path):
    s = 15.0
    p = tmp_path / "dec.json"
    p.write_text(json.dumps({
        "K": 2,
        "H": [[0, 0, 0, 0], [0, 0, 0, 0], [[math.sqrt(s), 0], 0, 0, 0], [0, math.sqrt(s), 0, 0]],
        "P": [1, 1, 0, 0],
    }))
    return p


def test_parse_grid():
    assert parse_grid("0:1:0.25") == [0, 0.25, 0.5, 0.75, 1.0]


def test_eval_bounds_decoupled(decoupled_file, capsys):
    code, out, _ = run(["eval-bounds", "--channel", str(decoupled_file), "--restarts", "2"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["sum_rate"]["headline_bits"] == pytest.approx(2 * math.log2(16), abs=1e-6)
    assert len(rep["bounds"]) == 10


def test_eval_bounds_symmetric(tmp_path, capsys):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"snr": 1e8, "alpha": 0.5}))
    code, out, _ = run(["eval-bounds", "--sym", str(p), "--mode", "no-coop", "--restarts", "4"], capsys)
    assert code == 0
    assert 1.45 <= json.loads(out)["sum_rate"]["normalized"] <= 1.55


def test_eval_bounds_reproducible(decoupled_file, capsys):
    argv = ["eval-bounds", "--channel", str(decoupled_file), "--restarts", "2", "--seed", "3",
            "--bounds", "thm2a,cut_sum"]
    assert run(argv, capsys)[1] == run(argv, capsys)[1]


def test_eval_bounds_malformed(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    code, _, err = run(["eval-bounds", "--channel", str(p)], capsys)
    assert code == 2 and "parse error" in err


def test_eval_bounds_invalid_channel(tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"K": 2, "H": np.eye(4).tolist(), "P": [1, 1, 1, 1]}))
    code, _, err = run(["eval-bounds", "--channel", str(p)], capsys)
    assert code == 2
    assert err.count("self-gain nonzero") == 4


def test_gdof_sweep_csv(capsys):
    code, out, _ = run(["gdof-sweep", "--mode", "no-coop", "--beta", "0", "--grid", "0:3:0.5"], capsys)
    rows = out.strip().split("\n")[1:]
    assert code == 0 and len(rows) == 7
    assert [float(r.split(",")[3]) for r in rows] == [gdof.w_curve(a) for a in np.arange(0, 3.01, 0.5)]


def test_gdof_sweep_ultimate(capsys):
    _, out, _ = run(["gdof-sweep", "--mode", "ultimate", "--grid", "0:3:0.25"], capsys)
    for r in out.strip().split("\n")[1:]:
        a, two_d = float(r.split(",")[0]), float(r.split(",")[4])
        assert two_d == (1.0 if a == 1 else 2 * max(1, a))


def test_gdof_sweep_bad_grid(capsys):
    code, _, err = run(["gdof-sweep", "--mode", "no-coop", "--grid", "3:0:0.5"], capsys)
    assert code == 2 and "grid not increasing" in err


def test_gdof_sweep_svg(tmp_path, capsys):
    out = tmp_path / "c.svg"
    assert run(["gdof-sweep", "--mode", "output-feedback", "--format", "svg",
                "--out", str(out)], capsys)[0] == 0
    text = out.read_text()
    assert text.startswith("<svg") and "<polyline" in text


def test_reproduce_fig_examples():
    curves = {c.mode.tag.value: c for c in reproduce_fig(2)}
    at = lambda m, a: next(p for p in curves[m].points if p.alpha == a)
    assert at("ultimate", 1.0).two_d == 1 and at("output-feedback", 1.0).two_d == 1
    c3 = {c.mode.tag.value: c for c in reproduce_fig(3)}
    assert c3["rate-limited-feedback"].points[0].two_d == 2
    p = next(p for p in curves["no-coop"].points if abs(p.alpha - 2 / 3) < 0.003)
    assert p.two_d == pytest.approx(2 * gdof.w_curve(p.alpha))
    assert gdof.w_curve(2 / 3) * 2 == pytest.approx(4 / 3)


def test_reproduce_fig_files(tmp_path, capsys):
    assert run(["reproduce-fig", "--which", "3", "--out", str(tmp_path)], capsys)[0] == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert len(files) == 7 and "fig3.svg" in files


def test_ksum_listing(capsys):
    code, out, _ = run(["ksum", "--K", "4", "--subset", "1,2,3"], capsys)
    assert code == 0
    assert out.splitlines()[1] == "I(X2,X3 ; Y6,Y1 | X1,X4,Y5,Y4)"


def test_ksum_with_channel(decoupled_file, capsys):
    code, out, _ = run(["ksum", "--K", "2", "--subset", "1,2", "--channel", str(decoupled_file)], capsys)
    assert code == 0
    value = float(next(line for line in out.splitlines() if line.startswith("value_bits")).split("=")[1])
    assert value == pytest.approx(2 * math.log2(16), abs=1e-9)


def test_ksum_json(capsys):
    code, out, _ = run(["ksum", "--K", "3", "--subset", "1,2", "--order", "2,1", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["S"] == [2, 1]


def test_ksum_out_of_range(capsys):
    code, _, err = run(["ksum", "--K", "4", "--subset", "1,5"], capsys)
    assert code == 2 and "user index out of range" in err


def test_ksum_bad_order(capsys):
    assert run(["ksum", "--K", "4", "--subset", "1,2", "--order", "1,3"], capsys)[0] == 2


def test_degenerate_exit_code(tmp_path, capsys):
    # Z3 = Z4 exactly: Y4 is a function of (X1, X2, Y3), so h(Y4,Y1 | X1,X2,Y3) diverges
    H = np.zeros((4, 4))
    H[2, 0] = H[3, 1] = H[2, 1] = H[3, 0] = 1
    Sz = np.eye(4)
    Sz[2, 3] = Sz[3, 2] = 1.0
    p = tmp_path / "d.json"
    p.write_text(json.dumps({"K": 2, "H": H.tolist(), "P": [1, 1, 0, 0], "SigmaZ": Sz.tolist()}))
    code, _, err = run(["ksum", "--K", "2", "--subset", "1,2", "--channel", str(p)], capsys)
    assert code == 3 and "degenera" in err


def test_usage_error_exit():
    r = subprocess.run([sys.executable, "-m", "coopifc.cli", "gdof-sweep", "--format", "pdf"],
                       capture_output=True, text=True)
    assert r.returncode == 2
