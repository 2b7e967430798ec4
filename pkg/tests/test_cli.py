import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from specroute.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_body(text):
    return list(csv.DictReader(io.StringIO("".join(l + "\n" for l in text.splitlines() if not l.startswith("#")))))


@pytest.mark.parametrize("L,d,code", [(4, 8, 0), (1, 4, 0), (4, 3, 2), (7, 8, 3)])
def test_validate_cnot_exit_codes(capsys, L, d, code):
    got, out, err = run(capsys, "validate-cnot", "--L", str(L), "--d", str(d))
    assert got == code
    if code == 0:
        doc = json.loads(out)
        assert doc["passed"] and doc["max_infidelity"] <= 1e-12
        assert doc["header"]["config"] == {"L": L, "d": d, "K": 1}
    else:
        assert err.startswith("error:")


def test_depth_sweep_slopes(capsys):
    code, out, _ = run(capsys, "depth-sweep", "--L", "2", "20")
    assert code == 0
    rows = csv_body(out)
    L = np.array([int(r["L"]) for r in rows], dtype=float)
    routed = np.array([int(r["routed_depth"]) for r in rows], dtype=float)
    swap = np.array([int(r["swap_depth"]) for r in rows], dtype=float)
    assert (rows[0]["routed_depth"], rows[0]["swap_depth"]) == ("5", "6")
    assert np.polyfit(L, routed, 1)[0] == pytest.approx(2.0, abs=1e-9)
    assert np.polyfit(L, swap, 1)[0] == pytest.approx(3.0, abs=1e-9)


def test_congestion_validate(capsys):
    code, out, _ = run(capsys, "congestion-validate", "--n", "1", "--k-buses", "1")
    doc = json.loads(out)
    assert code == 0 and doc["graphs_checked"] == 1 and doc["discrepancies"] == 0
    code, out, _ = run(capsys, "congestion-validate", "--n", "3", "--k-buses", "2")
    doc = json.loads(out)
    assert doc["graphs_per_n"]["3"] == 8 and doc["discrepancies"] == 0
    assert run(capsys, "congestion-validate", "--n", "6")[0] == 2


def test_bench_mirror_and_qft(capsys):
    code, out, _ = run(capsys, "bench", "--family", "mirror", "--topology", "line", "--n", "8", "--seed", "5")
    s = json.loads(out)["summary"]
    assert code == 0
    assert (s["mean_swap_transport"], s["mean_routed_transport"], s["ratio"], s["mean_chi"], s["mean_R2"]) == (48.0, 36.0, 0.75, 4.0, 2.0)
    _, out, _ = run(capsys, "bench", "--family", "qft", "--n", "8", "--seed", "0")
    assert 0.75 <= json.loads(out)["summary"]["ratio"] <= 0.81


def test_bench_rejects_unknown_topology():
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--family", "qft", "--topology", "torus"])
    assert exc.value.code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["bench", "--family", "qaoa", "--topology", "grid", "--seeds", "2", "--format", "csv"],
        ["noise-sweep", "--L", "2", "3", "--trajectories", "20", "--seed", "4"],
        ["threshold-scan", "--L", "2", "--durations", "1.0", "0.4", "--multipliers", "1", "3", "--trajectories", "20"],
        ["congestion-validate", "--n", "3"],
    ],
)
def test_outputs_byte_identical(tmp_path, capsys, argv):
    a, b = tmp_path / "a.out", tmp_path / "b.out"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert "config_hash" in text and "version" in text and "seed" in text


def test_threshold_scan_columns(capsys):
    code, out, _ = run(capsys, "threshold-scan", "--L", "2", "--durations", "0.5", "--multipliers", "2", "--trajectories", "10")
    rows = csv_body(out)
    assert code == 0 and list(rows[0]) == ["duration", "multiplier", "win", "stderr"]


def test_repro_subset(capsys):
    code, out, err = run(capsys, "repro", "--only", "2", "3")
    doc = json.loads(out)
    assert code == 0 and doc["all_passed"]
    assert "[PASS] criterion  2" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "specroute", "depth-sweep", "--L", "2", "3"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-2:] == ["2,5,6", "3,7,9"]
