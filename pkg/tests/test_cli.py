import json
import subprocess
import sys

import numpy as np
import pytest

from bellplane import cli, families, measures, sampling
from bellplane.cli import main

from conftest import max_mixed, phi_plus


def write_state(path, mat):
    doc = [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat)]
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- state file parsing ---


def test_read_state_file_round_trip(tmp_path):
    mat = phi_plus() + 0.0j
    mat[0, 1] = 0.125 - 0.25j
    mat[1, 0] = 0.125 + 0.25j
    path = write_state(tmp_path / "state.json", mat)
    back = cli.read_state_file(path)
    assert back.dtype == np.complex128
    assert np.max(np.abs(back - mat)) == 0.0


def test_read_state_file_failures(tmp_path):
    with pytest.raises(cli._ParseFailure, match="cannot read"):
        cli.read_state_file(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(cli._ParseFailure, match="not valid JSON"):
        cli.read_state_file(str(bad))
    shape = tmp_path / "shape.json"
    shape.write_text(json.dumps([[1.0, 0.0], [0.0, 1.0]]), encoding="utf-8")
    with pytest.raises(cli._ParseFailure, match="expected shape 4x4x2"):
        cli.read_state_file(str(shape))
    ragged = tmp_path / "ragged.json"
    ragged.write_text(json.dumps([[1, 2], [3]]), encoding="utf-8")
    with pytest.raises(cli._ParseFailure, match="pairs"):
        cli.read_state_file(str(ragged))


# --- analyze ---


def test_analyze_bell_state(tmp_path, capsys):
    path = write_state(tmp_path / "phi.json", phi_plus())
    code, out, _ = run(capsys, ["analyze", path])
    assert code == 0
    report = json.loads(out)
    assert set(report) == {"s", "c", "m", "fidelity", "violates", "bell_max"}
    assert report["s"] == pytest.approx(0.0, abs=1e-12)
    assert report["c"] == pytest.approx(1.0, abs=1e-12)
    assert report["m"] == pytest.approx(2.0, abs=1e-12)
    assert report["fidelity"] == pytest.approx(1.0, abs=1e-12)
    assert report["violates"] is True
    assert report["bell_max"] == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-12)


def test_analyze_werner_state(tmp_path, capsys):
    path = write_state(tmp_path / "w.json", families.make_werner(0.8).mat)
    code, out, _ = run(capsys, ["analyze", path])
    assert code == 0
    report = json.loads(out)
    assert report["s"] == pytest.approx(0.36, abs=1e-10)
    assert report["c"] == pytest.approx(0.7, abs=1e-10)
    assert report["m"] == pytest.approx(1.28, abs=1e-10)
    assert report["violates"] is True


def test_analyze_non_violating_state(tmp_path, capsys):
    path = write_state(tmp_path / "mix.json", max_mixed())
    code, out, _ = run(capsys, ["analyze", path])
    assert code == 0
    report = json.loads(out)
    assert report["violates"] is False
    assert report["m"] == pytest.approx(0.0, abs=1e-12)
    assert report["bell_max"] == pytest.approx(0.0, abs=1e-12)


# --- settings ---


def test_settings_bell_state(tmp_path, capsys):
    path = write_state(tmp_path / "phi.json", phi_plus())
    code, out, _ = run(capsys, ["settings", path])
    assert code == 0
    report = json.loads(out)
    assert set(report) == {"a", "a_prime", "b", "b_prime", "value"}
    assert report["value"] == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-10)
    for key in ("a", "a_prime", "b", "b_prime"):
        vec = np.array(report[key])
        assert vec.shape == (3,)
        assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-10)


# --- exit codes ---


def test_exit_2_on_parse_failures(tmp_path, capsys):
    code, _, err = run(capsys, ["analyze", str(tmp_path / "none.json")])
    assert code == 2 and "error:" in err
    bad = tmp_path / "bad.json"
    bad.write_text("[[1,2,", encoding="utf-8")
    code, _, err = run(capsys, ["analyze", str(bad)])
    assert code == 2 and "error:" in err
    shape = tmp_path / "shape.json"
    shape.write_text("[1, 2, 3]", encoding="utf-8")
    code, _, err = run(capsys, ["analyze", str(shape)])
    assert code == 2 and "expected shape" in err


def test_exit_3_on_invalid_states(tmp_path, capsys):
    bad_trace = np.diag([0.5, 0.4, 0.0, 0.0]).astype(complex)
    code, _, err = run(
        capsys, ["analyze", write_state(tmp_path / "t.json", bad_trace)]
    )
    assert code == 3 and "invalid state:" in err and "trace" in err

    non_herm = np.eye(4, dtype=complex) / 4
    non_herm[0, 1] = 0.2
    code, _, err = run(
        capsys, ["analyze", write_state(tmp_path / "h.json", non_herm)]
    )
    assert code == 3 and "invalid state:" in err

    not_psd = np.diag([0.5, 0.6, 0.0, -0.1]).astype(complex)
    code, _, err = run(
        capsys, ["analyze", write_state(tmp_path / "p.json", not_psd)]
    )
    assert code == 3 and "invalid state:" in err


def test_exit_2_on_usage_errors(tmp_path, capsys):
    for argv in (
        ["sample", "--gen", "nope", "-n", "5"],
        ["sample", "--gen", "hs"],  # missing -n
        ["sample", "--gen", "hs", "-n", "0"],
        ["sample", "--gen", "hs", "-n", "5", "--epsilon", "1e-4"],
        ["scan", "--gen", "hs", "-n", "5", "--grid", "100"],
        ["scan", "--gen", "hs", "-n", "5", "--grid", "axb"],
        ["scan", "--gen", "hs", "-n", "5", "--threads", "0"],
        ["curves", "--points", "1"],
        [],
    ):
        with pytest.raises(SystemExit) as excinfo:
            main(argv)
        assert excinfo.value.code == 2
        capsys.readouterr()


# --- sample ---


def test_sample_output_matches_library(capsys):
    code, out, _ = run(capsys, ["sample", "--gen", "werner", "-n", "5", "--seed", "7"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "s,c,m"
    assert len(lines) == 6
    cfg = sampling.SamplerConfig(seed=7, generator="werner", count=5)
    block = next(iter(sampling.sample_blocks(cfg)))
    trips = measures.batch_triples(block)
    for line, (s, c, m) in zip(lines[1:], trips):
        assert line == f"{s:.9g},{c:.9g},{m:.9g}"


def test_sample_stdout_and_file_identical(tmp_path, capsys):
    argv = ["sample", "--gen", "e0", "-n", "64", "--seed", "3"]
    code, out, _ = run(capsys, argv)
    assert code == 0
    target = tmp_path / "rows.csv"
    code2 = main(argv + ["--out", str(target)])
    capsys.readouterr()
    assert code2 == 0
    assert target.read_text(encoding="utf-8") == out


def test_sample_deterministic(capsys):
    argv = ["sample", "--gen", "hs", "-n", "32", "--seed", "11"]
    _, first, _ = run(capsys, argv)
    _, second, _ = run(capsys, argv)
    assert first == second


def test_sample_boundary_accepts_epsilon(capsys):
    code, out, _ = run(
        capsys,
        ["sample", "--gen", "boundary", "-n", "4", "--seed", "1", "--epsilon", "1e-3"],
    )
    assert code == 0
    assert len(out.strip().split("\n")) == 5


# --- scan ---


def test_scan_csv_and_summary(tmp_path, capsys):
    target = tmp_path / "grid.csv"
    code = main(
        [
            "scan",
            "--gen",
            "e0",
            "-n",
            "500",
            "--seed",
            "3",
            "--grid",
            "20x20",
            "--out",
            str(target),
        ]
    )
    err = capsys.readouterr().err
    assert code == 0
    lines = target.read_text(encoding="utf-8").strip().split("\n")
    assert lines[0] == "s_center,c_center,class,n,n_violating,min_m,max_m"
    assert len(lines) == 1 + 20 * 20
    totals = {"V": 0, "NV": 0, "MIXED": 0, "EMPTY": 0}
    seen = 0
    for line in lines[1:]:
        s_c, c_c, cls, n, nv, mn, mx = line.split(",")
        totals[cls] += 1
        n, nv = int(n), int(nv)
        seen += n
        assert 0 <= nv <= n
        if cls == "EMPTY":
            assert n == 0 and mn == "" and mx == ""
        else:
            assert n > 0
            assert float(mn) <= float(mx)
            if cls == "V":
                assert float(mn) > 1.0
            if cls == "NV":
                assert float(mx) <= 1.0
    assert seen <= 500  # zero-concurrence samples never land on the plane
    assert f"V={totals['V']}" in err
    assert f"NV={totals['NV']}" in err
    assert f"MIXED={totals['MIXED']}" in err
    assert f"EMPTY={totals['EMPTY']}" in err


def test_scan_thread_count_does_not_change_output(tmp_path, capsys):
    base = ["scan", "--gen", "hs", "-n", "2048", "--seed", "5", "--grid", "50x50"]
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(base + ["--out", str(a), "--threads", "1"]) == 0
    assert main(base + ["--out", str(b), "--threads", "4"]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


# --- curves ---


def test_curves_table(capsys):
    code, out, _ = run(capsys, ["curves", "--points", "10"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "s,m_werner,m_mems,m_mvb,c_werner,c_mvb"
    assert len(lines) == 11
    first = [float(x) for x in lines[1].split(",")]
    assert first == pytest.approx([0.0, 2.0, 2.0, 2.0, 1.0, 1.0], abs=1e-12)
    last = [float(x) for x in lines[-1].split(",")]
    assert last[0] == pytest.approx(2.0 / 3.0, abs=1e-9)
    assert last[1] == pytest.approx(2.0 / 3.0, abs=1e-8)
    assert last[2] == pytest.approx(0.5, abs=1e-8)
    assert last[3] == pytest.approx(1.0, abs=1e-8)
    assert last[5] == pytest.approx(0.0, abs=1e-4)
    grid = np.linspace(0.0, families.CURVE_DOMAIN_MAX, 10)
    table = families.reference_curves(grid)
    for k, line in enumerate(lines[1:]):
        vals = [float(x) for x in line.split(",")]
        for j, col in enumerate(
            ("s", "m_werner", "m_mems", "m_mvb", "c_werner", "c_mvb")
        ):
            assert vals[j] == pytest.approx(table[col][k], abs=1e-8)


def test_curves_default_points(capsys):
    code, out, _ = run(capsys, ["curves"])
    assert code == 0
    assert len(out.strip().split("\n")) == 257


# --- module entry point ---


def test_module_invocation():
    proc = subprocess.run(
        [sys.executable, "-m", "bellplane", "curves", "--points", "4"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("s,m_werner,m_mems,m_mvb,c_werner,c_mvb\n")
    assert len(proc.stdout.strip().split("\n")) == 5
