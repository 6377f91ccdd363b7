import csv
import json
import math
import subprocess
import sys

import pytest

from collapse_kit.cli import main


def _rows(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


@pytest.fixture
def mk(tmp_path):
    path = tmp_path / "mk.json"
    assert main(["generate", "--family", "minkowski", "--n", "257", "--rmax", "2", "--out", str(path)]) == 0
    return path


@pytest.fixture
def pg(tmp_path):
    path = tmp_path / "pg.json"
    argv = ["generate", "--family", "pg", "--mass", "1", "--rmin", "3", "--rmax", "10", "--out", str(path)]
    assert main(argv) == 0
    return path


def test_minkowski_never_fires(mk, tmp_path):
    out = tmp_path / "c.csv"
    assert main(["criterion", str(mk), "--mode", "future", "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows and all(r["fires"] == "false" for r in rows)


def test_pg_jang_end_value(pg, tmp_path):
    out = tmp_path / "j.csv"
    assert main(["jang", str(pg), "--bc", "r1=3,matched", "--out", str(out)]) == 0
    rows = _rows(out)
    assert float(rows[-1]["r"]) == 10.0
    assert float(rows[-1]["v"]) == pytest.approx(-math.sqrt(0.2), abs=1e-6)
    assert {"r", "v", "s", "phi", "rho_s", "geroch_m", "a_t", "q_s"} <= set(rows[0])


def test_verify_minkowski(mk, tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["verify", str(mk), "--check", "geroch,de", "--refine", "3", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] and [c["check"] for c in doc["checks"]] == ["geroch", "de"]
    assert "geroch: pass" in capsys.readouterr().out


def test_verify_pg_oracle(pg, tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", str(pg), "--check", "pg-oracle", "--analytic", "--out", str(out)]) == 0
    check = json.loads(out.read_text())["checks"][0]
    assert check["status"] == "pass"
    a, b = check["tolerance_response"]["v_rel_error"]
    assert b < a


def test_analyze_and_energy_outputs(pg, tmp_path):
    j = tmp_path / "a.json"
    assert main(["analyze", str(pg), "--out-csv", str(tmp_path / "a.csv"), "--out-json", str(j)]) == 0
    doc = json.loads(j.read_text())
    assert "provenance" in doc and doc["provenance"]["conventions"]["J_sign"]
    e = tmp_path / "e.csv"
    assert main(["energy", str(pg), "--out", str(e)]) == 0
    assert all(abs(float(r["E"]) - 1.0) < 1e-10 for r in _rows(e))


def test_usage_errors(tmp_path, capsys):
    assert main(["generate", "--family", "kerr", "--out", str(tmp_path / "x.json")]) == 1
    assert "kerr" in capsys.readouterr().err
    assert main(["analyze", str(tmp_path / "missing.json")]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["criterion"])
    assert exc.value.code == 1


def test_criterion_rejects_annulus(pg, capsys):
    assert main(["criterion", str(pg)]) == 1
    assert "ball" in capsys.readouterr().err


def test_verification_failure_exit_code(tmp_path):
    # a corrupted sample breaks the convergence of the identity suites
    path = tmp_path / "bad.json"
    assert main(["generate", "--family", "blob", "--n", "65", "--out", str(path)]) == 0
    doc = json.loads(path.read_text())
    doc.pop("family")
    doc["fields"]["g11"][30] *= 1.01
    path.write_text(json.dumps(doc))
    assert main(["verify", str(path), "--check", "de", "--out", str(tmp_path / "v.json")]) == 2


def test_config_parity(tmp_path):
    flags = tmp_path / "a.json"
    conf = tmp_path / "b.json"
    cfg = tmp_path / "gen.toml"
    cfg.write_text(f'[generate]\nfamily = "uniform_collapse"\nk0 = 1.5\nn = 65\nout = "{conf}"\n')
    assert main(["generate", "--family", "uniform_collapse", "--k0", "1.5", "--n", "65", "--out", str(flags)]) == 0
    assert main(["generate", "--config", str(cfg)]) == 0
    assert flags.read_bytes() == conf.read_bytes()
    # flags win over the file
    assert main(["generate", "--config", str(cfg), "--n", "33"]) == 0
    assert len(json.loads(conf.read_text())["grid"]) == 33


def test_config_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text('[generate]\nfamliy = "pg"\n')
    assert main(["generate", "--config", str(cfg)]) == 1
    assert "famliy" in capsys.readouterr().err


def test_repeated_runs_identical_bytes(mk, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["criterion", str(mk), "--mode", "both", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_cli(tmp_path):
    out = tmp_path / "s.json"
    assert main(["sweep", "--trials", "8", "--n", "65", "--seed", "3", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["violations"] == 0 and doc["trials"] == 8


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "collapse_kit", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "collapse-kit" in res.stdout
