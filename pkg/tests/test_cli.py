import json
import math

import numpy as np
import pytest

from collisim.cli import main


def _read(path):
    return path.read_text()


def _rows(csv_text):
    lines = csv_text.strip().splitlines()
    assert lines[0].startswith("# config: ")
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return header, rows


def test_thermalize_csv(tmp_path):
    out = tmp_path / "t.csv"
    rc = main(
        ["thermalize", "--phi", "0.4", "--theta", "0.6", "--p", "0.8",
         "--steps", "40", "--out", str(out)]
    )
    assert rc == 0
    header, rows = _rows(_read(out))
    assert header[:2] == ["n", "d"]
    assert len(rows) == 41
    # analytic iteration equals the closed-form columns
    d_col = header.index("d")
    cf_col = header.index("closed_form_d")
    for row in rows:
        assert float(row[d_col]) == pytest.approx(float(row[cf_col]), abs=1e-12)
    # converges toward p
    assert float(rows[-1][d_col]) == pytest.approx(0.8, abs=1e-2)


def test_thermalize_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["thermalize", "--phi", "0.3", "--p", "0.6", "--steps", "10", "--seed", "5"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_rates_json(tmp_path):
    out = tmp_path / "r.json"
    rc = main(
        ["rates", "--phi", "0.05", "--theta", "0.0", "--p", "0.5",
         "--tau0", "1e-3", "--steps", "400", "--out", str(out)]
    )
    assert rc == 0
    data = json.loads(_read(out))
    assert data["T1"] == pytest.approx(1e-3 / 0.05**2)
    assert data["bound_saturated"] is True
    assert data["Tpf"] == "inf"
    assert data["fitted_T1"] == pytest.approx(data["T1"], rel=0.01)


def test_fd_csv_identity(tmp_path):
    out = tmp_path / "fd.csv"
    rc = main(
        ["fd", "--phi", "0.3", "--beta", "0.7", "--energy", "1.2",
         "--steps", "15", "--out", str(out)]
    )
    assert rc == 0
    header, rows = _rows(_read(out))
    i_sim, i_closed = header.index("F_simulated"), header.index("F_closed")
    for row in rows:
        assert float(row[i_sim]) == pytest.approx(float(row[i_closed]), abs=1e-12)


def test_fd_custom_observable_via_config(tmp_path):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"observable": [[0, [0, -1]], [[0, 1], 0]], "steps": 5}))
    out = tmp_path / "fd.csv"
    rc = main(["fd", "--phi", "0.3", "--p", "0.7", "--config", str(cfgfile), "--out", str(out)])
    assert rc == 0
    _, rows = _rows(_read(out))
    # sigma_y observable is transverse: F identically zero
    assert all(abs(float(r[1])) < 1e-12 for r in rows)


def test_entangle_sweep(tmp_path):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"phi_values": [0.4], "p_values": [0.9], "theta_values": [0.3]}))
    out = tmp_path / "e.csv"
    rc = main(["entangle", "--config", str(cfgfile), "--out", str(out)])
    assert rc == 0
    header, rows = _rows(_read(out))
    assert len(rows) == 1
    row = dict(zip(header, rows[0]))
    assert float(row["power_numeric"]) == pytest.approx(float(row["power_closed"]), abs=1e-6)
    assert float(row["power_closed"]) == pytest.approx(0.9 * math.sin(0.8))


def test_irreversibility_report(tmp_path):
    out = tmp_path / "ir.json"
    rc = main(
        ["irreversibility", "--phi", "0.8", "--p", "0.75", "--steps", "4",
         "--trials", "20", "--seed", "3", "--out", str(out)]
    )
    assert rc == 0
    data = json.loads(_read(out))
    assert data["correct_fidelity"] >= 1 - 1e-10
    assert data["wrong_order"]["mean"] < data["correct_fidelity"]
    assert data["margin"] > 0
    assert data["wrong_order"]["count"] == math.factorial(4) - 1


def test_classify(tmp_path):
    out = tmp_path / "cl.json"
    rc = main(
        ["classify", "--phi", "0.5", "--theta", "0.3", "--alpha", "0.1",
         "--phi2", "0.5", "--theta2", str(0.3 + math.pi), "--alpha2", "2.2",
         "--out", str(out)]
    )
    assert rc == 0
    data = json.loads(_read(out))
    assert data["lu_equivalent"] is True
    assert data["dynamically_equivalent"] is True
    assert data["canonical_params"]["machine1"]["mu_x"] == pytest.approx(0.25)
    assert data["canonical_params"]["machine1"]["mu_z"] == pytest.approx(
        data["canonical_params"]["machine2"]["mu_z"], abs=1e-12
    )

    rc = main(
        ["classify", "--phi", "0.5", "--theta", "0.3",
         "--phi2", "0.35", "--theta2", "0.3", "--out", str(out)]
    )
    assert rc == 0
    assert json.loads(_read(out))["lu_equivalent"] is False


def test_classify_flags_partial_swap(tmp_path):
    out = tmp_path / "cl.json"
    rc = main(
        ["classify", "--phi", "0.6", "--theta", "-0.6",
         "--phi2", "0.6", "--theta2", "0.7", "--out", str(out)]
    )
    assert rc == 0
    data = json.loads(_read(out))
    assert data["basis_independent"]["machine1"] is True
    assert data["basis_independent"]["machine2"] is False


def test_verify_passes(capsys):
    assert main(["verify", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 3
    assert "FAIL" not in out


def test_config_precedence(tmp_path):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"phi": 0.2, "p": 0.9, "steps": 5}))
    out = tmp_path / "t.csv"
    # flag --phi overrides the file; file's p and steps apply
    rc = main(["thermalize", "--phi", "0.5", "--config", str(cfgfile), "--out", str(out)])
    assert rc == 0
    cfg = json.loads(_read(out).splitlines()[0][len("# config: "):])
    assert cfg["phi"] == 0.5
    assert cfg["p"] == 0.9
    assert cfg["steps"] == 5


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"phii": 0.2}))
    assert main(["thermalize", "--config", str(cfgfile)]) == 1
    assert "unknown config keys" in capsys.readouterr().err


def test_conflicting_bath_inputs_rejected(capsys):
    assert main(["thermalize", "--p", "0.7", "--beta", "1.0", "--energy", "1.0"]) == 1
    assert "either p or" in capsys.readouterr().err


def test_validation_errors(capsys):
    assert main(["thermalize", "--steps", "-3"]) == 1
    assert main(["thermalize", "--tau0", "0"]) == 1
    assert main(["classify", "--phi", "0.3"]) == 1  # second machine missing
    assert main(["thermalize", "--phi", "9.9"]) == 1  # out of range
    assert main(["nonsense"]) == 1
    capsys.readouterr()


def test_degrees_flag(tmp_path):
    out_deg, out_rad = tmp_path / "d.json", tmp_path / "r.json"
    assert main(["rates", "--phi", "9", "--theta", "0", "--p", "0.5", "--degrees",
                 "--steps", "50", "--out", str(out_deg)]) == 0
    assert main(["rates", "--phi", str(math.radians(9)), "--theta", "0", "--p", "0.5",
                 "--steps", "50", "--out", str(out_rad)]) == 0
    assert json.loads(_read(out_deg))["T1"] == pytest.approx(json.loads(_read(out_rad))["T1"])


def test_json_format_thermalize(tmp_path):
    out = tmp_path / "t.json"
    rc = main(["thermalize", "--phi", "0.3", "--p", "0.6", "--steps", "3",
               "--format", "json", "--out", str(out)])
    assert rc == 0
    data = json.loads(_read(out))
    assert data["columns"][0] == "n"
    assert len(data["rows"]) == 4
    assert data["config"]["phi"] == 0.3


def test_stdout_output(capsys):
    assert main(["thermalize", "--phi", "0.3", "--p", "0.6", "--steps", "2"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# config: ")
    assert len(out.strip().splitlines()) == 5
