"""End-to-end tests of the command-line interface, run in process."""

import json

import pytest

from winguide.cli import main

LAMBDA1_A1_D2 = 0.934889771227259
U_C_AT_HALF = -0.5274006716845234


@pytest.fixture()
def single_cfg(tmp_path):
    path = tmp_path / "single.json"
    path.write_text(json.dumps({"d": 2.0, "windows": [{"center": 0.0, "half_width": 1.0}]}))
    return str(path)


@pytest.fixture()
def double_cfg(tmp_path):
    path = tmp_path / "double.json"
    path.write_text(
        json.dumps(
            {
                "case": "double",
                "a_minus": 1.0,
                "a_plus": 1.0,
                "d": 2.0,
                "l_values": [6.0, 7.0],
            }
        )
    )
    return str(path)


def _strict_loads(text: str):
    def reject(token):
        raise AssertionError(f"non-strict JSON token {token!r} in CLI output")

    return json.loads(text, parse_constant=reject)


def test_modes_json_stdout(single_cfg, capsys):
    assert main(["modes", single_cfg]) == 0
    payload = _strict_loads(capsys.readouterr().out)
    assert payload["schema_version"] == 1
    assert len(payload["modes"]) == 1
    rec = payload["modes"][0]
    assert rec["lambda"] == pytest.approx(LAMBDA1_A1_D2, abs=1e-12)
    assert rec["parity"] == "even"
    assert rec["index"] == 1
    assert rec["source"] == "spectral"


def test_modes_csv(single_cfg, capsys):
    assert main(["modes", single_cfg, "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "index,lambda,parity,c,source"
    assert len(lines) == 2
    cells = lines[1].split(",")
    assert cells[0] == "1"
    # shortest round-trip float formatting must reproduce the value exactly
    assert float(cells[1]) == pytest.approx(LAMBDA1_A1_D2, abs=1e-12)
    assert cells[2] == "even"
    assert cells[4] == "spectral"


def test_modes_out_file(single_cfg, tmp_path, capsys):
    out = tmp_path / "modes.json"
    assert main(["modes", single_cfg, "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    payload = _strict_loads(out.read_text())
    assert payload["modes"][0]["lambda"] == pytest.approx(LAMBDA1_A1_D2, abs=1e-12)


def test_coeff_c_frozen_value(single_cfg, capsys):
    assert main(["coeff-c", single_cfg, "--lambda", "0.5"]) == 0
    payload = _strict_loads(capsys.readouterr().out)
    assert payload["c"] == pytest.approx(U_C_AT_HALF, abs=1e-10)
    assert payload["lambda"] == 0.5
    assert payload["half_width"] == 1.0
    assert payload["d"] == 2.0
    assert payload["energy_residual"] <= 1e-6


def test_coeff_c_rejects_two_windows(tmp_path, capsys):
    path = tmp_path / "two.json"
    path.write_text(
        json.dumps(
            {
                "d": 2.0,
                "windows": [
                    {"center": -4.0, "half_width": 1.0},
                    {"center": 4.0, "half_width": 1.0},
                ],
            }
        )
    )
    assert main(["coeff-c", str(path), "--lambda", "0.5"]) == 2
    assert "error:" in capsys.readouterr().err


def test_coeff_c_exit_codes(single_cfg, capsys):
    # threshold violation is a validation problem
    assert main(["coeff-c", single_cfg, "--lambda", "1.5"]) == 2
    # driving exactly at an eigenvalue hits the resolvent pole
    assert main(["coeff-c", single_cfg, "--lambda", repr(LAMBDA1_A1_D2)]) == 3
    err = capsys.readouterr().err
    assert "numerical failure" in err


def test_bad_config_exit_two(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    assert main(["modes", missing]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["modes", str(bad)]) == 2
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"d": 2.0, "windows": [], "what": 1}))
    assert main(["modes", str(unknown)]) == 2
    capsys.readouterr()


def test_sweep_csv_stdout(double_cfg, capsys):
    assert main(["sweep", double_cfg, "--l", "6"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("l,index,lambda,lambda_star,delta,")
    assert len(lines) == 3
    for line in lines[1:]:
        assert line.startswith("6.0,")
    # decimal separator is '.', field separator is ','
    assert ";" not in lines[1]


def test_sweep_bad_l_list(double_cfg, capsys):
    assert main(["sweep", double_cfg, "--l", "6,oops"]) == 2
    assert main(["sweep", double_cfg, "--l", ","]) == 2
    capsys.readouterr()


def test_oracle_json_strict(single_cfg, capsys):
    assert main(
        ["oracle", single_cfg, "--h", "0.1", "--L", "11", "--count", "1", "--levels", "1"]
    ) == 0
    payload = _strict_loads(capsys.readouterr().out)
    assert payload["schema_version"] == 1
    rec = payload["records"][0]
    assert rec["source"] == "fd_oracle"
    assert rec["h"] == 0.1
    assert rec["L"] == 11.0
    assert abs(rec["lambda"] - LAMBDA1_A1_D2) < 1e-2
    # a single level has no error estimate; infinity must not leak into JSON
    assert rec["error_estimate"] is None
    assert payload["diagnostics"]["perron"]["ok"] is True


def test_oracle_grid_validation(single_cfg, capsys):
    assert main(["oracle", single_cfg, "--h", "0.2", "--L", "11"]) == 2
    assert main(["oracle", single_cfg, "--h", "0.1", "--L", "5"]) == 2
    capsys.readouterr()


def test_verify_failing_exit_four(double_cfg, tmp_path, capsys):
    # two separations cannot support a three-point fit, so the report is
    # still written but carries failing verdicts
    out = tmp_path / "report.json"
    assert main(["verify", double_cfg, "--out", str(out)]) == 4
    err = capsys.readouterr().err
    assert "failing verdicts" in err
    payload = _strict_loads(out.read_text())
    assert payload["schema_version"] == 1
    assert payload["case"] == "double"
    assert any(not v.get("pass") for v in payload["verdicts"].values())


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["modes"]) == 2
    assert main(["frobnicate"]) == 2
    capsys.readouterr()
