import json
import subprocess
import sys

import pytest

MELLIN_FIXTURE = {
    "group": {"p": 3, "pi": "3", "q_res": 3, "frobenius": ["0", "3", "3", "1"], "D": 10},
    "op": "character",
    "phi": {"dirac": [{"u": 4}]},
    "k": 1,
    "chi": {"p": 3, "n": 1, "values": {"2": "zeta_2^1"}},
    "psi_nmax": 2,
}


def run_cli(args, payload=None):
    cmd = [sys.executable, "-m", "ltperiods.cli"] + args
    if payload is not None:
        cmd += ["--inline", json.dumps(payload)]
    return subprocess.run(cmd, capture_output=True, text=True)


def test_selftest_all_pass():
    out = run_cli(["selftest"], {})
    assert out.returncode == 0
    report = json.loads(out.stdout)
    assert report["schema"] == "v1"
    assert all(c["pass"] for c in report["checks"])
    assert report["outputs"]["passed"] == report["outputs"]["total"]


def test_mellin_fixture_contains_expected_coefficients():
    out = run_cli(["mellin"], MELLIN_FIXTURE)
    assert out.returncode == 0
    report = json.loads(out.stdout)
    coeffs = report["outputs"]["series"]["coeffs"]
    assert coeffs[:5] == ["4", "16", "24", "16", "4"]  # 4 (1+S)^4
    assert {"name": "admissible_twist_matches_weight", "pass": True} in report["checks"]


def test_malformed_json_exits_2():
    out = subprocess.run(
        [sys.executable, "-m", "ltperiods.cli", "mellin", "--inline", "{bad"],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 2
    err = json.loads(out.stdout)
    assert err["error"]["type"] == "SchemaError"


def test_schema_violation_exits_2():
    out = run_cli(["mellin"], {"group": {"p": 3}})
    assert out.returncode == 2


def test_wrong_schema_version_exits_2():
    payload = dict(MELLIN_FIXTURE)
    payload["schema"] = "v2"
    out = run_cli(["mellin"], payload)
    assert out.returncode == 2
    err = json.loads(out.stdout)
    assert "schema version" in err["error"]["message"]


def test_determinism_byte_identical(tmp_path):
    a = run_cli(["selftest"], {})
    b = run_cli(["selftest"], {})
    assert a.stdout == b.stdout


def test_batch_jobs_preserve_order():
    batch = [
        {"op": "l_factor", "chi": {"l": 3, "p": 3, "n": 0, "values": {}, "pi_value": "1/3"}},
        {"op": "l_factor", "chi": {"l": 3, "p": 3, "n": 0, "values": {}, "pi_value": "1/2"}},
    ]
    seq = run_cli(["factors"], batch)
    par = run_cli(["factors", "--jobs", "2"], batch)
    assert seq.returncode == 0 and par.returncode == 0
    assert seq.stdout == par.stdout
    outs = json.loads(seq.stdout)["outputs"]
    assert outs[0]["value"] == "3/2"
    assert outs[1]["value"] == "2"


def test_zeta_subcommand_oracle_check():
    payload = {
        "pi": {
            "kind": "principal",
            "mu1": {"l": 3, "n": 0, "values": {}, "pi_value": "1/2"},
            "mu2": {"l": 3, "n": 0, "values": {}, "pi_value": "1/5"},
        },
        "chi": {"l": 3, "n": 0, "values": {}, "pi_value": "2/7"},
        "f": {"cosets": [], "tail": {"kind": "sharp", "mu": {"l": 3, "n": 0, "values": {}, "pi_value": "1/2"}}},
    }
    out = run_cli(["zeta"], payload)
    assert out.returncode == 0
    report = json.loads(out.stdout)
    assert {"name": "zeta_truncated_oracle", "pass": True} in report["checks"]


def test_coleman_subcommand():
    payload = {
        "op": "primitive",
        "spec": {"q": 3, "P": ["-3", "1"]},
        "omega": {"dT_coeffs": {"2": "3", "-1": "1"}},
    }
    out = run_cli(["coleman"], payload)
    assert out.returncode == 0
    report = json.loads(out.stdout)
    assert report["outputs"]["log_coeff"] == "1"
    assert report["outputs"]["laurent"] == {"3": "1"}


def test_period_universal_subcommand():
    payload = {
        "kind": "universal",
        "group": {"p": 3, "pi": "3", "q_res": 3, "frobenius": ["0", "3", "3", "1"], "D": 9},
        "model": {
            "C": {"invariants": [2]},
            "points": [
                {"id": 0, "phi": {"dirac": [{"u": 1}]}},
                {"id": 1, "phi": {"dirac": [{"u": 2}]}},
            ],
        },
        "tame": [1],
        "chi_p": {"p": 3, "n": 0, "values": {}},
        "k": 2,
        "psi_nmax": 1,
    }
    out = run_cli(["period"], payload)
    assert out.returncode == 0
    report = json.loads(out.stdout)
    assert report["outputs"]["value"] == "-3/2"
    assert all(c["pass"] for c in report["checks"])


def test_ratio_subcommand():
    out = run_cli(["ratio"], {"p_plus": "-3/2", "p_minus": "-3/2", "q": "1/2"})
    assert out.returncode == 0
    report = json.loads(out.stdout)
    assert report["outputs"]["value"] == "9/2"
    assert {"name": "ratio_scaling_invariance", "pass": True} in report["checks"]


def test_figures_and_csv(tmp_path):
    figdir = tmp_path / "figs"
    out = run_cli(
        ["mellin", "--figures", str(figdir), "--out", str(tmp_path / "report.json")],
        MELLIN_FIXTURE,
    )
    assert out.returncode == 0
    assert (figdir / "mellin_checks.png").exists()
    assert (figdir / "mellin_checks.csv").exists()
    assert (figdir / "mellin_valuations.png").exists()
    csv_text = (figdir / "mellin_checks.csv").read_text()
    assert "admissible_twist_matches_weight,true" in csv_text


def test_period_saito_tunnell_subcommand():
    payload = {
        "kind": "saito_tunnell",
        "torus": "split",
        "pi": {
            "kind": "principal",
            "mu1": {"l": 3, "n": 1, "values": {"2": "-1"}, "pi_value": "2/3"},
            "mu2": {"l": 3, "n": 0, "values": {}, "pi_value": "5/3"},
        },
        "chi_bullet": {"l": 3, "n": 0, "values": {}, "pi_value": "2"},
        "chi_circ": {"l": 3, "n": 1, "values": {"2": "-1"}, "pi_value": "3/20"},
    }
    out = run_cli(["period"], payload)
    assert out.returncode == 0, out.stdout
    report = json.loads(out.stdout)
    assert report["outputs"]["epsilon"] in ("1", "-1")
    assert {"name": "epsilon_gauss_oracle", "pass": True} in report["checks"]
    inert = {
        "kind": "saito_tunnell",
        "torus": "inert",
        "pi": {
            "kind": "principal",
            "mu1": {"l": 3, "n": 0, "values": {}, "pi_value": "2/3"},
            "mu2": {"l": 3, "n": 0, "values": {}, "pi_value": "5/3"},
        },
        "minus_one": -1,
        "unramified": False,
        "epsilon": "1",
    }
    out2 = run_cli(["period"], inert)
    assert out2.returncode == 0
    report2 = json.loads(out2.stdout)
    assert report2["outputs"]["epsilon"] == "1"
    assert report2["outputs"]["hasse"] == "-1"


def test_lt_subcommand_padic_mode():
    payload = {"group": {"p": 3, "pi": "3", "q_res": 3, "frobenius": ["0", "3", "0", "1"], "D": 6}}
    out = run_cli(["lt", "--mode", "padic", "--prime", "3", "--precision", "12"], payload)
    assert out.returncode == 0
    report = json.loads(out.stdout)
    assert report["outputs"]["model"] == "two_term"
    assert {"name": "commutativity", "pass": True} in report["checks"]
