"""End-to-end CLI tests: file formats, exit codes, determinism."""

import json
import os

import pytest

from weylrec.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_json(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


@pytest.fixture
def exp_file(tmp_path, capsys):
    path = tmp_path / "exp.json"
    code, _, _ = run(capsys, "catalog", "emit", "dim4-psi-exp", str(path))
    assert code == 0
    return str(path)


class TestCatalogCommand:
    def test_list_table(self, capsys):
        code, out, _ = run(capsys, "catalog", "list")
        assert code == 0
        assert "dim4-psi-exp" in out and "threed_case2" in out

    def test_emit_roundtrip(self, exp_file):
        data = json.loads(open(exp_file).read())
        assert data["format"] == 1 and data["psi"] == "exp(t)" and data["n"] == 2

    def test_unknown_entry_exits_2(self, capsys):
        code, _, err = run(capsys, "catalog", "emit", "nonexistent")
        assert code == 2 and "unknown catalog entry" in err


class TestVerifyCommand:
    def test_good_structure_passes(self, exp_file, capsys):
        code, out, _ = run(capsys, "verify", exp_file, "--samples", "6")
        assert code == 0
        report = json.loads(out)
        assert report["pass"] is True
        names = {c["name"]: c["status"] for c in report["checks"]}
        assert names["metric_compatibility"] == "pass"
        assert names["recurrence"] == "pass"
        assert names["holonomy_span_dim"] == "pass"
        assert names["conformal_flatness"] == "pass"

    def test_broken_compatibility_ode_fails(self, tmp_path, capsys):
        path = write_json(
            tmp_path / "broken.json",
            {
                "format": 1,
                "family": "mainth",
                "F": "0-ln(u+x2)+0.1*u",
                "a": "0",
                "n": 2,
                "constraints": ["u+x2"],
            },
        )
        code, out, _ = run(capsys, "verify", path, "--samples", "6")
        assert code == 1
        report = json.loads(out)
        statuses = {c["name"]: c["status"] for c in report["checks"]}
        assert statuses["recurrence"] == "fail"

    def test_malformed_json_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        code, _, err = run(capsys, "verify", str(bad))
        assert code == 2 and "malformed JSON" in err

    def test_unknown_field_rejected(self, tmp_path, capsys):
        path = write_json(
            tmp_path / "extra.json",
            {"format": 1, "family": "threed_case1", "F": "x*u", "surprise": True},
        )
        code, _, err = run(capsys, "verify", str(path))
        assert code == 2 and "unknown fields" in err

    def test_wrong_format_version(self, tmp_path, capsys):
        path = write_json(tmp_path / "v9.json", {"format": 9, "family": "threed_case1", "F": "x*u"})
        code, _, err = run(capsys, "verify", str(path))
        assert code == 2 and "unsupported format" in err

    def test_deterministic_output(self, exp_file, capsys):
        code1, out1, _ = run(capsys, "verify", exp_file, "--samples", "4")
        code2, out2, _ = run(capsys, "verify", exp_file, "--samples", "4")
        assert (code1, out1) == (code2, out2)

    def test_seed_env_override(self, exp_file, capsys, monkeypatch):
        _, out_default, _ = run(capsys, "verify", exp_file, "--samples", "4")
        monkeypatch.setenv("WEYL_SEED", "5")
        _, out_env, _ = run(capsys, "verify", exp_file, "--samples", "4")
        assert json.loads(out_env)["seed"] == 5
        assert json.loads(out_default)["seed"] == 0

    def test_einstein_weyl_entry_report(self, tmp_path, capsys):
        code, _, _ = run(capsys, "catalog", "emit", "3d2-inv-u", str(tmp_path / "ew.json"))
        assert code == 0
        code, out, _ = run(capsys, "verify", str(tmp_path / "ew.json"), "--samples", "5")
        assert code == 0
        report = json.loads(out)
        checks = {c["name"]: c for c in report["checks"]}
        assert checks["einstein_weyl"]["status"] == "pass"
        assert checks["einstein_weyl"]["max_dkp_residual"] <= 1e-10
        assert checks["recurrence"]["weight_fit"] == pytest.approx(2.5, abs=1e-6)
        assert checks["holonomy_span_dim"]["observed"] == [2]

    def test_order_floor_enforced(self, exp_file, capsys):
        code, _, err = run(capsys, "verify", exp_file, "--order", "2")
        assert code == 2 and "--order" in err


class TestInvariantsCommand:
    def test_power_values(self, tmp_path, capsys):
        path = write_json(tmp_path / "p.json", {"format": 1, "family": "dim_ge4", "psi": "t^2", "n": 2})
        code, out, _ = run(capsys, "invariants", path, "--at", "1.0")
        assert code == 0
        rec = json.loads(out)
        assert rec["I"] == pytest.approx(-1 / 3) and rec["J"] == 0.0 and rec["sign_D"] == -1

    def test_singular_stratum_reported(self, tmp_path, capsys):
        path = write_json(tmp_path / "lin.json", {"format": 1, "family": "dim_ge4", "psi": "t", "n": 2})
        code, out, _ = run(capsys, "invariants", path, "--at", "1.0")
        assert code == 0 and "singular" in json.loads(out)

    def test_pair_values(self, tmp_path, capsys):
        path = write_json(
            tmp_path / "pair.json",
            {"format": 1, "family": "threed_case2", "a": "1/u", "c": "2/u^2", "constraints": ["u"]},
        )
        code, out, _ = run(capsys, "invariants", path, "--at", "1.0")
        rec = json.loads(out)
        assert (rec["I"], rec["J"], rec["K"]) == (-2.0, 2.0, -8.0)

    def test_surface_needs_two_values(self, tmp_path, capsys):
        path = write_json(tmp_path / "s.json", {"format": 1, "family": "threed_case1", "F": "x*u"})
        code, _, err = run(capsys, "invariants", path, "--at", "1.0")
        assert code == 2
        code, out, _ = run(capsys, "invariants", path, "--at", "1.0,1.0")
        rec = json.loads(out)
        assert rec["I"] == pytest.approx(-2.0) and rec["J"] == pytest.approx(-2.0)


class TestSignatureCommand:
    def test_csv_format(self, tmp_path, capsys):
        path = write_json(tmp_path / "p.json", {"format": 1, "family": "dim_ge4", "psi": "t^2", "n": 2})
        out_csv = tmp_path / "sig.csv"
        code, _, _ = run(capsys, "signature", path, "--range", "0.5:2", "--samples", "64", "--csv", str(out_csv))
        assert code == 0
        lines = out_csv.read_text().strip().splitlines()
        assert lines[0] == "param,I,J,sign_D,singular_flag"
        assert len(lines) == 66  # header + 64 samples + dropped-count comment
        first = lines[1].split(",")
        assert float(first[0]) == 0.5 and float(first[1]) == pytest.approx(-1 / 3)

    def test_pair_csv_header(self, tmp_path, capsys):
        path = write_json(
            tmp_path / "pair.json",
            {"format": 1, "family": "threed_case2", "a": "exp(u)", "c": "u"},
        )
        code, out, _ = run(capsys, "signature", path, "--range", "0.5:1.5", "--samples", "8")
        assert code == 0 and out.splitlines()[0] == "param,I,J,K,singular_flag"


class TestEquivCommand:
    def test_pushforward_equivalent(self, tmp_path, capsys):
        a = write_json(tmp_path / "a.json", {"format": 1, "family": "dim_ge4", "psi": "t^3+t", "n": 2})
        b = write_json(
            tmp_path / "b.json",
            {
                "format": 1,
                "family": "dim_ge4",
                "psi": "(2*((0.5*t)^3+0.5*t)+1)/(((0.5*t)^3+0.5*t)+1)",
                "n": 2,
                "box": {"t": [1.0, 4.0], "v": [-1, 1], "x1": [-1, 1], "u": [0.1, 1.2]},
            },
        )
        code, out, _ = run(capsys, "equiv", a, b, "--range", "0.5:2", "--range2", "1:4")
        assert code == 0 and json.loads(out)["verdict"] == "Equivalent"

    def test_distinct(self, tmp_path, capsys):
        a = write_json(tmp_path / "a.json", {"format": 1, "family": "dim_ge4", "psi": "t^3+t", "n": 2})
        b = write_json(tmp_path / "b.json", {"format": 1, "family": "dim_ge4", "psi": "t^5+t", "n": 2})
        code, out, _ = run(capsys, "equiv", a, b, "--range", "0.5:2")
        assert json.loads(out)["verdict"] == "Distinct"

    def test_degenerate_reports_signs(self, tmp_path, capsys):
        a = write_json(tmp_path / "a.json", {"format": 1, "family": "dim_ge4", "psi": "exp(t)", "n": 2})
        b = write_json(
            tmp_path / "b.json",
            {
                "format": 1,
                "family": "dim_ge4",
                "psi": "tan(t)",
                "n": 2,
                "box": {"t": [0.5, 1.2], "v": [-1, 1], "x1": [-1, 1], "u": [0.2, 1.2]},
            },
        )
        code, out, _ = run(capsys, "equiv", a, b, "--range", "0.5:1.2")
        rec = json.loads(out)
        assert rec["verdict"] == "Degenerate"
        assert rec["discriminant_signs"] == [[-1], [1]]

    def test_family_mismatch(self, tmp_path, capsys):
        a = write_json(tmp_path / "a.json", {"format": 1, "family": "dim_ge4", "psi": "t^3+t", "n": 2})
        b = write_json(tmp_path / "b.json", {"format": 1, "family": "threed_case1", "F": "x*u"})
        code, _, err = run(capsys, "equiv", a, b)
        assert code == 2 and "families" in err


class TestClassifyCommand:
    def test_power_family(self, tmp_path, capsys):
        path = write_json(tmp_path / "p.json", {"format": 1, "family": "dim_ge4", "psi": "t^2", "n": 2})
        code, out, _ = run(capsys, "classify", path)
        rec = json.loads(out)
        assert code == 0
        assert rec["cohomogeneity"] == 1 and rec["kind"] == "Power"
        assert rec["A"] == pytest.approx(2.0, abs=1e-6)

    def test_pair_family(self, tmp_path, capsys):
        path = write_json(
            tmp_path / "pair.json",
            {"format": 1, "family": "threed_case2", "a": "1/u", "c": "2/u^2", "constraints": ["u"]},
        )
        code, out, _ = run(capsys, "classify", path)
        rec = json.loads(out)
        assert rec["kind"] == "OneSymmetry3D2" and rec["cohomogeneity"] == 2

    def test_unsupported_family_exits_2(self, tmp_path, capsys):
        path = write_json(tmp_path / "h.json", {"format": 1, "family": "homogeneous", "n": 2})
        code, _, err = run(capsys, "classify", path)
        assert code == 2 and "classification" in err


class TestConstructorErrorsSurface:
    def test_decreasing_psi_reported(self, tmp_path, capsys):
        path = write_json(tmp_path / "bad.json", {"format": 1, "family": "dim_ge4", "psi": "0-t", "n": 2})
        code, _, err = run(capsys, "verify", path)
        assert code == 2 and "positive" in err

    def test_syntax_error_reported(self, tmp_path, capsys):
        path = write_json(tmp_path / "bad.json", {"format": 1, "family": "dim_ge4", "psi": "2t", "n": 2})
        code, _, err = run(capsys, "verify", path)
        assert code == 2
