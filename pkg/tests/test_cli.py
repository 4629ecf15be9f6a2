"""Command-line interface: commands, formats, exit-status contract."""

import json

import numpy as np
import pytest

from sldkit.cli import main, parse_family
from sldkit.lie_basis import matrix_to_pairs

QUBIT_FAMILY = {
    "kind": "exp_generator",
    "n": 2,
    "weights": [0.75, 0.25],
    "generator_coeffs": [0.0, 0.5, 0.0],
}

MIXED_FAMILY = {
    "kind": "exp_generator",
    "n": 2,
    "weights": [0.5, 0.5],
    "generator_coeffs": [0.0, 0.5, 0.0],
}

WEIGHT_PATH_FAMILY = {
    "kind": "weight_path",
    "n": 2,
    "weights": [0.75, 0.25],
    "weight_rates": [1.0, -1.0],
}

PURE_QUTRIT_FAMILY = {
    "kind": "exp_generator",
    "n": 3,
    "weights": [1.0, 0.0, 0.0],
    "generator_coeffs": [0.3, 0.1, 0.0, 0.2, -0.4, 0.0, 0.0, 0.0],
}


def write_family(tmp_path, payload, name="family.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def run(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBasisCommand:
    def test_su3_constants_emitted(self, tmp_path, capsys):
        out_path = tmp_path / "basis.json"
        code, _, _ = run(["basis", "--n", "3", "--output", str(out_path)], capsys)
        assert code == 0
        data = json.loads(out_path.read_text())
        assert data["n"] == 3
        assert [0, 1, 2, 1.0] in data["c"]
        assert len(data["generators"]) == 8

    def test_su2_has_no_symmetric_constants(self, capsys):
        code, out, _ = run(["basis", "--n", "2"], capsys)
        assert code == 0
        assert json.loads(out)["f"] == []

    def test_rejects_invalid_dimension(self, capsys):
        code, _, err = run(["basis", "--n", "1"], capsys)
        assert code == 1
        assert err.startswith("error:")
        assert "\n" not in err.strip()


class TestSldCommand:
    def test_qubit_rotation(self, tmp_path, capsys):
        family = write_family(tmp_path, QUBIT_FAMILY)
        code, out, _ = run(["sld", "--input", family, "--theta", "0"], capsys)
        assert code == 0
        data = json.loads(out)
        assert data["L_identity"] == pytest.approx(0.0, abs=1e-12)
        assert data["L"][0] == pytest.approx(0.5, abs=1e-12)
        assert np.abs(data["L"][1:]).max() < 1e-12
        assert data["gauge_dim"] == 0
        assert data["residual"] < 1e-10

    @pytest.mark.parametrize("theta", [0.0, 0.7])
    def test_closed_u2_matches_general(self, tmp_path, capsys, theta):
        family = write_family(tmp_path, QUBIT_FAMILY)
        results = {}
        for method in ("general", "closed-u2"):
            code, out, _ = run(["sld", "--input", family, "--theta", str(theta),
                                "--method", method], capsys)
            assert code == 0
            results[method] = json.loads(out)
        general = np.array(results["general"]["L"])
        closed = np.array(results["closed-u2"]["L"])
        assert np.abs(general - closed).max() < 1e-12

    def test_closed_u3_matches_general(self, tmp_path, capsys):
        family = write_family(tmp_path, {
            "kind": "exp_generator",
            "n": 3,
            "weights": [0.5, 0.3, 0.2],
            "generator_coeffs": [0.1, -0.2, 0.0, 0.3, 0.4, -0.1, 0.25, 0.0],
        })
        results = {}
        for method in ("general", "closed-u3"):
            code, out, _ = run(["sld", "--input", family, "--theta", "0.4",
                                "--method", method], capsys)
            assert code == 0
            results[method] = json.loads(out)
        general = np.array(results["general"]["L"])
        closed = np.array(results["closed-u3"]["L"])
        assert np.abs(general - closed).max() < 1e-12

    def test_pure_qutrit_gauge(self, tmp_path, capsys):
        family = write_family(tmp_path, PURE_QUTRIT_FAMILY)
        code, out, _ = run(["sld", "--input", family], capsys)
        assert code == 0
        data = json.loads(out)
        assert data["gauge_dim"] >= 1
        assert data["residual"] < 1e-10
        # the representative coincides with 2 drho up to the gauge class
        from sldkit import MixingWeights, base_point, reconstruct, \
            tangent_from_generator
        from sldkit.lie_basis import pairs_to_matrix
        state = base_point(MixingWeights(PURE_QUTRIT_FAMILY["weights"]))
        K = reconstruct(0.0, PURE_QUTRIT_FAMILY["generator_coeffs"])
        form = tangent_from_generator(K, state)
        L = pairs_to_matrix(data["matrix"])
        assert np.abs(L - 2.0 * form.matrix).max() < 1e-10

    def test_oracle_method(self, tmp_path, capsys):
        family = write_family(tmp_path, QUBIT_FAMILY)
        code, out, _ = run(["sld", "--input", family, "--method", "oracle"],
                           capsys)
        assert code == 0
        assert json.loads(out)["L"][0] == pytest.approx(0.5, abs=1e-12)

    def test_malformed_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"kind": "exp_generator"')
        code, _, err = run(["sld", "--input", str(bad)], capsys)
        assert code == 1
        assert err.startswith("error:")

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(["sld", "--input", str(tmp_path / "nope.json")],
                           capsys)
        assert code == 1
        assert err.startswith("error:")


class TestQfiCommand:
    def test_rotation_family_sweep(self, tmp_path, capsys):
        family = write_family(tmp_path, QUBIT_FAMILY)
        code, out, _ = run(["qfi", "--input", family,
                            "--thetas", "0,0.5,1.0"], capsys)
        assert code == 0
        rows = json.loads(out)["rows"]
        assert [row["theta"] for row in rows] == [0.0, 0.5, 1.0]
        for row in rows:
            assert row["qfi"] == pytest.approx(0.25, abs=1e-9)

    def test_maximally_mixed_is_zero(self, tmp_path, capsys):
        family = write_family(tmp_path, MIXED_FAMILY)
        code, out, _ = run(["qfi", "--input", family, "--thetas", "0,1"],
                           capsys)
        assert code == 0
        for row in json.loads(out)["rows"]:
            assert abs(row["qfi"]) < 1e-12

    def test_transversal_path(self, tmp_path, capsys):
        family = write_family(tmp_path, WEIGHT_PATH_FAMILY)
        code, out, _ = run(["qfi", "--input", family, "--thetas", "0"], capsys)
        assert code == 0
        row = json.loads(out)["rows"][0]
        assert row["qfi"] == pytest.approx(16 / 3, abs=1e-9)

    def test_check_oracle_csv(self, tmp_path, capsys):
        family = write_family(tmp_path, QUBIT_FAMILY)
        code, out, _ = run(["qfi", "--input", family, "--thetas", "0,0.5",
                            "--check-oracle", "--format", "csv"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "theta,qfi,qfi_oracle,abs_dev"
        for line in lines[1:]:
            cells = [float(tok) for tok in line.split(",")]
            assert cells[1] == pytest.approx(0.25, abs=1e-9)
            assert cells[3] < 1e-9

    def test_check_oracle_summary(self, tmp_path, capsys):
        family = write_family(tmp_path, QUBIT_FAMILY)
        code, out, _ = run(["qfi", "--input", family,
                            "--theta-range", "0:1:5", "--check-oracle"],
                           capsys)
        assert code == 0
        data = json.loads(out)
        assert len(data["rows"]) == 5
        assert data["max_abs_dev"] < 1e-9

    def test_explicit_matrices_family(self, tmp_path, capsys):
        # diagonal family linear in theta: rho = diag(0.75 - t/10, 0.25 + t/10)
        thetas = np.linspace(-0.5, 0.5, 11)
        samples = [[float(t),
                    matrix_to_pairs(np.diag([0.75 - 0.1 * t, 0.25 + 0.1 * t]))]
                   for t in thetas]
        family = write_family(tmp_path, {
            "kind": "explicit_matrices", "n": 2,
            "matrices": samples, "fd_step": 1e-3,
        })
        code, out, _ = run(["qfi", "--input", family, "--thetas", "0"], capsys)
        assert code == 0
        row = json.loads(out)["rows"][0]
        expected = 0.01 / 0.75 + 0.01 / 0.25  # sum dk_i^2 / k_i
        assert row["qfi"] == pytest.approx(expected, abs=1e-8)

    def test_rows_ordered_by_theta(self, tmp_path, capsys):
        family = write_family(tmp_path, QUBIT_FAMILY)
        code, out, _ = run(["qfi", "--input", family,
                            "--thetas", "1.0,0,0.5"], capsys)
        assert code == 0
        assert [row["theta"] for row in json.loads(out)["rows"]] == \
            [0.0, 0.5, 1.0]

    def test_sampled_range_exceeded(self, tmp_path, capsys):
        samples = [[0.0, matrix_to_pairs(np.diag([0.7, 0.3]))],
                   [0.1, matrix_to_pairs(np.diag([0.6, 0.4]))]]
        family = write_family(tmp_path, {
            "kind": "explicit_matrices", "n": 2, "matrices": samples,
        })
        code, _, err = run(["qfi", "--input", family, "--thetas", "5"], capsys)
        assert code == 1
        assert "range" in err

    def test_requires_thetas(self, tmp_path, capsys):
        family = write_family(tmp_path, QUBIT_FAMILY)
        code, _, err = run(["qfi", "--input", family], capsys)
        assert code == 1
        assert err.startswith("error:")


class TestTensorCommand:
    def test_reference_weights(self, capsys):
        code, out, _ = run(["tensor", "--weights", "0.5,0.3,0.2"], capsys)
        assert code == 0
        data = json.loads(out)
        pairs = data["closed_form"]["pairs"]
        assert pairs[0][0] == pytest.approx(0.2, abs=1e-12)
        assert data["max_deviation"] < 1e-9
        assert data["tensor"]["directions"] == 6

    def test_pure_weights_closed_form(self, capsys):
        code, out, _ = run(["tensor", "--weights", "1,0,0",
                            "--allow-degenerate"], capsys)
        assert code == 0
        data = json.loads(out)
        assert [p[0] for p in data["closed_form"]["pairs"]] == \
            pytest.approx([4.0, 4.0, 0.0], abs=1e-12)
        assert data["tensor"] is None

    def test_maximally_mixed_closed_form(self, capsys):
        code, out, _ = run(["tensor", "--weights", "0.3333333333333333,"
                            "0.3333333333333333,0.3333333333333334",
                            "--allow-degenerate"], capsys)
        assert code == 0
        pairs = json.loads(out)["closed_form"]["pairs"]
        assert np.abs(pairs).max() < 1e-12

    def test_degenerate_without_flag_is_numerical_error(self, capsys):
        code, _, err = run(["tensor", "--weights", "0.6,0.2,0.2"], capsys)
        assert code == 2
        assert err.startswith("error:")
        assert "\n" not in err.strip()

    def test_rank2_dispatch(self, capsys):
        code, out, _ = run(["tensor", "--weights", "0.6,0.4,0"], capsys)
        assert code == 0
        data = json.loads(out)
        assert data["closed_form"]["pairs"][1] == pytest.approx([2.4, -2.4],
                                                                abs=1e-12)
        assert data["max_deviation"] < 1e-9


class TestJsonRoundTrip:
    def test_emitted_json_reparses_identically(self, tmp_path, capsys):
        family = write_family(tmp_path, QUBIT_FAMILY)
        cases = [
            ["basis", "--n", "3"],
            ["sld", "--input", family, "--theta", "0.3"],
            ["qfi", "--input", family, "--thetas", "0,0.25"],
            ["tensor", "--weights", "0.5,0.3,0.2"],
        ]
        for args in cases:
            code, out, _ = run(args, capsys)
            assert code == 0
            parsed = json.loads(out)
            assert json.dumps(parsed, indent=2) + "\n" == out


class TestFamilyValidation:
    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            parse_family({"kind": "nope", "n": 2})

    def test_missing_fields(self):
        with pytest.raises(ValueError, match="missing"):
            parse_family({"kind": "exp_generator", "n": 2,
                          "weights": [0.5, 0.5]})

    def test_foreign_fields_rejected(self):
        spec = dict(QUBIT_FAMILY)
        spec["weight_rates"] = [1.0, -1.0]
        with pytest.raises(ValueError, match="does not accept"):
            parse_family(spec)

    def test_coefficient_length_checked(self):
        spec = dict(QUBIT_FAMILY)
        spec["generator_coeffs"] = [0.0, 0.5]
        with pytest.raises(ValueError, match="length"):
            parse_family(spec)

    def test_weight_path_validates_rates(self, tmp_path, capsys):
        family = write_family(tmp_path, {
            "kind": "weight_path", "n": 2,
            "weights": [0.75, 0.25], "weight_rates": [1.0, 0.0],
        })
        code, _, err = run(["qfi", "--input", family, "--thetas", "0"], capsys)
        assert code == 1
        assert "sum to zero" in err

    def test_usage_error_on_unknown_flag(self, capsys):
        code, _, err = run(["basis", "--n", "2", "--bogus"], capsys)
        assert code == 1
        assert err.startswith("error:")

    def test_csv_only_for_qfi(self, capsys):
        code, _, err = run(["basis", "--n", "2", "--format", "csv"], capsys)
        assert code == 1
        assert "csv" in err


def test_env_tolerance_override(tmp_path, capsys, monkeypatch):
    # a huge tolerance truncates every singular value: the returned solution
    # collapses to zero (the loosened consistency check accepts the misfit)
    family = write_family(tmp_path, QUBIT_FAMILY)
    monkeypatch.setenv("SLDKIT_TOL", "1e3")
    code, out, _ = run(["sld", "--input", family], capsys)
    assert code == 0
    assert np.abs(json.loads(out)["L"]).max() < 1e-12
    monkeypatch.delenv("SLDKIT_TOL")
    code, out, _ = run(["sld", "--input", family], capsys)
    assert code == 0
    assert json.loads(out)["L"][0] == pytest.approx(0.5, abs=1e-12)
    # explicit flag wins over the environment
    monkeypatch.setenv("SLDKIT_TOL", "1e3")
    code, out, _ = run(["sld", "--input", family, "--tol", "1e-10"], capsys)
    assert code == 0
    assert json.loads(out)["L"][0] == pytest.approx(0.5, abs=1e-12)
