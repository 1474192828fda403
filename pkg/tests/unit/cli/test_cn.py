import json

import numpy as np
import pytest
from typer.testing import CliRunner

from blowuplab.cli import app
from blowuplab.reduction import substituted_root

runner = CliRunner()


class TestCnScan:
    def test_one_sign_change(self, tmp_path):
        out = tmp_path / "scan.csv"
        result = runner.invoke(
            app,
            [
                "cn-scan",
                "--n", "6",
                "--D-min", "1.05",
                "--D-max", "3",
                "--steps", "100",
                "--convention", "substituted",
                "--out", str(out),
            ],
        )  # fmt: skip
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["results"]["sign_changes"] == 1
        (crossing,) = report["results"]["crossings"]
        assert crossing == pytest.approx(substituted_root(6), abs=0.02)

        lines = out.read_text().splitlines()
        assert lines[0] == "D,C_n,sign"
        table = np.loadtxt(out, delimiter=",", skiprows=1)
        assert table.shape == (100, 3)
        assert set(table[:, 2]) == {1.0, -1.0}

    def test_vanishing_constant_fails_the_check(self, tmp_path):
        out = tmp_path / "scan.csv"
        result = runner.invoke(
            app, ["cn-scan", "--n", "6", "--steps", "20", "--out", str(out)]
        )
        assert result.exit_code == 2
        assert "sign_changes" in result.output
        table = np.loadtxt(out, delimiter=",", skiprows=1)
        assert np.all(table[:, 2] == 0.0)

    def test_single_step_is_rejected(self):
        result = runner.invoke(app, ["cn-scan", "--steps", "1"])
        assert result.exit_code == 1


class TestCnRoot:
    def test_vanishing_constant(self):
        result = runner.invoke(app, ["cn-root", "--n", "6", "--tol", "1e-10"])
        assert result.exit_code == 2
        assert "VanishingConstant" in result.output

    def test_substituted_root_differs_from_the_stated_one(self):
        result = runner.invoke(
            app, ["cn-root", "--n", "6", "--convention", "substituted"]
        )
        assert result.exit_code == 2
        assert "checks failed: root" in result.output
        assert '"root": 1.21' in result.output

    def test_rejects_low_dimension(self):
        result = runner.invoke(app, ["cn-root", "--n", "5", "--convention", "substituted"])
        assert result.exit_code == 1


class TestCnAsym:
    def test_infinity_sign(self):
        result = runner.invoke(
            app,
            ["cn-asym", "--n", "6", "--regime", "infinity", "--convention", "substituted"],
        )
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert all(v < 0 for v in report["results"]["values"])

    def test_near_one_exponent_is_checked(self):
        result = runner.invoke(
            app,
            ["cn-asym", "--n", "6", "--regime", "near-one", "--convention", "substituted"],
        )
        assert result.exit_code == 2
        assert "checks failed: exponent" in result.output

    def test_unknown_regime_is_a_validation_error(self):
        result = runner.invoke(app, ["cn-asym", "--regime", "sideways"])
        assert result.exit_code == 1

    def test_missing_regime_is_a_validation_error(self):
        result = runner.invoke(app, ["cn-asym"])
        assert result.exit_code == 1
