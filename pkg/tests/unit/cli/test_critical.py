import json

import pytest
from typer.testing import CliRunner

from blowuplab.cli import app

runner = CliRunner()


class TestCriticalPoint:
    def test_converges_to_closed_form(self):
        result = runner.invoke(
            app,
            [
                "critical-point",
                "--n", "6",
                "--D", "1.5",
                "--H0", "2",
                "--convention", "substituted",
            ],
        )  # fmt: skip
        assert result.exit_code == 0
        results = json.loads(result.stdout)["results"]
        assert results["d"] > 0
        assert results["d"] == pytest.approx(results["d_closed_form"], rel=1e-10)
        assert results["gradient_norm"] <= 1e-10
        assert results["iterations"] <= 5

    def test_positive_constant_is_a_regime_error(self):
        result = runner.invoke(
            app,
            ["critical-point", "--D", "1.1", "--H0", "2", "--convention", "substituted"],
        )
        assert result.exit_code == 2
        assert "RegimeError" in result.output

    def test_vanishing_constant_is_a_regime_error(self):
        result = runner.invoke(app, ["critical-point", "--n", "6", "--D", "1.5"])
        assert result.exit_code == 2
        assert "RegimeError" in result.output

    def test_hessian_from_config(self, tmp_path):
        config_file = tmp_path / "run.json"
        config_file.write_text(
            json.dumps(
                {
                    "n": 5,
                    "D": 2.0,
                    "H0": 1.0,
                    "hess": [
                        [-1.0, 0.0, 0.0, 0.0],
                        [0.0, -3.0, 0.0, 0.0],
                        [0.0, 0.0, -2.0, 0.5],
                        [0.0, 0.0, 0.5, -1.0],
                    ],
                    "p": [0.2, -0.1, 0.0, 0.3],
                    "mu": 5.0,
                    "convention": "substituted",
                }
            )
        )
        result = runner.invoke(app, ["critical-point", "--config", str(config_file)])
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["inputs"]["p"] == [0.2, -0.1, 0.0, 0.3]
        assert report["results"]["xi"] == pytest.approx([0.2, -0.1, 0.0, 0.3], abs=1e-10)

    def test_low_dimension(self):
        result = runner.invoke(
            app, ["critical-point", "--n", "4", "--convention", "substituted"]
        )
        assert result.exit_code == 1
        assert "n >= 5" in result.output
