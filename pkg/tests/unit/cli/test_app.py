from typer.testing import CliRunner

from blowuplab.cli import app
from blowuplab.utils import get_version

runner = CliRunner()


def test_version():
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert result.stdout.strip() == get_version()


def test_unknown_command_is_a_validation_error():
    result = runner.invoke(app, ["integrate"])
    assert result.exit_code == 1


def test_malformed_number_is_a_validation_error():
    result = runner.invoke(app, ["beta", "--m", "two", "--k", "6"])
    assert result.exit_code == 1


def test_every_subcommand_is_registered():
    result = runner.invoke(app, ["--help"])
    assert result.exit_code == 0
    for name in (
        "beta",
        "cn-scan",
        "cn-root",
        "cn-asym",
        "verify-bubble",
        "verify-kernel",
        "energy",
        "expansion",
        "residual-norms",
        "critical-point",
    ):
        assert name in result.stdout


def test_misspelled_command_is_a_validation_error():
    result = runner.invoke(app, ["nosuch"])
    assert result.exit_code == 1
    assert "No such command" in result.output


def test_non_integer_option_is_a_validation_error():
    result = runner.invoke(app, ["beta", "--m", "x", "--k", "6"])
    assert result.exit_code == 1


def test_unknown_top_level_option_is_a_validation_error():
    result = runner.invoke(app, ["--bogus"])
    assert result.exit_code == 1
