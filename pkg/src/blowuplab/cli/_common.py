import json
import time
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Annotated, NamedTuple

import typer
import yaml
from pydantic import ValidationError

from blowuplab.exceptions import BlowuplabError, ValidationFailure
from blowuplab.logconfig import logger
from blowuplab.models import OutputFormat, Report, RunConfig
from blowuplab.utils import atomic_write, write_csv

ConfigOption = Annotated[
    Path | None,
    typer.Option(
        "--config",
        help="YAML or JSON file with run settings; flags take precedence.",
        show_default=False,
    ),
]
OutOption = Annotated[
    Path | None,
    typer.Option(
        "--out",
        help="Write the result table (CSV) or the report (JSON) to this file.",
        show_default=False,
    ),
]
FormatOption = Annotated[
    OutputFormat | None,
    typer.Option(
        "--format",
        help="Format of the --out file; inferred from its suffix when omitted.",
        show_default=False,
    ),
]


class Table(NamedTuple):
    columns: list[str]
    rows: list[Sequence[float]]


Outcome = tuple[Report, Table | None]


def load_config(config_file: Path | None, **overrides) -> RunConfig:
    try:
        return RunConfig.load(config_file, **overrides)
    except OSError as exc:
        raise ValidationFailure(f"Cannot read config file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ValidationFailure(f"Malformed config file: {exc}") from exc


def execute(
    command: str,
    config: Callable[[], RunConfig],
    body: Callable[[RunConfig], Outcome],
    out: Path | None = None,
    fmt: OutputFormat | None = None,
):
    """Run ``body`` on the loaded config and map its outcome to output and exit code.

    ``output_path`` and ``format`` from a config file stand in for flags that
    were not given.

    Exit codes: 0 when every check passes, 1 for invalid input, 2 for a
    numerical failure or a failed check.
    """
    started = time.perf_counter()
    logger.log("RUN", "Starting {}", command)
    try:
        run_config = config()
        report, table = body(run_config)
    except ValidationError as exc:
        typer.echo(f"Error: invalid input\n{exc}", err=True)
        raise typer.Exit(1)
    except BlowuplabError as exc:
        typer.echo(f"Error: {type(exc).__name__}: {exc}", err=True)
        raise typer.Exit(exc.exit_code)

    report.wall_time = time.perf_counter() - started
    typer.echo(report.to_json())
    out = out or run_config.output_path
    if fmt is None and "format" in run_config.model_fields_set:
        fmt = run_config.format
    if out is not None:
        _write_output(report, table, out, fmt)

    logger.log(
        "METRICS",
        json.dumps(
            {
                "command": command,
                "wall_time": round(report.wall_time, 6),
                "pass": report.passed,
            }
        ),
    )
    if not report.passed:
        failed = [
            name
            for name, error in report.errors.items()
            if error > report.references[name].tolerance
        ]
        typer.echo(f"Error: checks failed: {', '.join(failed)}", err=True)
        raise typer.Exit(2)


def _write_output(
    report: Report, table: Table | None, out: Path, fmt: OutputFormat | None
):
    if fmt is None:
        fmt = OutputFormat.CSV if out.suffix.lower() == ".csv" else OutputFormat.JSON
    if fmt is OutputFormat.CSV:
        if table is None:
            typer.echo("Error: this command produces no table for CSV output", err=True)
            raise typer.Exit(1)
        write_csv(out, table.columns, table.rows)
    else:
        with atomic_write(out) as temp_path:
            temp_path.write_text(report.to_json(include_wall_time=False) + "\n")
    logger.info("Wrote {}", out)
