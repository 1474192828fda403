from functools import partial
from typing import Annotated

import numpy as np
import typer

from blowuplab.constants import ProblemParams
from blowuplab.models import Reference, Report, RunConfig
from blowuplab.reduction import (
    AsymptoticRegime,
    Beta0Convention,
    c_n_asymptotics,
    c_n_root,
    c_n_terms,
    reference_root,
    substituted_root,
)

from ._common import (
    ConfigOption,
    FormatOption,
    OutOption,
    Table,
    execute,
    load_config,
)

ConventionOption = Annotated[
    Beta0Convention | None,
    typer.Option(help="Reading of beta^0_{n-2} in C_n."),
]
DimensionOption = Annotated[int | None, typer.Option(help="Ambient dimension.")]

TRICHOTOMY = "sign of C_n: positive below sqrt((n+1)/(n-1)), negative above"


def cn_scan(
    D_min: Annotated[float, typer.Option("--D-min", help="Smallest D, > 1.")] = 1.05,
    D_max: Annotated[float, typer.Option("--D-max", help="Largest D.")] = 3.0,
    steps: Annotated[int, typer.Option(min=2, help="Number of grid points.")] = 100,
    n: DimensionOption = None,
    convention: ConventionOption = None,
    config_file: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
):
    """
    Tabulate C_n(D) on a uniform grid and count its sign changes.
    """

    def body(config: RunConfig):
        grid = np.linspace(D_min, D_max, steps)
        rows = []
        for D in grid:
            terms = c_n_terms(ProblemParams(n=config.n, D=float(D)), config.convention)
            sign = 0.0 if terms.vanishes else float(np.sign(terms.total))
            rows.append((float(D), terms.total, sign))
        signs = [row[2] for row in rows if row[2] != 0]
        changes = sum(a != b for a, b in zip(signs, signs[1:]))
        crossings = [
            (a[0] + b[0]) / 2
            for a, b in zip(rows, rows[1:])
            if a[2] != 0 and b[2] != 0 and a[2] != b[2]
        ]
        expected = 1 if D_min < reference_root(config.n) < D_max else 0
        report = Report.build(
            "cn-scan",
            {
                "n": config.n,
                "D_min": D_min,
                "D_max": D_max,
                "steps": steps,
                "convention": config.convention.value,
            },
            {
                "sign_changes": changes,
                "crossings": crossings,
                "vanishing_points": sum(row[2] == 0 for row in rows),
            },
            {
                "sign_changes": (
                    changes,
                    Reference(value=expected, provenance=TRICHOTOMY, tolerance=0.0),
                )
            },
            scales={"sign_changes": 1.0},
        )
        return report, Table(["D", "C_n", "sign"], rows)

    execute(
        "cn-scan",
        partial(load_config, config_file, n=n, convention=convention),
        body,
        out,
        fmt,
    )


def cn_root(
    tol: Annotated[float, typer.Option(help="Root tolerance in D.")] = 1e-10,
    n: DimensionOption = None,
    convention: ConventionOption = None,
    config_file: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
):
    """
    Locate the zero of C_n and compare it with sqrt((n+1)/(n-1)).
    """

    def body(config: RunConfig):
        root = c_n_root(config.n, tol, config.convention)
        results = {"root": root}
        if config.convention is Beta0Convention.SUBSTITUTED:
            results["closed_form_root"] = substituted_root(config.n)
        report = Report.build(
            "cn-root",
            {"n": config.n, "tol": tol, "convention": config.convention.value},
            results,
            {
                "root": (
                    root,
                    Reference(
                        value=reference_root(config.n),
                        provenance="C_n(D) = 0 iff D = sqrt((n+1)/(n-1))",
                        tolerance=1e-8,
                    ),
                )
            },
            scales={"root": 1.0},
        )
        return report, None

    execute(
        "cn-root",
        partial(load_config, config_file, n=n, convention=convention),
        body,
        out,
        fmt,
    )


def cn_asym(
    regime: Annotated[
        AsymptoticRegime, typer.Option(help="near-one (D -> 1+) or infinity.")
    ],
    n: DimensionOption = None,
    convention: ConventionOption = None,
    config_file: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
):
    """
    Fit the behaviour of C_n as D -> 1+ or D -> infinity.
    """

    def body(config: RunConfig):
        fit = c_n_asymptotics(config.n, regime, config.convention)
        sign = float(np.sign(fit.values[-1]))
        results = {
            "exponent": fit.exponent,
            "constant": fit.constant,
            "points": fit.points,
            "values": fit.values,
        }
        if regime is AsymptoticRegime.NEAR_ONE:
            checks = {
                "exponent": (
                    fit.exponent,
                    Reference(
                        value=-config.n / 2,
                        provenance="C_n(D) ~ a_n / (D-1)^(n/2) as D -> 1+",
                        tolerance=0.02,
                    ),
                ),
                "sign": (
                    sign,
                    Reference(value=1.0, provenance="a_n > 0", tolerance=0.0),
                ),
            }
        else:
            checks = {
                "sign": (
                    sign,
                    Reference(
                        value=-1.0,
                        provenance="C_n(D) ~ -b_n D^3 / (D^2-1)^(n/2), b_n > 0",
                        tolerance=0.0,
                    ),
                )
            }
        report = Report.build(
            "cn-asym",
            {
                "n": config.n,
                "regime": regime.value,
                "convention": config.convention.value,
            },
            results,
            checks,
        )
        rows = list(zip(fit.points, fit.values))
        return report, Table(["x", "value"], rows)

    execute(
        "cn-asym",
        partial(load_config, config_file, n=n, convention=convention),
        body,
        out,
        fmt,
    )
