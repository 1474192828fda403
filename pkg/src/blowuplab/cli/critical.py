from functools import partial
from typing import Annotated

import typer

from blowuplab.models import Reference, Report, RunConfig
from blowuplab.reduction import Beta0Convention, solve_critical_point

from ._common import ConfigOption, FormatOption, OutOption, execute, load_config


def critical_point(
    n: Annotated[int | None, typer.Option(help="Ambient dimension.")] = None,
    D: Annotated[
        float | None, typer.Option("--D", help="Curvature ratio, D > 1.")
    ] = None,
    H0: Annotated[
        float | None, typer.Option("--H0", help="Mean curvature at the critical point.")
    ] = None,
    mu: Annotated[float | None, typer.Option(help="Coefficient of the L^2 term.")] = None,
    newton_tol: Annotated[
        float, typer.Option(help="Tolerance on the gradient norm of the Newton solve.")
    ] = 1e-10,
    convention: Annotated[
        Beta0Convention | None,
        typer.Option(help="Reading of beta^0_{n-2} in C_n."),
    ] = None,
    config_file: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
):
    """
    Solve for the critical point of the reduced energy by Newton's method.
    """

    def body(config: RunConfig):
        model = config.critical_point_model()
        result = solve_critical_point(
            config.problem(),
            model,
            config.reduced_energy_params(),
            newton_tol=newton_tol,
            convention=config.convention,
        )
        checks = {
            "d": (
                result.d,
                Reference(
                    value=result.d_closed_form,
                    provenance="d* = -C_n(D) H0 / int U_1^2",
                    tolerance=1e-10,
                ),
            ),
            "gradient": (
                result.gradient_norm,
                Reference(
                    value=0.0,
                    provenance="critical point of the reduced energy",
                    tolerance=newton_tol,
                ),
            ),
        }
        inputs = {
            "n": config.n,
            "D": config.D,
            "H0": model.H0,
            "p": model.center.tolist(),
            "hess": [list(row) for row in model.hess],
            "mu": config.mu,
            "convention": config.convention.value,
        }
        report = Report.build("critical-point", inputs, result.model_dump(), checks)
        return report, None

    execute(
        "critical-point",
        partial(
            load_config, config_file, n=n, D=D, H0=H0, mu=mu, convention=convention
        ),
        body,
        out,
        fmt,
    )
