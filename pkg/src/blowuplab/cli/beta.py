from functools import partial
from typing import Annotated, Literal

import typer

from blowuplab.constants import RadialIntegralIndex, radial_integral
from blowuplab.models import Reference, Report, RunConfig

from ._common import ConfigOption, FormatOption, OutOption, execute, load_config


def beta(
    m: Annotated[int, typer.Option(help="Moment offset of the radial integral.")],
    k: Annotated[int, typer.Option(help="Exponent of the denominator.")],
    n: Annotated[int | None, typer.Option(help="Ambient dimension.")] = None,
    D: Annotated[
        float | None, typer.Option("--D", help="Curvature ratio, D > 1.")
    ] = None,
    method: Annotated[
        str,
        typer.Option(help="gamma, quadrature, or both (cross-checked)."),
    ] = "gamma",
    config_file: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
):
    """
    Evaluate the radial integral B(m, k; D) over R^(n-1).
    """
    if method not in ("gamma", "quadrature", "both"):
        typer.echo(f"Error: unknown method {method!r}", err=True)
        raise typer.Exit(1)

    def body(config: RunConfig):
        params = config.problem()
        idx = RadialIntegralIndex(m=m, k=k)
        spec = config.quadrature
        inputs = {"n": config.n, "D": config.D, "m": m, "k": k, "method": method}

        checks = {}
        if method == "both":
            closed = radial_integral(params, idx, "gamma", spec)
            numeric = radial_integral(params, idx, "quadrature", spec)
            checks["quadrature"] = (
                numeric,
                Reference(
                    value=closed,
                    provenance="Gamma-function closed form of B(m, k; D)",
                    tolerance=spec.rel_tol,
                ),
            )
            results = {"value": closed, "quadrature": numeric}
        else:
            value = radial_integral(params, idx, _method(method), spec)
            results = {"value": value}
        return Report.build("beta", inputs, results, checks), None

    execute("beta", partial(load_config, config_file, n=n, D=D), body, out, fmt)


def _method(method: str) -> Literal["gamma", "quadrature"]:
    return "quadrature" if method == "quadrature" else "gamma"
