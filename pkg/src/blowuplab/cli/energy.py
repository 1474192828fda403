from enum import Enum
from functools import partial
from typing import Annotated

import typer

from blowuplab.bubble import BubbleParams
from blowuplab.energy import (
    energy_terms,
    expansion_fit,
    residual_norm_scaling,
)
from blowuplab.models import Reference, Report, RunConfig

from ._common import (
    ConfigOption,
    FormatOption,
    OutOption,
    Table,
    execute,
    load_config,
)

TERMS = ("e1", "e2", "e3", "e4", "e5")
RESIDUAL_COMPONENTS = (
    "w_norm",
    "interior_operator",
    "boundary_operator",
    "boundary_mismatch",
    "curvature_term",
)
PROVENANCE = {
    "e1": "boundary-curvature correction: -(kappa/2) delta H0 (alpha^2 (n-2)^2 / 2)(D^2 B(2) + B(4))",
    "e3": "critical interior power: -((n-2)/(2n)) delta alpha^(2*) (H0/2) B(2)",
    "e4": "critical boundary power: trace shift of U^(2#) from the plane to the graph",
    "e5": "volume element: (n-1) delta alpha^2 H0 B(0, n-2)",
    "aggregate": "C_n(D) H(0): sum of the first-order coefficients",
}


class Method(str, Enum):
    AUTO = "auto"
    RADIAL = "radial"
    MONTE_CARLO = "monte_carlo"


MethodOption = Annotated[
    Method,
    typer.Option(
        help="radial for equal curvatures, monte_carlo over ray directions, "
        "or auto to pick one."
    ),
]
DimensionOption = Annotated[int | None, typer.Option(help="Ambient dimension.")]
RatioOption = Annotated[
    float | None, typer.Option("--D", help="Curvature ratio, D > 1.")
]


def energy(
    delta: Annotated[float, typer.Option(help="Concentration scale.")] = 1e-2,
    n: DimensionOption = None,
    D: RatioOption = None,
    mu: Annotated[float | None, typer.Option(help="Coefficient of the L^2 term.")] = None,
    method: MethodOption = Method.AUTO,
    config_file: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
):
    """
    Evaluate the five energy terms of the cut-off bubble at one delta.
    """

    def body(config: RunConfig):
        breakdown = energy_terms(
            config.problem(),
            config.domain(),
            BubbleParams(delta=delta),
            config.quadrature,
            method.value,
        )
        total = breakdown.total(config.mu)
        results = {term: getattr(breakdown, term) for term in TERMS}
        results.update(
            total=total,
            mu_free=breakdown.mu_free,
            stderr=breakdown.stderr,
            method=breakdown.method,
        )
        inputs = {
            "n": config.n,
            "D": config.D,
            "delta": delta,
            "mu": config.mu,
            "curvatures": list(config.domain().curvatures),
            "rho": config.rho,
        }
        row = [delta, *(getattr(breakdown, term) for term in TERMS), total]
        return (
            Report.build("energy", inputs, results),
            Table(["delta", *TERMS, "total"], [row]),
        )

    execute(
        "energy",
        partial(load_config, config_file, n=n, D=D, mu=mu),
        body,
        out,
        fmt,
    )


def expansion(
    n: DimensionOption = None,
    D: RatioOption = None,
    method: MethodOption = Method.AUTO,
    config_file: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
):
    """
    Fit the energy against delta and compare its coefficients with closed forms.
    """

    def body(config: RunConfig):
        fit = expansion_fit(
            config.problem(),
            config.domain(),
            config.deltas,
            config.quadrature,
            method.value,
        )
        flat = fit.mean_curvature == 0
        energy_scale = abs(fit.energy_constant)
        term_scale = sum(abs(fit.predicted[term]) for term in ("e1", "e3", "e4", "e5"))

        checks = {}
        scales = {}
        for term, provenance in PROVENANCE.items():
            checks[f"c1_{term}"] = (
                fit.first_order[term],
                Reference(
                    value=fit.predicted[term],
                    provenance=provenance,
                    tolerance=1e-3 if flat else 1e-2,
                ),
            )
            if flat:
                scales[f"c1_{term}"] = energy_scale
            elif term == "aggregate":
                scales[f"c1_{term}"] = term_scale
        checks["e2"] = (
            fit.e2_coefficient,
            Reference(
                value=fit.e2_predicted,
                provenance="L^2 term: e2 / delta^2 -> (1/2) int U_1^2",
                tolerance=1e-2,
            ),
        )
        checks["intercept"] = (
            fit.intercept,
            Reference(
                value=fit.energy_constant,
                provenance="energy of U_1 in the half-space",
                tolerance=5e-3,
            ),
        )

        results = {
            "mean_curvature": fit.mean_curvature,
            "first_order": fit.first_order,
            "predicted": fit.predicted,
            "intercept": fit.intercept,
            "energy_constant": fit.energy_constant,
            "e2_coefficient": fit.e2_coefficient,
            "residual_norms": {
                term: result.residual_norm for term, result in fit.fits.items()
            },
        }
        inputs = {
            "n": config.n,
            "D": config.D,
            "curvatures": list(config.domain().curvatures),
            "rho": config.rho,
            "deltas": fit.deltas,
            "method": method.value,
        }
        rows = [
            [b.delta, *(getattr(b, term) for term in TERMS), b.total(config.mu)]
            for b in fit.breakdowns
        ]
        report = Report.build("expansion", inputs, results, checks, scales)
        return report, Table(["delta", *TERMS, "total"], rows)

    execute("expansion", partial(load_config, config_file, n=n, D=D), body, out, fmt)


def residual_norms(
    n: DimensionOption = None,
    D: RatioOption = None,
    method: MethodOption = Method.AUTO,
    config_file: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
):
    """
    Fit the delta-scaling of the residual norms of the cut-off bubble.
    """

    def body(config: RunConfig):
        scaling = residual_norm_scaling(
            config.problem(),
            config.domain(),
            config.deltas,
            config.quadrature,
            method.value,
        )
        checks = {
            f"slope_{key}": (
                scaling.slopes[key],
                Reference(
                    value=scaling.expected[key],
                    provenance=f"||{key}|| = O(delta^{scaling.expected[key]:g})",
                    tolerance=0.02,
                ),
            )
            for key in scaling.certified
        }
        results = {
            "slopes": scaling.slopes,
            "expected": scaling.expected,
            "certified": scaling.certified,
            "log_corrected": scaling.log_corrected,
        }
        inputs = {
            "n": config.n,
            "D": config.D,
            "curvatures": list(config.domain().curvatures),
            "rho": config.rho,
            "deltas": scaling.deltas,
            "method": method.value,
        }
        rows = [
            [norm.delta, *(getattr(norm, key) for key in RESIDUAL_COMPONENTS)]
            for norm in scaling.norms
        ]
        report = Report.build("residual-norms", inputs, results, checks)
        return report, Table(["delta", *RESIDUAL_COMPONENTS], rows)

    execute(
        "residual-norms",
        partial(load_config, config_file, n=n, D=D),
        body,
        out,
        fmt,
    )
