from functools import partial
from typing import Annotated

import numpy as np
import typer

from blowuplab.bubble import (
    UNIT,
    BubbleParams,
    KernelIndex,
    boundary_relative_residual,
    dilation_fd_residual,
    interior_residual,
    linearized_residual,
    sample_boundary_points,
    sample_interior_points,
)
from blowuplab.models import Reference, Report, RunConfig
from blowuplab.numerics import FD_ORDER, FD_STEP

from ._common import ConfigOption, FormatOption, OutOption, execute, load_config

PointsOption = Annotated[int, typer.Option(min=1, help="Random points per check.")]
SeedOption = Annotated[int, typer.Option(help="Seed of the point generator.")]
DimensionOption = Annotated[int | None, typer.Option(help="Ambient dimension.")]
RatioOption = Annotated[
    float | None, typer.Option("--D", help="Curvature ratio, D > 1.")
]


def verify_bubble(
    n: DimensionOption = None,
    D: RatioOption = None,
    points: PointsOption = 1000,
    seed: SeedOption = 0,
    fd_step: Annotated[
        float,
        typer.Option(min=1e-6, max=1e-1, help="Step of the finite-difference Laplacian."),
    ] = FD_STEP,
    config_file: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
):
    """
    Check that the bubble solves the half-space problem at random points.
    """

    def body(config: RunConfig):
        params = config.problem()
        rng = np.random.default_rng(seed)
        interior = sample_interior_points(rng, params.n, points)
        boundary = sample_boundary_points(rng, params.n, points)
        moved = BubbleParams(
            delta=float(rng.uniform(0.5, 2.0)),
            xi=tuple(rng.uniform(-1.0, 1.0, size=params.n - 1).tolist()),
        )

        residuals = {
            "interior_analytic": max(
                float(np.max(interior_residual(params, bp, interior)))
                for bp in (UNIT, moved)
            ),
            "interior_fd": float(
                np.max(
                    interior_residual(params, UNIT, interior, derivatives="fd", h=fd_step)
                )
            ),
            "boundary": max(
                float(np.max(boundary_relative_residual(params, bp, boundary)))
                for bp in (UNIT, moved)
            ),
        }
        tolerances = {
            "interior_analytic": 1e-12,
            "interior_fd": 1e-6,
            "boundary": 1e-12,
        }
        checks = {
            name: (
                value,
                Reference(
                    value=0.0,
                    provenance="exact bubble solution of the half-space problem",
                    tolerance=tolerances[name],
                ),
            )
            for name, value in residuals.items()
        }
        inputs = {
            "n": params.n,
            "D": params.D,
            "points": points,
            "seed": seed,
            "fd_step": fd_step,
            "fd_order": FD_ORDER,
        }
        return Report.build("verify-bubble", inputs, residuals, checks), None

    execute(
        "verify-bubble",
        partial(load_config, config_file, n=n, D=D),
        body,
        out,
        fmt,
    )


def verify_kernel(
    n: DimensionOption = None,
    D: RatioOption = None,
    points: PointsOption = 1000,
    seed: SeedOption = 0,
    config_file: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
):
    """
    Check that every kernel function solves the linearized problem.
    """

    def body(config: RunConfig):
        params = config.problem()
        rng = np.random.default_rng(seed)
        interior = sample_interior_points(rng, params.n, points)
        boundary = sample_boundary_points(rng, params.n, points)

        residuals = {}
        for j in range(1, params.n + 1):
            idx = KernelIndex(j=j)
            residuals[f"interior_{j}"] = float(
                np.max(linearized_residual(params, idx, interior, "interior"))
            )
            residuals[f"boundary_{j}"] = float(
                np.max(linearized_residual(params, idx, boundary, "boundary"))
            )
        residuals["dilation_fd"] = float(np.max(dilation_fd_residual(params, interior)))

        checks = {
            name: (
                value,
                Reference(
                    value=0.0,
                    provenance="kernel of the linearized half-space problem",
                    tolerance=1e-8 if name == "dilation_fd" else 1e-10,
                ),
            )
            for name, value in residuals.items()
        }
        inputs = {"n": params.n, "D": params.D, "points": points, "seed": seed}
        return Report.build("verify-kernel", inputs, residuals, checks), None

    execute(
        "verify-kernel",
        partial(load_config, config_file, n=n, D=D),
        body,
        out,
        fmt,
    )
