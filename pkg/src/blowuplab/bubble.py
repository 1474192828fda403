"""Bubble solutions of the half-space problem and their linearized kernel.

Points are arrays whose last axis has length ``n``: ``x = (x_bar, x_n)`` with
``x_n >= 0``. Every function accepts a single point or a stack of points.
"""

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from blowuplab.constants import ProblemParams
from blowuplab.exceptions import DomainError
from blowuplab.numerics import (
    DEFAULT_SPEC,
    FD_STEP,
    MonteCarloEstimate,
    QuadratureSpec,
    fd_laplacian,
    monte_carlo,
    uniform_box,
)


class BubbleParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta: float = Field(default=1.0, gt=0, description="Concentration scale")
    xi: tuple[float, ...] = Field(
        default=(), description="Boundary location; empty means the origin"
    )

    def center(self, n: int) -> np.ndarray:
        if not self.xi:
            return np.zeros(n - 1)
        if len(self.xi) != n - 1:
            raise DomainError(f"xi must have {n - 1} components, got {len(self.xi)}")
        return np.asarray(self.xi, dtype=float)


class KernelIndex(BaseModel):
    model_config = ConfigDict(frozen=True)

    j: int = Field(ge=1, description="1..n-1 translations, n dilation")


UNIT = BubbleParams()


def relative_residual(lhs, rhs, magnitude=None):
    """``|lhs - rhs| / max(|lhs|, |rhs|, magnitude)``, zero where everything vanishes."""
    lhs, rhs = np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float)
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    if magnitude is not None:
        scale = np.maximum(scale, magnitude)
    diff = np.abs(lhs - rhs)
    return np.divide(diff, scale, out=np.zeros_like(diff), where=scale > 0)


def bubble_eval(params: ProblemParams, bp: BubbleParams, x, amplitude: float = 1.0):
    w, z = _shifted(params, bp, x)
    p = params.profile_exponent
    return amplitude * params.alpha * bp.delta**p * z**-p


def bubble_grad(params: ProblemParams, bp: BubbleParams, x, amplitude: float = 1.0):
    w, z = _shifted(params, bp, x)
    n, p = params.n, params.profile_exponent
    factor = -amplitude * params.alpha * bp.delta**p * (n - 2) * z ** (-n / 2)
    return factor[..., None] * w


def bubble_laplacian(
    params: ProblemParams, bp: BubbleParams, x, amplitude: float = 1.0
):
    # The Z^(-n/2) part of the general power rule cancels at s = (n-2)/2.
    _, z = _shifted(params, bp, x)
    n, p = params.n, params.profile_exponent
    return amplitude * params.alpha * n * (n - 2) * bp.delta ** (p + 2) * z ** (-(n + 2) / 2)


def interior_residual(
    params: ProblemParams,
    bp: BubbleParams,
    x,
    derivatives: Literal["analytic", "fd"] = "analytic",
    h: float = FD_STEP,
    amplitude: float = 1.0,
):
    """Relative residual of ``(4(n-1)/(n-2)) Delta U = U^((n+2)/(n-2))``."""
    x = np.asarray(x, dtype=float)
    u = bubble_eval(params, bp, x, amplitude)
    if derivatives == "analytic":
        lap = bubble_laplacian(params, bp, x, amplitude)
    else:
        points = x.reshape(-1, params.n)
        lap = np.array(
            [
                fd_laplacian(lambda y: float(bubble_eval(params, bp, y, amplitude)), y, h)
                for y in points
            ]
        ).reshape(u.shape)
    return relative_residual(params.kappa * lap, u ** ((params.n + 2) / (params.n - 2)))


def boundary_residual(
    params: ProblemParams, bp: BubbleParams, x_bar, amplitude: float = 1.0
):
    """``(2/(n-2)) dU/dnu - (D/sqrt(n(n-1))) U^(n/(n-2))`` at ``(x_bar, 0)``.

    The outward normal of the half-space is ``-e_n``.
    """
    x = _on_boundary(x_bar)
    n = params.n
    normal_derivative = -bubble_grad(params, bp, x, amplitude)[..., -1]
    u = bubble_eval(params, bp, x, amplitude)
    return 2 / (n - 2) * normal_derivative - params.boundary_coefficient * u ** (
        n / (n - 2)
    )


def boundary_relative_residual(
    params: ProblemParams, bp: BubbleParams, x_bar, amplitude: float = 1.0
):
    x = _on_boundary(x_bar)
    n = params.n
    u = bubble_eval(params, bp, x, amplitude)
    rhs = params.boundary_coefficient * u ** (n / (n - 2))
    return relative_residual(rhs + boundary_residual(params, bp, x_bar, amplitude), rhs)


def kernel_eval(params: ProblemParams, idx: KernelIndex, x):
    """Kernel function of the linearized problem at ``delta = 1, xi = 0``.

    ``j < n`` is the derivative of the bubble in ``x_j``; ``j = n`` is the
    derivative in ``delta``, taken literally, so that it equals the centred
    difference quotient of the bubble family in the scale.
    """
    j = _check_index(params, idx)
    w, z = _shifted(params, UNIT, x)
    x = np.asarray(x, dtype=float)
    n, a = params.n, params.alpha
    if j < n:
        return a * (2 - n) * x[..., j - 1] * z ** (-n / 2)
    numerator = np.sum(x * x, axis=-1) + 1 - params.D**2
    return a * (n - 2) / 2 * numerator * z ** (-n / 2)


def kernel_grad(params: ProblemParams, idx: KernelIndex, x):
    j = _check_index(params, idx)
    w, z = _shifted(params, UNIT, x)
    x = np.asarray(x, dtype=float)
    n, a = params.n, params.alpha
    if j < n:
        unit = np.zeros(n)
        unit[j - 1] = 1.0
        xj = x[..., j - 1]
        return (a * (2 - n) * z ** (-n / 2 - 1))[..., None] * (
            unit * z[..., None] - n * xj[..., None] * w
        )
    numerator = np.sum(x * x, axis=-1) + 1 - params.D**2
    return (a * (n - 2) / 2) * (
        2 * x * (z ** (-n / 2))[..., None]
        - (n * numerator * z ** (-n / 2 - 1))[..., None] * w
    )


def kernel_laplacian(params: ProblemParams, idx: KernelIndex, x):
    value, _ = _kernel_laplacian_terms(params, idx, x)
    return value


def linearized_residual(
    params: ProblemParams,
    idx: KernelIndex,
    x,
    where: Literal["interior", "boundary"] = "interior",
):
    """Relative residual of the linearized system for ``v = J_j``.

    ``interior``: ``-(4(n-1)/(n-2)) Delta v + ((n+2)/(n-2)) U^(4/(n-2)) v``.
    ``boundary`` (``x`` holds ``x_bar``): ``(2/(n-2)) dv/dnu
    - (D/(n-2)) sqrt(n/(n-1)) U^(2/(n-2)) v``.
    """
    n = params.n
    if where == "interior":
        lap, magnitude = _kernel_laplacian_terms(params, idx, x)
        potential = linearized_potential(params, x) * kernel_eval(params, idx, x)
        return relative_residual(
            params.kappa * lap, potential, params.kappa * magnitude
        )
    points = _on_boundary(x)
    normal_derivative = -kernel_grad(params, idx, points)[..., -1]
    lhs = 2 / (n - 2) * normal_derivative
    rhs = linearized_boundary_weight(params, points) * kernel_eval(params, idx, points)
    return relative_residual(lhs, rhs)


def dilation_fd_residual(params: ProblemParams, x, h: float = 1e-5):
    """Relative gap between ``J_n`` and the centred quotient of ``U_delta`` in ``delta`` at 1.

    ``J_n`` vanishes on the sphere ``|x|^2 = D^2 - 1``, so the gap is measured
    against the magnitude of its numerator taken term by term.
    """
    n = params.n
    idx = KernelIndex(j=n)
    quotient = (
        bubble_eval(params, BubbleParams(delta=1 + h), x)
        - bubble_eval(params, BubbleParams(delta=1 - h), x)
    ) / (2 * h)
    _, z = _shifted(params, UNIT, x)
    x = np.asarray(x, dtype=float)
    magnitude = (
        params.alpha
        * (n - 2)
        / 2
        * (np.sum(x * x, axis=-1) + 1 + params.D**2)
        * z ** (-n / 2)
    )
    return relative_residual(quotient, kernel_eval(params, idx, x), magnitude)


def linearized_potential(params: ProblemParams, x):
    """``((n+2)/(n-2)) U_1^(4/(n-2))``."""
    n = params.n
    return (n + 2) / (n - 2) * bubble_eval(params, UNIT, x) ** (4 / (n - 2))


def linearized_boundary_weight(params: ProblemParams, x):
    """``(D/(n-2)) sqrt(n/(n-1)) U_1^(2/(n-2))``."""
    n = params.n
    return (
        params.D
        / (n - 2)
        * np.sqrt(n / (n - 1))
        * bubble_eval(params, UNIT, x) ** (2 / (n - 2))
    )


def kernel_gradient_inner(
    params: ProblemParams,
    i: KernelIndex,
    q: KernelIndex,
    spec: QuadratureSpec = DEFAULT_SPEC,
    box: float = 6.0,
) -> MonteCarloEstimate:
    """Monte Carlo estimate of ``int grad J_i . grad J_q`` over a half-space box."""
    n = params.n
    lower = [-box] * (n - 1) + [0.0]
    upper = [box] * n
    volume = (2 * box) ** (n - 1) * box

    def integrand(points: np.ndarray) -> np.ndarray:
        return volume * np.sum(
            kernel_grad(params, i, points) * kernel_grad(params, q, points), axis=-1
        )

    return monte_carlo(integrand, uniform_box(lower, upper), spec)


def sample_interior_points(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """Interior points kept at distance 1/2 from the boundary.

    The margin keeps the fourth derivatives that control the stencil error of
    ``fd_laplacian`` at ``h = 1e-3`` moderate.
    """
    x_bar = rng.uniform(-1.0, 1.0, size=(count, n - 1))
    x_n = rng.uniform(0.5, 2.5, size=(count, 1))
    return np.hstack([x_bar, x_n])


def sample_boundary_points(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    return rng.uniform(-2.0, 2.0, size=(count, n - 1))


def _shifted(params: ProblemParams, bp: BubbleParams, x):
    x = np.asarray(x, dtype=float)
    n = params.n
    if x.shape[-1] != n:
        raise DomainError(f"Expected points in R^{n}, got trailing size {x.shape[-1]}")
    if np.any(x[..., -1] < 0):
        raise DomainError("Points must lie in the closed half-space x_n >= 0")
    w = x.copy()
    w[..., :-1] -= bp.center(n)
    w[..., -1] += bp.delta * params.D
    z = np.sum(w * w, axis=-1) - bp.delta**2
    return w, z


def _on_boundary(x_bar) -> np.ndarray:
    x_bar = np.asarray(x_bar, dtype=float)
    return np.concatenate([x_bar, np.zeros(x_bar.shape[:-1] + (1,))], axis=-1)


def _check_index(params: ProblemParams, idx: KernelIndex) -> int:
    if idx.j > params.n:
        raise DomainError(f"Kernel index {idx.j} exceeds dimension {params.n}")
    return idx.j


def _kernel_laplacian_terms(params: ProblemParams, idx: KernelIndex, x):
    """Analytic Laplacian of ``J_j`` and the sum of magnitudes of its parts."""
    j = _check_index(params, idx)
    w, z = _shifted(params, UNIT, x)
    x = np.asarray(x, dtype=float)
    n, a = params.n, params.alpha
    if j < n:
        value = a * (2 - n) * x[..., j - 1] * n * (n + 2) * z ** (-n / 2 - 2)
        return value, np.abs(value)
    c = a * (n - 2) / 2
    numerator = np.sum(x * x, axis=-1) + 1 - params.D**2
    x_dot_w = np.sum(x * w, axis=-1)
    parts = [
        c * numerator * z ** (-n / 2 - 2) * (2 * n * z + n * (n + 2)),
        -4 * n * c * x_dot_w * z ** (-n / 2 - 1),
        2 * n * c * z ** (-n / 2),
    ]
    return sum(parts), sum(np.abs(part) for part in parts)
