"""The first-order constant C_n(D) and the leading-order reduced energy.

``C_n(D)`` aggregates the delta-coefficients of the energy expansion. Its
last summand involves a radial integral written ``beta^0_{n-2}``, which can
be read in two ways:

``shifted``
    ``B(0, n-2; D)``, the integral the first-order energy computation
    actually produces. With this reading the four summands cancel
    identically, ``(n-2)(D^2-1) beta^2 - (n-2) beta^4 + B(0, n-2) = 0``, so
    ``C_n`` vanishes for every ``D`` up to rounding.
``substituted``
    The closed form of ``beta^0`` with ``n`` replaced by ``n - 2`` throughout.
    ``C_n`` then changes sign once, at ``D^2 = 1 + (n-3)/(2 pi)``.
"""

import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from blowuplab.constants import (
    NormKind,
    ProblemParams,
    RadialIntegralIndex,
    beta,
    bubble_energy_constant,
    bubble_norm,
    radial_integral,
)
from blowuplab.exceptions import (
    DomainError,
    MultipleRoots,
    NonConvergence,
    RegimeError,
    VanishingConstant,
)
from blowuplab.logconfig import logger
from blowuplab.numerics import FitResult, find_root_bracketed, fit_power_law

# |C_n| below this fraction of the summands' magnitudes is rounding noise.
VANISHING_RTOL = 1e-10

ROOT_BRACKET = (1 + 1e-6, 10.0)
SCAN_LIMIT = 1e3
SCAN_POINTS = 200

NEAR_ONE_OFFSETS = (1e-4, 1e-5, 1e-6)
INFINITY_POINTS = (1e2, 1e3, 1e4)
STABILITY_RTOL = 1e-2


class Beta0Convention(str, Enum):
    SHIFTED = "shifted"
    SUBSTITUTED = "substituted"


class AsymptoticRegime(str, Enum):
    NEAR_ONE = "near-one"
    INFINITY = "infinity"


class CnTerms(BaseModel):
    gradient: float
    volume: float
    trace: float
    curvature: float

    @property
    def total(self) -> float:
        return self.gradient + self.volume + self.trace + self.curvature

    @property
    def magnitude(self) -> float:
        return (
            abs(self.gradient) + abs(self.volume) + abs(self.trace) + abs(self.curvature)
        )

    @property
    def vanishes(self) -> bool:
        return abs(self.total) <= VANISHING_RTOL * self.magnitude


class AsymptoticFit(BaseModel):
    n: int
    regime: AsymptoticRegime
    convention: Beta0Convention
    points: list[float] = Field(description="D - 1 near one, D at infinity")
    values: list[float]
    fit: FitResult
    exponent: float = Field(description="Fitted log-log slope")
    constant: float = Field(
        description="Prefactor estimate: a_n near one, the limiting ratio at infinity"
    )


class CriticalPointModel(BaseModel):
    """Local model ``H(xi) = H0 + (1/2)(xi - p)^T hess (xi - p)`` of the mean curvature."""

    model_config = ConfigDict(frozen=True)

    H0: float
    hess: tuple[tuple[float, ...], ...]
    p: tuple[float, ...] = ()

    @field_validator("hess")
    @classmethod
    def validate_hess(
        cls, hess: tuple[tuple[float, ...], ...]
    ) -> tuple[tuple[float, ...], ...]:
        matrix = np.asarray(hess, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.size == 0:
            raise ValueError("hess must be a non-empty square matrix")
        if not np.allclose(matrix, matrix.T):
            raise ValueError("hess must be symmetric")
        singular = np.linalg.svd(matrix, compute_uv=False)
        if singular[-1] <= 1e-12 * singular[0]:
            raise ValueError("hess must be nondegenerate")
        return hess

    @model_validator(mode="after")
    def validate_point(self) -> "CriticalPointModel":
        if self.p and len(self.p) != len(self.hess):
            raise ValueError(f"p must have {len(self.hess)} components")
        return self

    @classmethod
    def isotropic(cls, n: int, H0: float, eigenvalue: float = -1.0) -> "CriticalPointModel":
        hess = eigenvalue * np.eye(n - 1)
        return cls(H0=H0, hess=tuple(map(tuple, hess.tolist())))

    @property
    def hessian(self) -> np.ndarray:
        return np.asarray(self.hess, dtype=float)

    @property
    def center(self) -> np.ndarray:
        return np.asarray(self.p, dtype=float) if self.p else np.zeros(len(self.hess))

    def mean_curvature(self, xi: np.ndarray) -> float:
        offset = np.asarray(xi, dtype=float) - self.center
        return float(self.H0 + 0.5 * offset @ self.hessian @ offset)

    def mean_curvature_gradient(self, xi: np.ndarray) -> np.ndarray:
        return self.hessian @ (np.asarray(xi, dtype=float) - self.center)


class ReducedEnergyParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: float = Field(gt=0)
    d_range: tuple[float, float] = (1e-8, 1e8)

    @field_validator("d_range")
    @classmethod
    def validate_d_range(cls, d_range: tuple[float, float]) -> tuple[float, float]:
        lo, hi = d_range
        if not 0 < lo < hi:
            raise ValueError("d_range must be a positive interval")
        return d_range


class CriticalPointResult(BaseModel):
    d: float
    xi: list[float]
    d_closed_form: float
    iterations: int
    gradient_norm: float
    relative_gradient_norm: float
    energy: float
    hessian: list[list[float]]
    signature: tuple[int, int] = Field(description="(positive, negative) eigenvalues")


def beta0(params: ProblemParams, convention: Beta0Convention) -> float:
    n = params.n
    if convention is Beta0Convention.SHIFTED:
        return radial_integral(params, RadialIntegralIndex(m=0, k=n - 2))
    lowered = ProblemParams(n=n - 2, D=params.D)
    return radial_integral(lowered, RadialIntegralIndex(m=0, k=n - 2))


def c_n_terms(
    params: ProblemParams, convention: Beta0Convention = Beta0Convention.SHIFTED
) -> CnTerms:
    n, a, D = params.n, params.alpha, params.D
    if n < 5:
        raise DomainError(f"C_n is defined for n >= 5, got {n}")
    b2, b4 = beta(params, 2), beta(params, 4)
    return CnTerms(
        gradient=-(n - 1) * (n - 2) * a**2 * (D**2 * b2 + b4),
        volume=-(a**params.critical_exponent) * (n - 2) / (4 * n) * b2,
        trace=(n - 2)
        * math.sqrt((n - 1) / n)
        * a**params.trace_exponent
        * D**2
        * b2,
        curvature=(n - 1) * a**2 * beta0(params, convention),
    )


def c_n(
    params: ProblemParams, convention: Beta0Convention = Beta0Convention.SHIFTED
) -> float:
    return c_n_terms(params, convention).total


def reference_root(n: int) -> float:
    """The stated zero ``sqrt((n+1)/(n-1))``."""
    return math.sqrt((n + 1) / (n - 1))


def substituted_root(n: int) -> float:
    """Zero of ``C_n`` under the substituted reading: ``sqrt(1 + (n-3)/(2 pi))``."""
    return math.sqrt(1 + (n - 3) / (2 * math.pi))


def c_n_root(
    n: int,
    tol: float = 1e-12,
    convention: Beta0Convention = Beta0Convention.SHIFTED,
) -> float:
    """The unique zero of ``D -> C_n(D)`` on ``(1, 10^3]``."""
    if n < 6:
        raise DomainError(f"Root certification needs n >= 6, got {n}")

    def f(D: float) -> float:
        return c_n(ProblemParams(n=n, D=D), convention)

    _check_not_vanishing(n, convention)
    lo, hi = ROOT_BRACKET
    root = find_root_bracketed(f, lo, hi, tol)

    below = np.geomspace(lo - 1, (root - 1) * (1 - 1e-6), SCAN_POINTS) + 1
    above = np.geomspace(root * (1 + 1e-6), SCAN_LIMIT, SCAN_POINTS)
    for side in (below, above):
        signs = {np.sign(f(float(D))) for D in side}
        if len(signs) > 1:
            raise MultipleRoots(
                f"C_{n} changes sign more than once on (1, {SCAN_LIMIT:g}]"
            )
    logger.debug("C_{} root at D = {:.12f}", n, root)
    return root


def c_n_asymptotics(
    n: int,
    regime: AsymptoticRegime,
    convention: Beta0Convention = Beta0Convention.SHIFTED,
) -> AsymptoticFit:
    """Behaviour of ``C_n`` as ``D -> 1+`` and as ``D -> infinity``.

    Near one the log-log slope of ``C_n`` against ``D - 1`` is fitted. At
    infinity the ratio ``C_n(D) (D^2-1)^(n/2) / D^3`` is tracked over three
    decades and must settle.
    """
    if n < 6:
        raise DomainError(f"Asymptotics are certified for n >= 6, got {n}")
    regime = AsymptoticRegime(regime)
    _check_not_vanishing(n, convention)

    if regime is AsymptoticRegime.NEAR_ONE:
        points = list(NEAR_ONE_OFFSETS)
        values = [c_n(ProblemParams(n=n, D=1 + x), convention) for x in points]
        fit = fit_power_law(points, values)
        constant = math.exp(fit.intercept) * math.copysign(1.0, values[-1])
        return AsymptoticFit(
            n=n,
            regime=regime,
            convention=convention,
            points=points,
            values=values,
            fit=fit,
            exponent=fit.slope,
            constant=constant,
        )

    points = list(INFINITY_POINTS)
    values = [
        c_n(ProblemParams(n=n, D=D), convention) * (D * D - 1) ** (n / 2) / D**3
        for D in points
    ]
    change = abs(values[-1] - values[-2]) / abs(values[-1])
    if change > STABILITY_RTOL:
        raise NonConvergence(
            f"C_{n}(D)(D^2-1)^(n/2)/D^3 still changes by {change:.2%} over the last decade"
        )
    fit = fit_power_law(points, values)
    return AsymptoticFit(
        n=n,
        regime=regime,
        convention=convention,
        points=points,
        values=values,
        fit=fit,
        exponent=fit.slope,
        constant=values[-1],
    )


def reduced_energy(
    params: ProblemParams,
    model: CriticalPointModel,
    rp: ReducedEnergyParams,
    d: float,
    xi,
    convention: Beta0Convention = Beta0Convention.SHIFTED,
) -> float:
    """``E + (1/mu)(C_n H(xi) d + (d^2/2) int U_1^2)``."""
    mass = bubble_norm(params, NormKind.L2_VOLUME)
    return bubble_energy_constant(params) + (
        c_n(params, convention) * model.mean_curvature(xi) * d + d * d / 2 * mass
    ) / rp.mu


def reduced_gradient(
    params: ProblemParams,
    model: CriticalPointModel,
    rp: ReducedEnergyParams,
    d: float,
    xi,
    convention: Beta0Convention = Beta0Convention.SHIFTED,
) -> np.ndarray:
    """Gradient ordered as ``(d/dd, d/dxi_1, ..., d/dxi_{n-1})``."""
    c = c_n(params, convention)
    return _gradient(c, bubble_norm(params, NormKind.L2_VOLUME), model, rp, d, xi)


def reduced_hessian(
    params: ProblemParams,
    model: CriticalPointModel,
    rp: ReducedEnergyParams,
    d: float,
    xi,
    convention: Beta0Convention = Beta0Convention.SHIFTED,
) -> np.ndarray:
    c = c_n(params, convention)
    return _hessian(c, bubble_norm(params, NormKind.L2_VOLUME), model, rp, d, xi)


def closed_form_scale(
    params: ProblemParams,
    model: CriticalPointModel,
    convention: Beta0Convention = Beta0Convention.SHIFTED,
) -> tuple[float, bool]:
    """``d* = -C_n H0 / int U_1^2`` and whether ``C_n`` vanishes (degenerate)."""
    terms = c_n_terms(params, convention)
    if terms.vanishes:
        return 0.0, True
    return -terms.total * model.H0 / bubble_norm(params, NormKind.L2_VOLUME), False


def solve_critical_point(
    params: ProblemParams,
    model: CriticalPointModel,
    rp: ReducedEnergyParams,
    newton_tol: float = 1e-10,
    start: tuple[float, list[float]] | None = None,
    convention: Beta0Convention = Beta0Convention.SHIFTED,
    max_iterations: int = 50,
) -> CriticalPointResult:
    """Newton iteration on the reduced gradient.

    Convergence is declared once ``|grad J|`` drops below ``newton_tol``. The
    gradient relative to ``(|C_n| H0 + int U_1^2) / mu`` is reported as well.
    """
    if len(model.hess) != params.n - 1:
        raise DomainError(f"hess must be {params.n - 1}x{params.n - 1} for n = {params.n}")
    terms = c_n_terms(params, convention)
    if terms.vanishes or terms.total >= 0:
        raise RegimeError(
            f"C_{params.n}({params.D:g}) = {terms.total:.6g} is not negative; "
            "no positive-scale critical point at leading order"
        )
    if model.H0 <= 0:
        raise RegimeError(f"H0 = {model.H0:g} must be positive")

    c = terms.total
    mass = bubble_norm(params, NormKind.L2_VOLUME)
    scale = (abs(c) * model.H0 + mass) / rp.mu
    if start is None:
        d, xi = 1.0, model.center + 1e-2
    else:
        d, xi = start[0], np.asarray(start[1], dtype=float)

    lo, hi = rp.d_range
    for iteration in range(max_iterations + 1):
        gradient = _gradient(c, mass, model, rp, d, xi)
        if np.linalg.norm(gradient) <= newton_tol:
            break
        if iteration == max_iterations:
            raise NonConvergence(
                f"Newton did not converge in {max_iterations} iterations "
                f"(|grad| = {np.linalg.norm(gradient):.3g})"
            )
        step = np.linalg.solve(_hessian(c, mass, model, rp, d, xi), -gradient)
        d, xi = d + step[0], xi + step[1:]
        logger.debug("Newton step {}: d = {:.15g}", iteration + 1, d)

    if not lo <= d <= hi:
        raise NonConvergence(f"Newton left the admissible range: d = {d:g}")
    hessian = _hessian(c, mass, model, rp, d, xi)
    eigenvalues = np.linalg.eigvalsh(hessian)
    gradient_norm = float(np.linalg.norm(gradient))
    d_closed, _ = closed_form_scale(params, model, convention)
    return CriticalPointResult(
        d=float(d),
        xi=[float(v) for v in xi],
        d_closed_form=d_closed,
        iterations=iteration,
        gradient_norm=gradient_norm,
        relative_gradient_norm=gradient_norm / scale,
        energy=reduced_energy(params, model, rp, d, xi, convention),
        hessian=hessian.tolist(),
        signature=(int(np.sum(eigenvalues > 0)), int(np.sum(eigenvalues < 0))),
    )


def _gradient(c, mass, model, rp, d, xi) -> np.ndarray:
    return (
        np.concatenate(
            [
                [c * model.mean_curvature(xi) + d * mass],
                c * d * model.mean_curvature_gradient(xi),
            ]
        )
        / rp.mu
    )


def _hessian(c, mass, model, rp, d, xi) -> np.ndarray:
    grad_h = model.mean_curvature_gradient(xi)
    size = len(grad_h) + 1
    hessian = np.empty((size, size))
    hessian[0, 0] = mass
    hessian[0, 1:] = hessian[1:, 0] = c * grad_h
    hessian[1:, 1:] = c * d * model.hessian
    return hessian / rp.mu


def _check_not_vanishing(n: int, convention: Beta0Convention):
    samples = (1.1, 1.5, 3.0)
    if all(c_n_terms(ProblemParams(n=n, D=D), convention).vanishes for D in samples):
        raise VanishingConstant(
            f"C_{n} vanishes identically under the {convention.value} reading of beta^0"
        )
