import math
from collections.abc import Callable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate, optimize, special

from blowuplab.exceptions import (
    DomainError,
    NonConvergence,
    NoSignChange,
    SingularFit,
)
from blowuplab.logconfig import logger

# QUADPACK refuses relative tolerances below 50 machine epsilons.
_MIN_REL_TOL = 50 * np.finfo(float).eps

Sampler = Callable[[np.random.Generator, int], np.ndarray]


class QuadratureSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default=1e-10, gt=0)
    abs_tol: float = Field(default=0.0, ge=0)
    max_subdivisions: int = Field(default=200, ge=1)
    mc_samples: int = Field(default=64, ge=1)
    rng_seed: int = 0

    def relaxed(self, rel_tol: float) -> "QuadratureSpec":
        """Return a copy whose relative tolerance is at least ``rel_tol``."""
        return self.model_copy(update={"rel_tol": max(self.rel_tol, rel_tol)})


DEFAULT_SPEC = QuadratureSpec()

# Step and order of the finite-difference Laplacian.
FD_STEP = 1e-3
FD_ORDER = 4


class FitResult(BaseModel):
    """Least-squares fit.

    Polynomial fits store ``a_0, a_1, ...`` in ascending order. Power-law fits
    store ``log prefactor, exponent`` followed by the optional linear
    correction coefficient.
    """

    coefficients: list[float]
    residual_norm: float = Field(ge=0)
    condition_estimate: float

    @property
    def intercept(self) -> float:
        return self.coefficients[0]

    @property
    def slope(self) -> float:
        return self.coefficients[1]


class MonteCarloEstimate(BaseModel):
    value: float
    stderr: float = Field(ge=0)
    samples: int


def integrate_interval(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    points: Sequence[float] | None = None,
) -> float:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[a, b]``.

    ``b`` may be ``inf``; QUADPACK then maps the tail onto a finite interval,
    so no truncation radius is involved. Breakpoints are honoured on the
    finite part of the range.
    """
    if b <= a:
        return 0.0
    interior = sorted(p for p in (points or ()) if a < p < b and math.isfinite(p))
    if math.isinf(b) and interior:
        split = interior[-1]
        return integrate_interval(f, a, split, spec, interior[:-1]) + _quad(
            f, split, b, spec, None
        )
    return _quad(f, a, b, spec, interior or None)


def integrate_halfline(
    f: Callable[[float], float], spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    return integrate_interval(f, 0.0, math.inf, spec)


def integrate_2d(
    f: Callable[[float, float], float],
    x_breaks: Sequence[float],
    y_breaks: Callable[[float], Sequence[float]],
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """Nested quadrature of ``f(x, y)``.

    The outer variable runs over the consecutive segments of ``x_breaks``;
    for each ``x`` the inner variable runs over the segments of
    ``y_breaks(x)``. Segments may end at ``inf``.
    """

    def inner(x: float) -> float:
        return _integrate_segments(lambda y: f(x, y), y_breaks(x), spec)

    return _integrate_segments(inner, x_breaks, spec)


def monte_carlo(
    f: Callable[[np.ndarray], np.ndarray],
    sampler: Sampler,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> MonteCarloEstimate:
    """Plain Monte Carlo mean of ``f`` under the distribution of ``sampler``.

    ``f`` receives the whole ``(samples, dim)`` array and returns one value per
    row. The generator is seeded from ``spec.rng_seed``, so repeated calls
    see the same points.
    """
    rng = np.random.default_rng(spec.rng_seed)
    points = sampler(rng, spec.mc_samples)
    return sample_mean(f(points))


def sample_mean(values: Sequence[float]) -> MonteCarloEstimate:
    """Mean of independent samples with its standard error."""
    values = np.asarray(values, dtype=float)
    count = values.shape[0]
    stderr = float(values.std(ddof=1) / math.sqrt(count)) if count > 1 else 0.0
    return MonteCarloEstimate(value=float(values.mean()), stderr=stderr, samples=count)


def uniform_box(lower: Sequence[float], upper: Sequence[float]) -> Sampler:
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)

    def sample(rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.uniform(lo, hi, size=(count, lo.size))

    return sample


def uniform_sphere(dim: int) -> Sampler:
    """Uniform directions on the unit sphere of ``R^dim``."""

    def sample(rng: np.random.Generator, count: int) -> np.ndarray:
        g = rng.standard_normal((count, dim))
        return g / np.linalg.norm(g, axis=1, keepdims=True)

    return sample


def gamma_fn(x: float) -> float:
    if x <= 0:
        raise DomainError(f"Gamma function evaluated at non-positive argument {x}")
    return float(special.gamma(x))


def fd_gradient(
    f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-5
) -> np.ndarray:
    """Central-difference gradient of ``f`` at ``x`` with equal steps ``h``."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros(x.shape)
    for i, step in enumerate(np.eye(x.size) * h):
        grad[i] = (f(x + step) - f(x - step)) / (2 * h)
    return grad


def fd_laplacian(
    f: Callable[[np.ndarray], float], x: np.ndarray, h: float = FD_STEP
) -> float:
    """Fourth-order five-point-per-axis Laplacian of ``f`` at ``x``."""
    x = np.asarray(x, dtype=float)
    center = f(x)
    lapl = 0.0
    for step in np.eye(x.size) * h:
        lapl += (
            -f(x + 2 * step)
            + 16 * f(x + step)
            - 30 * center
            + 16 * f(x - step)
            - f(x - 2 * step)
        ) / (12 * h**2)
    return float(lapl)


def fit_polynomial(
    xs: Sequence[float], ys: Sequence[float], degree: int
) -> FitResult:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise SingularFit(f"Got {xs.size} abscissae but {ys.size} ordinates")
    design = np.vander(xs, degree + 1, increasing=True)
    return _least_squares(design, ys)


def fit_power_law(
    xs: Sequence[float],
    ys: Sequence[float],
    correction_exponents: Sequence[float] = (),
) -> FitResult:
    """Fit ``log|y| = a_0 + a_1 log x + sum_j b_j x^g_j``.

    Each exponent ``g_j`` adds a regressor that absorbs a relative correction
    ``y = C x^s (1 + c x^g + ...)``, so that the exponent is not biased by it.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise SingularFit(f"Got {xs.size} abscissae but {ys.size} ordinates")
    if np.any(xs <= 0) or np.any(ys == 0):
        raise DomainError("Power-law fits need positive abscissae and nonzero data")
    columns = [np.ones_like(xs), np.log(xs)]
    columns.extend(xs**g for g in correction_exponents)
    return _least_squares(np.column_stack(columns), np.log(np.abs(ys)))


def find_root_bracketed(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12
) -> float:
    """Root of ``f`` inside ``[lo, hi]`` by Brent's method.

    Falls back to bisection if Brent's iteration reports failure; the
    returned point always lies inside the initial bracket.
    """
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChange(
            f"f({lo:g}) = {f_lo:.6g} and f({hi:g}) = {f_hi:.6g} have the same sign"
        )
    try:
        root, info = optimize.brentq(f, lo, hi, xtol=tol, full_output=True, disp=False)
        if info.converged:
            return float(root)
    except (RuntimeError, ValueError) as exc:
        logger.debug("Brent iteration failed ({}); bisecting", exc)
    return float(optimize.bisect(f, lo, hi, xtol=tol, maxiter=10_000, disp=False))


def geometric_grid(lo: float, hi: float, count: int) -> list[float]:
    return [float(v) for v in np.geomspace(lo, hi, count)]


def _quad(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadratureSpec,
    points: Sequence[float] | None,
) -> float:
    result = integrate.quad(
        f,
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=max(spec.rel_tol, _MIN_REL_TOL),
        limit=spec.max_subdivisions,
        points=points,
        full_output=1,
    )
    # QUADPACK appends a message only when ier > 0.
    if len(result) > 3:
        raise NonConvergence(f"Quadrature on [{a:g}, {b:g}] failed: {result[3]}")
    return float(result[0])


def _integrate_segments(
    f: Callable[[float], float], breaks: Sequence[float], spec: QuadratureSpec
) -> float:
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        total += integrate_interval(f, a, b, spec)
    return total


def _least_squares(design: np.ndarray, rhs: np.ndarray) -> FitResult:
    rows, cols = design.shape
    if rows < cols:
        raise SingularFit(f"{rows} samples cannot determine {cols} coefficients")
    scale = np.linalg.norm(design, axis=0)
    if np.any(scale == 0):
        raise SingularFit("Design matrix has an all-zero column")
    coeffs, _, rank, singular = np.linalg.lstsq(design / scale, rhs, rcond=None)
    if rank < cols:
        raise SingularFit(f"Design matrix has rank {rank} < {cols}")
    coeffs = coeffs / scale
    residual = float(np.linalg.norm(design @ coeffs - rhs))
    return FitResult(
        coefficients=[float(c) for c in coeffs],
        residual_norm=residual,
        condition_estimate=float(singular[0] / singular[-1]),
    )
