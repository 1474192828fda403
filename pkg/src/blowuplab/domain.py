"""Quadratic model of the domain near an elliptic boundary point.

The boundary is the graph ``x_n = phi(x_bar) = sum k_i x_i^2`` over the ball
``B'(rho)``; the domain lies above it. ``Sigma`` is the sliver between the
tangent plane and the graph.
"""

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from blowuplab.exceptions import DomainError

# Points on the sphere |x_bar| = rho count as inside the patch.
_RADIUS_SLACK = 1e-12


class PatchRegion(str, Enum):
    OMEGA = "omega"
    SIGMA = "sigma"
    OUTSIDE = "outside"


class CutoffProfile(BaseModel):
    """Product cutoff ``chi(x) = s(|x_bar|) s(x_n)`` with a quintic smoothstep ``s``."""

    model_config = ConfigDict(frozen=True)

    inner_radius: float = Field(gt=0)
    outer_radius: float = Field(gt=0)
    smoothness: int = Field(default=5, description="Degree of the smoothstep")

    @field_validator("smoothness")
    @classmethod
    def validate_smoothness(cls, smoothness: int) -> int:
        if smoothness != 5:
            raise ValueError("Only the quintic (C^2) smoothstep is implemented")
        return smoothness

    @model_validator(mode="after")
    def validate_radii(self) -> "CutoffProfile":
        if self.inner_radius >= self.outer_radius:
            raise ValueError("inner_radius must be smaller than outer_radius")
        return self

    @classmethod
    def for_radius(cls, rho: float) -> "CutoffProfile":
        return cls(inner_radius=rho / 2, outer_radius=rho)

    @property
    def width(self) -> float:
        return self.outer_radius - self.inner_radius

    def ramp(self, t):
        u = self._progress(t)
        return 1 - u**3 * (10 - 15 * u + 6 * u**2)

    def ramp_derivative(self, t):
        u = self._progress(t)
        return -30 * u**2 * (1 - u) ** 2 / self.width

    def ramp_second_derivative(self, t):
        u = self._progress(t)
        return -60 * u * (1 - u) * (1 - 2 * u) / self.width**2

    def _progress(self, t):
        return np.clip((np.asarray(t, dtype=float) - self.inner_radius) / self.width, 0, 1)


class CutoffBounds(BaseModel):
    gradient: float = Field(description="sup |x| |grad chi| over the shell")
    laplacian: float = Field(description="sup |x|^2 |Delta chi| over the shell")


class ModelDomain(BaseModel):
    model_config = ConfigDict(frozen=True)

    curvatures: tuple[float, ...] = Field(min_length=2)
    rho: float = Field(default=1.0, gt=0)

    @field_validator("curvatures")
    @classmethod
    def validate_curvatures(cls, curvatures: tuple[float, ...]) -> tuple[float, ...]:
        if any(k < 0 for k in curvatures):
            raise ValueError("Principal curvatures must be non-negative")
        return curvatures

    @property
    def n(self) -> int:
        return len(self.curvatures) + 1

    @property
    def k(self) -> np.ndarray:
        return np.asarray(self.curvatures, dtype=float)

    @property
    def is_umbilic(self) -> bool:
        return max(self.curvatures) == min(self.curvatures)

    @property
    def mean_curvature_at_origin(self) -> float:
        return 2 * sum(self.curvatures) / (self.n - 1)

    @property
    def cutoff(self) -> CutoffProfile:
        return CutoffProfile.for_radius(self.rho)


def phi(domain: ModelDomain, x_bar):
    x_bar = _in_patch(domain, x_bar)
    return np.sum(domain.k * x_bar**2, axis=-1)


def phi_gradient(domain: ModelDomain, x_bar):
    x_bar = _in_patch(domain, x_bar)
    return 2 * domain.k * x_bar


def surface_jacobian(domain: ModelDomain, x_bar):
    """``sqrt(1 + |grad phi|^2)``, the area element of the graph."""
    grad = phi_gradient(domain, x_bar)
    return np.sqrt(1 + np.sum(grad * grad, axis=-1))


def mean_curvature(domain: ModelDomain, x_bar):
    """``(1/(n-1)) div(grad phi / sqrt(1 + |grad phi|^2))``, so that ``H(0) = 2 sum k_i/(n-1)``."""
    x_bar = _in_patch(domain, x_bar)
    k = domain.k
    w = np.sqrt(1 + 4 * np.sum(k**2 * x_bar**2, axis=-1))
    cubic = np.sum(k**3 * x_bar**2, axis=-1)
    return (2 * np.sum(k) / w - 8 * cubic / w**3) / (domain.n - 1)


def cutoff_eval(profile: CutoffProfile, x):
    r, x_n = _cylindrical(x)
    return profile.ramp(r) * profile.ramp(x_n)


def cutoff_gradient(profile: CutoffProfile, x):
    x = np.asarray(x, dtype=float)
    r, x_n = _cylindrical(x)
    radial = profile.ramp_derivative(r) * profile.ramp(x_n)
    # ramp' vanishes near r = 0, so the direction x_bar / r is never needed there.
    direction = np.divide(
        x[..., :-1],
        r[..., None],
        out=np.zeros_like(x[..., :-1]),
        where=r[..., None] > 0,
    )
    normal = profile.ramp(r) * profile.ramp_derivative(x_n)
    return np.concatenate([radial[..., None] * direction, normal[..., None]], axis=-1)


def cutoff_laplacian(profile: CutoffProfile, x):
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    r, x_n = _cylindrical(x)
    first = np.divide(
        profile.ramp_derivative(r),
        r,
        out=np.zeros_like(r),
        where=r > 0,
    )
    radial = profile.ramp_second_derivative(r) + (n - 2) * first
    return radial * profile.ramp(x_n) + profile.ramp(r) * profile.ramp_second_derivative(
        x_n
    )


def graph_cutoff_normal_derivative(domain: ModelDomain, x_bar):
    """Outward normal derivative of ``chi`` at the graph point ``(x_bar, phi(x_bar))``.

    The outward normal of ``{x_n > phi}`` is ``(grad phi, -1)/J`` and
    ``x_bar . grad phi = 2 phi`` for a quadratic form.
    """
    profile = domain.cutoff
    x_bar = _in_patch(domain, x_bar)
    r = np.linalg.norm(x_bar, axis=-1)
    height = np.sum(domain.k * x_bar**2, axis=-1)
    tangential = np.divide(
        profile.ramp_derivative(r) * profile.ramp(height) * 2 * height,
        r,
        out=np.zeros_like(r),
        where=r > 0,
    )
    normal = profile.ramp(r) * profile.ramp_derivative(height)
    return (tangential - normal) / surface_jacobian(domain, x_bar)


def sigma_membership(domain: ModelDomain, x) -> np.ndarray:
    sigma, _ = _regions(domain, x)
    return sigma


def patch_membership(domain: ModelDomain, x):
    """Classify points of ``R^n`` as ``sigma``, ``omega`` (patch part of the domain) or ``outside``.

    A single point gives a ``PatchRegion``; an array of points gives an array
    of the region values.
    """
    sigma, omega = _regions(domain, x)
    # Plain values: numpy would stringify enum members by their repr.
    labels = np.where(
        sigma,
        PatchRegion.SIGMA.value,
        np.where(omega, PatchRegion.OMEGA.value, PatchRegion.OUTSIDE.value),
    )
    return PatchRegion(labels.item()) if labels.ndim == 0 else labels


def cutoff_bound_constants(
    profile: CutoffProfile, n: int, resolution: int = 400
) -> CutoffBounds:
    """Sup of ``|x||grad chi|`` and ``|x|^2|Delta chi|`` over the shell ``C(rho) \\ C(rho/2)``.

    Both quantities depend only on ``(|x_bar|, x_n)``, so a uniform grid on
    the square ``[0, rho]^2`` sees every value they take.
    """
    rho = profile.outer_radius
    grid = np.linspace(0.0, rho, resolution + 1)
    r, x_n = np.meshgrid(grid, grid, indexing="ij")
    shell = (r >= profile.inner_radius) | (x_n >= profile.inner_radius)
    points = np.zeros(r.shape + (n,))
    points[..., 0] = r
    points[..., -1] = x_n
    norm = np.hypot(r, x_n)
    grad = np.linalg.norm(cutoff_gradient(profile, points), axis=-1)
    lap = np.abs(cutoff_laplacian(profile, points))
    return CutoffBounds(
        gradient=float(np.max((norm * grad)[shell])),
        laplacian=float(np.max((norm**2 * lap)[shell])),
    )


def _cylindrical(x):
    x = np.asarray(x, dtype=float)
    return np.linalg.norm(x[..., :-1], axis=-1), x[..., -1]


def _in_patch(domain: ModelDomain, x_bar) -> np.ndarray:
    x_bar = np.asarray(x_bar, dtype=float)
    if x_bar.shape[-1] != domain.n - 1:
        raise DomainError(
            f"Expected boundary points in R^{domain.n - 1}, got {x_bar.shape[-1]}"
        )
    if np.any(np.linalg.norm(x_bar, axis=-1) > domain.rho * (1 + _RADIUS_SLACK)):
        raise DomainError(f"Point outside the patch |x_bar| <= {domain.rho}")
    return x_bar


def _regions(domain: ModelDomain, x) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    x_bar, x_n = x[..., :-1], x[..., -1]
    inside_ball = np.linalg.norm(x_bar, axis=-1) < domain.rho
    height = np.sum(domain.k * x_bar**2, axis=-1)
    sigma = inside_ball & (x_n > 0) & (x_n < height) & (x_n < domain.rho)
    omega = inside_ball & (x_n >= height) & (x_n < domain.rho)
    return sigma, omega
