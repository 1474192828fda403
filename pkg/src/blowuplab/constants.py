"""Closed-form constants of the half-space bubble problem.

All radial integrals are of the form

    B(m, k; D) = omega_{n-2} * int_0^inf r^(n-2+m) / (r^2 + D^2 - 1)^k dr,

i.e. the integral of ``|x|^m (|x|^2 + D^2 - 1)^(-k)`` over ``R^(n-1)``. The
classical symbols are ``beta^m_n(D) = B(m, n; D)``.
"""

import math
from enum import Enum
from functools import lru_cache
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from blowuplab.exceptions import Divergent, DomainError, NonConvergence
from blowuplab.numerics import (
    DEFAULT_SPEC,
    QuadratureSpec,
    gamma_fn,
    integrate_2d,
    integrate_halfline,
)
from blowuplab.utils import relative_error


def alpha(n: int) -> float:
    if n < 3:
        raise DomainError(f"Dimension must be at least 3, got {n}")
    return (4 * n * (n - 1)) ** ((n - 2) / 4)


def omega(k: int) -> float:
    """Surface measure of the unit sphere ``S^k`` in ``R^(k+1)``."""
    if k < 0:
        raise DomainError(f"Sphere dimension must be non-negative, got {k}")
    return 2 * math.pi ** ((k + 1) / 2) / gamma_fn((k + 1) / 2)


class ProblemParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=3, description="Ambient dimension")
    D: float = Field(gt=1, description="Scaling-invariant curvature ratio")

    @property
    def alpha(self) -> float:
        return alpha(self.n)

    @property
    def profile_exponent(self) -> float:
        """``(n-2)/2``, the decay exponent of the bubble."""
        return (self.n - 2) / 2

    @property
    def critical_exponent(self) -> float:
        """Sobolev exponent ``2* = 2n/(n-2)``."""
        return 2 * self.n / (self.n - 2)

    @property
    def trace_exponent(self) -> float:
        """Trace exponent ``2# = 2(n-1)/(n-2)``."""
        return 2 * (self.n - 1) / (self.n - 2)

    @property
    def kappa(self) -> float:
        """Coefficient ``4(n-1)/(n-2)`` of the Laplacian."""
        return 4 * (self.n - 1) / (self.n - 2)

    @property
    def boundary_coefficient(self) -> float:
        """Coefficient ``D/sqrt(n(n-1))`` of the boundary nonlinearity."""
        return self.D / math.sqrt(self.n * (self.n - 1))

    @property
    def c(self) -> float:
        """``D^2 - 1``."""
        return self.D**2 - 1


class RadialIntegralIndex(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=0, description="Moment offset")
    k: int = Field(ge=1, description="Denominator exponent")


class NormKind(str, Enum):
    GRAD_SQ = "grad_sq"
    L2_VOLUME = "l2_volume"
    CRIT_VOLUME = "crit_volume"
    CRIT_TRACE = "crit_trace"
    L2N_NP2_VOLUME = "l2n_np2_volume"
    TRACE_L2 = "trace_l2"


RadialMethod = Literal["gamma", "quadrature", "both"]


def radial_integral(
    params: ProblemParams,
    idx: RadialIntegralIndex,
    method: RadialMethod = "gamma",
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """``B(m, k; D)`` by its Gamma closed form, by quadrature, or both.

    With ``method="both"`` the two values must agree to ``spec.rel_tol``;
    the Gamma value is returned.
    """
    n, m, k = params.n, idx.m, idx.k
    if params.D <= 1:
        raise DomainError(f"D must exceed 1, got {params.D}")
    half = (n + m - 1) / 2
    power = k - half
    if power <= 0:
        raise Divergent(
            f"B(m={m}, k={k}) diverges in dimension {n}: needs n + m - 1 < 2k"
        )

    if method == "quadrature":
        return _radial_quadrature(params, idx, spec)

    closed = (
        omega(n - 2)
        * gamma_fn(half)
        * gamma_fn(power)
        / (2 * gamma_fn(k) * params.c**power)
    )
    if method == "both":
        numeric = _radial_quadrature(params, idx, spec)
        if relative_error(numeric, closed) > spec.rel_tol:
            raise NonConvergence(
                f"Closed form {closed!r} and quadrature {numeric!r} disagree "
                f"beyond rel_tol={spec.rel_tol:g}"
            )
    return closed


def beta(params: ProblemParams, m: int) -> float:
    """``beta^m_n(D) = B(m, n; D)``."""
    return radial_integral(params, RadialIntegralIndex(m=m, k=params.n))


@lru_cache(maxsize=512)
def bubble_norm(
    params: ProblemParams,
    kind: NormKind,
    spec: QuadratureSpec = DEFAULT_SPEC,
    method: Literal["reduced", "direct"] = "reduced",
) -> float:
    """Half-space integrals of ``U_1`` entering the energy.

    The ``reduced`` path integrates over ``R^(n-1)`` in closed form (the inner
    integral is a Gamma ratio in ``a^2 = (t+D)^2 - 1``) and leaves only the
    normal variable to quadrature. The ``direct`` path is nested quadrature
    in ``(r, t)`` and serves as an independent check.

    ``l2n_np2_volume`` returns the norm ``||U_1||_{L^{2n/(n+2)}}`` itself;
    every other kind returns the integral.
    """
    n = params.n
    kind = NormKind(kind)
    _check_convergence(n, kind)

    if kind is NormKind.CRIT_TRACE:
        idx = RadialIntegralIndex(m=0, k=n - 1)
        trace_method = "gamma" if method == "reduced" else "quadrature"
        return params.alpha**params.trace_exponent * radial_integral(
            params, idx, trace_method, spec
        )
    if kind is NormKind.TRACE_L2:
        idx = RadialIntegralIndex(m=0, k=n - 2)
        trace_method = "gamma" if method == "reduced" else "quadrature"
        return params.alpha**2 * radial_integral(params, idx, trace_method, spec)

    amplitude, powers = _volume_density(params, kind)
    if method == "reduced":
        slabs = [_SlabIntegral(n, s) for s in powers]
        value = integrate_halfline(
            lambda t: sum(slab((t + params.D) ** 2 - 1) for slab in slabs), spec
        )
    else:
        weight = omega(n - 2)

        def density(t: float, r: float) -> float:
            z = r * r + (t + params.D) ** 2 - 1
            return weight * r ** (n - 2) * sum(z**-s for s in powers)

        value = integrate_2d(
            density, [0.0, 1.0, math.inf], lambda t: [0.0, 1.0, math.inf], spec
        )
    value *= amplitude
    if kind is NormKind.L2N_NP2_VOLUME:
        return value ** (1 / _dual_exponent(n))
    return value


def bubble_energy_constant(
    params: ProblemParams, spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """Energy of ``U_1`` on the half-space (the zeroth-order term of the expansion)."""
    n = params.n
    if n < 5:
        raise DomainError(f"The bubble energy constant is defined for n >= 5, got {n}")
    return (
        params.kappa / 2 * bubble_norm(params, NormKind.GRAD_SQ, spec)
        + (n - 2) / (2 * n) * bubble_norm(params, NormKind.CRIT_VOLUME, spec)
        - (n - 2)
        * params.boundary_coefficient
        * bubble_norm(params, NormKind.CRIT_TRACE, spec)
    )


class _SlabIntegral:
    """``t -> int_{R^(n-1)} (|x|^2 + a^2)^(-s) dx`` as a function of ``a^2``."""

    def __init__(self, n: int, s: float):
        half = (n - 1) / 2
        self._exponent = half - s
        self._factor = (
            omega(n - 2) * gamma_fn(half) * gamma_fn(s - half) / (2 * gamma_fn(s))
        )

    def __call__(self, a_sq: float) -> float:
        return self._factor * a_sq**self._exponent


def _dual_exponent(n: int) -> float:
    return 2 * n / (n + 2)


def _volume_density(
    params: ProblemParams, kind: NormKind
) -> tuple[float, list[float]]:
    """Amplitude and powers ``s`` with density ``amplitude * sum Z^(-s)``."""
    n, a = params.n, params.alpha
    match kind:
        case NormKind.GRAD_SQ:
            # |grad U|^2 = a^2 (n-2)^2 (Z + 1) / Z^n
            return a**2 * (n - 2) ** 2, [n - 1, n]
        case NormKind.L2_VOLUME:
            return a**2, [n - 2]
        case NormKind.CRIT_VOLUME:
            return a**params.critical_exponent, [n]
        case NormKind.L2N_NP2_VOLUME:
            q = _dual_exponent(n)
            return a**q, [(n - 2) * q / 2]
    raise ValueError(f"{kind} is not a volume integral")


def _check_convergence(n: int, kind: NormKind):
    minimum = {
        NormKind.L2_VOLUME: 5,
        NormKind.L2N_NP2_VOLUME: 7,
        NormKind.TRACE_L2: 4,
    }.get(kind, 3)
    if n < minimum:
        raise Divergent(f"{kind.value} of the bubble diverges for n = {n} < {minimum}")


def _radial_quadrature(
    params: ProblemParams, idx: RadialIntegralIndex, spec: QuadratureSpec
) -> float:
    n, c = params.n, params.c
    power = n - 2 + idx.m
    return omega(n - 2) * integrate_halfline(
        lambda r: r**power / (r * r + c) ** idx.k, spec
    )
