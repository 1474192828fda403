import math

import numpy as np
import pytest
from pydantic import ValidationError

from blowuplab.constants import NormKind, ProblemParams, bubble_norm
from blowuplab.energy import first_order_coefficients
from blowuplab.exceptions import DomainError, RegimeError, VanishingConstant
from blowuplab.numerics import fd_gradient
from blowuplab.reduction import (
    AsymptoticRegime,
    Beta0Convention,
    CriticalPointModel,
    ReducedEnergyParams,
    c_n,
    c_n_asymptotics,
    c_n_root,
    c_n_terms,
    closed_form_scale,
    reference_root,
    reduced_energy,
    reduced_gradient,
    reduced_hessian,
    solve_critical_point,
    substituted_root,
)

SUBSTITUTED = Beta0Convention.SUBSTITUTED


def test_reference_root_value():
    assert reference_root(6) == pytest.approx(1.1832159566, abs=1e-10)


class TestShiftedConvention:
    @pytest.mark.parametrize("n", [5, 6, 8, 10])
    @pytest.mark.parametrize("D", [1.01, 1.1832, 1.5, 3.0, 50.0])
    def test_summands_cancel(self, n, D):
        terms = c_n_terms(ProblemParams(n=n, D=D))
        assert terms.vanishes
        assert abs(terms.total) <= 1e-10 * terms.magnitude

    def test_summands_match_energy_coefficients(self):
        params = ProblemParams(n=7, D=1.4)
        h0 = 2.0
        terms = c_n_terms(params)
        coefficients = first_order_coefficients(params, h0)
        assert coefficients["e1"] == pytest.approx(terms.gradient * h0, rel=1e-12)
        assert coefficients["e3"] == pytest.approx(terms.volume * h0, rel=1e-12)
        assert coefficients["e4"] == pytest.approx(terms.trace * h0, rel=1e-12)
        assert coefficients["e5"] == pytest.approx(terms.curvature * h0, rel=1e-12)

    def test_root_raises_vanishing(self):
        with pytest.raises(VanishingConstant):
            c_n_root(6)

    def test_asymptotics_raise_vanishing(self):
        with pytest.raises(VanishingConstant):
            c_n_asymptotics(6, AsymptoticRegime.NEAR_ONE)

    def test_low_dimension(self):
        with pytest.raises(DomainError):
            c_n_terms(ProblemParams(n=4, D=1.5))
        with pytest.raises(DomainError):
            c_n_root(5, convention=SUBSTITUTED)


class TestSubstitutedConvention:
    @pytest.mark.parametrize("n", range(6, 11))
    def test_root(self, n):
        root = c_n_root(n, 1e-12, SUBSTITUTED)
        assert root == pytest.approx(substituted_root(n), abs=1e-9)

    @pytest.mark.parametrize("n", [6, 8])
    def test_sign_on_either_side_of_root(self, n):
        root = substituted_root(n)
        assert c_n(ProblemParams(n=n, D=root * 0.99), SUBSTITUTED) > 0
        assert c_n(ProblemParams(n=n, D=root * 1.01), SUBSTITUTED) < 0

    @pytest.mark.parametrize("n", [6, 8, 10])
    def test_near_one(self, n):
        fit = c_n_asymptotics(n, AsymptoticRegime.NEAR_ONE, SUBSTITUTED)
        assert fit.exponent == pytest.approx(-(n - 1) / 2, abs=1e-3)
        assert all(v > 0 for v in fit.values)
        assert fit.constant > 0

    @pytest.mark.parametrize("n", [6, 8, 10])
    def test_infinity(self, n):
        fit = c_n_asymptotics(n, "infinity", SUBSTITUTED)
        assert all(v < 0 for v in fit.values)
        assert abs(fit.values[-1] - fit.values[-2]) <= 1e-2 * abs(fit.values[-1])
        assert fit.regime is AsymptoticRegime.INFINITY


class TestCriticalPointModel:
    def test_isotropic(self):
        model = CriticalPointModel.isotropic(6, 2.0)
        np.testing.assert_array_equal(model.hessian, -np.eye(5))
        np.testing.assert_array_equal(model.center, np.zeros(5))
        assert model.mean_curvature(np.zeros(5)) == 2.0

    def test_rejects_asymmetric(self):
        with pytest.raises(ValidationError, match="symmetric"):
            CriticalPointModel(H0=1.0, hess=((1.0, 2.0), (0.0, 1.0)))

    def test_rejects_singular(self):
        with pytest.raises(ValidationError, match="nondegenerate"):
            CriticalPointModel(H0=1.0, hess=((1.0, 1.0), (1.0, 1.0)))

    def test_rejects_point_of_wrong_length(self):
        with pytest.raises(ValidationError):
            CriticalPointModel(H0=1.0, hess=((-1.0, 0.0), (0.0, -1.0)), p=(0.0,))

    def test_d_range_must_be_positive(self):
        with pytest.raises(ValidationError):
            ReducedEnergyParams(mu=1.0, d_range=(0.0, 1.0))


class TestReducedEnergy:
    @pytest.fixture
    def setup(self):
        params = ProblemParams(n=6, D=1.5)
        model = CriticalPointModel(
            H0=2.0,
            hess=(
                (-1.0, 0.2, 0.0, 0.0, 0.0),
                (0.2, -2.0, 0.0, 0.0, 0.0),
                (0.0, 0.0, -1.0, 0.0, 0.0),
                (0.0, 0.0, 0.0, -0.5, 0.0),
                (0.0, 0.0, 0.0, 0.0, -1.5),
            ),
            p=(0.1, -0.2, 0.0, 0.3, 0.0),
        )
        return params, model, ReducedEnergyParams(mu=10.0)

    def test_gradient_matches_finite_differences(self, setup):
        params, model, rp = setup
        z = np.array([0.8, 0.0, 0.1, -0.1, 0.2, 0.05])

        def energy(v):
            return reduced_energy(params, model, rp, v[0], v[1:], SUBSTITUTED)

        numeric = fd_gradient(energy, z, h=1e-5)
        analytic = reduced_gradient(params, model, rp, z[0], z[1:], SUBSTITUTED)
        np.testing.assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-8)

    def test_hessian_matches_finite_differences(self, setup):
        params, model, rp = setup
        z = np.array([0.8, 0.0, 0.1, -0.1, 0.2, 0.05])
        h = 1e-6
        numeric = np.column_stack(
            [
                (
                    reduced_gradient(params, model, rp, *_split(z + step), SUBSTITUTED)
                    - reduced_gradient(params, model, rp, *_split(z - step), SUBSTITUTED)
                )
                / (2 * h)
                for step in np.eye(6) * h
            ]
        )
        analytic = reduced_hessian(params, model, rp, z[0], z[1:], SUBSTITUTED)
        np.testing.assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-8)

    def test_solution_is_the_closed_form(self, setup):
        params, model, rp = setup
        result = solve_critical_point(params, model, rp, convention=SUBSTITUTED)
        d_star, degenerate = closed_form_scale(params, model, SUBSTITUTED)
        assert not degenerate
        assert result.d == pytest.approx(d_star, rel=1e-10)
        np.testing.assert_allclose(result.xi, model.p, atol=1e-10)


class TestSolveCriticalPoint:
    def test_isotropic_converges_fast(self):
        params = ProblemParams(n=6, D=1.5)
        model = CriticalPointModel.isotropic(6, 2.0)
        rp = ReducedEnergyParams(mu=1.0)
        result = solve_critical_point(params, model, rp, convention=SUBSTITUTED)

        mass = bubble_norm(params, NormKind.L2_VOLUME)
        expected = -c_n(params, SUBSTITUTED) * 2.0 / mass
        assert result.d > 0
        assert result.d == pytest.approx(expected, rel=1e-10)
        assert result.d == pytest.approx(result.d_closed_form, rel=1e-10)
        assert result.iterations <= 5
        assert result.gradient_norm <= 1e-10
        assert result.signature == (6, 0)

    def test_energy_at_solution(self):
        params = ProblemParams(n=6, D=2.0)
        model = CriticalPointModel.isotropic(6, 1.0)
        rp = ReducedEnergyParams(mu=4.0)
        result = solve_critical_point(params, model, rp, convention=SUBSTITUTED)
        # At the critical point C H0 d + d^2 m / 2 = -d^2 m / 2.
        mass = bubble_norm(params, NormKind.L2_VOLUME)
        offset = result.energy - reduced_energy(params, model, rp, 0.0, model.center)
        assert offset == pytest.approx(-(result.d**2) * mass / 2 / rp.mu, rel=1e-9)

    @pytest.mark.parametrize("mu", [1e-3, 1e6])
    def test_gradient_tolerance_is_absolute(self, mu):
        params = ProblemParams(n=6, D=1.5)
        model = CriticalPointModel.isotropic(6, 2.0)
        rp = ReducedEnergyParams(mu=mu)
        result = solve_critical_point(
            params, model, rp, newton_tol=1e-10, convention=SUBSTITUTED
        )
        assert result.gradient_norm <= 1e-10
        scale = abs(c_n(params, SUBSTITUTED)) * 2.0 + bubble_norm(params, NormKind.L2_VOLUME)
        assert result.relative_gradient_norm == pytest.approx(
            result.gradient_norm * mu / scale
        )
        assert result.d > 0

    def test_positive_constant_is_a_regime_error(self):
        params = ProblemParams(n=6, D=1.1)
        model = CriticalPointModel.isotropic(6, 2.0)
        with pytest.raises(RegimeError):
            solve_critical_point(
                params, model, ReducedEnergyParams(mu=1.0), convention=SUBSTITUTED
            )

    def test_vanishing_constant_is_a_regime_error(self):
        params = ProblemParams(n=6, D=1.5)
        model = CriticalPointModel.isotropic(6, 2.0)
        with pytest.raises(RegimeError):
            solve_critical_point(params, model, ReducedEnergyParams(mu=1.0))

    def test_non_positive_mean_curvature(self):
        params = ProblemParams(n=6, D=1.5)
        model = CriticalPointModel.isotropic(6, -1.0)
        with pytest.raises(RegimeError):
            solve_critical_point(
                params, model, ReducedEnergyParams(mu=1.0), convention=SUBSTITUTED
            )

    def test_hessian_dimension_mismatch(self):
        params = ProblemParams(n=6, D=1.5)
        model = CriticalPointModel.isotropic(5, 2.0)
        with pytest.raises(DomainError):
            solve_critical_point(
                params, model, ReducedEnergyParams(mu=1.0), convention=SUBSTITUTED
            )


def _split(z: np.ndarray) -> tuple[float, np.ndarray]:
    return z[0], z[1:]


def test_substituted_root_formula():
    assert substituted_root(6) == pytest.approx(math.sqrt(1 + 3 / (2 * math.pi)))
