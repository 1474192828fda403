import math

import numpy as np
import pytest

from blowuplab import numerics
from blowuplab.exceptions import (
    DomainError,
    NonConvergence,
    NoSignChange,
    SingularFit,
)
from blowuplab.numerics import (
    QuadratureSpec,
    fd_gradient,
    fd_laplacian,
    find_root_bracketed,
    fit_polynomial,
    fit_power_law,
    gamma_fn,
    geometric_grid,
    integrate_2d,
    integrate_halfline,
    integrate_interval,
    monte_carlo,
    sample_mean,
    uniform_box,
    uniform_sphere,
)


class TestQuadrature:
    def test_halfline_gaussian(self):
        value = integrate_halfline(lambda x: math.exp(-x * x))
        assert value == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-12)

    def test_halfline_algebraic_tail(self):
        value = integrate_halfline(lambda x: 1 / (1 + x * x))
        assert value == pytest.approx(math.pi / 2, rel=1e-10)

    def test_interval_with_breakpoints(self):
        value = integrate_interval(lambda x: abs(x - 0.3), 0.0, 1.0, points=[0.3])
        assert value == pytest.approx(0.3**2 / 2 + 0.7**2 / 2, rel=1e-12)

    def test_interval_infinite_end_with_breakpoints(self):
        value = integrate_interval(lambda x: math.exp(-x), 0.0, math.inf, points=[1, 5])
        assert value == pytest.approx(1.0, rel=1e-12)

    def test_empty_interval(self):
        assert integrate_interval(lambda x: 1.0, 2.0, 1.0) == 0.0

    def test_interval_is_linear(self):
        def f(x):
            return math.exp(-x) * math.cos(3 * x)

        def g(x):
            return 1 / (1 + x * x)

        combined = integrate_interval(lambda x: 2.5 * f(x) - 4.0 * g(x), 0.0, 2.0)
        separate = 2.5 * integrate_interval(f, 0.0, 2.0) - 4.0 * integrate_interval(
            g, 0.0, 2.0
        )
        assert combined == pytest.approx(separate, rel=1e-9)

    def test_halfline_is_linear(self):
        def f(x):
            return math.exp(-x * x)

        def g(x):
            return (1 + x) ** -3

        combined = integrate_halfline(lambda x: -1.5 * f(x) + 3.0 * g(x))
        separate = -1.5 * integrate_halfline(f) + 3.0 * integrate_halfline(g)
        assert combined == pytest.approx(separate, rel=1e-9)

    def test_divergent_integral_raises(self):
        spec = QuadratureSpec(max_subdivisions=5)
        with pytest.raises(NonConvergence):
            integrate_interval(lambda x: 1 / x, 0.0, 1.0, spec)

    def test_2d_triangle(self):
        # Area of {0 < y < x < 1}
        value = integrate_2d(lambda x, y: 1.0, [0.0, 1.0], lambda x: [0.0, x])
        assert value == pytest.approx(0.5, rel=1e-12)

    def test_2d_infinite_inner(self):
        value = integrate_2d(
            lambda x, y: math.exp(-y), [0.0, 2.0], lambda x: [0.0, math.inf]
        )
        assert value == pytest.approx(2.0, rel=1e-12)

    def test_relaxed_only_loosens(self):
        spec = QuadratureSpec(rel_tol=1e-4)
        assert spec.relaxed(1e-6).rel_tol == 1e-4
        assert QuadratureSpec().relaxed(1e-6).rel_tol == 1e-6


class TestMonteCarlo:
    def test_box_mean(self):
        spec = QuadratureSpec(mc_samples=20_000, rng_seed=1)
        estimate = monte_carlo(
            lambda p: p[:, 0] + p[:, 1], uniform_box([0, 0], [1, 1]), spec
        )
        assert estimate.value == pytest.approx(1.0, abs=5 * estimate.stderr)
        assert estimate.samples == 20_000

    def test_deterministic_for_fixed_seed(self):
        spec = QuadratureSpec(mc_samples=100, rng_seed=3)
        sampler = uniform_box([0], [1])
        first = monte_carlo(lambda p: p[:, 0] ** 2, sampler, spec)
        second = monte_carlo(lambda p: p[:, 0] ** 2, sampler, spec)
        assert first == second

    def test_sphere_points_have_unit_norm(self):
        points = uniform_sphere(4)(np.random.default_rng(0), 50)
        assert points.shape == (50, 4)
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0)

    def test_sample_mean_of_constant(self):
        estimate = sample_mean([2.0, 2.0, 2.0])
        assert estimate.value == 2.0
        assert estimate.stderr == 0.0

    def test_sample_mean_single_value(self):
        assert sample_mean([5.0]).stderr == 0.0


class TestSpecialFunctions:
    def test_gamma_half(self):
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_gamma_non_positive_raises(self):
        with pytest.raises(DomainError):
            gamma_fn(0.0)


class TestFiniteDifferences:
    def test_gradient_of_quadratic(self):
        grad = fd_gradient(lambda x: x[0] ** 2 + 3 * x[1], np.array([1.0, 2.0]))
        np.testing.assert_allclose(grad, [2.0, 3.0], rtol=1e-8)

    def test_laplacian_of_quadratic(self):
        value = fd_laplacian(
            lambda x: float(np.sum(x**2)), np.array([0.3, -0.2, 1.0]), h=1e-3
        )
        assert value == pytest.approx(6.0, rel=1e-6)

    def test_laplacian_converges_at_fourth_order(self):
        def f(x):
            return math.exp(x[0] + 2 * x[1] - 0.5 * x[2])

        point = np.array([0.2, -0.1, 0.4])
        exact = 5.25 * f(point)
        errors = [abs(fd_laplacian(f, point, h=h) - exact) for h in (0.1, 0.05, 0.025)]
        for coarse, fine in zip(errors, errors[1:]):
            assert coarse / fine >= 3.5
        # A fourth-order stencil gains a factor close to 16.
        assert errors[0] / errors[1] == pytest.approx(16.0, rel=0.1)


class TestFits:
    def test_polynomial_recovers_coefficients(self):
        xs = np.linspace(0.0, 1.0, 7)
        fit = fit_polynomial(xs, 1 - 2 * xs + 0.5 * xs**2, 2)
        np.testing.assert_allclose(fit.coefficients, [1.0, -2.0, 0.5], atol=1e-12)
        assert fit.intercept == pytest.approx(1.0)
        assert fit.slope == pytest.approx(-2.0)

    def test_polynomial_underdetermined(self):
        with pytest.raises(SingularFit):
            fit_polynomial([1.0, 2.0], [1.0, 2.0], 2)

    def test_polynomial_rank_deficient(self):
        with pytest.raises(SingularFit):
            fit_polynomial([1.0, 1.0, 1.0, 1.0], [1.0, 2.0, 3.0, 4.0], 2)

    def test_power_law_exponent(self):
        xs = np.array(geometric_grid(1e-3, 1e-2, 6))
        fit = fit_power_law(xs, 3.0 * xs**2.5)
        assert fit.slope == pytest.approx(2.5, abs=1e-10)
        assert math.exp(fit.intercept) == pytest.approx(3.0, rel=1e-8)

    def test_power_law_correction_removes_bias(self):
        xs = np.array(geometric_grid(1e-3, 1e-2, 8))
        ys = xs**2 * np.exp(5 * xs)
        plain = fit_power_law(xs, ys)
        corrected = fit_power_law(xs, ys, correction_exponents=(1.0,))
        assert abs(corrected.slope - 2.0) < abs(plain.slope - 2.0)
        assert corrected.slope == pytest.approx(2.0, abs=1e-8)

    def test_power_law_rejects_zero_data(self):
        with pytest.raises(DomainError):
            fit_power_law([1.0, 2.0, 3.0], [1.0, 0.0, 2.0])


class TestRootFinding:
    def test_sqrt_two(self):
        root = find_root_bracketed(lambda x: x * x - 2, 1.0, 2.0)
        assert root == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_endpoint_root(self):
        assert find_root_bracketed(lambda x: x - 1, 1.0, 2.0) == 1.0

    def test_same_sign_raises(self):
        with pytest.raises(NoSignChange):
            find_root_bracketed(lambda x: x * x + 1, -1.0, 1.0)

    def test_jump_inside_bracket(self):
        root = find_root_bracketed(lambda x: -1.0 if x < 0.3 else 1.0, 0.0, 1.0)
        assert 0.0 <= root <= 1.0
        assert root == pytest.approx(0.3, abs=1e-9)

    def test_bisects_when_brent_fails(self, monkeypatch):
        def failing(*args, **kwargs):
            raise RuntimeError("failed to converge")

        monkeypatch.setattr(numerics.optimize, "brentq", failing)
        root = find_root_bracketed(lambda x: (x - 1.7) ** 3, 1.0, 3.0, tol=1e-12)
        assert 1.0 <= root <= 3.0
        assert root == pytest.approx(1.7, abs=1e-10)


def test_geometric_grid_endpoints():
    grid = geometric_grid(1e-3, 1e-2, 8)
    assert len(grid) == 8
    assert grid[0] == pytest.approx(1e-3)
    assert grid[-1] == pytest.approx(1e-2)
    assert all(b / a == pytest.approx(grid[1] / grid[0]) for a, b in zip(grid, grid[1:]))
