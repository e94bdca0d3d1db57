import math

import numpy as np
import pytest

from geomkit import InvalidArgument
from geomkit.calculus import (
    DiffScheme,
    adjointness_residual,
    dirichlet_energy_grid,
    directional_derivative,
    divergence_fd,
    gradient_fd,
    jacobian_fd,
    laplacian_fd,
    random_orthogonal,
    riemann_integral,
    taylor_residual,
)
from geomkit.spaces import GridFunction

SCHEMES = [DiffScheme(k, 1e-3) for k in ("forward", "backward", "central")]


def smooth(x):
    return math.sin(x[0]) * math.cos(2 * x[1]) + x[0] ** 2 * x[1] + math.exp(0.3 * x[1])


def random_trig_poly(rng, degree, n):
    a = rng.standard_normal(degree + 1)
    b = rng.standard_normal(degree + 1)
    return lambda x: sum(a[k] * np.cos(k * x) + b[k] * np.sin(k * x) for k in range(degree + 1))


class TestDirectional:
    def test_central_exact_on_quadratic(self):
        est = directional_derivative(lambda x: x[0] ** 2, [1.0], [1.0], DiffScheme("central", 0.1))
        assert est == pytest.approx(2.0, abs=1e-14)

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_linear_exact(self, scheme, rng):
        a = np.array([1.5, -2.0, 0.25])
        d = rng.standard_normal(3)
        est = directional_derivative(lambda x: a @ x, rng.standard_normal(3), d, scheme)
        assert est == pytest.approx(a @ d, abs=1e-9)

    def test_coordinate_direction_is_partial(self):
        x = np.array([0.3, -0.7])
        assert directional_derivative(smooth, x, [0, 1]) == pytest.approx(gradient_fd(smooth, x)[1], abs=1e-12)

    def test_zero_direction(self):
        with pytest.raises(InvalidArgument):
            directional_derivative(smooth, [0, 0], [0, 0])

    def test_bad_scheme(self):
        with pytest.raises(InvalidArgument):
            DiffScheme("sideways")
        with pytest.raises(InvalidArgument):
            DiffScheme("central", 0.0)


class TestGradientJacobian:
    def test_gradient_of_squared_norm(self, rng):
        x = rng.standard_normal(4)
        np.testing.assert_allclose(gradient_fd(lambda v: v @ v, x), 2 * x, atol=1e-6)

    def test_constant(self):
        np.testing.assert_array_equal(gradient_fd(lambda v: 3.0, np.ones(3)), np.zeros(3))

    def test_gradient_directional_consistency(self, rng):
        for _ in range(10):
            x, d = rng.standard_normal(2), rng.standard_normal(2)
            assert gradient_fd(smooth, x) @ d == pytest.approx(directional_derivative(smooth, x, d), abs=1e-6)

    def test_linear_jacobian(self, rng):
        A = rng.standard_normal((3, 2))
        np.testing.assert_allclose(jacobian_fd(lambda x: A @ x, rng.standard_normal(2)), A, atol=1e-9)

    def test_identity_jacobian(self):
        np.testing.assert_allclose(jacobian_fd(lambda x: x, np.ones(3)), np.eye(3), atol=1e-9)

    def test_chain_rule(self, rng):
        f = lambda x: np.array([np.sin(x[0]) * x[1], x[0] ** 2 + x[1], np.exp(x[1] * 0.5)])
        g = lambda y: np.array([y[0] * y[1] + y[2], np.cos(y[2])])
        x = rng.standard_normal(2)
        composed = jacobian_fd(lambda v: g(f(v)), x)
        product = jacobian_fd(g, f(x)) @ jacobian_fd(f, x)
        np.testing.assert_allclose(composed, product, atol=1e-5)

    @pytest.mark.parametrize("kind", ["forward", "backward"])
    def test_one_sided_first_order(self, kind):
        J = jacobian_fd(lambda x: np.array([x[0] ** 2]), [1.0], DiffScheme(kind, 1e-6))
        assert J[0, 0] == pytest.approx(2.0, abs=1e-5)


class TestDivergence:
    def test_radial(self):
        assert divergence_fd(lambda x: x, [0.3, 0.4]) == pytest.approx(2.0, abs=1e-9)

    def test_rotation_free(self):
        assert divergence_fd(lambda x: np.array([-x[1], x[0]]), [0.3, 0.4]) == pytest.approx(0.0, abs=1e-9)

    def test_trace(self, rng):
        F = lambda x: np.array([np.sin(x[0] * x[1]), x[0] ** 3 - x[1], np.cos(x[2]) * x[0]])
        x = rng.standard_normal(3)
        assert abs(divergence_fd(F, x) - np.trace(jacobian_fd(F, x))) < 1e-10

    def test_non_square(self):
        with pytest.raises(InvalidArgument):
            divergence_fd(lambda x: np.array([x[0], x[1], 0.0]), [1.0, 2.0])


class TestLaplacian:
    def test_quadratic(self):
        assert laplacian_fd(lambda x: x[0] ** 2 + x[1] ** 2, [0.3, -1.2]) == pytest.approx(4.0, abs=1e-6)

    def test_harmonic(self):
        assert laplacian_fd(lambda x: x[0] ** 2 - x[1] ** 2, [0.3, -1.2]) == pytest.approx(0.0, abs=1e-6)

    def test_sine(self):
        f = lambda x: math.sin(x[0])
        assert abs(laplacian_fd(f, [0.0], 1e-2)) < 1e-12
        assert laplacian_fd(f, [math.pi / 2], 1e-2) == pytest.approx(-1.0, abs=1e-4)

    def test_rotation_invariance(self, rng):
        for _ in range(20):
            A = random_orthogonal(2, rng)
            x = rng.standard_normal(2)
            lhs = laplacian_fd(lambda v: smooth(A @ v), x, 1e-3)
            rhs = laplacian_fd(smooth, A @ x, 1e-3)
            assert abs(lhs - rhs) < 1e-4

    def test_random_orthogonal(self, rng):
        Q = random_orthogonal(4, rng)
        np.testing.assert_allclose(Q.T @ Q, np.eye(4), atol=1e-12)

    def test_central_difference_order(self):
        x0 = 0.7
        hs = [0.1, 0.05]
        errs = [abs(directional_derivative(lambda v: math.sin(v[0]), [x0], [1.0], DiffScheme("central", h)) - math.cos(x0)) for h in hs]
        order = math.log2(errs[0] / errs[1])
        assert 1.8 <= order <= 2.2


class TestIntegrals:
    def test_trapezoid_exact_on_linear(self):
        assert riemann_integral(lambda x: x, 0, 1, 1) == 0.5

    def test_sine_ftc(self):
        val = riemann_integral(np.sin, 0, math.pi, 10_000)
        antiderivative = -math.cos(math.pi) + math.cos(0)
        assert abs(val - 2) < 1e-6 and abs(val - antiderivative) < 1e-6

    @pytest.mark.parametrize("rule", ["left", "midpoint", "trapezoid"])
    def test_rules_converge(self, rule):
        assert riemann_integral(np.exp, 0, 1, 4000, rule) == pytest.approx(math.e - 1, abs=1e-3)

    def test_trapezoid_order(self):
        e1 = abs(riemann_integral(np.exp, 0, 1, 64) - (math.e - 1))
        e2 = abs(riemann_integral(np.exp, 0, 1, 128) - (math.e - 1))
        assert 1.8 <= math.log2(e1 / e2) <= 2.2

    def test_invalid(self):
        with pytest.raises(InvalidArgument):
            riemann_integral(np.sin, 1, 0, 10)
        with pytest.raises(InvalidArgument):
            riemann_integral(np.sin, 0, 1, 0)


class TestTaylor:
    def test_linear(self, rng):
        a = rng.standard_normal(3)
        assert taylor_residual(lambda x: a @ x + 2, rng.standard_normal(3), rng.standard_normal(3)) <= 1e-10

    def test_squared_norm_residual_is_dx_squared(self, rng):
        x, dx = rng.standard_normal(3), rng.standard_normal(3) * 0.1
        assert taylor_residual(lambda v: v @ v, x, dx) == pytest.approx(dx @ dx, abs=1e-9)

    def test_quadratic_scaling(self, rng):
        x, dx = np.array([0.2, 0.5]), np.array([0.3, -0.4])
        ratios = [taylor_residual(smooth, x, s * dx) / s ** 2 for s in (0.1, 0.05, 0.025, 0.0125)]
        assert max(ratios) < 1.5 * min(ratios)
        r1, r2 = taylor_residual(smooth, x, 0.1 * dx), taylor_residual(smooth, x, 0.05 * dx)
        assert r1 / r2 == pytest.approx(4, rel=0.15)


class TestGridIdentities:
    def test_zero_f(self):
        f = GridFunction.on_circle(np.zeros_like, 64)
        F = GridFunction.on_circle(np.cos, 64)
        assert adjointness_residual(f, F).residual == 0

    @pytest.mark.parametrize("method", ["spectral", "central"])
    def test_periodic_trig(self, rng, method):
        for _ in range(5):
            f = GridFunction.from_function(random_trig_poly(rng, 6, 256), -np.pi, np.pi, 256, periodic=True)
            F = GridFunction.from_function(random_trig_poly(rng, 6, 256), -np.pi, np.pi, 256, periodic=True)
            assert adjointness_residual(f, F, "periodic", method).residual < 1e-8

    def test_boundary_term(self):
        f = GridFunction.from_function(lambda x: x, 0, 1, 101)
        F = GridFunction.from_function(np.ones_like, 0, 1, 101)
        res = adjointness_residual(f, F, "boundary")
        assert res.lhs.real == pytest.approx(1.0, abs=1e-12)
        assert res.boundary.real == pytest.approx(1.0)
        assert res.residual < 1e-12

    def test_boundary_smooth(self):
        f = GridFunction.from_function(np.sin, 0, 2, 2001)
        F = GridFunction.from_function(np.exp, 0, 2, 2001)
        assert adjointness_residual(f, F, "boundary").residual < 1e-5

    def test_variant_checks(self):
        f = GridFunction.from_function(np.sin, 0, 1, 10)
        with pytest.raises(InvalidArgument):
            adjointness_residual(f, f, "periodic")
        g = GridFunction.on_circle(np.sin, 10)
        with pytest.raises(InvalidArgument):
            adjointness_residual(g, g, "boundary")
        with pytest.raises(InvalidArgument):
            adjointness_residual(f, g)

    def test_dirichlet_energy(self):
        const = GridFunction.from_function(lambda x: np.full_like(x, 3.0), -np.pi, np.pi, 128, periodic=True)
        assert dirichlet_energy_grid(const) < 1e-20
        s = GridFunction.from_function(np.sin, -np.pi, np.pi, 256, periodic=True)
        assert dirichlet_energy_grid(s) == pytest.approx(math.pi, abs=1e-6)
        assert dirichlet_energy_grid(s.with_samples(2.5 * s.samples)) == pytest.approx(6.25 * math.pi, abs=1e-6)
