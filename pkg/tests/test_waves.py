import math

import numpy as np
import pytest

from calculus import stieltjes_integral
from errors import BoundaryConditionError, DomainError
from fractal import extend_staircase
from waves import (
    WaveProblem1D,
    WaveProblem2D,
    dispersion_table,
    energy_1d,
    eval_solution_1d,
    eval_solution_2d,
    lacunary_partial_sum,
    solve_1d,
    solve_2d,
)

UNIT = ((0.0, 1.0), (0.0, 1.0))


def parabola(u):
    return u * (1.0 - u)


def sine_mode(u):
    return np.sin(math.pi * u)


def string_problem(st_x, st_t, profile, **kwargs):
    options = {"length": 1.0, "speed_factor": 1.0}
    options.update(kwargs)
    return WaveProblem1D(
        options.pop("length"), options.pop("speed_factor"), st_x, st_t, profile, **options
    )


# --- 1D string ---

def test_parabola_coefficients(identity_staircase):
    sol = solve_1d(string_problem(identity_staircase, identity_staircase, parabola))
    n = np.arange(1, 10)
    expected = np.where(n % 2 == 1, 8.0 / (n ** 3 * math.pi ** 3), 0.0)
    np.testing.assert_allclose(sol.coefficients[:9], expected, atol=1e-8)
    assert sol.smooth_limit
    assert sol.v_length == 1.0


def test_single_mode_on_cantor_string(quarter_cantor):
    sol = solve_1d(string_problem(quarter_cantor, quarter_cantor, sine_mode))
    assert sol.coefficients[0] == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(sol.coefficients[1:], 0.0, atol=1e-10)
    assert not sol.smooth_limit
    # v(1/4) = 1/2 for the quarter Cantor staircase
    problem = string_problem(quarter_cantor, quarter_cantor, sine_mode)
    assert eval_solution_1d(sol, problem, 0.0, 0.25) == pytest.approx(1.0, abs=1e-9)


def test_longer_string_uses_v_of_length(middle_third):
    problem = string_problem(middle_third, middle_third, lambda u: np.sin(0.5 * math.pi * u), length=2.0)
    sol = solve_1d(problem)
    assert sol.v_length == pytest.approx(2.0)
    assert sol.k_f[0] == pytest.approx(math.pi / 2)
    assert sol.coefficients[0] == pytest.approx(1.0, abs=1e-9)


def test_boundary_violation_is_reported(identity_staircase):
    with pytest.raises(BoundaryConditionError) as info:
        solve_1d(string_problem(identity_staircase, identity_staircase, lambda u: 1.0 + u))
    assert info.value.residuals["u=v(l)"] == pytest.approx(2.0)


def test_time_fractalization(identity_staircase, middle_third):
    fractal = string_problem(identity_staircase, middle_third, sine_mode)
    plain = string_problem(identity_staircase, middle_third, sine_mode, fractalize_time=False)
    sol = solve_1d(fractal)
    # v(1/3) = 1/2 turns the first mode into cos(pi / 2)
    assert eval_solution_1d(sol, fractal, 1.0 / 3.0, 0.5) == pytest.approx(0.0, abs=1e-9)
    assert eval_solution_1d(sol, plain, 1.0 / 3.0, 0.5) == pytest.approx(0.5, abs=1e-9)


def test_solution_broadcasts(identity_staircase):
    problem = string_problem(identity_staircase, identity_staircase, sine_mode)
    sol = solve_1d(problem)
    values = eval_solution_1d(sol, problem, np.array([[0.0], [1.0]]), np.linspace(0.0, 1.0, 5))
    assert values.shape == (2, 5)
    np.testing.assert_allclose(values[1], -values[0], atol=1e-12)


@pytest.mark.parametrize("staircase", ["identity_staircase", "middle_third"])
def test_energy_is_conserved(staircase, request):
    st = request.getfixturevalue(staircase)
    sol = solve_1d(string_problem(st, st, parabola, speed_factor=0.5))
    energies = [energy_1d(sol, tau) for tau in np.linspace(0.0, 2.7, 10)]
    np.testing.assert_allclose(energies, energies[0], rtol=1e-9)
    assert energies[0] > 0.0


def test_dispersion_smooth_limit_is_linear(identity_staircase):
    problem = string_problem(identity_staircase, identity_staircase, sine_mode, speed_factor=0.5)
    table = dispersion_table(problem, [0.5, 1.0, 2.5])
    assert table == [(0.5, 0.25), (1.0, 0.5), (2.5, 1.25)]


def test_dispersion_is_monotone_staircase(middle_third):
    problem = string_problem(middle_third, middle_third, sine_mode)
    k = np.linspace(0.01, 4.0, 1000)
    omega = np.array([w for _, w in dispersion_table(problem, k)])
    assert np.all(np.diff(omega) >= -1e-12)
    assert dict(dispersion_table(problem, [1.25]))[1.25] == pytest.approx(1.0 + 1.0 / 3.0, abs=1e-9)
    with pytest.raises(DomainError):
        dispersion_table(problem, [0.0])


def test_problem_validation(identity_staircase):
    with pytest.raises(DomainError):
        string_problem(identity_staircase, identity_staircase, sine_mode, speed_factor=0.0)
    with pytest.raises(DomainError):
        string_problem(identity_staircase, identity_staircase, sine_mode, n_modes=0)


def test_single_mode_matches_closed_form_on_a_grid(quarter_cantor):
    problem = string_problem(quarter_cantor, quarter_cantor, sine_mode)
    sol = solve_1d(problem)
    t, x = np.meshgrid(np.linspace(0.0, 2.0, 50), np.linspace(0.0, 1.0, 50), indexing="ij")
    expected = np.cos(math.pi * extend_staircase(quarter_cantor, t)) * np.sin(math.pi * quarter_cantor(x))
    np.testing.assert_allclose(eval_solution_1d(sol, problem, t, x), expected, rtol=0, atol=1e-8)


def test_coefficients_are_stieltjes_integrals(middle_third):
    problem = string_problem(middle_third, middle_third, parabola, n_modes=5, quadrature_level=12)
    sol = solve_1d(problem)
    for k, coefficient in zip(sol.k_f, sol.coefficients):
        integral = stieltjes_integral(
            lambda u, k=k: parabola(u) * np.sin(k * u), middle_third, 0.0, 1.0, level=12, max_level=12
        )
        assert coefficient == pytest.approx(2.0 * integral.value, abs=1e-12)
    n = np.arange(1, 6)
    expected = np.where(n % 2 == 1, 8.0 / (n ** 3 * math.pi ** 3), 0.0)
    np.testing.assert_allclose(sol.coefficients, expected, atol=1e-5)


# --- 2D membrane ---

def membrane_problem(st, profile, **kwargs):
    return WaveProblem2D(1.0, st, st, st, profile, **kwargs)


def product_mode(ux, uy):
    return np.sin(math.pi * ux) * np.sin(math.pi * uy)


def test_membrane_single_mode(identity_staircase):
    problem = membrane_problem(identity_staircase, product_mode, m_modes=4, n_modes=4)
    sol = solve_2d(problem)
    assert sol.coefficients[0, 0] == pytest.approx(1.0, abs=1e-12)
    rest = sol.coefficients.copy()
    rest[0, 0] = 0.0
    np.testing.assert_allclose(rest, 0.0, atol=1e-12)
    assert sol.omega[0, 0] == pytest.approx(math.pi * math.sqrt(2.0))
    assert sol.smooth_limit
    assert eval_solution_2d(sol, problem, 0.0, 0.5, 0.25) == pytest.approx(math.sin(math.pi / 4), abs=1e-12)


def test_membrane_smooth_limit_on_a_grid(identity_staircase):
    problem = membrane_problem(identity_staircase, product_mode, m_modes=4, n_modes=4)
    sol = solve_2d(problem)
    x, y = np.meshgrid(np.linspace(0.0, 1.0, 21), np.linspace(0.0, 1.0, 21), indexing="ij")
    for t in (0.0, 0.3, 1.1):
        expected = math.cos(math.pi * math.sqrt(2.0) * t) * np.sin(math.pi * x) * np.sin(math.pi * y)
        np.testing.assert_allclose(eval_solution_2d(sol, problem, t, x, y), expected, rtol=0, atol=1e-12)


def test_membrane_on_cantor_staircases(quarter_cantor):
    problem = membrane_problem(quarter_cantor, product_mode, m_modes=3, n_modes=3, quadrature_level=8)
    sol = solve_2d(problem)
    assert sol.coefficients[0, 0] == pytest.approx(1.0, abs=1e-10)
    assert not sol.smooth_limit
    assert eval_solution_2d(sol, problem, 0.0, 0.25, 0.25) == pytest.approx(1.0, abs=1e-9)


def test_membrane_boundary_violation(identity_staircase):
    with pytest.raises(BoundaryConditionError) as info:
        solve_2d(membrane_problem(identity_staircase, lambda ux, uy: ux + 0.0 * uy))
    assert info.value.residuals["ux=1"] == pytest.approx(1.0)
    assert info.value.residuals["ux=0"] == 0.0


# --- lacunary baseline ---

def test_lacunary_unit_square_mode():
    approx = lacunary_partial_sum(0, product_mode, 4, 4, support=UNIT)
    assert approx.coefficients[0, 0] == pytest.approx(1.0, abs=1e-10)
    rest = approx.coefficients.copy()
    rest[0, 0] = 0.0
    np.testing.assert_allclose(rest, 0.0, atol=1e-10)
    assert approx.frequencies[0, 0] == pytest.approx(math.pi * math.sqrt(2.0))
    assert approx.amplitude_bound == pytest.approx(1.0, abs=1e-8)


def test_lacunary_basis_is_orthonormal_at_level_one():
    def profile(x, y):
        return np.sin(4.0 * math.pi * x) * np.sin(8.0 * math.pi * y)

    approx = lacunary_partial_sum(1, profile, 3, 3, support=UNIT)
    gram = np.zeros((3, 3))
    gram[0, 1] = 1.0
    np.testing.assert_allclose(approx.coefficients, gram, atol=1e-10)
    assert approx.wave_factor == pytest.approx(4.0 * math.pi)


def test_lacunary_amplitude_bound(rng):
    approx = lacunary_partial_sum(0, lambda x, y: x * (1.25 - x) * y * (1.25 - y), 4, 4)
    assert approx.support == ((-0.25, 1.25), (-0.25, 1.25))
    t, x, y = rng.uniform(0, 2, 50), rng.uniform(-0.25, 1.25, 50), rng.uniform(-0.25, 1.25, 50)
    assert np.all(np.abs(approx.evaluate(t, x, y)) <= approx.amplitude_bound + 1e-12)


def test_lacunary_domain_checks():
    with pytest.raises(DomainError):
        lacunary_partial_sum(-1, product_mode, 2, 2)
    with pytest.raises(DomainError):
        lacunary_partial_sum(0, product_mode, 2, 2, support=((2.0, 3.0), (2.0, 3.0)))


def test_second_mode_only(identity_staircase):
    sol = solve_1d(string_problem(identity_staircase, identity_staircase, lambda u: np.sin(2.0 * math.pi * u)))
    expected = np.zeros(sol.coefficients.size)
    expected[1] = 1.0
    np.testing.assert_allclose(sol.coefficients, expected, atol=1e-10)


def test_string_ends_stay_fixed(identity_staircase):
    problem = string_problem(identity_staircase, identity_staircase, parabola)
    sol = solve_1d(problem)
    t = np.linspace(0.0, 3.0, 10)
    np.testing.assert_allclose(eval_solution_1d(sol, problem, t, 0.0), 0.0, atol=1e-12)
    np.testing.assert_allclose(eval_solution_1d(sol, problem, t, 1.0), 0.0, atol=1e-12)


def test_single_mode_satisfies_the_wave_equation(identity_staircase):
    problem = string_problem(identity_staircase, identity_staircase, sine_mode, speed_factor=0.5)
    sol = solve_1d(problem)
    h, t, x = 1e-3, 0.7, 0.4

    def second_difference(f):
        return (f(h) - 2.0 * f(0.0) + f(-h)) / h ** 2

    u_tt = second_difference(lambda d: eval_solution_1d(sol, problem, t + d, x))
    u_xx = second_difference(lambda d: eval_solution_1d(sol, problem, t, x + d))
    assert abs(u_tt - 0.25 * u_xx) < 1e-5


def test_membrane_mixed_mode(identity_staircase):
    problem = membrane_problem(
        identity_staircase, lambda ux, uy: np.sin(math.pi * ux) * np.sin(2.0 * math.pi * uy), m_modes=3, n_modes=3
    )
    sol = solve_2d(problem)
    assert sol.coefficients[0, 1] == pytest.approx(1.0, abs=1e-12)
    assert sol.omega[0, 1] == pytest.approx(math.pi * math.sqrt(5.0))
    assert abs(sol.coefficients[1, 0]) < 1e-12


def test_zero_membrane_profile(identity_staircase):
    problem = membrane_problem(identity_staircase, lambda ux, uy: 0.0 * ux * uy, m_modes=2, n_modes=2)
    sol = solve_2d(problem)
    assert not np.any(sol.coefficients)
    assert eval_solution_2d(sol, problem, 1.0, 0.3, 0.6) == 0.0
