#!/usr/bin/env python3
"""
Spectral solutions of the deformed wave equations in staircase variables.

A fractal string of length l vibrates as

    U(T, x) = sum_n a_n cos(omega_n v(T)) sin(k_n v(x)),  k_n = n pi / v(l),  omega_n = v(c) k_n

with a_n the Fourier sine coefficients of the initial profile taken against
the staircase measure. The membrane version uses (v(x), v(y)) on the unit
square. The lacunary baseline expands boundary data on the level-k
quadratic Koch squares with frequencies 4**k pi sqrt(m**2 + n**2).
"""

import math
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from calculus import staircase_cells, staircase_variable, stieltjes_integral
from errors import BoundaryConditionError, DomainError
from fractal import KochBoundary, Staircase, extend_staircase, quadratic_koch_boundary
from run_config import QUADRATURE_LEVEL, QUADRATURE_LEVEL_2D

# --- Configuration ---
DEFAULT_MODES_1D = 32
DEFAULT_MODES_2D = 16
BOUNDARY_TOL = 1e-9
BOUNDARY_SAMPLES = 65
GAUSS_ORDER = 24


def _fractal_time(st_t: Staircase, speed_c: float, t, fractalize: bool):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("time must be non-negative")
    rescaled = speed_c * arr
    return extend_staircase(st_t, rescaled) if fractalize else rescaled


def _tail(values: np.ndarray) -> float:
    flat = np.abs(np.ravel(values))
    return float(np.max(flat[-max(1, flat.size // 4):]))


# --- 1D fractal string ---

@dataclass(frozen=True)
class WaveProblem1D:
    """
    initial_profile maps the staircase variable u in [0, v(l)] to the
    displacement; speed_factor is the dimensionless v(c).
    """

    length: float
    speed_factor: float
    staircase_x: Staircase
    staircase_t: Staircase
    initial_profile: Callable
    n_modes: int = DEFAULT_MODES_1D
    speed_c: float = 1.0
    quadrature_level: int = QUADRATURE_LEVEL
    fractalize_time: bool = True

    def __post_init__(self):
        if self.length <= 0.0 or self.speed_factor <= 0.0 or self.speed_c <= 0.0:
            raise DomainError("length, speed_factor and speed_c must be positive")
        if self.n_modes < 1:
            raise DomainError("n_modes must be at least 1")

    @property
    def v_length(self) -> float:
        return float(extend_staircase(self.staircase_x, self.length))


@dataclass(frozen=True, eq=False)
class WaveSolution1D:
    coefficients: np.ndarray
    k_f: np.ndarray
    omega_f: np.ndarray
    v_length: float
    tail: float
    smooth_limit: bool


def solve_1d(problem: WaveProblem1D, boundary_tol: float = BOUNDARY_TOL) -> WaveSolution1D:
    """a_n = (2 / v(l)) * integral of h(v(x)) sin(k_n v(x)) dv(x)."""
    v_l = problem.v_length
    h = problem.initial_profile
    ends = np.broadcast_to(np.asarray(h(np.array([0.0, v_l])), dtype=float), (2,))
    residuals = {"u=0": abs(float(ends[0])), "u=v(l)": abs(float(ends[1]))}
    if max(residuals.values()) > boundary_tol:
        raise BoundaryConditionError(residuals)

    n = np.arange(1, problem.n_modes + 1)
    k_f = n * np.pi / v_l
    level = problem.quadrature_level
    coefficients = np.array([
        (2.0 / v_l) * stieltjes_integral(
            lambda u, k=k: h(u) * np.sin(k * u), problem.staircase_x, 0.0, problem.length,
            level=level, max_level=level, length=problem.length,
        ).value
        for k in k_f
    ])
    omega_f = problem.speed_factor * k_f

    smooth = problem.staircase_x.is_identity and problem.staircase_t.is_identity
    solution = WaveSolution1D(coefficients, k_f, omega_f, v_l, _tail(coefficients), smooth)
    logging.info(f"solve_1d: {problem.n_modes} modes, v(l)={v_l:.6g}, tail={solution.tail:.3e}, smooth_limit={smooth}")
    return solution


def eval_solution_1d(sol: WaveSolution1D, problem: WaveProblem1D, t, x):
    """U at (v(ct), v(x)); t and x broadcast against each other."""
    t_arr, x_arr = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    tau = np.asarray(_fractal_time(problem.staircase_t, problem.speed_c, t_arr, problem.fractalize_time))
    u = np.asarray(staircase_variable(problem.staircase_x, x_arr, problem.length))
    temporal = np.cos(sol.omega_f[:, None] * tau.ravel()[None, :])
    spatial = np.sin(sol.k_f[:, None] * u.ravel()[None, :])
    values = np.einsum("n,np,np->p", sol.coefficients, temporal, spatial).reshape(t_arr.shape)
    return float(values) if values.ndim == 0 else values


def energy_1d(sol: WaveSolution1D, tau: float, points: int = 2001, speed_factor: Optional[float] = None) -> float:
    """
    Energy 1/2 * integral (U_tau**2 + v(c)**2 U_u**2) du at fractal time tau,
    by the trapezoid rule on a uniform u-grid.
    """
    vc = sol.omega_f[0] / sol.k_f[0] if speed_factor is None else speed_factor
    u = np.linspace(0.0, sol.v_length, points)
    phase = sol.omega_f * tau
    u_tau = -(sol.coefficients * sol.omega_f * np.sin(phase)) @ np.sin(np.outer(sol.k_f, u))
    u_u = (sol.coefficients * sol.k_f * np.cos(phase)) @ np.cos(np.outer(sol.k_f, u))
    return 0.5 * float(np.trapezoid(u_tau ** 2 + (vc * u_u) ** 2, u))


def dispersion_table(problem: WaveProblem1D, k_values) -> List[Tuple[float, float]]:
    """omega_f(k) = v(c) * v(k), the staircase-shaped dispersion relation."""
    k = np.asarray(k_values, dtype=float)
    if k.size == 0 or np.any(k <= 0.0):
        raise DomainError("wave numbers must be positive")
    omega = problem.speed_factor * np.asarray(extend_staircase(problem.staircase_x, k))
    return [(float(a), float(b)) for a, b in zip(np.ravel(k), np.ravel(omega))]


# --- 2D fractal membrane ---

@dataclass(frozen=True)
class WaveProblem2D:
    """initial_profile maps (v(x), v(y)) on the unit square to the displacement."""

    speed_factor: float
    staircase_x: Staircase
    staircase_y: Staircase
    staircase_t: Staircase
    initial_profile: Callable
    m_modes: int = DEFAULT_MODES_2D
    n_modes: int = DEFAULT_MODES_2D
    speed_c: float = 1.0
    quadrature_level: int = QUADRATURE_LEVEL_2D
    fractalize_time: bool = True

    def __post_init__(self):
        if self.speed_factor <= 0.0 or self.speed_c <= 0.0:
            raise DomainError("speed_factor and speed_c must be positive")
        if self.m_modes < 1 or self.n_modes < 1:
            raise DomainError("mode caps must be at least 1")


@dataclass(frozen=True, eq=False)
class WaveSolution2D:
    coefficients: np.ndarray
    omega: np.ndarray
    tail: float
    smooth_limit: bool


def _boundary_residuals(h: Callable) -> dict:
    s = np.linspace(0.0, 1.0, BOUNDARY_SAMPLES)
    zeros, ones = np.zeros_like(s), np.ones_like(s)
    edges = {
        "ux=0": h(zeros, s),
        "ux=1": h(ones, s),
        "uy=0": h(s, zeros),
        "uy=1": h(s, ones),
    }
    return {where: float(np.max(np.abs(values))) for where, values in edges.items()}


def solve_2d(problem: WaveProblem2D, boundary_tol: float = BOUNDARY_TOL) -> WaveSolution2D:
    """A_mn = 4 * double Stieltjes integral of h sin(pi m v(x)) sin(pi n v(y))."""
    residuals = _boundary_residuals(problem.initial_profile)
    if max(residuals.values()) > boundary_tol:
        raise BoundaryConditionError(residuals)

    mx, wx = staircase_cells(problem.staircase_x, problem.quadrature_level)
    my, wy = staircase_cells(problem.staircase_y, problem.quadrature_level)
    grid_x, grid_y = np.meshgrid(mx, my, indexing="ij")
    profile = np.broadcast_to(np.asarray(problem.initial_profile(grid_x, grid_y), dtype=float), grid_x.shape)

    m = np.arange(1, problem.m_modes + 1)
    n = np.arange(1, problem.n_modes + 1)
    sx = np.sin(np.pi * np.outer(m, mx)) * wx
    sy = np.sin(np.pi * np.outer(n, my)) * wy
    coefficients = 4.0 * sx @ profile @ sy.T
    omega = problem.speed_factor * np.pi * np.sqrt(m[:, None] ** 2 + n[None, :] ** 2)

    smooth = all(st.is_identity for st in (problem.staircase_x, problem.staircase_y, problem.staircase_t))
    solution = WaveSolution2D(coefficients, omega, _tail(coefficients), smooth)
    logging.info(f"solve_2d: {m.size}x{n.size} modes, tail={solution.tail:.3e}, smooth_limit={smooth}")
    return solution


def eval_solution_2d(sol: WaveSolution2D, problem: WaveProblem2D, t, x, y):
    """U at (v(ct), v(x), v(y)); arguments broadcast against each other."""
    t_arr, x_arr, y_arr = np.broadcast_arrays(
        np.asarray(t, dtype=float), np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    )
    tau = np.asarray(_fractal_time(problem.staircase_t, problem.speed_c, t_arr, problem.fractalize_time)).ravel()
    ux = np.asarray(staircase_variable(problem.staircase_x, x_arr)).ravel()
    uy = np.asarray(staircase_variable(problem.staircase_y, y_arr)).ravel()
    m = np.arange(1, sol.coefficients.shape[0] + 1)
    n = np.arange(1, sol.coefficients.shape[1] + 1)
    sx = np.sin(np.pi * np.outer(m, ux))
    sy = np.sin(np.pi * np.outer(n, uy))
    temporal = np.cos(sol.omega[:, :, None] * tau[None, None, :])
    values = np.einsum("mn,mnp,mp,np->p", sol.coefficients, temporal, sx, sy).reshape(t_arr.shape)
    return float(values) if values.ndim == 0 else values


# --- Lacunary baseline on the quadratic Koch squares ---

@dataclass(frozen=True, eq=False)
class LacunaryApprox:
    k: int
    coefficients: np.ndarray
    boundary: KochBoundary
    support: Tuple[Tuple[float, float], Tuple[float, float]]

    @property
    def wave_factor(self) -> float:
        return 4.0 ** self.k * math.pi

    @property
    def frequencies(self) -> np.ndarray:
        m = np.arange(1, self.coefficients.shape[0] + 1)
        n = np.arange(1, self.coefficients.shape[1] + 1)
        return self.wave_factor * np.sqrt(m[:, None] ** 2 + n[None, :] ** 2)

    @property
    def amplitude_bound(self) -> float:
        """sup |U_k| <= sum |A_kmn|."""
        return float(np.sum(np.abs(self.coefficients)))

    def evaluate(self, t, x, y):
        t_arr, x_arr, y_arr = np.broadcast_arrays(
            np.asarray(t, dtype=float), np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        )
        m = np.arange(1, self.coefficients.shape[0] + 1)
        n = np.arange(1, self.coefficients.shape[1] + 1)
        sx = np.sin(self.wave_factor * np.outer(m, x_arr.ravel()))
        sy = np.sin(self.wave_factor * np.outer(n, y_arr.ravel()))
        temporal = np.cos(self.frequencies[:, :, None] * t_arr.ravel()[None, None, :])
        values = np.einsum("mn,mnp,mp,np->p", self.coefficients, temporal, sx, sy).reshape(t_arr.shape)
        return float(values) if values.ndim == 0 else values


def _gauss_nodes(lo: float, hi: float, panels: int, order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    centre = 0.5 * (edges[:-1] + edges[1:])
    points = (centre[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return points, w


def lacunary_partial_sum(
    k: int,
    h_k: Callable,
    m_cap: int,
    n_cap: int,
    support: Optional[Tuple[Tuple[float, float], Tuple[float, float]]] = None,
    order: int = GAUSS_ORDER,
) -> LacunaryApprox:
    """
    A_kmn = 4 * integral over D_k of h_k sin(4**k pi m x) sin(4**k pi n y)
    by composite Gauss-Legendre quadrature. D_k is the level-k bounding
    square, optionally intersected with ``support`` where h_k lives.
    """
    if k < 0 or m_cap < 1 or n_cap < 1:
        raise DomainError("need k >= 0 and mode caps >= 1")
    boundary = quadratic_koch_boundary(k)
    (x_lo, x_hi), (y_lo, y_hi) = boundary.bounding_square
    if support is not None:
        (sx_lo, sx_hi), (sy_lo, sy_hi) = support
        x_lo, x_hi = max(x_lo, sx_lo), min(x_hi, sx_hi)
        y_lo, y_hi = max(y_lo, sy_lo), min(y_hi, sy_hi)
        if x_lo >= x_hi or y_lo >= y_hi:
            raise DomainError("support does not meet the boundary square")

    factor = 4.0 ** k * math.pi
    panels_x = max(4, math.ceil(4 ** k * m_cap * (x_hi - x_lo)))
    panels_y = max(4, math.ceil(4 ** k * n_cap * (y_hi - y_lo)))
    px, wx = _gauss_nodes(x_lo, x_hi, panels_x, order)
    py, wy = _gauss_nodes(y_lo, y_hi, panels_y, order)
    grid_x, grid_y = np.meshgrid(px, py, indexing="ij")
    values = np.broadcast_to(np.asarray(h_k(grid_x, grid_y), dtype=float), grid_x.shape) * np.outer(wx, wy)

    m = np.arange(1, m_cap + 1)
    n = np.arange(1, n_cap + 1)
    sx = np.sin(factor * np.outer(m, px))
    sy = np.sin(factor * np.outer(n, py))
    coefficients = 4.0 * sx @ values @ sy.T
    region = ((x_lo, x_hi), (y_lo, y_hi))
    logging.info(f"lacunary level {k}: square {region}, {m_cap}x{n_cap} coefficients")
    return LacunaryApprox(k, coefficients, boundary, region)
