#!/usr/bin/env python3
"""
Calculus in the staircase variable u = v(x).

- local_fractional_derivative: lim df(v) / dv(x), taken on the fractal support.
- stieltjes_integral: integral of g(v(x)) dv(x), computed as an increment sum
  over the staircase partition and cross-checked by change of variables.
- derivative_renormalizability_check: ordinary difference quotients against
  their first-order log-renormalized form.
"""

import math
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import integrate

from errors import DomainError, NonConvergenceError
from fractal import CantorSeed, Staircase, extend_staircase
from run_config import LEVEL_CAP, QUADRATURE_LEVEL, SEGMENT_CAP
from valuation import Scale

# --- Configuration ---
DERIVATIVE_TOL = 1e-6
STIELTJES_TOL = 1e-6
EXTRA_QUADRATURE_LEVELS = 4


def staircase_variable(st: Staircase, x, length: float = 1.0):
    """u = v(l) * v(x / l) on [0, l], so that u runs over [0, v(l)]."""
    if length <= 0.0:
        raise DomainError("domain length must be positive")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -1e-12 * length) or np.any(arr > length * (1.0 + 1e-12)):
        raise DomainError(f"x must lie in [0, {length}]")
    u = extend_staircase(st, length) * st.evaluate(np.clip(arr / length, 0.0, 1.0))
    return float(u) if np.ndim(x) == 0 else u


def _pieces(st: Staircase) -> int:
    return st.seed.pieces if isinstance(st.seed, CantorSeed) else 2


@dataclass(frozen=True)
class FractalFunction:
    """f(v(x)) on [0, length]: the self-similar extension of the outer map f."""

    outer: Callable
    staircase: Staircase
    length: float = 1.0

    def __post_init__(self):
        if self.length <= 0.0:
            raise DomainError("domain length must be positive")

    @property
    def u_span(self) -> float:
        return float(extend_staircase(self.staircase, self.length))

    def __call__(self, x):
        return self.outer(staircase_variable(self.staircase, x, self.length))


def _level_cell(u0: float, span: float, m: int, n: int):
    cells = m ** n
    width = span / cells
    j = min(math.floor(u0 / width), cells - 1)
    return j * width, (j + 1) * width


def interval_quotient(ff: FractalFunction, x: float, level: int) -> float:
    """
    (f(b) - f(a)) / (b - a) over the level-n staircase cell [a, b] holding u = v(x).

    Cells are the images of the level-n surviving intervals, j v(l) / m**n
    apart in u; a point on a shared edge belongs to the cell on its right.
    """
    if level < 1:
        raise DomainError("interval level must be at least 1")
    span = ff.u_span
    u0 = float(staircase_variable(ff.staircase, x, ff.length))
    a, b = _level_cell(u0, span, _pieces(ff.staircase), level)
    return (float(ff.outer(b)) - float(ff.outer(a))) / (b - a)


def local_fractional_derivative(
    ff: FractalFunction,
    x: float,
    level: Optional[int] = None,
    tol: float = DERIVATIVE_TOL,
    level_cap: int = LEVEL_CAP,
):
    """
    D f(v)(x) = lim df(v) / dv(x).

    Returns (value, on_support). Inside a gap the staircase is flat and the
    value is 0 with on_support False. On the support the quotient over the
    level-n cell holding v(x) is refined for n = 1..level; each new level is
    extrapolated linearly in the offset of its cell midpoint from v(x), and
    the limit is accepted once two successive estimates agree to ``tol``.
    """
    st = ff.staircase
    level = st.level if level is None else level
    if level > st.level:
        raise DomainError(f"level {level} exceeds the staircase level {st.level}")
    if not (0.0 <= x <= ff.length):
        raise DomainError(f"x={x!r} lies outside [0, {ff.length}]")

    if not st.on_support(x / ff.length, level):
        return 0.0, False

    m = _pieces(st)
    span = ff.u_span
    u0 = float(staircase_variable(st, x, ff.length))

    previous_q = previous_d = None
    estimates: List[float] = []
    for n in range(1, min(level, level_cap) + 1):
        a, b = _level_cell(u0, span, m, n)
        q = (float(ff.outer(b)) - float(ff.outer(a))) / (b - a)
        d = 0.5 * (a + b) - u0
        if previous_q is None:
            previous_q, previous_d = q, d
            continue
        # secant in the midpoint offset; plain quotient when offsets nearly coincide
        if abs(previous_d - d) > 0.25 * (b - a):
            estimate = (q * previous_d - previous_q * d) / (previous_d - d)
        else:
            estimate = q
        if not math.isfinite(estimate):
            break
        estimates.append(estimate)
        if len(estimates) > 1 and abs(estimates[-1] - estimates[-2]) <= tol * max(1.0, abs(estimate)):
            return estimate, True
        previous_q, previous_d = q, d

    last = tuple(estimates[-2:]) if estimates else (previous_q,)
    raise NonConvergenceError(
        f"difference quotients at x={x!r} have no limit within tolerance {tol} by level {min(level, level_cap)}",
        last,
    )


@dataclass(frozen=True)
class StieltjesResult:
    value: float
    change_of_variable_value: float
    discrepancy: float
    level: int
    converged: bool


def staircase_cells(
    st: Staircase,
    level: int,
    span: float = 1.0,
    ua: float = 0.0,
    ub: Optional[float] = None,
    segment_cap: int = SEGMENT_CAP,
):
    """Midpoints and widths in u of the level-n partition cells, clipped to [ua, ub]."""
    _, u_edges = st.partition(level, segment_cap)
    u_edges = u_edges * span
    ub = span if ub is None else ub
    lo = np.maximum(u_edges[:-1], ua)
    hi = np.minimum(u_edges[1:], ub)
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    return 0.5 * (lo + hi), hi - lo


def _increment_sum(g: Callable, st: Staircase, ua: float, ub: float, span: float, level: int, segment_cap: int) -> float:
    mids, widths = staircase_cells(st, level, span, ua, ub, segment_cap)
    return float(np.sum(np.asarray(g(mids), dtype=float) * widths))


def stieltjes_integral(
    g: Callable,
    st: Staircase,
    a: float,
    b: float,
    level: int = QUADRATURE_LEVEL,
    tol: float = STIELTJES_TOL,
    length: float = 1.0,
    max_level: Optional[int] = None,
    segment_cap: int = SEGMENT_CAP,
) -> StieltjesResult:
    """
    Integral of g(v(x)) dv(x) over [a, b] within [0, length].

    The measure dv lives on the fractal support; in u-space every partition
    cell carries its own width, so the sum samples g at u-midpoints. ``g``
    must accept numpy arrays.
    """
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    span = float(extend_staircase(st, length))
    ua = float(staircase_variable(st, a, length))
    ub = float(staircase_variable(st, b, length))
    reference, _ = integrate.quad(lambda u: float(g(u)), ua, ub, limit=200, epsabs=1e-13, epsrel=1e-12)

    max_level = level + EXTRA_QUADRATURE_LEVELS if max_level is None else max_level
    while True:
        value = _increment_sum(g, st, ua, ub, span, level, segment_cap)
        discrepancy = abs(value - reference)
        converged = discrepancy <= tol * max(1.0, abs(reference))
        if converged or level >= max_level:
            break
        level += 1

    if not converged:
        logging.warning(f"Stieltjes sum and change-of-variable quadrature differ by {discrepancy:.3e} at level {level}")
    return StieltjesResult(value, reference, discrepancy, level, converged)


@dataclass(frozen=True)
class RenormalizabilityReport:
    ordinary: List[float]
    renormalized: List[float]
    max_residual: float
    delta: float


def derivative_renormalizability_check(
    f: Callable[[float], float],
    x0: float,
    h_list: Sequence[float],
    scale: Optional[Scale] = None,
) -> RenormalizabilityReport:
    """
    Central quotients df/dx against df(v)/dv(x) for each h in ``h_list``.

    Both increments are rescaled by delta (default min(h)**2) and replaced by
    the first-order form of their logarithm, ln(d / delta) ~ d / delta - 1;
    the common 1 / ln(1/delta) factor cancels in the quotient. Against the
    ordinary quotient q the residual is (q - 1) / (2h / delta - 1), about
    (q - 1) min(h) / 2 at the smallest step.
    """
    hs = [float(h) for h in h_list]
    if not hs or any(h <= 0.0 for h in hs):
        raise DomainError("h_list must hold positive increments")
    scale = Scale(min(hs) ** 2) if scale is None else scale
    delta = scale.delta

    ordinary, renormalized = [], []
    for h in hs:
        df = f(x0 + h) - f(x0 - h)
        dx = 2.0 * h
        if dx <= delta:
            raise DomainError(f"increment {dx!r} does not exceed the scale delta={delta!r}")
        ordinary.append(df / dx)
        renormalized.append((df / delta - 1.0) / (dx / delta - 1.0))
    residual = max(abs(p - q) for p, q in zip(ordinary, renormalized))
    logging.debug(f"renormalizability at x0={x0}: delta={delta:.3e}, residual={residual:.3e}")
    return RenormalizabilityReport(ordinary, renormalized, residual, delta)
