#!/usr/bin/env python3
"""
Renormalized asymptotic valuations relative to a scale delta.

Covers the ultrametric/invariance properties of the valuation, the refined
classification of null sequences, the duality-structure algebra
(self dual, weakly self dual, strictly dual pairs) and the renormalization
group bookkeeping (renormalization constant, phenomenological value,
Callan-Symanzik residual, beta function).

All functions are pure; array inputs are accepted wherever a real is.
"""

import enum
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy import stats

from errors import ConsistencyError, DomainError

# --- Configuration ---
DEFAULT_N0 = 2 ** 10
DEFAULT_LEVELS = 20
SLOPE_CONSTANT = 0.01          # |slope| below this => Constant rate
ZERO_EXPONENT_TOL = 1e-6       # |e| below this counts as e = 0
DUALITY_TOL = 1e-9
DEFAULT_SLOW_EXPONENT = 0.5    # the a in mu >= delta**a
DEFAULT_LOG_STEP = 1e-4


@dataclass(frozen=True)
class Scale:
    """Reference infinitesimal 0 < delta < 1."""

    delta: float

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0) or not math.isfinite(self.delta):
            raise DomainError(f"Scale delta must lie in (0, 1), got {self.delta!r}")

    @property
    def log_inverse(self) -> float:
        """ln(1/delta) > 0."""
        return -math.log(self.delta)


def _scalar_or_array(values, like):
    if np.ndim(like) == 0:
        return float(values)
    return values


def _raw_valuation(x, delta: float):
    # no window checks; delta may exceed 1 for the inversion property
    x = np.asarray(x, dtype=float)
    return np.abs(np.log(x / delta) / np.log(delta))


def valuation(x, scale: Scale):
    """|log_delta(x / delta)|, the renormalized value of an asymptotic x > 0."""
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError("valuation requires finite x > 0")
    return _scalar_or_array(_raw_valuation(arr, scale.delta), x)


def normal_form(v, scale: Scale, side: int = 1):
    """Natural renormalization representation delta * delta**(-side * v)."""
    if side not in (1, -1):
        raise DomainError("side must be +1 (x > delta) or -1 (x < delta)")
    v_arr = np.asarray(v, dtype=float)
    return _scalar_or_array(scale.delta * scale.delta ** (-side * v_arr), v)


def ultrametric_slack(x1, x2, scale: Scale):
    """
    Strong triangle inequality with its finite-delta slack.

    Returns (lhs, bound) with lhs = v(x1 + x2) and
    bound = max(v(x1), v(x2)) + ln 2 / ln(1/delta); lhs <= bound always.
    """
    a = np.asarray(x1, dtype=float)
    b = np.asarray(x2, dtype=float)
    total = a + b
    if np.any(a <= 0.0) or np.any(b <= 0.0) or np.any(total >= 1.0):
        raise DomainError("ultrametric_slack requires 0 < x1, x2 and x1 + x2 < 1 (asymptotic window)")
    lhs = _raw_valuation(total, scale.delta)
    bound = np.maximum(_raw_valuation(a, scale.delta), _raw_valuation(b, scale.delta)) + math.log(2.0) / scale.log_inverse
    return _scalar_or_array(lhs, x1), _scalar_or_array(bound, x1)


@dataclass(frozen=True)
class InvarianceResiduals:
    """The four invariance residuals and their C / ln(1/delta) bounds."""

    scaling: float
    scale_change: float
    inversion: float
    translation: float
    bounds: tuple = field(default=())

    def within_bounds(self, slack: float = 1e-12) -> bool:
        residuals = (self.scaling, self.scale_change, self.inversion, self.translation)
        return all(r <= bound + slack for r, bound in zip(residuals, self.bounds))


def invariance_residuals(x: float, k: float, x0: float, scale: Scale) -> InvarianceResiduals:
    """
    Residuals of v(kx)=v(x), v_{k delta}(x)=v_delta(x), v(1/x)=v(x) and
    v(x+x0)=v(x), each bounded by an explicit C / ln(1/delta).
    """
    if x <= 0.0 or k <= 0.0:
        raise DomainError("invariance_residuals requires x > 0 and k > 0")
    if not (scale.delta <= abs(x0) <= abs(x)):
        raise DomainError("translation requires delta <= |x0| <= |x|")
    if x + x0 <= 0.0:
        raise DomainError("x + x0 must stay positive")
    if k * scale.delta >= 1.0:
        raise DomainError("k * delta must remain a valid scale")

    delta = scale.delta
    log_inv = scale.log_inverse
    v = float(_raw_valuation(x, delta))
    log_k = abs(math.log(k))

    scaling = abs(float(_raw_valuation(k * x, delta)) - v)
    scale_change = abs(float(_raw_valuation(x, k * delta)) - v)
    inversion = abs(float(_raw_valuation(1.0 / x, 1.0 / delta)) - v)
    translation = abs(float(_raw_valuation(x + x0, delta)) - v)

    c_scaling = log_k
    c_scale_change = log_k * (1.0 + v) * log_inv / (log_inv - math.log(k))
    c_translation = abs(math.log1p(x0 / x))
    bounds = tuple(c / log_inv for c in (c_scaling, c_scale_change, 0.0, c_translation))
    return InvarianceResiduals(scaling, scale_change, inversion, translation, bounds)


# --- Sequence classification ---

class SequenceLabel(str, enum.Enum):
    IRRELEVANT_NULL = "IrrelevantNull"
    IRRELEVANT_DIVERGENT = "IrrelevantDivergent"
    RELEVANT_PLUS = "RelevantPlus"
    RELEVANT_MINUS = "RelevantMinus"
    BOUNDARY = "Boundary"


class Rate(str, enum.Enum):
    CONSTANT = "Constant"
    SLOWLY_VARYING = "SlowlyVarying"
    FAST_NULL = "FastNull"


@dataclass(frozen=True)
class SequenceSpec:
    """
    A real sequence generator sampled on the geometric grid n_j = n0 * 2**j.

    With ``sample_midpoints`` the generator is also evaluated at the geometric
    midpoints n_j * sqrt(2); those samples only feed the oscillation test.
    """

    generator: Callable
    n0: int = DEFAULT_N0
    levels: int = DEFAULT_LEVELS
    sample_midpoints: bool = True

    def __post_init__(self):
        if self.n0 < 1 or self.levels < 2:
            raise DomainError("sample schedule needs n0 >= 1 and at least 3 grid points")

    def grid(self) -> np.ndarray:
        return self.n0 * 2.0 ** np.arange(self.levels + 1)

    def midpoints(self) -> np.ndarray:
        return self.grid()[:-1] * math.sqrt(2.0)

    def sample(self, points: np.ndarray) -> np.ndarray:
        values = np.array([self.generator(n) for n in points], dtype=float)
        if np.any(~np.isfinite(values)):
            raise DomainError("sequence generator is not finite on the sample schedule")
        return values


@dataclass(frozen=True)
class SequenceClass:
    label: SequenceLabel
    exponent_estimate: float
    rate: Rate
    signed_exponent: float = 0.0
    slope: float = 0.0
    sign_alternations: int = 0
    samples: int = 0


def _exponents(seq: SequenceSpec, scale_seq: SequenceSpec, points: np.ndarray) -> np.ndarray:
    a_bar = np.abs(seq.sample(points))
    a = scale_seq.sample(points)
    if np.any(a <= 0.0) or np.any(a >= 1.0):
        raise DomainError("scale sequence must be strictly positive and null (0 < a_n < 1)")
    if np.any(a_bar == 0.0):
        raise DomainError("sequence vanishes identically at a sample; its valuation is undefined")
    # |a_bar_n| = a_n ** (1 + e_n)
    return np.log(a_bar) / np.log(a) - 1.0


def _sign_alternations(values: np.ndarray, rel_tol: float = 1e-9) -> int:
    centred = values - np.median(values)
    # roundoff around a constant valuation is not oscillation
    centred[np.abs(centred) <= rel_tol * max(1.0, float(np.max(np.abs(values))))] = 0.0
    signs = np.sign(centred)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _label_for(e: float) -> SequenceLabel:
    if abs(e) < ZERO_EXPONENT_TOL:
        return SequenceLabel.IRRELEVANT_NULL
    if abs(e + 1.0) < ZERO_EXPONENT_TOL or 0.0 < e <= 1.0:
        return SequenceLabel.BOUNDARY
    if -1.0 < e < 0.0:
        return SequenceLabel.RELEVANT_PLUS
    if e > 1.0:
        return SequenceLabel.RELEVANT_MINUS
    return SequenceLabel.IRRELEVANT_DIVERGENT


def _limit_exponent(a_bar: np.ndarray, a: np.ndarray) -> float:
    """
    e in |a_bar_n| ~ C (ln 1/a_n)**c a_n**(1 + e), fitted by least squares.

    The log-power factor absorbs slowly varying prefactors such as 1/ln n, so
    only the power of a_n decides the label.
    """
    log_a = np.log(a)
    target = np.log(a_bar)
    design = np.column_stack([log_a, np.log(-log_a), np.ones_like(log_a)])
    for columns in ([0, 1, 2], [0, 2]):
        coef, _, rank, _ = np.linalg.lstsq(design[:, columns], target, rcond=None)
        if rank == len(columns):
            return float(coef[0]) - 1.0
    # a constant scale leaves only the pointwise ratio
    return float(np.mean(target / log_a)) - 1.0


def classify_sequence(seq: SequenceSpec, scale_seq: SequenceSpec) -> SequenceClass:
    """
    Refined classification of a null sequence against a null scale sequence.

    Writes |a_bar_n| = a_n**(1 + e_n) and fits the log-slope of v_n = |e_n|
    over the geometric grid for the rate. The limit e comes from a fit over
    the upper half of the grid and is labelled with the disjoint decision rule.
    """
    grid = seq.grid()
    a_bar = np.abs(seq.sample(grid))
    if a_bar[-1] >= 1.0:
        raise DomainError("sequence is not null on the sample schedule")

    e_grid = _exponents(seq, scale_seq, grid)
    v_grid = np.abs(e_grid)
    samples = grid.size

    # oscillation test over the interleaved schedule
    if seq.sample_midpoints:
        mids = seq.midpoints()
        e_mid = _exponents(seq, scale_seq, mids)
        interleaved = np.empty(grid.size + mids.size)
        interleaved[0::2] = v_grid
        interleaved[1::2] = np.abs(e_mid)
        samples += mids.size
    else:
        interleaved = v_grid
    if float(np.max(interleaved)) < ZERO_EXPONENT_TOL:
        return SequenceClass(
            label=SequenceLabel.IRRELEVANT_NULL,
            exponent_estimate=0.0,
            rate=Rate.CONSTANT,
            samples=samples,
        )
    alternations = _sign_alternations(interleaved)
    threshold = math.ceil(seq.levels / 4)

    tiny = np.finfo(float).tiny
    fit = stats.linregress(np.log(grid), np.log(np.maximum(v_grid, tiny)))
    slope = float(fit.slope)
    if abs(slope) < SLOPE_CONSTANT:
        rate = Rate.CONSTANT
    elif -1.0 + SLOPE_CONSTANT <= slope < -SLOPE_CONSTANT:
        rate = Rate.SLOWLY_VARYING
    else:
        rate = Rate.FAST_NULL

    if alternations > threshold:
        label, e = SequenceLabel.IRRELEVANT_DIVERGENT, float("inf")
        logging.debug(f"classify: {alternations} sign alternations > {threshold}; oscillating")
    elif slope >= SLOPE_CONSTANT and v_grid[-1] > v_grid[0]:
        label, e = SequenceLabel.IRRELEVANT_DIVERGENT, float("inf")
    else:
        tail = slice(-max(min(grid.size, 4), grid.size // 2 + 1), None)
        e = _limit_exponent(a_bar[tail], scale_seq.sample(grid[tail]))
        label = _label_for(e)

    return SequenceClass(
        label=label,
        exponent_estimate=abs(e),
        rate=rate,
        signed_exponent=e,
        slope=slope,
        sign_alternations=alternations,
        samples=samples,
    )


# --- Duality structure ---

class DualityMode(str, enum.Enum):
    SELF_DUAL = "SelfDual"
    WEAKLY_SELF_DUAL = "WeaklySelfDual"
    CRITICALLY_SELF_DUAL = "CriticallySelfDual"
    STRICTLY_DUAL = "StrictlyDual"


@dataclass(frozen=True)
class DualityParams:
    lambda0: float = 1.0
    kappa: float = 0.0
    mu: float = 0.25
    alpha: float = 1.0
    mode: DualityMode = DualityMode.SELF_DUAL
    slow_exponent: float = DEFAULT_SLOW_EXPONENT

    def __post_init__(self):
        if self.lambda0 <= 0.0 or self.mu <= 0.0 or self.alpha <= 0.0 or self.kappa < 0.0:
            raise DomainError("duality parameters need lambda0, mu, alpha > 0 and kappa >= 0")
        if not (0.0 < self.slow_exponent < 1.0):
            raise DomainError("slow_exponent must lie in (0, 1)")
        if self.mode is DualityMode.STRICTLY_DUAL and self.kappa <= 0.0:
            raise DomainError("StrictlyDual requires kappa > 0")
        if self.mode is DualityMode.SELF_DUAL and (self.kappa != 0.0 or self.alpha != 1.0):
            raise DomainError("SelfDual requires kappa = 0 and alpha = 1")

    def check_slowly_varying(self, scale: Scale) -> None:
        if self.mu < scale.delta ** self.slow_exponent:
            raise DomainError(f"mu={self.mu} decays faster than delta**{self.slow_exponent}")


@dataclass(frozen=True)
class DualPair:
    v_plus: float
    v_minus: float
    x_plus: float
    x_minus: float
    lam: float
    mode: DualityMode
    exponent: float


def _lambda_mode(v_plus: float, v_minus: float, params: DualityParams, scale: Scale, tol: float):
    gap = v_minus - v_plus
    if abs(gap) <= tol:
        if params.mode is DualityMode.CRITICALLY_SELF_DUAL:
            return DualityMode.CRITICALLY_SELF_DUAL, 0.0
        return DualityMode.SELF_DUAL, 0.0
    if params.mode is DualityMode.WEAKLY_SELF_DUAL:
        ratio = max(v_minus, v_plus) / min(v_minus, v_plus)
        target = max(params.alpha, 1.0 / params.alpha)
        if abs(ratio - target) <= tol * target:
            # lambda = lambda0 * |log delta|**k
            log_inv = scale.log_inverse
            return DualityMode.WEAKLY_SELF_DUAL, -gap * log_inv / math.log(log_inv)
    # lambda = lambda0 * delta**kappa
    return DualityMode.STRICTLY_DUAL, abs(gap)


def dual_pair(v_plus: float, params: DualityParams, scale: Scale, tol: float = DUALITY_TOL) -> DualPair:
    """
    Dual image of an asymptotic with valuation v_plus.

    v_minus = mu / v_plus, x_minus = delta * delta**v_minus, and the product
    x_minus * x_plus = lambda * delta**2 is verified before the form of lambda
    is classified and checked against ``params.mode``.
    """
    if v_plus == 0.0:
        raise ZeroDivisionError("v_plus = 0 has no dual image")
    if v_plus < 0.0:
        raise DomainError("v_plus must be positive")
    params.check_slowly_varying(scale)

    delta = scale.delta
    v_minus = params.mu / v_plus
    x_minus = delta * delta ** v_minus
    x_plus = params.lambda0 * delta * delta ** (-v_plus)
    lam = delta ** (v_minus - v_plus) * params.lambda0
    if not math.isclose(x_minus * x_plus, lam * delta * delta, rel_tol=1e-12):
        raise ConsistencyError("duality structure x_minus * x_plus = lambda * delta**2 is violated")

    mode, exponent = _lambda_mode(v_plus, v_minus, params, scale, tol)
    compatible = {
        DualityMode.SELF_DUAL: {DualityMode.SELF_DUAL, DualityMode.CRITICALLY_SELF_DUAL},
        DualityMode.CRITICALLY_SELF_DUAL: {DualityMode.SELF_DUAL, DualityMode.CRITICALLY_SELF_DUAL},
        DualityMode.WEAKLY_SELF_DUAL: {DualityMode.WEAKLY_SELF_DUAL},
        DualityMode.STRICTLY_DUAL: {DualityMode.STRICTLY_DUAL},
    }
    if params.mode not in compatible[mode]:
        raise ConsistencyError(f"lambda has the {mode.value} form but params declare {params.mode.value}")
    if mode is DualityMode.STRICTLY_DUAL and abs(exponent - params.kappa) > tol:
        raise ConsistencyError(f"observed kappa {exponent:.6g} differs from declared kappa {params.kappa:.6g}")

    return DualPair(v_plus, v_minus, x_plus, x_minus, lam, mode, exponent)


def solve_duality_quadratic(kappa: float, mu: float) -> float:
    """Positive root of v**2 + kappa*v - mu = 0."""
    if kappa < 0.0 or mu <= 0.0:
        raise DomainError("solve_duality_quadratic requires kappa >= 0 and mu > 0")
    root = math.sqrt(kappa * kappa + 4.0 * mu)
    # cancellation-free form of (-kappa + root) / 2
    return 2.0 * mu / (kappa + root)


@dataclass(frozen=True)
class FixedPoints:
    phi1: float
    phi2: float
    alpha1: float
    alpha2: float
    is_quadratic_irrational: bool


def arithmetical_fixed_points(r) -> FixedPoints:
    """Roots of phi**2 - r*phi - 1 = 0 and the fixed points alpha = phi**2."""
    r = Fraction(r)
    p, q = r.numerator, r.denominator
    discriminant = p * p + 4 * q * q
    m = math.isqrt(discriminant)
    if m * m == discriminant:
        phi1 = Fraction(p + m, 2 * q)
        phi2 = Fraction(p - m, 2 * q)
        return FixedPoints(float(phi1), float(phi2), float(phi1 ** 2), float(phi2 ** 2), False)
    root = math.sqrt(discriminant) / q
    rf = float(r)
    if rf >= 0.0:
        phi1 = (rf + root) / 2.0
        phi2 = -1.0 / phi1
    else:
        phi2 = (rf - root) / 2.0
        phi1 = -1.0 / phi2
    return FixedPoints(phi1, phi2, phi1 * phi1, phi2 * phi2, True)


def weakly_self_dual_valuation(k: float, alpha: float, scale: Scale, critical_gamma: Optional[float] = None) -> float:
    """gamma * |loglog(1/delta) / log(delta)| with gamma = k / (alpha - 1)."""
    if alpha == 1.0:
        if critical_gamma is None:
            raise DomainError("alpha = 1 is singular; supply the critical limit gamma")
        gamma = critical_gamma
    else:
        gamma = k / (alpha - 1.0)
    if gamma <= 0.0:
        raise DomainError("sign of k must match sign of alpha - 1 (gamma > 0)")
    log_inv = scale.log_inverse
    return gamma * abs(math.log(log_inv) / log_inv)


def weakly_self_dual_conjugates(k: float, alpha: float, scale: Scale, a1: float = 1.0, a2: float = 1.0):
    """Worked conjugate pair x_w, x~_w whose valuations follow the weakly self dual form."""
    if alpha == 1.0 or k == 0.0:
        raise DomainError("conjugates need alpha != 1 and k != 0")
    log_abs = abs(math.log(scale.delta))
    gamma = abs(k / (alpha - 1.0))
    x_w = a1 * scale.delta * log_abs ** (-gamma)
    x_w_dual = a2 * scale.delta * log_abs ** abs(k * alpha / (alpha - 1.0))
    return x_w, x_w_dual


def weakly_self_dual_pair(mu: float, alpha: float):
    """Valuations (v, v~) = (sqrt(mu/alpha), sqrt(alpha*mu)) with v * v~ = mu."""
    if mu <= 0.0 or alpha <= 0.0:
        raise DomainError("weakly_self_dual_pair requires mu > 0 and alpha > 0")
    return math.sqrt(mu / alpha), math.sqrt(alpha * mu)


def renormalized_product(x1, x2, scale: Scale):
    """x1 o x2 = delta * delta**(-v(x1) v(x2)), so v(x1 o x2) = v(x1) v(x2)."""
    v1 = np.asarray(valuation(x1, scale))
    v2 = np.asarray(valuation(x2, scale))
    result = scale.delta * scale.delta ** (-(v1 * v2))
    if np.ndim(x1) == 0 and np.ndim(x2) == 0:
        return float(result)
    return result


def prime_counting_pair(n: float, tol: float = DUALITY_TOL) -> DualPair:
    """
    Prime counting Pi(n) ~ n / ln n and the n-th prime P(n) ~ n ln n at delta = 1/n.

    Rescaled by delta**2 the two are delta * delta**v and delta * delta**-v
    with the same valuation v = ln ln n / ln n, a critically self dual pair
    (mu = v**2, lambda = 1); x_minus is the counting side.
    """
    if not n > math.e:
        raise DomainError(f"prime counting asymptotics need n > e, got {n!r}")
    scale = Scale(1.0 / n)
    log_n = math.log(n)
    counting, nth_prime = 1.0 / (n * log_n), log_n / n
    v = valuation(counting, scale)
    if not math.isclose(v, valuation(nth_prime, scale), rel_tol=1e-9):
        raise ConsistencyError("prime counting and n-th prime valuations differ")
    params = DualityParams(mu=v * v, mode=DualityMode.CRITICALLY_SELF_DUAL)
    return dual_pair(v, params, scale, tol)


# --- Renormalization group ---

def rg_renormalization_constant(v_plus, scale: Scale):
    """Z = delta**(-v_plus)."""
    v = np.asarray(v_plus, dtype=float)
    if np.any(v < 0.0):
        raise DomainError("v_plus must be non-negative")
    return _scalar_or_array(scale.delta ** (-v), v_plus)


def rg_phenomenological_value(x: float, scale: Scale, tol: float = 1e-12) -> float:
    """
    X_ph = xi**v with xi = delta / x < 1 and v = valuation(x).

    Also evaluated as Z * X_bar in log space; the two routes must agree.
    """
    if not scale.delta < x:
        raise DomainError("rg_phenomenological_value requires delta < x")
    v = valuation(x, scale)
    xi = scale.delta / x
    direct = xi ** v
    # X_bar = Z**-1 * X_ph = delta**v * xi**v
    log_x_bar = v * (2.0 * math.log(scale.delta) - math.log(x))
    via_z = math.exp(math.log(rg_renormalization_constant(v, scale)) + log_x_bar)
    if not math.isclose(direct, via_z, rel_tol=tol, abs_tol=tol):
        raise ConsistencyError(f"phenomenological value routes disagree: {direct!r} vs {via_z!r}")
    return direct


@dataclass(frozen=True)
class CallanSymanzikTerms:
    """
    The two product-rule terms of d(Z**-1 X_ph) / d ln(delta) at fixed x.

    Z here has d ln Z / d ln(delta) = v, so Z**-1 = delta**-v is the
    renormalization constant above and Z**-1 X_ph = x**-v for a fixed v.
    """

    renormalization: float   # d(Z**-1)/d ln(delta) * X_ph
    phenomenological: float  # Z**-1 * d(X_ph)/d ln(delta)

    @property
    def residual(self) -> float:
        return self.renormalization + self.phenomenological


def rg_callan_symanzik_terms(
    x: float,
    scale: Scale,
    h: float = DEFAULT_LOG_STEP,
    v: Optional[float] = None,
    running: Optional[Callable[[float], float]] = None,
) -> CallanSymanzikTerms:
    """
    Central differences in ln(delta) of Z**-1 and of X_ph = (delta/x)**v, each
    weighted by the other factor at ``scale``.

    With a fixed valuation (``v`` given, or the valuation at ``scale``) the
    terms are -v x**-v and +v x**-v. With ``running`` (a map delta -> v) both
    factors follow v(delta) and the sum is the beta-function term.
    """
    log_delta = math.log(scale.delta)
    lo, hi = math.exp(log_delta - h), math.exp(log_delta + h)
    if not (0.0 < lo and hi < x and hi < 1.0):
        raise DomainError("log-step leaves the window delta < x")
    if running is None:
        fixed_v = valuation(x, scale) if v is None else v
        running = lambda _: fixed_v  # noqa: E731

    def z_inverse(delta):
        return rg_renormalization_constant(running(delta), Scale(delta))

    def phenomenological(delta):
        return (delta / x) ** running(delta)

    centre = scale.delta
    dz = (z_inverse(hi) - z_inverse(lo)) / (2.0 * h)
    dph = (phenomenological(hi) - phenomenological(lo)) / (2.0 * h)
    return CallanSymanzikTerms(dz * phenomenological(centre), z_inverse(centre) * dph)


def rg_callan_symanzik_residual(
    x: float,
    scale: Scale,
    h: float = DEFAULT_LOG_STEP,
    v: Optional[float] = None,
    running: Optional[Callable[[float], float]] = None,
) -> float:
    """
    Sum of the two Callan-Symanzik terms; O(h**2) for a fixed valuation,
    the beta-function term, reported as is, for a running one.
    """
    if running is None and v == 0.0:
        return 0.0
    return rg_callan_symanzik_terms(x, scale, h, v, running).residual


def rg_beta_function(
    x: float,
    scale: Scale,
    h: float = DEFAULT_LOG_STEP,
    running: Optional[Callable[[float], float]] = None,
) -> float:
    """d v / d ln x at fixed delta; ``running`` overrides the plain valuation."""
    if x <= 0.0:
        raise DomainError("rg_beta_function requires x > 0")
    flow = running if running is not None else (lambda y: valuation(y, scale))
    return (flow(x * math.exp(h)) - flow(x * math.exp(-h))) / (2.0 * h)
