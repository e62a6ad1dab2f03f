#!/usr/bin/env python3
"""
Self-similar fractals and their staircases.

Planar similarity maps act on complex numbers (z -> t + r e^{i theta} z, or
on conj(z) for reflecting maps). From an IFS we build the level-n polyline
attractor, its mass sums, and the monotone staircase v(xi) that accumulates
the normalized s-dimensional mass of a seed set along [0, 1].
"""

import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from errors import CapExceededError, DomainError, NonConvergenceError
from run_config import LEVEL_CAP, SEGMENT_CAP, load_ifs_document

# --- Configuration ---
CHAIN_TOL = 1e-12
MASS_TOL = 1e-9
# breakpoint tables stop growing here; evaluation stays exact through the digit algorithm
TABLE_INTERVAL_CAP = 2 ** 16
GAP_RESOLUTION = 1e-12
# digit-space points this close to a piece end evaluate to the end value
BREAKPOINT_RESOLUTION = 32 * np.finfo(float).eps
BREAKPOINT_SNAP_LIMIT = 1e-3


# --- Iterated function systems ---

@dataclass(frozen=True)
class SimilarityMap:
    """z -> translation + scale * e^{i rotation} * (conj(z) if conjugate else z)."""

    scale: float
    rotation: float = 0.0
    translation: complex = 0j
    conjugate: bool = False

    def __post_init__(self):
        if not (0.0 < self.scale < 1.0):
            raise DomainError(f"similarity scale must lie in (0, 1), got {self.scale!r}")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.conjugate:
            z = np.conj(z)
        return self.translation + self.scale * np.exp(1j * self.rotation) * z


@dataclass(frozen=True)
class IfsSpec:
    maps: Tuple[SimilarityMap, ...]
    name: str = "custom"
    curve: bool = True

    def __post_init__(self):
        if len(self.maps) < 2:
            raise DomainError("an IFS needs at least two maps")
        if self.curve:
            gap = self.chain_gap()
            if gap > CHAIN_TOL:
                raise DomainError(f"IFS '{self.name}' is not chain-continuous (endpoint gap {gap:.3e})")

    @property
    def ratios(self) -> np.ndarray:
        return np.array([m.scale for m in self.maps])

    def chain_gap(self) -> float:
        """Largest mismatch among S_1(0)=0, S_i(1)=S_{i+1}(0) and S_m(1)=1."""
        gaps = [abs(complex(self.maps[0](0.0))), abs(complex(self.maps[-1](1.0)) - 1.0)]
        for left, right in zip(self.maps[:-1], self.maps[1:]):
            gaps.append(abs(complex(left(1.0)) - complex(right(0.0))))
        return max(gaps)


def koch_ifs(alpha: float) -> IfsSpec:
    """
    Koch family with apex angle alpha in (0, pi/2), L = 1 / (2 + 2 cos alpha).

    The fourth map is z -> L(1 + 2 cos alpha + z), which keeps S_4(1) = 1.
    """
    if not (0.0 < alpha < math.pi / 2):
        raise DomainError(f"Koch angle must lie in (0, pi/2), got {alpha!r}")
    scale = 1.0 / (2.0 + 2.0 * math.cos(alpha))
    a = complex(math.cos(alpha), math.sin(alpha))
    maps = (
        SimilarityMap(scale),
        SimilarityMap(scale, alpha, complex(scale, 0.0)),
        SimilarityMap(scale, -alpha, scale * (1.0 + a)),
        SimilarityMap(scale, 0.0, complex(scale * (1.0 + 2.0 * math.cos(alpha)), 0.0)),
    )
    return IfsSpec(maps, name=f"koch(alpha={alpha:.6g})")


def quadratic_koch_ifs() -> IfsSpec:
    """Eight-map quadratic Koch (type 2) generator with ratio 1/4."""
    path = [0, 0.25, 0.25 + 0.25j, 0.5 + 0.25j, 0.5, 0.5 - 0.25j, 0.75 - 0.25j, 0.75, 1]
    maps = tuple(
        SimilarityMap(0.25, float(np.angle(complex(end) - complex(start))), complex(start))
        for start, end in zip(path[:-1], path[1:])
    )
    return IfsSpec(maps, name="quadratic_koch")


def interval_ifs(m: int = 2) -> IfsSpec:
    """The unit segment as m contiguous copies of itself."""
    if m < 2:
        raise DomainError("interval_ifs needs m >= 2")
    maps = tuple(SimilarityMap(1.0 / m, 0.0, complex(k / m, 0.0)) for k in range(m))
    return IfsSpec(maps, name=f"interval(m={m})")


def ifs_from_document(doc) -> IfsSpec:
    maps = tuple(
        SimilarityMap(
            m.scale,
            math.radians(m.rotation_degrees),
            complex(m.translation[0], m.translation[1]),
            m.conjugate,
        )
        for m in doc.maps
    )
    return IfsSpec(maps, name=doc.name)


def load_ifs(path: str) -> IfsSpec:
    """Builds an IfsSpec from a JSON document of maps."""
    doc = load_ifs_document(path)
    logging.info(f"Loaded IFS '{doc.name}' with {len(doc.maps)} maps from {path}")
    return ifs_from_document(doc)


def similarity_dimension(ifs: IfsSpec) -> float:
    """s with sum(r_i**s) = 1."""
    ratios = ifs.ratios
    if np.allclose(ratios, ratios[0], rtol=0.0, atol=1e-15):
        return math.log(len(ratios)) / math.log(1.0 / ratios[0])
    upper = 1.0
    while np.sum(ratios ** upper) > 1.0:
        upper *= 2.0
    return optimize.brentq(lambda s: np.sum(ratios ** s) - 1.0, 0.0, upper, xtol=1e-15)


@dataclass(frozen=True, eq=False)
class FractalCurve:
    """Level-n polyline approximation of a curve attractor (complex vertices)."""

    points: np.ndarray
    level: int
    dimension_s: float
    ifs: Optional[IfsSpec] = None
    max_chain_gap: float = 0.0

    @property
    def segment_count(self) -> int:
        return self.points.size - 1

    @property
    def length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.points))))

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack([self.points.real, self.points.imag])

    @property
    def parameters(self) -> np.ndarray:
        """Curve parameter of every vertex; vertex k sits at k / segment_count."""
        return np.arange(self.points.size) / self.segment_count

    def at(self, xi) -> np.ndarray:
        """Point on the polyline at parameter xi (linear between vertices)."""
        t = self.parameters
        xi = np.asarray(xi, dtype=float)
        return np.interp(xi, t, self.points.real) + 1j * np.interp(xi, t, self.points.imag)


def polyline_curve(points: Sequence[complex], dimension_s: float = 1.0) -> FractalCurve:
    """Wraps an arbitrary polyline (no IFS behind it)."""
    pts = np.asarray(points, dtype=complex)
    if pts.size < 2:
        raise DomainError("a polyline needs at least two points")
    return FractalCurve(pts, 0, dimension_s)


def hutchinson_iterate(
    ifs: IfsSpec,
    n: int,
    initiator: Optional[Sequence[complex]] = None,
    segment_cap: int = SEGMENT_CAP,
) -> FractalCurve:
    """
    Applies N(A) = union of S_i(A) n times to the initiator polyline.

    Junction points shared by consecutive copies are kept once, so the
    result has m**n times the initiator's segment count.
    """
    if n < 0:
        raise DomainError("refinement level must be non-negative")
    points = np.array([0.0, 1.0], dtype=complex) if initiator is None else np.asarray(initiator, dtype=complex)
    m = len(ifs.maps)
    requested = (points.size - 1) * m ** n
    if requested > segment_cap:
        raise CapExceededError("Hutchinson segments", requested, segment_cap)

    max_gap = 0.0
    for level in range(n):
        pieces = [s(points) for s in ifs.maps]
        for left, right in zip(pieces[:-1], pieces[1:]):
            max_gap = max(max_gap, abs(left[-1] - right[0]))
        points = np.concatenate([pieces[0]] + [p[1:] for p in pieces[1:]])
        logging.debug(f"hutchinson {ifs.name}: level {level + 1}, {points.size - 1} segments")

    return FractalCurve(points, n, similarity_dimension(ifs), ifs, max_gap)


def mass_sum(curve: FractalCurve, s: float, a: float = 0.0, b: float = 1.0) -> float:
    """Sum of |F(xi_k) - F(xi_{k+1})|**s over the curve's own partition of [a, b]."""
    if s <= 0.0:
        raise DomainError("mass exponent s must be positive")
    if not (0.0 <= a < b <= 1.0):
        raise DomainError(f"need 0 <= a < b <= 1, got [{a}, {b}]")
    t = curve.parameters
    inner = t[(t > a) & (t < b)]
    knots = np.concatenate([[a], inner, [b]])
    return float(np.sum(np.abs(np.diff(curve.at(knots))) ** s))


def mass_function(
    curve: FractalCurve,
    s: float,
    a: float = 0.0,
    b: float = 1.0,
    tol: float = MASS_TOL,
    level_cap: int = LEVEL_CAP,
    segment_cap: int = SEGMENT_CAP,
) -> float:
    """
    gamma^s(F, a, b) from the natural m-adic partitions.

    Curves carrying their IFS are refined level by level until the relative
    change drops below ``tol``; bare polylines are summed as they stand.
    """
    current = mass_sum(curve, s, a, b)
    if curve.ifs is None:
        return current

    m = len(curve.ifs.maps)
    max_level = min(level_cap, int(math.floor(math.log(segment_cap) / math.log(m) + 1e-12)))
    history = [current]
    level = curve.level
    while level < max_level:
        level += 1
        current = mass_sum(hutchinson_iterate(curve.ifs, level, segment_cap=segment_cap), s, a, b)
        previous = history[-1]
        history.append(current)
        if abs(current - previous) <= tol * max(abs(current), 1e-300):
            logging.debug(f"mass_function converged at level {level}: {current!r}")
            return current
    raise NonConvergenceError(
        f"mass function did not settle within tolerance {tol} up to level {level}",
        history[-2:],
    )


# --- Seeds and staircases ---

@dataclass(frozen=True)
class CantorSeed:
    """m equally spaced pieces of ratio r; m * r = 1 is the identity (smooth) seed."""

    pieces: int
    ratio: float

    def __post_init__(self):
        ratio = float(Fraction(self.ratio)) if isinstance(self.ratio, (str, Fraction)) else float(self.ratio)
        object.__setattr__(self, "ratio", ratio)
        if self.pieces < 2:
            raise DomainError("a Cantor seed needs at least two pieces")
        if not (0.0 < ratio <= 1.0 / self.pieces + 1e-15):
            raise DomainError(f"ratio {ratio!r} with {self.pieces} pieces overlaps (need 0 < ratio <= 1/m)")

    @property
    def is_identity(self) -> bool:
        return abs(self.pieces * self.ratio - 1.0) <= 1e-15

    @property
    def gap(self) -> float:
        if self.is_identity:
            return 0.0
        return (1.0 - self.pieces * self.ratio) / (self.pieces - 1)

    @property
    def dimension_s(self) -> float:
        if self.is_identity:
            return 1.0
        return math.log(self.pieces) / math.log(1.0 / self.ratio)


def identity_seed() -> CantorSeed:
    return CantorSeed(2, 0.5)


@dataclass(frozen=True, eq=False)
class Staircase:
    """
    v(xi): normalized accumulated mass of the seed on (0, xi).

    ``xi``/``values`` hold the breakpoint table. Cantor seeds evaluate through
    their base-m digits to ``level`` digits; curve seeds interpolate the table.
    """

    xi: np.ndarray
    values: np.ndarray
    dimension_s: float
    seed: Union[CantorSeed, FractalCurve]
    level: int

    @property
    def is_identity(self) -> bool:
        return isinstance(self.seed, CantorSeed) and self.seed.is_identity

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        arr = np.asarray(x, dtype=float)
        if self.is_identity:
            out = arr.copy()
        elif isinstance(self.seed, CantorSeed):
            out = _cantor_digits(arr, self.seed, self.level)
        else:
            out = np.interp(arr, self.xi, self.values)
        return float(out) if np.ndim(x) == 0 else out

    def inverse(self, y):
        arr = np.asarray(y, dtype=float)
        if self.is_identity:
            out = arr.copy()
        elif isinstance(self.seed, CantorSeed):
            out = _cantor_inverse(arr, self.seed, self.level)
        else:
            out = np.interp(arr, self.values, self.xi)
        return float(out) if np.ndim(y) == 0 else out

    def partition(self, level: int, segment_cap: int = SEGMENT_CAP) -> Tuple[np.ndarray, np.ndarray]:
        """
        Level-n breakpoints (x_edges, u_edges) with u_edges = j / m**n.

        Cell j carries staircase increment 1 / m**n; its x-extent is a
        surviving interval together with the gap that follows it.
        """
        if level < 0:
            raise DomainError("partition level must be non-negative")
        if isinstance(self.seed, CantorSeed):
            m = self.seed.pieces
            cells = m ** level
            if cells > segment_cap:
                raise CapExceededError("partition cells", cells, segment_cap)
            u_edges = np.arange(cells + 1) / cells
            if self.is_identity:
                return u_edges.copy(), u_edges
            x_edges = np.append(_cantor_left_endpoints(self.seed, level), 1.0)
            return x_edges, u_edges
        cells = 2 ** level
        if cells > segment_cap:
            raise CapExceededError("partition cells", cells, segment_cap)
        u_edges = np.arange(cells + 1) / cells
        return self.inverse(u_edges), u_edges

    def on_support(self, x, level: Optional[int] = None):
        """False strictly inside a gap (a plateau of v) resolved by ``level``."""
        arr = np.asarray(x, dtype=float)
        level = self.level if level is None else level
        if self.is_identity:
            out = np.ones(arr.shape, dtype=bool)
        elif isinstance(self.seed, CantorSeed):
            out = ~_cantor_in_gap(arr, self.seed, level)
        else:
            idx = np.clip(np.searchsorted(self.xi, arr, side="right") - 1, 0, self.xi.size - 2)
            flat = self.values[idx] == self.values[idx + 1]
            inside = (arr > self.xi[idx]) & (arr < self.xi[idx + 1])
            out = ~(flat & inside)
        return bool(out) if np.ndim(x) == 0 else out


def _cantor_digits(x: np.ndarray, seed: CantorSeed, level: int) -> np.ndarray:
    m, r = seed.pieces, seed.ratio
    period = r + seed.gap
    x = np.array(x, dtype=float, copy=True)
    result = np.zeros_like(x)
    active = np.ones(x.shape, dtype=bool)
    weight = 1.0
    snap = BREAKPOINT_RESOLUTION
    for _ in range(level):
        if snap < BREAKPOINT_SNAP_LIMIT:
            at_right = active & (x >= 1.0 - snap)
            result += np.where(at_right, weight, 0.0)
            active &= ~at_right & (x > snap)
            snap /= r
        idx = np.clip(np.floor(x / period), 0, m - 1)
        offset = x - idx * period
        in_gap = active & (offset > r)
        result += np.where(in_gap, (idx + 1) * weight / m, 0.0)
        result += np.where(active & ~in_gap, idx * weight / m, 0.0)
        active &= ~in_gap
        x = np.where(active, offset / r, x)
        weight /= m
    # linear inside the unresolved level-n interval
    result += np.where(active, np.clip(x, 0.0, 1.0) * weight, 0.0)
    return result


def _cantor_inverse(y: np.ndarray, seed: CantorSeed, level: int) -> np.ndarray:
    m, r = seed.pieces, seed.ratio
    period = r + seed.gap
    y = np.array(y, dtype=float, copy=True)
    x = np.zeros_like(y)
    scale = 1.0
    for _ in range(level):
        digit = np.clip(np.floor(y * m), 0, m - 1)
        x += scale * digit * period
        y = y * m - digit
        scale *= r
    return x + scale * np.clip(y, 0.0, 1.0)


def _cantor_in_gap(x: np.ndarray, seed: CantorSeed, level: int) -> np.ndarray:
    m, r = seed.pieces, seed.ratio
    period = r + seed.gap
    x = np.array(x, dtype=float, copy=True)
    found = np.zeros(x.shape, dtype=bool)
    # roundoff is amplified by 1/r per digit; points that close to a gap edge count as support
    margin = GAP_RESOLUTION
    for _ in range(level):
        if 2.0 * margin >= seed.gap:
            break
        idx = np.clip(np.floor(x / period), 0, m - 1)
        offset = x - idx * period
        found |= (offset > r + margin) & (offset < period - margin) & (idx < m - 1)
        x = offset / r
        margin /= r
    return found


def _cantor_left_endpoints(seed: CantorSeed, level: int) -> np.ndarray:
    m, r = seed.pieces, seed.ratio
    period = r + seed.gap
    j = np.arange(m ** level, dtype=np.int64)
    x = np.zeros(j.size)
    scale = 1.0
    for k in range(level):
        digit = (j // m ** (level - 1 - k)) % m
        x += scale * digit * period
        scale *= r
    return x


def staircase_from_cantor(seed: CantorSeed, level: int, level_cap: int = LEVEL_CAP) -> Staircase:
    """
    Cantor staircase: constant on gaps, increments 1 / m**n across the m**n
    surviving intervals of level n.
    """
    if level < 1:
        raise DomainError("staircase level must be at least 1")
    if level > level_cap:
        raise CapExceededError("staircase level", level, level_cap)
    if seed.is_identity:
        return Staircase(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 1.0, seed, level)

    m = seed.pieces
    table_level = min(level, int(math.log(TABLE_INTERVAL_CAP) / math.log(m)))
    lefts = _cantor_left_endpoints(seed, table_level)
    width = seed.ratio ** table_level
    count = lefts.size
    xi = np.empty(2 * count)
    xi[0::2] = lefts
    xi[1::2] = lefts + width
    values = np.empty(2 * count)
    values[0::2] = np.arange(count) / count
    values[1::2] = (np.arange(count) + 1) / count
    xi[-1] = 1.0
    logging.debug(f"cantor staircase m={m} ratio={seed.ratio:.6g}: table level {table_level}, eval level {level}")
    return Staircase(xi, values, seed.dimension_s, seed, level)


def staircase_from_curve(curve: FractalCurve, s: Optional[float] = None) -> Staircase:
    """Cumulative normalized s-mass along the curve parameter."""
    s = curve.dimension_s if s is None else s
    if s <= 0.0:
        raise DomainError("mass exponent s must be positive")
    increments = np.abs(np.diff(curve.points)) ** s
    total = increments.sum()
    if total <= 0.0:
        raise DomainError("curve carries no mass")
    values = np.concatenate([[0.0], np.cumsum(increments) / total])
    values[-1] = 1.0
    return Staircase(curve.parameters, values, s, curve, curve.level)


def staircase_eval(st: Staircase, x):
    """Monotone evaluation on [0, 1]; use extend_staircase outside."""
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < -1e-12) or np.any(arr > 1.0 + 1e-12):
        raise DomainError("staircase_eval needs x in [0, 1]; see extend_staircase")
    clipped = np.clip(arr, 0.0, 1.0)
    return st.evaluate(float(clipped) if np.ndim(x) == 0 else clipped)


def staircase_inverse(st: Staircase, value):
    """Right-continuous inverse: the support point where v first reaches ``value``'s digits."""
    arr = np.asarray(value, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("staircase values lie in [0, 1]")
    return st.inverse(value)


def extend_staircase(st: Staircase, x):
    """v(x + 1) = v(x) + 1 on the right, v(-x) = -v(x) on the left."""
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)):
        raise DomainError("extend_staircase needs finite arguments")
    sign = np.where(arr < 0.0, -1.0, 1.0)
    mag = np.abs(arr)
    whole = np.floor(mag)
    out = sign * (whole + st.evaluate(mag - whole))
    return float(out) if np.ndim(x) == 0 else out


# --- Quadratic Koch boundary squares ---

@dataclass(frozen=True)
class KochBoundary:
    k: int
    a_even: Fraction
    a_odd: Fraction
    bounding_square: Tuple[Tuple[float, float], Tuple[float, float]]


def quadratic_koch_boundary(k: int) -> KochBoundary:
    """
    Squares -a_{2k} <= x, y <= a_{2k+1} from 4 a_{2k} = a_{2k-1},
    a_{2k+1} = 1 + a_{2k}, a_{-1} = 1 (exact rationals).
    """
    if k < 0:
        raise DomainError("quadratic Koch level must be non-negative")
    a_odd = Fraction(1)
    a_even = Fraction(0)
    for _ in range(k + 1):
        a_even = a_odd / 4
        a_odd = 1 + a_even
    side = (-float(a_even), float(a_odd))
    return KochBoundary(k, a_even, a_odd, (side, side))
