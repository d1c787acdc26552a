"""Local and global maximizers of l(u; beta1, beta2) on [0, 1].

l' is monotone on at most three segments split by the inflection points
u1 < (p-1)/p < u2 (roots of m(u) = beta2), so every stationary point is found
by bisection on a segment with a guaranteed sign change.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import BoundaryUnderflowError, ParameterError
from .scalar import (
    ModelParams,
    _check_p,
    critical_point,
    expand_to_sign,
    find_root,
    inflection_center,
    l,
    l_double_prime,
    l_prime,
    m,
)

BOUNDARY_TOL = 1e-9
CRITICAL_TOL = 1e-9
TIE_TOL = 1e-10


class Region(str, enum.Enum):
    UNIQUE_SUBCRITICAL = "UniqueSubcritical"
    UNIQUE_ABOVE_V = "UniqueAboveV"
    UNIQUE_BELOW_V = "UniqueBelowV"
    TWO_LOCAL = "TwoLocal"
    ON_LOWER_BOUNDARY = "OnLowerBoundary"
    ON_UPPER_BOUNDARY = "OnUpperBoundary"
    CRITICAL = "Critical"


class InflectionPair(NamedTuple):
    u1: float
    u2: float


class LocalMax(NamedTuple):
    u: float
    l_value: float
    l_curvature: float


@dataclass(frozen=True)
class MaximizerReport:
    params: ModelParams
    region: Region
    locals: tuple[LocalMax, ...]
    globals: tuple[float, ...]
    inflections: InflectionPair | None = None

    @property
    def psi(self) -> float:
        return max(loc.l_value for loc in self.locals)


def inflection_points(p: int, beta2: float) -> InflectionPair | None:
    """Solutions u1 < (p-1)/p < u2 of m(u) = beta2, or None if beta2 <= beta2_c."""
    _check_p(p)
    if beta2 <= critical_point(p).beta2_c:
        return None
    c = inflection_center(p)

    def g(u):
        return m(u, p) - beta2

    if not g(c) < 0.0:
        # beta2 exceeds beta2_c by less than the rounding error of m at its minimum
        return None
    lo = expand_to_sign(g, True, 0.0, c)
    u1 = find_root(g, lo, c, tol=0.0)
    try:
        hi = expand_to_sign(g, True, 1.0, c)
    except BoundaryUnderflowError:
        # 1 - u2 ~ 1/(2p(p-1)beta2) is below double resolution
        return InflectionPair(u1, math.nextafter(1.0, 0.0))
    u2 = find_root(g, c, hi, tol=0.0)
    return InflectionPair(u1, u2)


def _classify(params: ModelParams) -> tuple[Region, InflectionPair | None]:
    cp = critical_point(params.p)
    if abs(params.beta1 - cp.beta1_c) <= CRITICAL_TOL and abs(params.beta2 - cp.beta2_c) <= CRITICAL_TOL:
        return Region.CRITICAL, inflection_points(params.p, params.beta2)
    pair = inflection_points(params.p, params.beta2)
    if pair is None:
        return Region.UNIQUE_SUBCRITICAL, None
    d1 = l_prime(pair.u1, params)
    d2 = l_prime(pair.u2, params)
    if abs(d1) <= BOUNDARY_TOL:
        return Region.ON_UPPER_BOUNDARY, pair
    if abs(d2) <= BOUNDARY_TOL:
        return Region.ON_LOWER_BOUNDARY, pair
    if d1 >= 0.0:
        return Region.UNIQUE_ABOVE_V, pair
    if d2 <= 0.0:
        return Region.UNIQUE_BELOW_V, pair
    return Region.TWO_LOCAL, pair


def classify(params: ModelParams) -> Region:
    return _classify(params)[0]


def _lprime_fn(params: ModelParams):
    return lambda u: l_prime(u, params)


def _edge_bracket(f, want_positive: bool, edge: float, inner: float | None = None) -> float | None:
    try:
        return expand_to_sign(f, want_positive, edge, inner)
    except BoundaryUnderflowError:
        return None


def _saturated(edge: float) -> float:
    # the root lies closer to the edge than any double; l there equals l(edge) to rounding
    return math.nextafter(edge, 0.5)


def lower_branch(params: ModelParams, u1: float) -> float:
    """Root of l' on (0, u1); requires l'(u1) < 0."""
    f = _lprime_fn(params)
    lo = _edge_bracket(f, True, 0.0, u1)
    if lo is None:
        return _saturated(0.0)
    return find_root(f, lo, u1, tol=0.0)


def upper_branch(params: ModelParams, u2: float) -> float:
    """Root of l' on (u2, 1); requires l'(u2) > 0."""
    f = _lprime_fn(params)
    hi = _edge_bracket(f, False, 1.0, u2)
    if hi is None:
        return _saturated(1.0)
    return find_root(f, u2, hi, tol=0.0)


def _whole_interval(params: ModelParams) -> float:
    f = _lprime_fn(params)
    lo = _edge_bracket(f, True, 0.0)
    if lo is None:
        return _saturated(0.0)
    hi = _edge_bracket(f, False, 1.0)
    if hi is None:
        return _saturated(1.0)
    return find_root(f, lo, hi, tol=0.0)


def _local(u: float, params: ModelParams) -> LocalMax:
    return LocalMax(u, l(u, params), l_double_prime(u, params))


def local_maximizers(params: ModelParams, tie_tol: float = TIE_TOL) -> MaximizerReport:
    region, pair = _classify(params)
    if region in (Region.UNIQUE_SUBCRITICAL, Region.CRITICAL):
        roots = [_whole_interval(params)]
    elif region in (Region.UNIQUE_ABOVE_V, Region.ON_UPPER_BOUNDARY):
        # on the upper boundary the tangency at u1 is a stationary inflection
        roots = [upper_branch(params, pair.u2)]
    elif region in (Region.UNIQUE_BELOW_V, Region.ON_LOWER_BOUNDARY):
        roots = [lower_branch(params, pair.u1)]
    else:
        roots = [lower_branch(params, pair.u1), upper_branch(params, pair.u2)]
    locs = tuple(_local(u, params) for u in roots)
    return MaximizerReport(params, region, locs, _argmax(locs, tie_tol), pair)


def _argmax(locs, tie_tol: float) -> tuple[float, ...]:
    best = max(loc.l_value for loc in locs)
    return tuple(loc.u for loc in locs if best - loc.l_value <= tie_tol)


def global_maximizers(params: ModelParams, tie_tol: float = TIE_TOL) -> list[float]:
    if tie_tol < 0:
        raise ParameterError("tie_tol must be non-negative")
    return list(local_maximizers(params, tie_tol).globals)
