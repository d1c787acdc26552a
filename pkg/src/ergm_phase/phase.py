"""V-shaped two-maximizer region and the first-order transition curve q(beta1)."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, OutOfRegionError, ParameterError
from .maximizer import inflection_points, lower_branch, upper_branch
from .scalar import (
    ModelParams,
    _check_p,
    critical_point,
    expand_to_sign,
    find_root,
    inflection_center,
    ipow,
    l,
    m,
    n_func,
)

REGION_MARGIN = 1e-9
DEGENERATE_GAP = 1e-6
Q_TOL = 1e-10
BRACKET_SHRINK = 1e-9
# m(a) grows like exp(2(p-1)|beta1|), so a bracket can span ~1e52 and need >200 halvings
MAX_BISECT = 600


@dataclass(frozen=True)
class VBounds:
    beta1: float
    a: float
    b: float
    lower: float
    upper: float


@dataclass(frozen=True)
class CurvePoint:
    beta1: float
    q: float
    u_low: float
    u_high: float
    psi: float
    degenerate: bool = False


def _require_inside(beta1: float, p: int, margin: float = REGION_MARGIN) -> float:
    _check_p(p)
    if not math.isfinite(beta1):
        raise ParameterError(f"beta1 must be finite, got {beta1!r}")
    beta1_c = critical_point(p).beta1_c
    if not beta1 < beta1_c - margin:
        raise OutOfRegionError(
            f"beta1={beta1} is not below beta1_c={beta1_c:.12g} (minus {margin:g}); the V region is empty there"
        )
    return beta1_c


def v_bounds(beta1: float, p: int) -> VBounds:
    """Roots a < (p-1)/p < b of n(u) = -beta1 and the boundary values m(b) < m(a)."""
    _require_inside(beta1, p)
    c = inflection_center(p)

    def g(u):
        return n_func(u, p) + beta1

    a = find_root(g, expand_to_sign(g, True, 0.0, c), c, tol=0.0)
    b = find_root(g, c, expand_to_sign(g, True, 1.0, c), tol=0.0)
    return VBounds(beta1, a, b, m(b, p), m(a, p))


def _branch_gap(params: ModelParams):
    """(l(u_high) - l(u_low), u_low, u_high) when both local maximizers exist, else None."""
    pair = inflection_points(params.p, params.beta2)
    if pair is None:
        return None
    try:
        lo = lower_branch(params, pair.u1)
        hi = upper_branch(params, pair.u2)
    except NumericError:
        return None
    return l(hi, params) - l(lo, params), lo, hi


def _corner_point(beta1: float, p: int) -> CurvePoint:
    cp = critical_point(p)
    c = inflection_center(p)
    return CurvePoint(beta1, cp.beta2_c, c, c, l(c, ModelParams(p, cp.beta1_c, cp.beta2_c)), degenerate=True)


def transition_q(beta1: float, p: int, tol: float = Q_TOL) -> CurvePoint:
    """beta2 = q(beta1) at which both local maxima of l are equal.

    The gap l(u_high) - l(u_low) increases with beta2 across (m(b), m(a));
    bisection in beta2 on its sign.
    """
    beta1_c = _require_inside(beta1, p)
    if beta1_c - beta1 < DEGENERATE_GAP:
        return _corner_point(beta1, p)
    vb = v_bounds(beta1, p)
    # m(a) grows like exp(2(p-1)|beta1|); a width-relative shrink would skip q
    shrink = BRACKET_SHRINK * min(vb.upper - vb.lower, 1.0)
    lo = vb.lower + shrink
    hi = vb.upper - shrink
    best = None
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        res = _branch_gap(ModelParams(p, beta1, mid))
        if res is None:
            raise NumericError(f"two local maximizers expected inside the V region at beta1={beta1}, beta2={mid}")
        gap, u_low, u_high = res
        best = (mid, gap, u_low, u_high)
        if abs(gap) <= tol or not lo < mid < hi:
            break
        if gap < 0.0:
            lo = mid
        else:
            hi = mid
    mid, gap, u_low, u_high = best
    if abs(gap) > tol and abs(gap) > 1e-12 * max(1.0, abs(l(u_low, ModelParams(p, beta1, mid)))):
        raise NumericError(f"coexistence condition not met at beta1={beta1}: gap={gap}")
    params = ModelParams(p, beta1, mid)
    return CurvePoint(beta1, mid, u_low, u_high, max(l(u_low, params), l(u_high, params)))


def transition_q_inverse(beta2: float, p: int, tol: float = Q_TOL) -> float:
    """beta1 with q(beta1) = beta2.

    At fixed beta2 the inflections u1, u2 are fixed and both local maximizers
    exist exactly for -n(u2) < beta1 < -n(u1); the gap l(u_high) - l(u_low)
    increases with beta1 there, so this bisects in beta1 directly.
    """
    _check_p(p)
    cp = critical_point(p)
    if not beta2 > cp.beta2_c + REGION_MARGIN:
        raise OutOfRegionError(f"beta2={beta2} is not above beta2_c={cp.beta2_c:.12g}; no transition there")
    pair = inflection_points(p, beta2)
    lo = -n_func(pair.u2, p)
    hi = -n_func(pair.u1, p)
    shrink = BRACKET_SHRINK * min(hi - lo, 1.0)
    lo += shrink
    hi -= shrink
    mid = 0.5 * (lo + hi)
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        params = ModelParams(p, mid, beta2)
        res = _branch_gap(params)
        if res is None:
            raise NumericError(f"two local maximizers expected inside the V region at beta1={mid}, beta2={beta2}")
        gap = res[0]
        if abs(gap) <= tol or not lo < mid < hi:
            break
        if gap < 0.0:
            lo = mid
        else:
            hi = mid
    return mid


def asymptote_gap(beta1: float, p: int) -> float:
    return abs(transition_q(beta1, p).q + beta1)


def trace_curves(
    p: int,
    beta1_min: float,
    beta1_max: float,
    steps: int,
    workers: int = 1,
) -> list[tuple[VBounds, CurvePoint]]:
    """Boundary curves and transition curve on a uniform beta1 grid, in grid order."""
    _check_p(p)
    if steps < 2:
        raise ParameterError("steps must be at least 2")
    if not beta1_min < beta1_max:
        raise ParameterError("beta1_min must be below beta1_max")
    _require_inside(beta1_max, p)
    grid = np.linspace(beta1_min, beta1_max, steps)

    def row(b1):
        b1 = float(b1)
        return v_bounds(b1, p), transition_q(b1, p)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(row, grid))
    return [row(b1) for b1 in grid]


def jump_sizes(point: CurvePoint, p: int) -> tuple[float, float]:
    return point.u_high - point.u_low, ipow(point.u_high, p) - ipow(point.u_low, p)
