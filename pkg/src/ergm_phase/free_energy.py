"""Limiting free energy psi_inf and its closed-form partial derivatives.

psi_inf(beta1, beta2) = sup_u l(u; beta1, beta2). Off the transition curve the
maximizer u* is unique and

    d psi/d beta1 = u*,            d psi/d beta2 = u*^p,
    d2 psi/d beta1^2 = -1/l''(u*), d2 psi/d beta1 d beta2 = -p u*^(p-1)/l''(u*),
    d2 psi/d beta2^2 = -(p u*^(p-1))^2/l''(u*).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import CoexistenceError, CriticalDivergenceError, OutOfRegionError
from .maximizer import MaximizerReport, Region, local_maximizers
from .phase import jump_sizes, transition_q
from .scalar import ModelParams, critical_point, ipow, l_double_prime

CURVE_TOL = 1e-9
ON_CURVE_BAND = 10 * CURVE_TOL
DIVERGENCE_TOL = 1e-13
JUMP_MARGIN = 1e-6


class H2(str, enum.Enum):
    STAR = "star"
    TRIANGLE = "triangle"


class Validity(str, enum.Enum):
    PROVEN_GENERAL = "ProvenGeneral"
    PROVEN_STAR_ONLY = "ProvenStarOnly"
    UNPROVEN = "Unproven"


@dataclass(frozen=True)
class PsiReport:
    psi: float
    du_beta1: float | None
    du_beta2: float | None
    d2_b1b1: float | None
    d2_b1b2: float | None
    d2_b2b2: float | None
    on_curve: bool
    validity: Validity
    region: Region
    u_star: tuple[float, ...]


def validity(params: ModelParams, h2: H2 = H2.STAR) -> Validity:
    if params.beta2 > -2.0 / (params.p * (params.p - 1)):
        return Validity.PROVEN_GENERAL
    if H2(h2) is H2.STAR:
        return Validity.PROVEN_STAR_ONLY
    return Validity.UNPROVEN


def _curve_distance(report: MaximizerReport) -> float | None:
    """Signed estimate of beta2 - q(beta1) inside the V region, else None.

    The gap l(u_high) - l(u_low) has beta2-derivative u_high^p - u_low^p, so one
    Newton step from the current point estimates the distance to the curve.
    """
    if report.region is not Region.TWO_LOCAL:
        return None
    p = report.params.p
    low, high = report.locals
    slope = ipow(high.u, p) - ipow(low.u, p)
    return (high.l_value - low.l_value) / slope


def _on_curve(report: MaximizerReport) -> bool:
    dist = _curve_distance(report)
    return dist is not None and abs(dist) <= ON_CURVE_BAND


def psi_infinity(params: ModelParams) -> float:
    return local_maximizers(params).psi


def _unique_maximizer(report: MaximizerReport) -> float:
    if _on_curve(report):
        p = report.params.p
        branches = tuple((loc.u, ipow(loc.u, p)) for loc in report.locals)
        raise CoexistenceError(
            f"({report.params.beta1}, {report.params.beta2}) lies on the transition curve; "
            "the first derivatives jump there",
            branches,
        )
    best = max(report.locals, key=lambda loc: loc.l_value)
    return best.u


def psi_gradient(params: ModelParams) -> tuple[float, float]:
    u = _unique_maximizer(local_maximizers(params))
    return u, ipow(u, params.p)


def psi_hessian(params: ModelParams) -> tuple[float, float, float]:
    report = local_maximizers(params)
    return _hessian_at(_unique_maximizer(report), params, report.region)


def _hessian_at(u: float, params: ModelParams, region: Region) -> tuple[float, float, float]:
    curv = l_double_prime(u, params)
    # l' is cubically flat at the critical point: rounding of (beta1_c, beta2_c)
    # alone moves u* by ~1e-5 and leaves |l''| ~ 1e-10, so the label counts too
    if abs(curv) <= DIVERGENCE_TOL or region is Region.CRITICAL:
        raise CriticalDivergenceError(f"l''(u*) = {curv:g}: second derivatives diverge at {params}")
    g = params.p * ipow(u, params.p - 1)
    return -1.0 / curv, -g / curv, -g * g / curv


def psi_report(params: ModelParams, h2: H2 = H2.STAR) -> PsiReport:
    report = local_maximizers(params)
    on_curve = _on_curve(report)
    grad = (None, None)
    hess = (None, None, None)
    if not on_curve:
        u = max(report.locals, key=lambda loc: loc.l_value).u
        grad = (u, ipow(u, params.p))
        try:
            hess = _hessian_at(u, params, report.region)
        except CriticalDivergenceError:
            pass
    return PsiReport(
        psi=report.psi,
        du_beta1=grad[0],
        du_beta2=grad[1],
        d2_b1b1=hess[0],
        d2_b1b2=hess[1],
        d2_b2b2=hess[2],
        on_curve=on_curve,
        validity=validity(params, h2),
        region=report.region,
        u_star=report.globals,
    )


def jump_across_curve(beta1: float, p: int) -> tuple[float, float]:
    """Jumps (u_high - u_low, u_high^p - u_low^p) of the two first derivatives at (beta1, q(beta1))."""
    beta1_c = critical_point(p).beta1_c
    if not beta1 < beta1_c - JUMP_MARGIN:
        raise OutOfRegionError(f"beta1={beta1} is not below beta1_c - {JUMP_MARGIN:g}; no jump there")
    return jump_sizes(transition_q(beta1, p), p)
