"""Scalar functions of the edge-density variational problem.

All functions here are closed-form evaluations of

    l(u; beta1, beta2) = beta1*u + beta2*u**p - u*log(u)/2 - (1-u)*log(1-u)/2

and the auxiliary curves ``m`` and ``n`` that locate its inflection points and
the boundaries of the two-maximizer region, plus the bisection solver every
higher-level module uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import BoundaryUnderflowError, BracketError, DomainError, NumericError, ParameterError

P_MAX = 64
ROOT_TOL = 1e-12
ROOT_MAX_ITER = 200


def _check_p(p) -> int:
    if isinstance(p, bool) or not isinstance(p, int):
        raise ParameterError(f"p must be an integer, got {p!r}")
    if p < 2 or p > P_MAX:
        raise ParameterError(f"p must satisfy 2 <= p <= {P_MAX}, got {p}")
    return p


@dataclass(frozen=True)
class ModelParams:
    p: int
    beta1: float
    beta2: float

    def __post_init__(self):
        _check_p(self.p)
        for name in ("beta1", "beta2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
        object.__setattr__(self, "beta1", float(self.beta1))
        object.__setattr__(self, "beta2", float(self.beta2))

    def with_betas(self, beta1: float | None = None, beta2: float | None = None) -> "ModelParams":
        return ModelParams(
            self.p,
            self.beta1 if beta1 is None else beta1,
            self.beta2 if beta2 is None else beta2,
        )


@dataclass(frozen=True)
class CriticalPoint:
    beta1_c: float
    beta2_c: float


def ipow(x: float, k: int) -> float:
    """x**k for a non-negative integer k by repeated squaring."""
    result = 1.0
    base = x
    while k:
        if k & 1:
            result *= base
        base *= base
        k >>= 1
    return result


def _closed_unit(u: float) -> float:
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"u must lie in [0, 1], got {u!r}")
    return u


def _open_unit(u: float) -> float:
    if not 0.0 < u < 1.0:
        raise DomainError(f"u must lie in (0, 1), got {u!r}")
    return u


def entropy_term(u: float) -> float:
    """-(u log u + (1-u) log(1-u)) / 2, with 0 log 0 = 0."""
    _closed_unit(u)
    s = 0.0
    if u > 0.0:
        s -= u * math.log(u)
    if u < 1.0:
        s -= (1.0 - u) * math.log1p(-u)
    return 0.5 * s


def l(u: float, params: ModelParams) -> float:
    _closed_unit(u)
    return params.beta1 * u + params.beta2 * ipow(u, params.p) + entropy_term(u)


def _half_logit(u: float) -> float:
    return 0.5 * (math.log(u) - math.log1p(-u))


def l_prime(u: float, params: ModelParams) -> float:
    _open_unit(u)
    p = params.p
    return params.beta1 + p * params.beta2 * ipow(u, p - 1) - _half_logit(u)


def l_double_prime(u: float, params: ModelParams) -> float:
    _open_unit(u)
    p = params.p
    return p * (p - 1) * params.beta2 * ipow(u, p - 2) - 0.5 / (u * (1.0 - u))


def m(u: float, p: int) -> float:
    """The value of beta2 for which u is an inflection point of l."""
    _open_unit(u)
    _check_p(p)
    return 1.0 / (2.0 * p * (p - 1) * ipow(u, p - 1) * (1.0 - u))


def n_func(u: float, p: int) -> float:
    """-l'(u) + beta1 evaluated with beta2 = m(u); l'(u_i) = beta1 + n(u_i)."""
    _open_unit(u)
    _check_p(p)
    return 0.5 / ((p - 1) * (1.0 - u)) - _half_logit(u)


def critical_point(p: int) -> CriticalPoint:
    _check_p(p)
    beta1_c = 0.5 * math.log(p - 1) - p / (2.0 * (p - 1))
    beta2_c = ipow(p / (p - 1.0), p - 1) / (2.0 * (p - 1))
    return CriticalPoint(beta1_c, beta2_c)


def inflection_center(p: int) -> float:
    """(p-1)/p: minimizer of m and n, location of the critical inflection."""
    return (p - 1) / p


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = ROOT_TOL,
    max_iter: int = ROOT_MAX_ITER,
) -> float:
    """Bisection root of a continuous function with a sign change on [lo, hi].

    Returns x with |x - root| <= tol. ``tol=0`` bisects to floating-point
    resolution and returns whichever bracket end has the smaller |f|.
    """
    if not lo < hi:
        raise BracketError(f"empty bracket [{lo}, {hi}]")
    flo = f(lo)
    fhi = f(hi)
    for x, fx in ((lo, flo), (hi, fhi)):
        if not math.isfinite(fx):
            raise NumericError(f"non-finite function value {fx} at x={x}")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise BracketError(f"f({lo})={flo} and f({hi})={fhi} have the same sign")

    for _ in range(max_iter):
        if tol > 0.0 and hi - lo <= 2.0 * tol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return lo if abs(flo) <= abs(fhi) else hi
        fmid = f(mid)
        if not math.isfinite(fmid):
            raise NumericError(f"non-finite function value {fmid} at x={mid}")
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    if tol > 0.0 and hi - lo > 2.0 * tol:
        raise NumericError(f"bisection did not reach tol={tol} in {max_iter} iterations")
    if tol > 0.0:
        return 0.5 * (lo + hi)
    return lo if abs(flo) <= abs(fhi) else hi


def expand_to_sign(
    f: Callable[[float], float], want_positive: bool, edge: float, inner: float | None = None
) -> float:
    """Walk a bracket end toward 0 (or 1) until f has the wanted sign.

    ``edge`` is 0.0 or 1.0; trial points are at distance 1e-3, 1e-4, ... from
    it, starting no further than halfway to ``inner`` (the other bracket end).
    """
    eps = 1e-3
    if inner is not None:
        eps = min(eps, 0.5 * abs(inner - edge))
    while eps >= 1e-300:
        x = eps if edge == 0.0 else 1.0 - eps
        if edge == 1.0 and x == 1.0:
            break
        fx = f(x)
        if (fx > 0.0) == want_positive and fx != 0.0:
            return x
        eps *= 0.1
    raise BoundaryUnderflowError(f"could not bracket root near u={edge}: it is beyond double resolution")
