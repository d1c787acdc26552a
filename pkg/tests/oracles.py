"""Reference computations that share no code path with ergm_phase.

- grid maximum of l on a uniform u-grid (numpy, vectorized)
- psi via a logit-space scan + scipy brentq, evaluated in mpmath so finite
  differences of psi are free of double-precision cancellation
"""

import math

import mpmath as mp
import numpy as np
from scipy.optimize import brentq

MP_DPS = 40


def grid_l(p, beta1, beta2, npts=100_000):
    u = np.linspace(0.0, 1.0, npts)
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -0.5 * (np.where(u > 0, u * np.log(u), 0.0) + np.where(u < 1, (1 - u) * np.log1p(-u), 0.0))
    return u, beta1 * u + beta2 * u**p + ent


def grid_max(p, beta1, beta2, npts=100_000):
    u, vals = grid_l(p, beta1, beta2, npts)
    k = int(np.argmax(vals))
    return float(u[k]), float(vals[k])


def _lprime(u, p, b1, b2):
    return b1 + p * b2 * u ** (p - 1) - 0.5 * (math.log(u) - math.log1p(-u))


def brent_maximizer(p, beta1, beta2):
    """Global maximizer from a logit-spaced scan refined by Brent's method on l'."""
    x = np.linspace(-60.0, 60.0, 24001)
    u = 1.0 / (1.0 + np.exp(-x))
    one_minus = 1.0 / (1.0 + np.exp(x))
    vals = beta1 * u + beta2 * u**p - 0.5 * (u * np.log(u) + one_minus * np.log(one_minus))
    k = int(np.argmax(vals))
    lo, hi = float(u[max(k - 1, 0)]), float(u[min(k + 1, len(u) - 1)])
    if hi >= 1.0:
        hi = math.nextafter(1.0, 0.0)
    flo, fhi = _lprime(lo, p, beta1, beta2), _lprime(hi, p, beta1, beta2)
    if flo <= 0 or fhi >= 0:
        return lo if flo <= 0 else hi
    return brentq(_lprime, lo, hi, args=(p, beta1, beta2), xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def mp_l(u, p, beta1, beta2):
    with mp.workdps(MP_DPS):
        u = mp.mpf(u)
        b1, b2 = mp.mpf(beta1), mp.mpf(beta2)
        return b1 * u + b2 * u**p - (u * mp.log(u) + (1 - u) * mp.log(1 - u)) / 2


def mp_maximizer(p, beta1, beta2, iters=8):
    """Brent's double-precision u* polished by Newton steps on l' in mpmath.

    Near u = 1 a double cannot follow the tiny shifts of u* that second
    differences of psi depend on, so the root is refined at MP_DPS digits.
    """
    with mp.workdps(MP_DPS):
        u = mp.mpf(brent_maximizer(p, beta1, beta2))
        b1, b2 = mp.mpf(beta1), mp.mpf(beta2)
        for _ in range(iters):
            d1 = b1 + p * b2 * u ** (p - 1) - mp.log(u / (1 - u)) / 2
            d2 = p * (p - 1) * b2 * u ** (p - 2) - 1 / (2 * u * (1 - u))
            step = d1 / d2
            # keep the iterate inside (0, 1)
            while not 0 < u - step < 1:
                step /= 2
            u -= step
        return u


def mp_psi(p, beta1, beta2):
    """psi as an mpf at the refined maximizer."""
    return mp_l(mp_maximizer(p, beta1, beta2), p, beta1, beta2)


def fd_gradient(p, b1, b2, h=1e-5):
    with mp.workdps(MP_DPS):
        g1 = (mp_psi(p, b1 + h, b2) - mp_psi(p, b1 - h, b2)) / (2 * h)
        g2 = (mp_psi(p, b1, b2 + h) - mp_psi(p, b1, b2 - h)) / (2 * h)
        return float(g1), float(g2)


def fd_hessian(p, b1, b2, h=1e-4):
    with mp.workdps(MP_DPS):
        f0 = mp_psi(p, b1, b2)
        h11 = (mp_psi(p, b1 + h, b2) - 2 * f0 + mp_psi(p, b1 - h, b2)) / h**2
        h22 = (mp_psi(p, b1, b2 + h) - 2 * f0 + mp_psi(p, b1, b2 - h)) / h**2
        h12 = (
            mp_psi(p, b1 + h, b2 + h) - mp_psi(p, b1 + h, b2 - h)
            - mp_psi(p, b1 - h, b2 + h) + mp_psi(p, b1 - h, b2 - h)
        ) / (4 * h * h)
        return float(h11), float(h12), float(h22)


def fd_derivative(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2 * h)


def brute_force_delta(adj, beta1, beta2, p, kind, i, j):
    """H(with ij) - H(without ij) from two full recomputations on dense copies."""
    def ham(a):
        n = a.shape[0]
        te = a.sum() / n**2
        if kind == "star":
            th = float((a.sum(axis=1).astype(float) ** p).sum()) / n ** (p + 1)
        else:
            ai = a.astype(np.int64)
            th = float(np.trace(ai @ ai @ ai)) / n**3
        return n**2 * (beta1 * te + beta2 * th)

    with_edge = adj.copy()
    with_edge[i, j] = with_edge[j, i] = 1
    without = adj.copy()
    without[i, j] = without[j, i] = 0
    return ham(with_edge) - ham(without)


def mp_transition_q(beta1, p, guess):
    """Solve l'(x) = l'(y) = 0, l(x) = l(y) for (x, y, beta2) by Newton in mpmath.

    ``guess`` = (x0, y0, beta2_0) only seeds the iteration.
    """
    with mp.workdps(MP_DPS):
        b1 = mp.mpf(beta1)

        def lp(u, b2):
            return b1 + p * b2 * u ** (p - 1) - mp.log(u / (1 - u)) / 2

        def lv(u, b2):
            return b1 * u + b2 * u**p - (u * mp.log(u) + (1 - u) * mp.log(1 - u)) / 2

        def system(x, y, b2):
            return [lp(x, b2), lp(y, b2), lv(y, b2) - lv(x, b2)]

        x, y, b2 = mp.findroot(system, [mp.mpf(g) for g in guess])
        return float(b2), float(x), float(y)


def bisect_root(f, lo, hi, iters=200):
    """Plain float bisection for the v-bounds oracle."""
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
