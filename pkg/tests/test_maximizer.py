import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergm_phase.errors import ParameterError
from ergm_phase.maximizer import (
    Region,
    classify,
    global_maximizers,
    inflection_points,
    local_maximizers,
)
from ergm_phase.phase import v_bounds
from ergm_phase.scalar import ModelParams, critical_point, l, l_double_prime, l_prime, m

import oracles

GRID_STEP = 1.0 / 99_999


def stationary(u, params):
    """|l'(u)| <= 1e-10, or l' changes sign within one ulp of u.

    Near u = 1 adjacent doubles are 1.1e-16 apart while l'' ~ -1/(2(1-u)), so
    the attainable |l'| at a correctly rounded root can exceed 1e-10.
    A root beyond the last double before an edge is saturated there.
    """
    if abs(l_prime(u, params)) <= 1e-10:
        return True
    lo, hi = math.nextafter(u, 0.0), math.nextafter(u, 1.0)
    if hi >= 1.0:
        # saturated: the root lies between the last double and 1
        return l_prime(u, params) > 0
    if lo <= 0.0:
        return l_prime(u, params) < 0
    return l_prime(lo, params) >= 0 >= l_prime(hi, params)


def test_inflection_examples():
    assert inflection_points(3, 0.5) is None
    assert inflection_points(3, 0.5625) is None
    pair = inflection_points(2, 1.25)
    assert pair.u1 == pytest.approx((1 - math.sqrt(0.2)) / 2, abs=1e-12)
    assert pair.u2 == pytest.approx((1 + math.sqrt(0.2)) / 2, abs=1e-12)
    with pytest.raises(ParameterError):
        inflection_points(1, 2.0)


@given(st.integers(2, 8), st.floats(min_value=1e-3, max_value=50))
def test_inflection_invariants(p, excess):
    beta2 = critical_point(p).beta2_c + excess
    pair = inflection_points(p, beta2)
    c = (p - 1) / p
    assert pair.u1 < c < pair.u2
    assert m(pair.u1, p) == pytest.approx(beta2, abs=1e-10, rel=1e-13)
    assert m(pair.u2, p) == pytest.approx(beta2, abs=1e-10, rel=1e-13)


def test_classify_examples():
    assert classify(ModelParams(3, -0.8, 0.1)) is Region.UNIQUE_SUBCRITICAL
    assert classify(ModelParams(3, -0.8, 2.0)) is Region.UNIQUE_ABOVE_V
    assert classify(ModelParams(3, -0.8, 0.884)) is Region.TWO_LOCAL
    assert classify(ModelParams(3, -0.8, 0.7)) is Region.UNIQUE_BELOW_V


def test_boundary_and_critical_labels():
    vb = v_bounds(-0.8, 3)
    upper = local_maximizers(ModelParams(3, -0.8, vb.upper))
    lower = local_maximizers(ModelParams(3, -0.8, vb.lower))
    assert upper.region is Region.ON_UPPER_BOUNDARY
    assert lower.region is Region.ON_LOWER_BOUNDARY
    # the tangent point is a stationary inflection and is not listed
    assert len(upper.locals) == 1 and upper.locals[0].u > 2 / 3
    assert len(lower.locals) == 1 and lower.locals[0].u < 2 / 3
    cp = critical_point(3)
    crit = local_maximizers(ModelParams(3, cp.beta1_c, cp.beta2_c))
    assert crit.region is Region.CRITICAL
    assert crit.locals[0].u == pytest.approx(2 / 3, abs=1e-4)


def test_local_maximizer_examples():
    rep = local_maximizers(ModelParams(2, 0, 0))
    assert rep.region is Region.UNIQUE_SUBCRITICAL
    assert [loc.u for loc in rep.locals] == [pytest.approx(0.5, abs=1e-15)]
    rep = local_maximizers(ModelParams(2, 1, 0))
    assert rep.globals[0] == pytest.approx(math.exp(2) / (1 + math.exp(2)), abs=1e-14)
    rep = local_maximizers(ModelParams(3, -0.8, 0.884))
    low, high = rep.locals
    assert low.u < 2 / 3 < high.u
    assert abs(low.l_value - high.l_value) < 1e-3


def test_global_maximizer_examples():
    below = global_maximizers(ModelParams(3, -0.8, 0.769))
    assert len(below) == 1 and below[0] < 2 / 3
    above = global_maximizers(ModelParams(3, -0.8, 1.396))
    assert len(above) == 1 and above[0] > 2 / 3
    assert global_maximizers(ModelParams(2, 0, 0)) == [pytest.approx(0.5)]
    with pytest.raises(ParameterError):
        global_maximizers(ModelParams(2, 0, 0), tie_tol=-1.0)


def test_tie_tol_controls_coexistence():
    prm = ModelParams(3, -0.8, 0.884)
    assert len(global_maximizers(prm)) == 1
    assert len(global_maximizers(prm, tie_tol=1e-3)) == 2


def _box_points(count, seed):
    rng = np.random.default_rng(seed)
    return [
        ModelParams(int(rng.choice([2, 3, 4])), float(rng.uniform(-3, 1)), float(rng.uniform(-1, 3)))
        for _ in range(count)
    ]


def test_agrees_with_independent_brent_oracle():
    for prm in _box_points(400, 11):
        u = global_maximizers(prm)[0]
        u_ref = oracles.brent_maximizer(prm.p, prm.beta1, prm.beta2)
        psi_ref = float(oracles.mp_l(u_ref, prm.p, prm.beta1, prm.beta2))
        assert l(u, prm) == pytest.approx(psi_ref, abs=1e-12)


def test_grid_oracle_where_grid_resolves_the_peak():
    """The uniform grid never beats the maximizer; where its spacing resolves the peak
    (discretization error below 1e-9) the two agree within 1e-8 and the grid argmax
    sits within 1e-4 of a maximizer."""
    resolved = 0
    for prm in _box_points(1000, 2024):
        rep = local_maximizers(prm)
        psi = rep.psi
        u_grid, grid_max = oracles.grid_max(prm.p, prm.beta1, prm.beta2)
        assert grid_max <= psi + 1e-12
        u_best = max(rep.locals, key=lambda loc: loc.l_value)
        if 0.5 * abs(u_best.l_curvature) * (GRID_STEP / 2) ** 2 > 1e-9:
            continue
        resolved += 1
        assert psi - grid_max <= 1e-8
        near = [loc.u for loc in rep.locals if psi - loc.l_value <= 1e-8]
        assert min(abs(u_grid - u) for u in near) <= 1e-4
    assert resolved > 400


@settings(max_examples=300)
@given(st.sampled_from([2, 3, 4]), st.floats(-3, 1), st.floats(-1, 3))
def test_report_invariants(p, b1, b2):
    prm = ModelParams(p, b1, b2)
    rep = local_maximizers(prm)
    assert set(rep.globals) <= {loc.u for loc in rep.locals}
    assert (rep.region is Region.TWO_LOCAL) == (len(rep.locals) == 2)
    assert rep.region is classify(prm)
    for loc in rep.locals:
        assert 0 < loc.u < 1
        assert stationary(loc.u, prm)
        if rep.region is not Region.CRITICAL:
            assert loc.l_curvature < 0
        assert loc.l_curvature == l_double_prime(loc.u, prm)
    if len(rep.globals) == 2:
        a, b = rep.locals
        assert abs(a.l_value - b.l_value) <= 1e-10


@settings(max_examples=200)
@given(st.sampled_from([2, 3, 4, 5]), st.floats(0.02, 4.0), st.floats(0.001, 0.999))
def test_interleaving_inside_v(p, depth, frac):
    b1 = critical_point(p).beta1_c - depth
    vb = v_bounds(b1, p)
    b2 = vb.lower + frac * (vb.upper - vb.lower)
    rep = local_maximizers(ModelParams(p, b1, b2))
    assert rep.region is Region.TWO_LOCAL
    (low, high), pair = rep.locals, rep.inflections
    assert low.u < pair.u1 < (p - 1) / p < pair.u2 < high.u
