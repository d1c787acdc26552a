"""Compiled inner loops for heat-bath Glauber dynamics."""

import math

import numba
import numpy as np

STAR = 0
TRIANGLE = 1


@numba.njit(cache=True)
def _common_neighbors(adj, i, j):
    c = 0
    for k in range(adj.shape[0]):
        c += adj[i, k] & adj[j, k]
    return c


@numba.njit(cache=True)
def _delta_h(adj, deg, model, p, beta1, beta2, i, j):
    """H(edge present) - H(edge absent) for the pair (i, j)."""
    n = adj.shape[0]
    a = adj[i, j]
    dh = 2.0 * beta1
    if model == STAR:
        di = float(deg[i] - a)
        dj = float(deg[j] - a)
        dh += beta2 * ((di + 1.0) ** p - di**p + (dj + 1.0) ** p - dj**p) / float(n) ** (p - 1)
    else:
        dh += 6.0 * beta2 * _common_neighbors(adj, i, j) / n
    return dh


@numba.njit(cache=True)
def _h2_density(adj, deg, state, model, p):
    n = adj.shape[0]
    if model == STAR:
        s = 0.0
        for v in range(n):
            s += float(deg[v]) ** p
        return s / float(n) ** (p + 1)
    return state[1] / float(n) ** 3


@numba.njit(cache=True)
def run_steps(
    adj, deg, state, pair_i, pair_j, picks, uniforms,
    model, p, beta1, beta2,
    step0, burn_in, thin,
    out_step, out_edge, out_h2, out_pos,
):
    """Apply len(picks) heat-bath updates in place.

    ``state`` holds (edge_count, triangle_hom). After global step s (1-based,
    s = step0 + k + 1) a sample is written when s > burn_in and
    (s - burn_in) % thin == 0.
    """
    n = adj.shape[0]
    n2 = float(n) * float(n)
    pos = out_pos[0]
    for k in range(picks.shape[0]):
        i = pair_i[picks[k]]
        j = pair_j[picks[k]]
        dh = _delta_h(adj, deg, model, p, beta1, beta2, i, j)
        if dh >= 0.0:
            prob = 1.0 / (1.0 + math.exp(-dh))
        else:
            e = math.exp(dh)
            prob = e / (1.0 + e)
        new = 1 if uniforms[k] < prob else 0
        old = adj[i, j]
        if new != old:
            c = _common_neighbors(adj, i, j)
            sign = 1 if new == 1 else -1
            adj[i, j] = new
            adj[j, i] = new
            deg[i] += sign
            deg[j] += sign
            state[0] += sign
            state[1] += 6 * sign * c
        s = step0 + k + 1
        if s > burn_in and (s - burn_in) % thin == 0:
            out_step[pos] = s
            out_edge[pos] = 2.0 * state[0] / n2
            out_h2[pos] = _h2_density(adj, deg, state, model, p)
            pos += 1
    out_pos[0] = pos


def empty_outputs():
    return (
        np.zeros(0, dtype=np.int64),
        np.zeros(0, dtype=np.float64),
        np.zeros(0, dtype=np.float64),
        np.zeros(1, dtype=np.int64),
    )
