"""Finite-n exponential random graphs: densities, exact enumeration, Glauber sampling.

The model weights a simple graph G on n vertices by
exp(n^2 * (beta1 * t(edge, G) + beta2 * t(H2, G))) where t is the homomorphism
density and H2 is a p-star or the triangle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .errors import ParameterError, SizeError
from .free_energy import H2, Validity, validity
from .maximizer import inflection_points
from .phase import transition_q_inverse
from .scalar import ModelParams

GENERATOR = "PCG64"
CHUNK = 1 << 20
MAX_ENUM_N = 6
JUMP_BAND = 0.05


@dataclass(frozen=True)
class ModelSpec:
    params: ModelParams
    h2: H2 = H2.STAR

    def __post_init__(self):
        object.__setattr__(self, "h2", H2(self.h2))
        if self.h2 is H2.TRIANGLE and self.params.p != 3:
            raise ParameterError(f"the triangle has 3 edges; got p={self.params.p}")

    @classmethod
    def star(cls, p: int, beta1: float, beta2: float) -> "ModelSpec":
        return cls(ModelParams(p, beta1, beta2), H2.STAR)

    @classmethod
    def triangle(cls, beta1: float, beta2: float) -> "ModelSpec":
        return cls(ModelParams(3, beta1, beta2), H2.TRIANGLE)

    @property
    def model_code(self) -> int:
        return _kernels.STAR if self.h2 is H2.STAR else _kernels.TRIANGLE

    @property
    def validity(self) -> Validity:
        return validity(self.params, self.h2)


class GraphState:
    """Simple graph with cached degrees, edge count and ordered-triangle count."""

    def __init__(self, adjacency):
        adj = np.array(adjacency, dtype=np.uint8)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ParameterError("adjacency must be a square matrix")
        if adj.shape[0] < 1:
            raise ParameterError("graph needs at least one vertex")
        if np.any(adj > 1) or np.any(adj != adj.T) or np.any(np.diag(adj)):
            raise ParameterError("adjacency must be symmetric 0/1 with zero diagonal")
        self.adj = np.ascontiguousarray(adj)
        self.recompute()

    @classmethod
    def empty(cls, n: int) -> "GraphState":
        return cls(np.zeros((n, n), dtype=np.uint8))

    @classmethod
    def complete(cls, n: int) -> "GraphState":
        return cls(np.ones((n, n), dtype=np.uint8) - np.eye(n, dtype=np.uint8))

    @classmethod
    def erdos_renyi(cls, n: int, density: float, rng: np.random.Generator) -> "GraphState":
        if not 0.0 <= density <= 1.0:
            raise ParameterError(f"density must lie in [0, 1], got {density}")
        upper = np.triu(rng.random((n, n)) < density, 1).astype(np.uint8)
        return cls(upper + upper.T)

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[tuple[int, int]]) -> "GraphState":
        adj = np.zeros((n, n), dtype=np.uint8)
        for i, j in edges:
            adj[i, j] = adj[j, i] = 1
        return cls(adj)

    def recompute(self) -> None:
        self.deg = self.adj.sum(axis=1, dtype=np.int64)
        a = self.adj.astype(np.int64)
        self._state = np.array([int(self.deg.sum()) // 2, int(np.trace(a @ a @ a))], dtype=np.int64)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def edge_count(self) -> int:
        return int(self._state[0])

    @property
    def triangle_hom(self) -> int:
        return int(self._state[1])

    def copy(self) -> "GraphState":
        return GraphState(self.adj.copy())


def t_edge(g: GraphState) -> float:
    return 2.0 * g.edge_count / g.n**2


def t_pstar(g: GraphState, p: int) -> float:
    if p < 2:
        raise ParameterError("a p-star needs p >= 2")
    return float(np.sum(g.deg.astype(np.float64) ** p)) / g.n ** (p + 1)


def t_triangle(g: GraphState) -> float:
    return g.triangle_hom / g.n**3


def t_h2(g: GraphState, spec: ModelSpec) -> float:
    if spec.h2 is H2.STAR:
        return t_pstar(g, spec.params.p)
    return t_triangle(g)


def hamiltonian(g: GraphState, spec: ModelSpec) -> float:
    """n^2 (beta1 t_edge + beta2 t_H2); the log-weight of g before normalization."""
    return g.n**2 * (spec.params.beta1 * t_edge(g) + spec.params.beta2 * t_h2(g, spec))


def _pairs(n: int):
    i, j = np.triu_indices(n, 1)
    return i.astype(np.int64), j.astype(np.int64)


def delta_hamiltonian(g: GraphState, spec: ModelSpec, i: int, j: int) -> float:
    """Incremental H(with edge ij) - H(without edge ij)."""
    prm = spec.params
    return float(_kernels._delta_h(g.adj, g.deg, spec.model_code, prm.p, prm.beta1, prm.beta2, i, j))


def _advance(g: GraphState, spec: ModelSpec, pi, pj, picks, uniforms, step0=0, burn_in=None, thin=1, outs=None):
    prm = spec.params
    if outs is None:
        outs = _kernels.empty_outputs()
        burn_in = np.iinfo(np.int64).max
    _kernels.run_steps(
        g.adj, g.deg, g._state, pi, pj, picks, uniforms,
        spec.model_code, prm.p, prm.beta1, prm.beta2,
        step0, burn_in, thin, *outs,
    )


def glauber_step(g: GraphState, spec: ModelSpec, rng: np.random.Generator) -> GraphState:
    """One heat-bath update of a uniformly chosen vertex pair, in place."""
    if g.n < 2:
        raise ParameterError("Glauber dynamics needs n >= 2")
    pi, pj = _pairs(g.n)
    picks = rng.integers(0, pi.shape[0], size=1)
    uniforms = rng.random(1)
    _advance(g, spec, pi, pj, picks, uniforms)
    return g


def _batch_se(x: np.ndarray, batches: int = 20) -> float:
    """Standard error of the mean from non-overlapping batch means."""
    k = x.shape[0]
    if k < 2:
        return math.nan
    if k < 2 * batches:
        return float(np.std(x, ddof=1) / math.sqrt(k))
    size = k // batches
    means = x[: size * batches].reshape(batches, size).mean(axis=1)
    return float(np.std(means, ddof=1) / math.sqrt(batches))


@dataclass
class ChainStats:
    spec: ModelSpec
    n: int
    steps: int
    burn_in: int
    thin: int
    seed: int
    init: str
    sample_steps: np.ndarray
    samples: np.ndarray
    final: GraphState = field(repr=False)
    generator: str = GENERATOR

    @property
    def mean_edge(self) -> float:
        return float(self.samples[:, 0].mean())

    @property
    def sd_edge(self) -> float:
        return float(self.samples[:, 0].std(ddof=1))

    @property
    def mean_h2(self) -> float:
        return float(self.samples[:, 1].mean())

    @property
    def sd_h2(self) -> float:
        return float(self.samples[:, 1].std(ddof=1))

    @property
    def se_edge(self) -> float:
        return _batch_se(self.samples[:, 0])

    @property
    def se_h2(self) -> float:
        return _batch_se(self.samples[:, 1])

    @property
    def validity(self) -> Validity:
        return self.spec.validity

    def rows(self) -> list[dict]:
        return [
            {"step": int(s), "t_edge": float(e), "t_h2": float(h)}
            for s, (e, h) in zip(self.sample_steps, self.samples)
        ]

    def summary(self) -> dict:
        prm = self.spec.params
        return {
            "h2": self.spec.h2.value,
            "p": prm.p,
            "beta1": prm.beta1,
            "beta2": prm.beta2,
            "n": self.n,
            "steps": self.steps,
            "burn_in": self.burn_in,
            "thin": self.thin,
            "seed": self.seed,
            "generator": self.generator,
            "init": self.init,
            "samples": int(self.samples.shape[0]),
            "mean_edge": self.mean_edge,
            "sd_edge": self.sd_edge,
            "se_edge": self.se_edge,
            "mean_h2": self.mean_h2,
            "sd_h2": self.sd_h2,
            "se_h2": self.se_h2,
            "validity": self.validity.value,
        }


def _initial_graph(n: int, init, rng: np.random.Generator) -> tuple[GraphState, str]:
    if isinstance(init, str):
        key = init.lower()
        if key == "empty":
            return GraphState.empty(n), "empty"
        if key == "complete":
            return GraphState.complete(n), "complete"
        if key.startswith("density:"):
            init = float(key.split(":", 1)[1])
        else:
            raise ParameterError(f"unknown init {init!r}; use empty, complete or density:<u>")
    density = float(init)
    return GraphState.erdos_renyi(n, density, rng), f"density:{density!r}"


def run_chain(
    spec: ModelSpec,
    n: int,
    steps: int,
    burn_in: int = 0,
    thin: int = 1,
    seed: int = 0,
    init="empty",
) -> ChainStats:
    """Heat-bath chain of ``steps`` single-pair updates.

    A sample is recorded after every ``thin``-th step beyond ``burn_in``.
    Output is a deterministic function of the arguments.
    """
    if n < 2:
        raise ParameterError("n must be at least 2")
    if not 0 <= burn_in < steps:
        raise ParameterError("need 0 <= burn_in < steps")
    if thin < 1:
        raise ParameterError("thin must be at least 1")
    if not 0 <= seed < 2**64:
        raise ParameterError("seed must be a 64-bit unsigned integer")
    rng = np.random.Generator(np.random.PCG64(seed))
    g, init_label = _initial_graph(n, init, rng)
    pi, pj = _pairs(n)
    total = (steps - burn_in) // thin
    outs = (
        np.zeros(total, dtype=np.int64),
        np.zeros(total, dtype=np.float64),
        np.zeros(total, dtype=np.float64),
        np.zeros(1, dtype=np.int64),
    )
    done = 0
    while done < steps:
        k = min(CHUNK, steps - done)
        picks = rng.integers(0, pi.shape[0], size=k)
        uniforms = rng.random(k)
        _advance(g, spec, pi, pj, picks, uniforms, done, burn_in, thin, outs)
        done += k
    samples = np.column_stack([outs[1], outs[2]])
    return ChainStats(spec, n, steps, burn_in, thin, seed, init_label, outs[0], samples, g)


def samples_csv(stats: ChainStats) -> str:
    from .output import to_csv

    return to_csv(stats.rows(), ["step", "t_edge", "t_h2"])


class Enumeration(NamedTuple):
    psi_n: float
    e_t_edge: float
    e_t_h2: float


def _enumerate(spec: ModelSpec, n: int):
    if n < 1:
        raise ParameterError("n must be at least 1")
    if n > MAX_ENUM_N:
        raise SizeError(f"exact enumeration is limited to n <= {MAX_ENUM_N}, got {n}")
    pi, pj = _pairs(n)
    npairs = pi.shape[0]
    codes = np.arange(1 << npairs, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(npairs)) & 1).astype(np.int64)
    incidence = np.zeros((npairs, n), dtype=np.int64)
    incidence[np.arange(npairs), pi] = 1
    incidence[np.arange(npairs), pj] = 1
    deg = bits @ incidence
    edges = bits.sum(axis=1)
    te = 2.0 * edges / n**2
    if spec.h2 is H2.STAR:
        th2 = (deg.astype(np.float64) ** spec.params.p).sum(axis=1) / n ** (spec.params.p + 1)
    else:
        index = {(int(a), int(b)): k for k, (a, b) in enumerate(zip(pi, pj))}
        tri = np.zeros(codes.shape[0], dtype=np.int64)
        for a in range(n):
            for b in range(a + 1, n):
                for c in range(b + 1, n):
                    tri += bits[:, index[a, b]] * bits[:, index[b, c]] * bits[:, index[a, c]]
        th2 = 6.0 * tri / n**3
    h = n**2 * (spec.params.beta1 * te + spec.params.beta2 * th2)
    log_z = logsumexp(h)
    w = np.exp(h - log_z)
    return log_z, w, edges, te, th2


def exact_enumeration(spec: ModelSpec, n: int) -> Enumeration:
    """psi_n and the exact Gibbs expectations of t_edge and t_H2, summing all labeled graphs."""
    log_z, w, _, te, th2 = _enumerate(spec, n)
    return Enumeration(float(log_z / n**2), float(w @ te), float(w @ th2))


def edge_count_distribution(spec: ModelSpec, n: int) -> np.ndarray:
    """Exact probabilities of edge_count = 0, 1, ..., n(n-1)/2."""
    _, w, edges, _, _ = _enumerate(spec, n)
    return np.bincount(edges, weights=w, minlength=n * (n - 1) // 2 + 1)


class JumpRow(NamedTuple):
    offset: float
    beta1: float
    beta2: float
    init: str
    mean_edge: float
    se_edge: float
    u1: float
    u2: float
    predicted: str
    ok: bool


def jump_experiment(
    spec: ModelSpec,
    n: int,
    beta2: float,
    offsets: Sequence[float],
    seed: int = 0,
    steps: int = 2_000_000,
    burn_in: int = 500_000,
    thin: int = 1_000,
) -> tuple[float, list[JumpRow]]:
    """Edge density on either side of beta1 = q^{-1}(beta2).

    Each offset runs a chain at beta1 = q^{-1}(beta2) + offset started on the
    side the limit theory predicts (empty below, complete above) and checks
    mean_edge < u1 below or > u2 above, with m(u1) = m(u2) = beta2.
    Returns (q^{-1}(beta2), rows).
    """
    p = spec.params.p
    if any(abs(d) < JUMP_BAND for d in offsets):
        raise ParameterError(f"offsets must stay outside the band |offset| < {JUMP_BAND} around the curve")
    b1_star = transition_q_inverse(beta2, p)
    u1, u2 = inflection_points(p, beta2)
    rows = []
    for k, d in enumerate(offsets):
        local = ModelSpec(ModelParams(p, b1_star + d, beta2), spec.h2)
        init = "empty" if d < 0 else "complete"
        stats = run_chain(local, n, steps, burn_in, thin, (seed + k) % 2**64, init)
        mean = stats.mean_edge
        if d < 0:
            predicted, ok = "below_u1", mean < u1
        else:
            predicted, ok = "above_u2", mean > u2
        rows.append(JumpRow(float(d), local.params.beta1, beta2, init, mean, stats.se_edge, u1, u2, predicted, bool(ok)))
    return b1_star, rows
