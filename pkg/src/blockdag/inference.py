"""Posterior exploration: Gibbs over edge indicators and the stochastic
MAP-structure search with urn reassignment proposals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dag import (
    Dag,
    Layering,
    adding_edge_creates_cycle,
    minimal_layering,
    minimal_ranks,
)
from .likelihood import DataMatrix, FamilyCache
from .partition import log_partition_prob
from .priors import (
    HOPPE_BETA,
    MINIMAL_HOPPE_BETA,
    UNIFORM,
    PriorParams,
    log_hoppe_beta_conditional,
    log_minimal_hoppe_beta,
    log_uniform_prior,
)


@dataclass
class SearchParams:
    """Stochastic-search settings: urn reassignment weight, chain length,
    seed, and the compelled-edge repair variant for bottom-layer moves."""

    alpha_tilde: float = 1.0
    iterations: int = 5000
    seed: int = 0
    literal_repair: bool = True

    def __post_init__(self):
        if self.alpha_tilde <= 0:
            raise ValueError("alpha_tilde must be > 0")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def _canonical_partition(ranks: np.ndarray):
    """Relabel a rank vector by order of first appearance.

    Returns (z, ordering) with z feasible for the urn and
    ordering[z - 1] == ranks.
    """
    label_of = {}
    z = np.zeros(ranks.size, dtype=np.int64)
    for i, r in enumerate(ranks.tolist()):
        if r not in label_of:
            label_of[r] = len(label_of) + 1
        z[i] = label_of[r]
    ordering = np.zeros(len(label_of), dtype=np.int64)
    for r, label in label_of.items():
        ordering[label - 1] = r
    return z, ordering


class ScoreFn:
    """log S(G | x) = log prior + log Cooper-Herskovits likelihood.

    The Hoppe-Beta joint prior needs a partition; the search has no separate
    z-kernel, so the minimal layering of the graph stands in for z (with the
    identity ordering, which is compatible by construction).
    """

    def __init__(self, prior: PriorParams, data: DataMatrix = None,
                 gamma: float = 1.0, cache: FamilyCache = None,
                 prior_eval_mode: str = "paper"):
        self.prior = prior
        self.data = data
        self.gamma = float(gamma)
        self.prior_eval_mode = prior_eval_mode
        if cache is None and data is not None:
            cache = FamilyCache(data, gamma)
        self.cache = cache

    def log_prior(self, g: Dag, layering: Layering = None) -> float:
        mode = self.prior.mode
        if mode == UNIFORM:
            return log_uniform_prior(g)
        if mode == MINIMAL_HOPPE_BETA:
            return log_minimal_hoppe_beta(g, self.prior, mode=self.prior_eval_mode)
        if layering is None:
            layering = minimal_layering(g)
        # relabel ranks into a feasible urn vector (labels in order of first
        # appearance) plus the ordering mapping labels back to ranks
        ranks = layering.ranks()
        z, ordering = _canonical_partition(ranks)
        K = ordering.size
        return (
            log_partition_prob(z, self.prior.alpha)
            - math.lgamma(K + 1)
            + log_hoppe_beta_conditional(g, z, ordering, self.prior.beta)
        )

    def log_likelihood(self, g: Dag) -> float:
        if self.cache is None:
            return 0.0
        return float(sum(self.cache.score(j, g.parents(j)) for j in range(g.d)))

    def log_score(self, g: Dag, layering: Layering = None):
        lp = self.log_prior(g, layering)
        ll = self.log_likelihood(g)
        return lp, ll, lp + ll


@dataclass
class Trajectory:
    """Per-iteration log of one chain plus the best graph seen."""

    log_prior: np.ndarray
    log_lik: np.ndarray
    log_score: np.ndarray
    edges: np.ndarray
    K: np.ndarray
    best_graph: Dag
    best_score: float
    rng_seed: object
    accept_count: int = 0
    graphs: list = field(default=None, repr=False)

    def __len__(self):
        return self.log_score.shape[0]

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("iter,log_prior,log_lik,log_score,edges,K\n")
            for t in range(len(self)):
                fh.write(f"{t + 1},{float(self.log_prior[t])!r},{float(self.log_lik[t])!r},"
                         f"{float(self.log_score[t])!r},{int(self.edges[t])},{int(self.K[t])}\n")


# ---------------------------------------------------------------------------
# Gibbs sampler
# ---------------------------------------------------------------------------

def gibbs_run(data: DataMatrix, score: ScoreFn, k: int, seed: int,
              d: int = None, burn_in: int = None, thin: int = 1,
              random_scan: bool = False, memo_cap: int = 200_000) -> list:
    """k post-sweep graphs from the edge-indicator Gibbs sampler.

    Each sweep visits all d(d-1) ordered pairs; an indicator is forced to 0
    when the edge would create a cycle, otherwise drawn from its exact
    conditional.  Defined on the graph-only posterior, so the prior must be
    Minimal Hoppe-Beta.
    """
    if score.prior.mode != MINIMAL_HOPPE_BETA:
        raise ValueError("the Gibbs sampler requires the Minimal Hoppe-Beta prior")
    if d is None:
        d = data.d
    if burn_in is None:
        burn_in = int(round(0.2 * k))
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(d) for j in range(d) if i != j]
    adj = np.zeros((d, d), dtype=np.int8)
    memo: dict = {}

    def memo_score(a: np.ndarray) -> float:
        key = a.tobytes()
        got = memo.get(key)
        if got is None:
            got = score.log_score(Dag(a))[2]
            if len(memo) < memo_cap:
                memo[key] = got
        return got

    out = []
    total = burn_in + k * thin
    for sweep in range(total):
        order = pairs if not random_scan else [pairs[t] for t in rng.permutation(len(pairs))]
        for (i, j) in order:
            if adj[i, j]:
                adj[i, j] = 0
                ls0 = memo_score(adj)
                adj[i, j] = 1
                ls1 = memo_score(adj)
            else:
                if adding_edge_creates_cycle(adj, i, j):
                    adj[i, j] = 0
                    continue
                ls0 = memo_score(adj)
                adj[i, j] = 1
                ls1 = memo_score(adj)
                adj[i, j] = 0
            # P(edge) = 1 / (1 + exp(ls0 - ls1)), stable in log space
            diff = ls0 - ls1
            p1 = 1.0 / (1.0 + math.exp(diff)) if diff < 500 else 0.0
            adj[i, j] = 1 if rng.random() < p1 else 0
        if sweep >= burn_in and (sweep - burn_in) % thin == 0:
            out.append(Dag(adj.copy()))
    return out


# ---------------------------------------------------------------------------
# Proposal kernel
# ---------------------------------------------------------------------------

def _propose_arrays(adj: np.ndarray, ranks: np.ndarray, alpha_tilde: float,
                    rng: np.random.Generator, literal_repair: bool = True):
    """One draw from the proposal kernel, on raw arrays.

    Returns (adj', ranks') where ranks' is the minimal layering of adj'.
    """
    d = adj.shape[0]
    adj = adj.copy()
    zt = ranks.astype(np.int64).copy()

    # step 1: remove a node; collapse its layer if it was alone
    x = int(rng.integers(d))
    old_rank = zt[x]
    others = np.arange(d) != x
    if not np.any(zt[others] == old_rank):
        zt[zt > old_rank] -= 1
    zt[x] = 0

    # step 2: urn reassignment among the remaining layers
    K = int(zt[others].max(initial=0))
    u = rng.random() * (alpha_tilde + (d - 1))
    if u >= (d - 1) or K == 0:
        new_layer = True
        target = K + 1
    else:
        new_layer = False
        m = np.bincount(zt[others], minlength=K + 1)[1:]
        cum = np.cumsum(m)
        target = 1 + int(np.searchsorted(cum, u, side="right"))

    # step 3: a brand-new layer is inserted at a uniform position
    if new_layer:
        pos = int(rng.integers(1, K + 2))
        zt[zt >= pos] += 1
        zt[x] = pos
    else:
        zt[x] = target

    # step 4a: drop edges contradicting the partition
    incr = zt[:, None] < zt[None, :]
    adj &= incr.astype(np.int8)

    # step 4b: compelled parent for x
    if zt[x] >= 2 and not np.any(adj[zt == zt[x] - 1, x]):
        cand = np.flatnonzero(zt == zt[x] - 1)
        p = int(cand[rng.integers(cand.size)])
        adj[p, x] = 1

    # step 4c: x dropped to the bottom layer
    if zt[x] == 1:
        nxt = np.flatnonzero(zt == 2)
        if literal_repair:
            for v in nxt:
                if v != x:
                    adj[x, v] = 1
        else:
            below = zt == 1
            for v in nxt:
                if v != x and not np.any(adj[below, v]):
                    adj[x, v] = 1

    # step 4d: recursive relayering down to the minimal layering
    z_hat = minimal_ranks(adj)

    # step 5: toggle one ordered pair that respects the layering
    y = int(rng.integers(d))
    w = int(rng.integers(d - 1))
    if w >= y:
        w += 1
    if z_hat[y] < z_hat[w]:
        adj[y, w] ^= 1
        z_hat = minimal_ranks(adj)  # step 6

    return adj, z_hat


def propose(g: Dag, layering: Layering, params: SearchParams,
            rng: np.random.Generator):
    """Proposal kernel over (Dag, minimal Layering)."""
    adj, ranks = _propose_arrays(g.adj, layering.ranks(), params.alpha_tilde,
                                 rng, literal_repair=params.literal_repair)
    return Dag(adj), Layering.from_ranks(ranks)


# ---------------------------------------------------------------------------
# Stochastic search
# ---------------------------------------------------------------------------

def stochastic_search(data: DataMatrix, score: ScoreFn, params: SearchParams,
                      d: int = None, keep_graphs: bool = True) -> Trajectory:
    """Non-reversible chain maximising the posterior score.

    Starts from the empty graph; a proposal is accepted with probability
    min(1, exp(log S' - log S)).  Records every iteration and retains the
    best-scoring graph.
    """
    if d is None:
        d = data.d
    rng = np.random.default_rng(params.seed)
    T = params.iterations
    adj = np.zeros((d, d), dtype=np.int8)
    ranks = np.ones(d, dtype=np.int64)
    cur = score.log_score(Dag(adj), Layering.from_ranks(ranks))
    best_adj, best_score = adj.copy(), cur[2]

    lp = np.zeros(T)
    ll = np.zeros(T)
    ls = np.zeros(T)
    edges = np.zeros(T, dtype=np.int64)
    Ks = np.zeros(T, dtype=np.int64)
    graphs = [] if keep_graphs else None
    accepts = 0

    for t in range(T):
        prop_adj, prop_ranks = _propose_arrays(adj, ranks, params.alpha_tilde,
                                               rng, params.literal_repair)
        prop = score.log_score(Dag(prop_adj), Layering.from_ranks(prop_ranks))
        delta = prop[2] - cur[2]
        if delta >= 0 or rng.random() < math.exp(delta):
            adj, ranks, cur = prop_adj, prop_ranks, prop
            accepts += 1
            if cur[2] > best_score:
                best_score = cur[2]
                best_adj = adj.copy()
        lp[t], ll[t], ls[t] = cur
        edges[t] = adj.sum()
        Ks[t] = ranks.max()
        if keep_graphs:
            graphs.append(adj.copy())

    return Trajectory(lp, ll, ls, edges, Ks, Dag(best_adj), float(best_score),
                      params.seed, accept_count=accepts, graphs=graphs)
