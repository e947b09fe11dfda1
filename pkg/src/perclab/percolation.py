"""Bernoulli bond percolation: sampling, cluster statistics, and the
empirical checks of the critical-percolation inequalities.

Sampling draws one uniform per edge in canonical edge order (open iff
U < p), so configurations are monotone-coupled across p for a fixed seed.
Estimators run replica-parallel: replica r uses seed
master XOR (r * GOLDEN), sample s within a replica uses key mix2(seed_r, s),
and results combine in replica order, making every estimate a pure function
of (master seed, replica count) regardless of worker scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from . import rng
from .errors import PreconditionError
from .estimates import Estimate, mean_estimate, one_sided_confidence, wilson
from .graphs import Domain, Graph, ball, distances_from
from .walks import _adjacency_sum, evolve

TWO_GHOST_CONSTANT = 82.0


# ---------------------------------------------------------------------------
# configurations


@dataclass(frozen=True, eq=False)
class PercConfig:
    """One sampled configuration: open-edge bitmap plus union-find labels
    (path-compressed root per vertex) and per-root cluster statistics."""

    graph: Graph
    p: float
    seed: int
    open_edges: np.ndarray      # bool per canonical edge
    cluster_labels: np.ndarray  # int32 root vertex per vertex
    cluster_sizes: np.ndarray   # int64 |K| at root index, 0 elsewhere
    cluster_edge_counts: np.ndarray  # int64 |E(K)| at root index

    @classmethod
    def sample(cls, g: Graph, p: float, seed: int) -> "PercConfig":
        if not 0.0 <= p <= 1.0:
            raise PreconditionError("retention probability must be in [0, 1]")
        mask = K.draw_open_mask(g.m, np.uint64(seed), p)
        labels, sizes, ecounts = K.config_labels_from_mask(
            g.n, g.edges_u, g.edges_v, mask)
        return cls(graph=g, p=p, seed=seed, open_edges=mask,
                   cluster_labels=labels, cluster_sizes=sizes,
                   cluster_edge_counts=ecounts)

    @classmethod
    def from_open_mask(cls, g: Graph, open_mask: np.ndarray,
                       p: float = float("nan"), seed: int = 0) -> "PercConfig":
        open_mask = np.asarray(open_mask, dtype=bool)
        if len(open_mask) != g.m:
            raise PreconditionError("open mask length must equal edge count")
        labels, sizes, ecounts = K.config_labels_from_mask(
            g.n, g.edges_u, g.edges_v, open_mask)
        return cls(graph=g, p=p, seed=seed, open_edges=open_mask,
                   cluster_labels=labels, cluster_sizes=sizes,
                   cluster_edge_counts=ecounts)

    def cluster_of(self, v: int) -> int:
        return int(self.cluster_labels[v])

    def size_of(self, v: int) -> int:
        return int(self.cluster_sizes[self.cluster_labels[v]])

    def edge_count_of(self, v: int) -> int:
        return int(self.cluster_edge_counts[self.cluster_labels[v]])

    @property
    def n_clusters(self) -> int:
        return int(np.count_nonzero(self.cluster_sizes))


def edge_index(g: Graph, u: int, v: int) -> int:
    """Canonical edge index of {u, v}."""
    lo, hi = (u, v) if u < v else (v, u)
    left = int(np.searchsorted(g.edges_u, lo, side="left"))
    right = int(np.searchsorted(g.edges_u, lo, side="right"))
    pos = left + int(np.searchsorted(g.edges_v[left:right], hi, side="left"))
    if pos >= right or g.edges_v[pos] != hi or g.edges_u[pos] != lo:
        raise PreconditionError(f"({u}, {v}) is not an edge")
    return pos


def two_ghost_event(cfg: PercConfig, e, n: int) -> bool:
    """The edge is closed and its endpoints lie in distinct clusters, each
    touching at least n edges.  On a finite graph every cluster counts as
    finite; quoting the infinite target carries the usual interior caveat."""
    g = cfg.graph
    eid = e if isinstance(e, (int, np.integer)) else edge_index(g, *e)
    if not 0 <= eid < g.m:
        raise PreconditionError(f"edge index {eid} out of range")
    if cfg.open_edges[eid]:
        return False
    u, v = int(g.edges_u[eid]), int(g.edges_v[eid])
    ru, rv = cfg.cluster_labels[u], cfg.cluster_labels[v]
    if ru == rv:
        return False
    return (cfg.cluster_edge_counts[ru] >= n and
            cfg.cluster_edge_counts[rv] >= n)


# ---------------------------------------------------------------------------
# replica plumbing


def _chunks(n_samples: int, replicas: int) -> list[int]:
    if n_samples < 1 or replicas < 1:
        raise PreconditionError("need n_samples >= 1 and replicas >= 1")
    base, rem = divmod(n_samples, replicas)
    return [base + (1 if r < rem else 0) for r in range(replicas)]


def _map_replicas(fn, master_seed: int, n_samples: int, replicas: int,
                  workers: int) -> list:
    """Run fn(replica_key, count) per replica; results in replica order."""
    counts = _chunks(n_samples, replicas)
    keys = [np.uint64(rng.derive_replica_seed(master_seed, r))
            for r in range(replicas)]
    jobs = [(k, c) for k, c in zip(keys, counts) if c > 0]
    if workers <= 1 or len(jobs) <= 1:
        return [fn(k, c) for k, c in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda kc: fn(*kc), jobs))


# ---------------------------------------------------------------------------
# connectivity and cluster-tail estimators


def tau_hat(g: Graph, u: int, v: int, p: float, n_samples: int, seed: int,
            confidence: float = 0.99, replicas: int = 1,
            workers: int = 1) -> Estimate:
    """Monte Carlo two-point function: Pr(u and v share a cluster)."""
    g.check_vertex(u)
    g.check_vertex(v)
    if not 0.0 <= p <= 1.0:
        raise PreconditionError("retention probability must be in [0, 1]")
    if u == v:
        return wilson(n_samples, n_samples, confidence)
    targets = np.array([v], dtype=np.int64)

    def job(key, count):
        return K.membership_batch(g.indptr, g.indices, g.slot_edge, g.m,
                                  u, targets, key, count, p)

    hits = sum(int(r[0]) for r in _map_replicas(job, seed, n_samples,
                                                replicas, workers))
    return wilson(hits, n_samples, confidence)


@dataclass(frozen=True)
class KappaReport:
    estimate: Estimate        # Wilson interval of the minimizing pair
    base: int
    argmin_target: int
    per_target: list          # [(target, distance, successes)]


def kappa_hat(g: Graph, base: int, p: float, k: int, n_samples: int,
              seed: int, confidence: float = 0.99, replicas: int = 1,
              workers: int = 1) -> KappaReport:
    """Infimum of the two-point function over pairs (base, w), d(base,w) <= k.

    On vertex-transitive families these representative pairs realize the
    full infimum.  All targets are evaluated on one shared sample pool; the
    returned interval is the Wilson interval of the minimizing pair.
    """
    g.check_vertex(base)
    if k < 0:
        raise PreconditionError("k must be >= 0")
    dist = distances_from(g, base, cutoff=k)
    targets = np.flatnonzero(dist >= 0).astype(np.int64)

    def job(key, count):
        return K.membership_batch(g.indptr, g.indices, g.slot_edge, g.m,
                                  base, targets, key, count, p)

    successes = sum(_map_replicas(job, seed, n_samples, replicas, workers))
    worst = int(np.argmin(successes))
    return KappaReport(
        estimate=wilson(int(successes[worst]), n_samples, confidence),
        base=base,
        argmin_target=int(targets[worst]),
        per_target=[(int(t), int(dist[t]), int(s))
                    for t, s in zip(targets, successes)],
    )


def cluster_tail_hat(g: Graph, v: int, p: float, n: int, n_samples: int,
                     seed: int, metric: str = "edges",
                     confidence: float = 0.99, replicas: int = 1,
                     workers: int = 1) -> Estimate:
    """Tail estimate Pr(|E(K_v)| >= n) (metric 'edges', the default) or
    Pr(|K_v| >= n) (metric 'vertices'); exploration stops at the threshold."""
    g.check_vertex(v)
    if n < 1:
        raise PreconditionError("tail threshold must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise PreconditionError("retention probability must be in [0, 1]")
    if metric == "edges":
        edge_cap, size_cap = n, 0
    elif metric == "vertices":
        edge_cap, size_cap = 0, n
    else:
        raise PreconditionError(f"unknown tail metric {metric!r}")

    def job(key, count):
        sizes, ecounts = K.explore_stats_batch(
            g.indptr, g.indices, g.slot_edge, g.m, v, key, count, p,
            edge_cap, size_cap)
        stat = ecounts if metric == "edges" else sizes
        return int(np.count_nonzero(stat >= n))

    hits = sum(_map_replicas(job, seed, n_samples, replicas, workers))
    return wilson(hits, n_samples, confidence)


@dataclass(frozen=True)
class InsertionToleranceReport:
    u: int
    v: int
    distance: int
    p: float
    lower_bound: float       # p^{d(u,v)}
    tau: Estimate
    passed: bool             # upper CI edge covers the bound


def insertion_tolerance_check(g: Graph, u: int, v: int, p: float,
                              tau_estimate: Estimate) -> InsertionToleranceReport:
    """One-sided check that the two-point estimate is consistent with
    tau_p(u, v) >= p^{d(u,v)} (forcing a geodesic open)."""
    d = int(distances_from(g, u)[v])
    bound = p ** d
    return InsertionToleranceReport(
        u=u, v=v, distance=d, p=p, lower_bound=bound, tau=tau_estimate,
        passed=tau_estimate.ci_high >= bound - 1e-12)


# ---------------------------------------------------------------------------
# two-ghost and surgery checks


def _two_ghost_counts(g: Graph, eid: int, p: float, thresholds: list[int],
                      n_samples: int, seed: int, replicas: int,
                      workers: int) -> list[int]:
    tree_mode = g.family == "tree_ball"
    edge_cap = max(thresholds) if tree_mode else 0
    u0, v0 = int(g.edges_u[eid]), int(g.edges_v[eid])

    def job(key, count):
        status, ecu, ecv = K.two_ghost_batch(
            g.indptr, g.indices, g.slot_edge, g.m, u0, v0, eid, key, count,
            p, edge_cap, tree_mode)
        cand = status == 2
        return [int(np.count_nonzero(cand & (ecu >= n) & (ecv >= n)))
                for n in thresholds]

    parts = _map_replicas(job, seed, n_samples, replicas, workers)
    return [sum(part[i] for part in parts) for i in range(len(thresholds))]


def two_ghost_bound(degree: int, p: float, n: int) -> float:
    """82 d sqrt((1-p) / (p n)), the transitive closed-edge bound."""
    if p <= 0.0 or p > 1.0:
        raise PreconditionError("two-ghost bound needs p in (0, 1]")
    if n < 1:
        raise PreconditionError("two-ghost bound needs n >= 1")
    return TWO_GHOST_CONSTANT * degree * math.sqrt((1.0 - p) / (p * n))


@dataclass(frozen=True)
class TwoGhostReport:
    p: float
    n: int
    degree: int
    edge: int
    estimate: Estimate
    bound: float
    passed: bool
    vacuous: bool            # bound >= 1: no probability can violate it
    one_sided_confidence: float
    interior_caveat: bool    # True on tree balls (interior degree used)


def two_ghost_check(g: Graph, p: float, n: int, n_samples: int, seed: int,
                    edge: int | None = None, one_sided: float = 0.99,
                    replicas: int = 1, workers: int = 1) -> TwoGhostReport:
    """Estimate the closed-edge two-cluster event probability on a
    representative edge orbit and compare with the transitive bound.

    Passes unless the one-sided lower CI edge exceeds the bound.  All edges
    of the torus/cycle families are equivalent; on tree balls the canonical
    root edge represents the interior orbit (caveat flagged).
    """
    if p <= 0.0:
        raise PreconditionError("two-ghost check needs p > 0")
    eid = 0 if edge is None else edge
    degree = g.reference_degree
    hits = _two_ghost_counts(g, eid, p, [n], n_samples, seed, replicas,
                             workers)[0]
    est = wilson(hits, n_samples, one_sided_confidence(one_sided))
    bound = two_ghost_bound(degree, p, n)
    return TwoGhostReport(
        p=p, n=n, degree=degree, edge=eid, estimate=est, bound=bound,
        passed=est.ci_low <= bound + 1e-12, vacuous=bound >= 1.0,
        one_sided_confidence=one_sided,
        interior_caveat=g.family == "tree_ball")


@dataclass(frozen=True)
class SurgeryReport:
    p: float
    n: int
    k: int
    geometric_sum: float             # sum_{i<k} p^{-i}
    tail: Estimate                   # P_p(n) at the base vertex
    kappa: KappaReport
    two_ghost: Estimate
    lhs_lower: float                 # tail_low^2 - kappa_high
    rhs_upper: float                 # geometric_sum * two_ghost_high
    passed: bool
    one_sided_confidence: float


def surgery_check(g: Graph, p: float, n: int, k: int, n_samples: int,
                  seed: int, base: int = 0, one_sided: float = 0.99,
                  replicas: int = 1, workers: int = 1) -> SurgeryReport:
    """Check P_p(n)^2 - kappa_p(k) <= [sum_{i<k} p^{-i}] sup_e P(two-ghost).

    This is the orientation the downstream tail-bound derivation actually
    uses; exhaustive enumeration on small graphs confirms it (the variant
    with the geometric factor multiplying the left side fails already for
    nearest-neighbor percolation on a long cycle).  The three quantities
    come from independent sample pools; the inequality is asserted with
    one-sided CI propagation (LHS lower edge vs RHS upper edge).
    """
    if not 0.0 < p < 1.0:
        raise PreconditionError("surgery check needs 0 < p < 1")
    if n < 1 or k < 1:
        raise PreconditionError("surgery check needs n >= 1 and k >= 1")
    conf = one_sided_confidence(one_sided)
    tail = cluster_tail_hat(g, base, p, n, n_samples, rng.mix2(seed, 0xA),
                            metric="edges", confidence=conf,
                            replicas=replicas, workers=workers)
    kappa = kappa_hat(g, base, p, k, n_samples, rng.mix2(seed, 0xB),
                      confidence=conf, replicas=replicas, workers=workers)
    hits = _two_ghost_counts(g, 0, p, [n], n_samples, rng.mix2(seed, 0xC),
                             replicas, workers)[0]
    ghost = wilson(hits, n_samples, conf)
    geom = sum(p ** -i for i in range(k))
    lhs_lower = tail.ci_low ** 2 - kappa.estimate.ci_high
    rhs_upper = geom * ghost.ci_high
    return SurgeryReport(
        p=p, n=n, k=k, geometric_sum=geom, tail=tail, kappa=kappa,
        two_ghost=ghost, lhs_lower=lhs_lower, rhs_upper=rhs_upper,
        passed=lhs_lower <= rhs_upper + 1e-12,
        one_sided_confidence=one_sided)


# ---------------------------------------------------------------------------
# mass transport


@dataclass(frozen=True)
class MassTransportReport:
    kind: str
    max_residual: float
    passed: bool
    details: dict = field(default_factory=dict)


def _cluster_walk_sums(g: Graph, cfg: PercConfig, ks: list[int]):
    """For each k: (measure route, function route) of
    sum_rho Pr_rho(X_k in K_rho), computed two independent ways.

    Measure route: evolve delta_rho for every root and sum over its cluster.
    Function route: evolve every cluster indicator and sum over the cluster.
    """
    k_max = max(ks)
    labels = cfg.cluster_labels
    roots, inverse = np.unique(labels, return_inverse=True)
    onehot = np.zeros((g.n, len(roots)))
    onehot[np.arange(g.n), inverse] = 1.0

    func_sums = {}
    phi = onehot.copy()
    for t in range(1, k_max + 1):
        phi = _adjacency_sum(g, phi) / g.degrees[:, None]
        if t in ks:
            func_sums[t] = float(np.sum(phi * onehot))

    meas_sums = {k: 0.0 for k in ks}
    for rho in range(g.n):
        mu = np.zeros(g.n)
        mu[rho] = 1.0
        mask = labels == labels[rho]
        for t in range(1, k_max + 1):
            mu = evolve(g, mu, 1)
            if t in ks:
                meas_sums[t] += float(mu[mask].sum())
    return [(meas_sums[k], func_sums[k]) for k in ks]


def mtp_check(g: Graph, kind: str, r: int | None = None,
              p: float | None = None, ks: list[int] | None = None,
              n_configs: int = 100, seed: int = 0,
              tol: float = 1e-10) -> MassTransportReport:
    """Mass-transport identities, checked exactly.

    kind 'distance': for F(u,v) = 1(d(u,v) = r) on a vertex-transitive
    family, the mean mass sent from a root equals the mean mass received,
    with the two sides accumulated along different BFS sweeps.

    kind 'percolation_walk': per sampled configuration and each k, the sum
    over roots of Pr_rho(X_k in K_rho) equals the cluster-averaged form
    sum_rho (1/|K_rho|) sum_{u in K_rho} Pr_u(X_k in K_u); both sides are
    computed by exact walk evolution along different routes.  The identity
    is a per-cluster regrouping, valid on any finite graph; transitivity is
    what transfers it to the infinite targets.
    """
    if kind == "distance":
        if g.family not in ("torus", "cycle"):
            raise PreconditionError(
                "the distance-kernel transport check needs a vertex-transitive family")
        if r is None or r < 0:
            raise PreconditionError("distance kind needs a radius r >= 0")
        sent = np.zeros(g.n)
        received = np.zeros(g.n)
        for v in range(g.n):
            at_r = distances_from(g, v) == r
            sent[v] = float(at_r.sum())
            received[at_r] += 1.0
        residual = abs(float(sent.mean()) - float(received.mean()))
        return MassTransportReport(
            kind=kind, max_residual=residual, passed=residual == 0.0,
            details={"sent_mean": float(sent.mean()),
                     "received_mean": float(received.mean()), "r": r})

    if kind == "percolation_walk":
        if p is None or ks is None:
            raise PreconditionError("percolation kind needs p and ks")
        worst = 0.0
        for i in range(n_configs):
            cfg = PercConfig.sample(g, p, rng.mix2(seed, i))
            for (lhs, rhs) in _cluster_walk_sums(g, cfg, sorted(set(ks))):
                worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
        return MassTransportReport(
            kind=kind, max_residual=worst, passed=worst <= tol,
            details={"p": p, "ks": sorted(set(ks)), "n_configs": n_configs})

    raise PreconditionError(f"unknown mass-transport check kind {kind!r}")


# ---------------------------------------------------------------------------
# cluster walk-return bound (conditional on a supplied decay constant)


def log_power_min(alpha: float, beta: float, c1: float, k: float) -> tuple[float, float]:
    """Minimum of t^beta + c1 k t^{-alpha} over t = log x > 0.

    Returns (argmin t*, minimum value); the stationary point satisfies
    t*^{alpha+beta} = alpha c1 k / beta.  With alpha = 0 the infimum sits at
    the boundary t -> 0 with value c1 k.
    """
    if beta <= 0 or beta > 1 or alpha < 0 or c1 <= 0 or k < 0:
        raise PreconditionError("needs beta in (0,1], alpha >= 0, c1 > 0, k >= 0")
    t_star = (alpha * c1 * k / beta) ** (1.0 / (alpha + beta))
    value = t_star ** beta + (c1 * k if t_star == 0.0 else c1 * k * t_star ** -alpha)
    return t_star, value


def log_power_min_grid(alpha: float, beta: float, c1: float, k: float,
                       hi: float = 50.0, step: float = 1e-4) -> float:
    """Grid-search cross-check of log_power_min over t in (0, hi]."""
    t_star, _ = log_power_min(alpha, beta, c1, k)
    hi = max(hi, 2.0 * t_star)
    ts = np.arange(step, hi + step / 2, step)
    vals = ts ** beta + c1 * k * ts ** -alpha
    return float(vals.min())


@dataclass(frozen=True)
class ClusterWalkBoundReport:
    p: float
    k: int
    beta: float
    alpha: float
    c2: float
    degree_ratio: float
    walk_return: Estimate        # E_p[Pr_rho(X_k in K_rho)], rho uniform
    exp_moment: Estimate         # E_p exp[log^beta |K_rho|]
    rhs: float
    passed: bool
    conditional: bool
    opt_closed: float
    opt_grid: float
    opt_ok: bool


def cluster_walk_bound_check(g: Graph, p: float, k: int, beta: float,
                             alpha: float, c2: float, n_samples: int,
                             seed: int, c1: float = 1.0,
                             confidence: float = 0.99,
                             opt_rel_tol: float = 1e-3) -> ClusterWalkBoundReport:
    """Monte Carlo check of the cluster walk-return bound

        E_p[Pr_rho(X_k in K_rho)]
            <= ratio^{1/2} (1 + E_p exp[log^beta |K_rho|])
               exp[-c2 k^{beta/(alpha+beta)}],

    conditional on the supplied constant c2 (the theory guarantees existence
    only).  Also cross-checks the interior log-power optimization against a
    grid search.
    """
    if not 0.0 < beta <= 1.0:
        raise PreconditionError("beta must be in (0, 1]")
    if k < 0 or alpha < 0 or c2 <= 0:
        raise PreconditionError("needs k >= 0, alpha >= 0, c2 > 0")
    walk_total = walk_sq = 0.0
    exp_total = exp_sq = 0.0
    for i in range(n_samples):
        cfg = PercConfig.sample(g, p, rng.mix2(seed, i))
        if k == 0:
            stay = 1.0
        else:
            (_, func), = _cluster_walk_sums(g, cfg, [k])
            stay = func / g.n
        sizes_per_vertex = cfg.cluster_sizes[cfg.cluster_labels].astype(float)
        fvals = np.exp(np.log(sizes_per_vertex) ** beta)
        fmean = float(fvals.mean())
        walk_total += stay
        walk_sq += stay * stay
        exp_total += fmean
        exp_sq += fmean * fmean
    walk_est = mean_estimate(n_samples, walk_total, walk_sq, confidence)
    exp_est = mean_estimate(n_samples, exp_total, exp_sq, confidence)
    ratio = float(g.degrees.max() / g.degrees.min())
    rhs = math.sqrt(ratio) * (1.0 + exp_est.mean) * math.exp(
        -c2 * k ** (beta / (alpha + beta)))
    _, opt_closed = log_power_min(alpha, beta, c1, max(k, 1))
    opt_grid = log_power_min_grid(alpha, beta, c1, max(k, 1))
    return ClusterWalkBoundReport(
        p=p, k=k, beta=beta, alpha=alpha, c2=c2, degree_ratio=ratio,
        walk_return=walk_est, exp_moment=exp_est, rhs=rhs,
        passed=walk_est.mean <= rhs, conditional=True,
        opt_closed=opt_closed, opt_grid=opt_grid,
        opt_ok=abs(opt_closed - opt_grid) <= opt_rel_tol * max(opt_grid, 1e-300))


# ---------------------------------------------------------------------------
# bootstrap functional


@dataclass(frozen=True)
class BootstrapReport:
    p: float
    beta: float
    estimate: Estimate           # E_p exp[log^beta |K_v|]
    prefix_means: list           # running means at the four quarter marks
    stable: bool
    implied_c6: float | None     # solves E <= c5 sqrt(1 + E) given c5


def implied_self_bound(c5: float) -> float:
    """Largest E consistent with E <= c5 sqrt(1 + E)."""
    if c5 <= 0:
        raise PreconditionError("c5 must be positive")
    return (c5 * c5 + c5 * math.sqrt(c5 * c5 + 4.0)) / 2.0


def bootstrap_functional(g: Graph, v: int, p: float, beta: float,
                         n_samples: int, seed: int, confidence: float = 0.99,
                         replicas: int = 1, workers: int = 1,
                         c5: float | None = None) -> BootstrapReport:
    """Monte Carlo mean of exp[log^beta |K_v|] with a t-interval.

    beta = 0 gives exactly e for every cluster (log^0 = 1 by convention);
    beta >= 1 is rejected, since the functional need not stay integrable at
    criticality on the infinite targets.  The report carries running means
    at the quarter marks (a drift diagnostic) and, when a self-bounding
    constant c5 is supplied, the implied uniform bound.
    """
    g.check_vertex(v)
    if not 0.0 <= beta < 1.0:
        raise PreconditionError("beta must be in [0, 1)")
    if not 0.0 <= p <= 1.0:
        raise PreconditionError("retention probability must be in [0, 1]")

    def job(key, count):
        sizes, _ = K.explore_stats_batch(
            g.indptr, g.indices, g.slot_edge, g.m, v, key, count, p, 0, 0)
        return np.exp(np.log(sizes.astype(float)) ** beta)

    values = np.concatenate(_map_replicas(job, seed, n_samples, replicas,
                                          workers))
    total = float(values.sum())
    total_sq = float(np.dot(values, values))
    est = mean_estimate(n_samples, total, total_sq, confidence)
    marks = [max(1, (n_samples * q) // 4) for q in (1, 2, 3, 4)]
    prefix = np.cumsum(values)
    prefix_means = [float(prefix[m - 1] / m) for m in marks]
    se = (est.ci_high - est.ci_low) / 2.0
    stable = abs(prefix_means[-1] - prefix_means[1]) <= max(4.0 * se, 1e-12)
    return BootstrapReport(
        p=p, beta=beta, estimate=est, prefix_means=prefix_means,
        stable=stable,
        implied_c6=implied_self_bound(c5) if c5 is not None else None)
