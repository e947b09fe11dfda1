"""Simple-random-walk computations: exact distribution evolution, killed
walks, return probabilities, escape probabilities, and heat-kernel fitting.

Mass vectors are plain float64 arrays indexed by vertex.  Measures evolve by
right-multiplication (mu -> mu P), functions by left application (phi -> P phi);
both reduce to adjacency gathers because the walk is reversible with respect
to pi(v) = deg(v).  Weighted norms:

    <phi, psi>_pi   = sum pi(v) phi(v) psi(v)
    ||phi||_{1,pi}  = sum pi(v) |phi(v)|
    <mu, nu>_{1/pi} = sum mu(v) nu(v) / pi(v)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import PreconditionError, ValidityRadiusError
from .graphs import Domain, Graph, ball, distances_from

PROBABILITY_TOL = 1e-12


# ---------------------------------------------------------------------------
# mass vectors and norms


def delta(g: Graph, v: int) -> np.ndarray:
    g.check_vertex(v)
    out = np.zeros(g.n)
    out[v] = 1.0
    return out


def uniform_on(g: Graph, D: Domain) -> np.ndarray:
    if len(D) == 0:
        raise PreconditionError("uniform measure needs a nonempty domain")
    out = np.zeros(g.n)
    out[D.members] = 1.0 / len(D)
    return out


def pi_on(g: Graph, D: Domain) -> np.ndarray:
    if len(D) == 0:
        raise PreconditionError("stationary measure needs a nonempty domain")
    out = np.zeros(g.n)
    degs = g.degrees[D.members].astype(float)
    out[D.members] = degs / degs.sum()
    return out


def validate_probability(g: Graph, mu: np.ndarray) -> None:
    if np.any(mu < 0):
        raise PreconditionError("probability vector has negative entries")
    if abs(mu.sum() - 1.0) > PROBABILITY_TOL:
        raise PreconditionError(f"probability vector sums to {mu.sum()!r}, not 1")


def pi_inner(g: Graph, phi: np.ndarray, psi: np.ndarray) -> float:
    return float(np.dot(g.degrees * phi, psi))


def pi_norm2_sq(g: Graph, phi: np.ndarray) -> float:
    return float(np.dot(g.degrees.astype(float), phi * phi))


def pi_norm1(g: Graph, phi: np.ndarray) -> float:
    return float(np.dot(g.degrees.astype(float), np.abs(phi)))


def inv_pi_inner(g: Graph, mu: np.ndarray, nu: np.ndarray) -> float:
    return float(np.dot(mu / g.degrees, nu))


def inv_pi_norm2_sq(g: Graph, mu: np.ndarray) -> float:
    return float(np.dot(mu / g.degrees, mu))


# ---------------------------------------------------------------------------
# one-step operators (adjacency gathers over CSR)


def _adjacency_sum(g: Graph, values: np.ndarray) -> np.ndarray:
    """out[u] = sum of values over neighbors of u."""
    if g.m == 0:
        return np.zeros(g.n)
    return np.add.reduceat(values[g.indices], g.indptr[:-1])


def step(g: Graph, mu: np.ndarray) -> np.ndarray:
    """One measure step mu -> mu P; preserves total mass for signed mu."""
    return _adjacency_sum(g, mu / g.degrees)


def killed_step(g: Graph, A: Domain, mu: np.ndarray) -> np.ndarray:
    """One step of the measure killed outside A: mu -> mu P_A."""
    contrib = np.where(A.mask, mu, 0.0) / g.degrees
    out = _adjacency_sum(g, contrib)
    out[~A.mask] = 0.0
    return out


def apply_killed(g: Graph, A: Domain, phi: np.ndarray) -> np.ndarray:
    """Function application phi -> P_A phi (kills the walk outside A)."""
    masked = np.where(A.mask, phi, 0.0)
    out = _adjacency_sum(g, masked) / g.degrees
    out[~A.mask] = 0.0
    return out


def evolve(g: Graph, mu: np.ndarray, k: int, A: Domain | None = None) -> np.ndarray:
    """k measure steps, optionally killed outside A."""
    if k < 0:
        raise PreconditionError("step count must be >= 0")
    out = np.array(mu, dtype=float)
    for _ in range(k):
        out = step(g, out) if A is None else killed_step(g, A, out)
    return out


# ---------------------------------------------------------------------------
# return and escape probabilities (ball-restricted exact evolution)


def _require_interior(g: Graph, vertices, radius: int, what: str) -> None:
    worst = min(g.interior_radius(int(v)) for v in np.atleast_1d(vertices))
    if worst < radius:
        raise ValidityRadiusError(
            f"{what} needs interior validity radius {radius}, "
            f"but the {g.family} graph only provides {worst}")


def _ball_system(g: Graph, v: int, radius: int):
    """Restrict to ball(v, radius): local CSR with original degrees.

    Killing at the ball boundary does not disturb any walk path that stays
    within radius - 1 of v, so return probabilities up to step
    2 * (radius - 1) are exact.
    """
    dom = ball(g, v, radius)
    local = np.full(g.n, -1, dtype=np.int64)
    local[dom.members] = np.arange(len(dom))
    nbr_global = []
    indptr = [0]
    for u in dom.members:
        nbrs = g.neighbors(u)
        inside = nbrs[dom.mask[nbrs]]
        nbr_global.append(inside)
        indptr.append(indptr[-1] + len(inside))
    indices = local[np.concatenate(nbr_global)] if nbr_global else np.empty(0, np.int64)
    return (np.array(indptr, dtype=np.int64), indices,
            g.degrees[dom.members].astype(float), int(local[v]))


def return_probability(g: Graph, v: int, n: int) -> float:
    """Exact p_n(v, v) of the infinite target graph, via n steps on the
    ball of radius ceil(n/2) + 1 (returning paths never feel the cut)."""
    if n < 0:
        raise PreconditionError("step count must be >= 0")
    radius = (n + 1) // 2 + 1
    _require_interior(g, v, radius, f"return probability at step {n}")
    indptr, indices, degs, start = _ball_system(g, v, radius)
    mu = np.zeros(len(degs))
    mu[start] = 1.0
    for _ in range(n):
        if len(indices):
            mu = np.add.reduceat((mu / degs)[indices], indptr[:-1])
        else:
            mu = np.zeros_like(mu)
    return float(mu[start])


def escape_probability(g: Graph, D: Domain, k: int,
                       start: str = "uniform_on_D",
                       claim_infinite: bool = False) -> float:
    """Exact Pr(X_k in D) for the unkilled walk started from mu_D or pi_D.

    On the finite graph the value is exact for any k.  Pass
    claim_infinite=True when quoting the infinite target, which enforces the
    interior validity radius ball(D, k).
    """
    if len(D) == 0:
        raise PreconditionError("escape probability needs a nonempty domain")
    if k < 0:
        raise PreconditionError("step count must be >= 0")
    if claim_infinite:
        _require_interior(g, D.members, k, f"escape probability at step {k}")
    if start == "uniform_on_D":
        mu = uniform_on(g, D)
    elif start == "pi_on_D":
        mu = pi_on(g, D)
    else:
        raise PreconditionError(f"unknown start distribution {start!r}")
    return float(evolve(g, mu, k)[D.members].sum())


# ---------------------------------------------------------------------------
# reversibility of the killed semigroup


@dataclass(frozen=True)
class ReversibilityReport:
    lhs: float
    rhs: float
    residual: float
    ok: bool


def reversibility_check(g: Graph, A: Domain, mu: np.ndarray, nu: np.ndarray,
                        t: int, rel_tol: float = 1e-10) -> ReversibilityReport:
    """Verify <mu P_A^t, nu>_{1/pi} = <mu, nu P_A^t>_{1/pi}."""
    if t < 0:
        raise PreconditionError("t must be >= 0")
    lhs = inv_pi_inner(g, evolve(g, mu, t, A), nu)
    rhs = inv_pi_inner(g, mu, evolve(g, nu, t, A))
    scale = max(abs(lhs), abs(rhs), 1e-300)
    residual = abs(lhs - rhs) / scale
    return ReversibilityReport(lhs=lhs, rhs=rhs, residual=residual,
                               ok=residual <= rel_tol)


# ---------------------------------------------------------------------------
# sampled paths


@dataclass(frozen=True)
class WalkPath:
    vertices: np.ndarray
    seed: int


def sample_walk(g: Graph, v: int, k: int, seed: int) -> WalkPath:
    """One walk trajectory of k steps; reproducible from the seed alone."""
    g.check_vertex(v)
    path = np.empty(k + 1, dtype=np.int64)
    path[0] = v
    u = v
    for t in range(k):
        nbrs = g.neighbors(u)
        u = int(nbrs[int(rng.uniform(seed, t) * len(nbrs))])
        path[t + 1] = u
    return WalkPath(vertices=path, seed=seed)


# ---------------------------------------------------------------------------
# heat-kernel decay fitting (exploratory diagnostic, not an estimator)


@dataclass(frozen=True)
class HeatKernelFit:
    gamma: float
    c: float
    sse: float
    n_used: int
    no_stretched_regime: bool


def fit_heat_kernel(ns: np.ndarray, ps: np.ndarray,
                    gamma_grid: np.ndarray | None = None) -> HeatKernelFit:
    """Least-squares fit of -log p_n = c * n^gamma over a gamma grid.

    Steps with p_n = 0 (odd steps on bipartite graphs) are dropped.  A fit
    that lands on the lowest grid point is flagged: the sequence shows no
    stretched-exponential regime (polynomial decay looks like gamma -> 0).
    """
    if gamma_grid is None:
        gamma_grid = np.round(np.arange(0.05, 1.0 + 1e-9, 0.01), 10)
    ns = np.asarray(ns, dtype=float)
    ps = np.asarray(ps, dtype=float)
    usable = ps > 0
    ns, ps = ns[usable], ps[usable]
    if len(ns) < 4:
        raise PreconditionError("heat-kernel fit needs at least 4 usable steps")
    y = -np.log(ps)
    best = None
    for gamma in gamma_grid:
        w = ns ** gamma
        c = float(np.dot(w, y) / np.dot(w, w))
        if c <= 0:
            continue
        sse = float(np.sum((y - c * w) ** 2))
        if best is None or sse < best[2]:
            best = (float(gamma), c, sse)
    if best is None:
        raise PreconditionError("no admissible fit (is the sequence increasing?)")
    gamma, c, sse = best
    return HeatKernelFit(gamma=gamma, c=c, sse=sse, n_used=len(ns),
                         no_stretched_regime=gamma <= gamma_grid[0])


def pn_sequence(g: Graph, v: int, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """p_n(v, v) for n = 1..n_max, in one ball-restricted evolution."""
    radius = (n_max + 1) // 2 + 1
    _require_interior(g, v, radius, f"return probabilities up to step {n_max}")
    indptr, indices, degs, start = _ball_system(g, v, radius)
    mu = np.zeros(len(degs))
    mu[start] = 1.0
    ps = np.empty(n_max)
    for i in range(n_max):
        mu = np.add.reduceat((mu / degs)[indices], indptr[:-1])
        ps[i] = mu[start]
    return np.arange(1, n_max + 1), ps


def hk_fit(g: Graph, v: int, n_max: int,
           gamma_grid: np.ndarray | None = None) -> HeatKernelFit:
    ns, ps = pn_sequence(g, v, n_max)
    return fit_heat_kernel(ns, ps, gamma_grid)


def write_pn_csv(ns: np.ndarray, ps: np.ndarray) -> str:
    """CSV text for a return-probability sequence: n, p_n, log_p_n."""
    lines = ["n,p_n,log_p_n"]
    for n, p in zip(ns, ps):
        logp = math.log(p) if p > 0 else float("-inf")
        lines.append(f"{int(n)},{p!r},{logp!r}")
    return "\n".join(lines) + "\n"
