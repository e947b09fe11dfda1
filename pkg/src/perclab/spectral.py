"""Killed-walk spectral gaps, spectral/isoperimetric profiles, and the
escape-bound machinery built on them.

Conventions.  The killed transition matrix on a finite domain A is
P_A(u, v) = P(u, v) 1(u, v in A); the gap lambda(A) is the smallest
eigenvalue of I_A - P_A^2, equal to 1 - rho(P_A)^2.  The spectral profile

    Lambda(L) = inf { lambda(B) : B nonempty, pi(B) <= L },   else 1

ranges over *all* vertex subsets of the finite graph, including V itself
(lambda(V) = 0), which is what makes the profile inequalities below hold
unconditionally on finite graphs.  Consequently Lambda(L) = 0 for
L >= pi(V), and decay ladders whose profile argument reaches that region
get an infinite step threshold (reported as infeasible, never asserted).

The Cheeger-type sandwich for this squared-operator gap convention is

    (1/4) Phi*(x)^2  <=  Lambda(x)  <=  2 Phi*(x),

where the factor 2 on the upper side is sharp in the small-set regime
(single-factor upper bounds fail already for an adjacent pair in a cycle:
lambda = 3/4 > 1/2 = boundary ratio).  The upper factor follows from
Cauchy-Schwarz applied to the indicator test function:
lambda(A) <= 1 - q^2 <= 2 (1 - q) with q the stay probability of A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import NonConvergenceError, PreconditionError
from .graphs import Domain, Graph, pi_mass
from .walks import (apply_killed, escape_probability, evolve, inv_pi_norm2_sq,
                    pi_norm1, pi_norm2_sq, pi_on, uniform_on)

EXHAUSTIVE_CAP = 14
LOG4 = math.log(4.0)


# ---------------------------------------------------------------------------
# Dirichlet form, killed gap, Rayleigh quotient


def dirichlet_form(g: Graph, A: Domain, phi: np.ndarray) -> float:
    """<(I_A - P_A^2) phi, phi>_pi for phi supported on A.

    Computed as ||phi||_pi^2 - ||P_A phi||_pi^2, which is equivalent by
    self-adjointness of P_A and manifestly nonnegative.
    """
    phi = np.asarray(phi, dtype=float)
    if np.any(phi[~A.mask] != 0):
        raise PreconditionError("test function must vanish outside the domain")
    return pi_norm2_sq(g, phi) - pi_norm2_sq(g, apply_killed(g, A, phi))


def rayleigh_quotient(g: Graph, A: Domain, phi: np.ndarray) -> float:
    """Dirichlet form over pi-norm squared; an upper bound on the gap."""
    phi = np.asarray(phi, dtype=float)
    if np.any(phi < 0):
        raise PreconditionError("test function must be nonnegative")
    norm = pi_norm2_sq(g, phi)
    if norm == 0:
        raise PreconditionError("test function must be nonzero")
    return dirichlet_form(g, A, phi) / norm


def killed_gap(g: Graph, A: Domain, tol: float = 1e-12,
               max_iter: int = 100_000, seed: int = 0x5EED) -> float:
    """lambda(A) = 1 - rho(P_A)^2 by power iteration on P_A^2.

    The iteration runs in the pi-inner product, where P_A^2 is PSD, so the
    Rayleigh quotient increases monotonically; the stopping rule bounds the
    remaining geometric tail.  For A = V on a finite graph the result is 0.
    """
    if len(A) == 0:
        raise PreconditionError("killed gap needs a nonempty domain")
    if len(A) == g.n:
        return 0.0  # nothing is killed: P_A = P is stochastic, rho = 1 exactly
    x = np.zeros(g.n)
    x[A.members] = 0.5 + rng.uniforms(seed, A.members)
    rho_prev = 0.0
    diff_prev = math.inf
    for _ in range(max_iter):
        y = apply_killed(g, A, apply_killed(g, A, x))
        num = float(np.dot(g.degrees * x, y))
        den = pi_norm2_sq(g, x)
        rho = num / den
        if rho <= 0.0:
            return 1.0  # P_A^2 annihilates the start vector: spectral radius 0
        diff = abs(rho - rho_prev)
        if diff_prev > 0 and diff_prev < math.inf:
            q = min(diff / diff_prev, 0.999999)
            tail = diff * q / (1.0 - q)
        else:
            tail = diff
        if diff <= tol * max(rho, 1e-300) and tail <= tol * max(rho, 1e-300):
            return max(0.0, 1.0 - rho)
        rho_prev, diff_prev = rho, diff
        scale = math.sqrt(pi_norm2_sq(g, y))
        if scale == 0.0:
            return 1.0
        x = y / scale
    raise NonConvergenceError(
        f"power iteration did not reach tol {tol} in {max_iter} iterations",
        bracket=(rho_prev, min(1.0, rho_prev + diff_prev)))


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class ProfileModel:
    """Analytic lower-bound model Lambda(x) >= c * log^{-alpha}(x / max pi),
    asserted for x >= 2 max pi; below that the profile is 1 by convention.

    Used as a user-supplied trust input for decay assertions on graphs too
    large for exhaustive enumeration.
    """

    alpha: float
    c: float
    max_pi: float

    def __post_init__(self):
        if self.alpha < 0 or self.c <= 0 or self.max_pi <= 0:
            raise PreconditionError("profile model needs alpha >= 0, c > 0, max_pi > 0")

    def evaluate(self, x: float) -> float:
        if x < 2 * self.max_pi:
            return 1.0
        if self.alpha == 0:
            return min(1.0, self.c)
        return min(1.0, self.c * math.log(x / self.max_pi) ** -self.alpha)


@dataclass(frozen=True, eq=False)
class SpectralProfile:
    """Profile values at requested thresholds plus an exact query structure.

    mode 'exhaustive' is the true infimum over all subsets; 'ball_family'
    is an upper bound on the true profile (never accepted for theorem
    assertions outside diagnostic mode); 'analytic' wraps a ProfileModel.
    """

    points: list = field(default_factory=list)  # [(threshold, value)]
    mode: str = "exhaustive"
    graph_ref: str = ""
    masses: np.ndarray | None = None       # sorted subset masses
    prefix_min: np.ndarray | None = None   # running min of gap values
    model: ProfileModel | None = None

    @property
    def is_lower_bound(self) -> bool:
        return self.mode in ("exhaustive", "analytic")

    def evaluate(self, x: float) -> float:
        if self.mode == "analytic":
            return self.model.evaluate(x)
        idx = int(np.searchsorted(self.masses, x, side="right")) - 1
        if idx < 0:
            return 1.0
        return float(self.prefix_min[idx])


def _graph_ref(g: Graph) -> str:
    return f"{g.family}:{g.params}"


def _require_exhaustive_size(g: Graph) -> None:
    if g.n > EXHAUSTIVE_CAP:
        raise PreconditionError(
            f"exhaustive enumeration is capped at {EXHAUSTIVE_CAP} vertices, "
            f"graph has {g.n}")


def _subset_gaps_exhaustive(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """(pi-mass, gap) for every nonempty vertex subset, sorted by mass."""
    _require_exhaustive_size(g)
    n = g.n
    masses = np.empty(2**n - 1)
    gaps = np.empty(2**n - 1)
    for code in range(1, 2**n):
        members = [i for i in range(n) if code >> i & 1]
        D = Domain.from_vertices(g, members)
        masses[code - 1] = pi_mass(g, D)
        gaps[code - 1] = killed_gap(g, D)
    order = np.argsort(masses, kind="stable")
    return masses[order], gaps[order]


def _connected_subsets(g: Graph, max_size: int):
    """All connected vertex subsets up to max_size (unordered, unique)."""
    seen = set()
    for start in range(g.n):
        stack = [(frozenset([start]), start)]
        while stack:
            subset, _ = stack.pop()
            if subset in seen:
                continue
            seen.add(subset)
            if len(subset) >= max_size:
                continue
            frontier = set()
            for u in subset:
                frontier.update(int(w) for w in g.neighbors(u))
            for w in frontier - subset:
                ext = subset | {w}
                if ext not in seen:
                    stack.append((ext, w))
    return seen


def spectral_profile(g: Graph, thresholds, mode: str = "exhaustive",
                     max_subset_size: int = 5) -> SpectralProfile:
    """Profile values at the given thresholds.

    exhaustive: exact infimum (vertex count capped).  ball_family: minimum
    over all balls plus connected subsets up to max_subset_size; an upper
    bound on the truth, flagged as such in the record.
    """
    thresholds = [float(t) for t in thresholds]
    if mode == "exhaustive":
        masses, gaps = _subset_gaps_exhaustive(g)
    elif mode == "ball_family":
        domains = {}
        for v in range(g.n):
            from .graphs import ball as _ball
            r = 0
            while True:
                D = _ball(g, v, r)
                domains[tuple(D.members.tolist())] = D
                if len(D) == g.n:
                    break
                r += 1
        for subset in _connected_subsets(g, max_subset_size):
            key = tuple(sorted(subset))
            if key not in domains:
                domains[key] = Domain.from_vertices(g, key)
        pairs = sorted((pi_mass(g, D), killed_gap(g, D)) for D in domains.values())
        masses = np.array([p[0] for p in pairs])
        gaps = np.array([p[1] for p in pairs])
    else:
        raise PreconditionError(f"unknown profile mode {mode!r}")
    prefix = np.minimum.accumulate(gaps)
    prof = SpectralProfile(points=[], mode=mode, graph_ref=_graph_ref(g),
                           masses=masses, prefix_min=prefix)
    prof.points.extend((t, prof.evaluate(t)) for t in thresholds)
    return prof


def analytic_profile(model: ProfileModel, g: Graph | None = None) -> SpectralProfile:
    return SpectralProfile(points=[], mode="analytic",
                           graph_ref=_graph_ref(g) if g else "", model=model)


def write_profile_csv(profile: SpectralProfile) -> str:
    lines = ["L,lambda,mode"]
    lines.extend(f"{L!r},{val!r},{profile.mode}" for L, val in profile.points)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# isoperimetry and the profile-level Cheeger sandwich


def boundary_ratio(g: Graph, A: Domain) -> float:
    """phi(A) = (# edges leaving A) / pi(A)."""
    if len(A) == 0:
        raise PreconditionError("boundary ratio needs a nonempty domain")
    internal = int(np.count_nonzero(A.mask[g.edges_u] & A.mask[g.edges_v]))
    cut = float(g.degrees[A.members].sum() - 2 * internal)
    return cut / pi_mass(g, A)


def iso_profile(g: Graph, thresholds) -> list[tuple[float, float]]:
    """Exhaustive isoperimetric profile Phi*(x) at the given thresholds."""
    _require_exhaustive_size(g)
    masses, ratios = _iso_pairs(g)
    prefix = np.minimum.accumulate(ratios)

    def value(x: float) -> float:
        idx = int(np.searchsorted(masses, x, side="right")) - 1
        return 1.0 if idx < 0 else float(prefix[idx])

    return [(float(t), value(float(t))) for t in thresholds]


def _iso_pairs(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    n = g.n
    masses = np.empty(2**n - 1)
    ratios = np.empty(2**n - 1)
    for code in range(1, 2**n):
        members = [i for i in range(n) if code >> i & 1]
        D = Domain.from_vertices(g, members)
        masses[code - 1] = pi_mass(g, D)
        ratios[code - 1] = boundary_ratio(g, D)
    order = np.argsort(masses, kind="stable")
    return masses[order], ratios[order]


@dataclass(frozen=True)
class CheegerThresholdResult:
    threshold: float
    lam: float
    phi_star: float
    lower_ok: bool          # (1/4) Phi*^2 <= Lambda
    upper_ok: bool          # Lambda <= 2 Phi*  (the verified factor)
    upper_single_ok: bool   # Lambda <= Phi*    (fails in general; diagnostic)


@dataclass(frozen=True)
class CheegerReport:
    subset_ratios: list          # [(pi-mass, boundary ratio)]
    thresholds: list             # [CheegerThresholdResult]
    passed: bool


def cheeger_check(g: Graph, subsets: list[Domain], slack: float = 1e-9) -> CheegerReport:
    """Profile-level Cheeger sandwich at the subsets' mass thresholds.

    Asserts (1/4) Phi*(x)^2 <= Lambda(x) <= 2 Phi*(x) with exhaustive
    profiles.  The single-factor upper bound is reported per threshold but
    never asserted: it is false at profile level for this gap convention
    (brute-forced on small cycles; see module docstring).  Per-set pairings
    of lambda(A) with phi(A) are likewise reported only as diagnostics.
    """
    if not subsets:
        raise PreconditionError("cheeger check needs at least one subset")
    _require_exhaustive_size(g)
    ratios = [(pi_mass(g, D), boundary_ratio(g, D)) for D in subsets]
    lam_prof = spectral_profile(g, [], mode="exhaustive")
    iso_masses, iso_ratios = _iso_pairs(g)
    iso_prefix = np.minimum.accumulate(iso_ratios)

    def phi_star(x: float) -> float:
        idx = int(np.searchsorted(iso_masses, x, side="right")) - 1
        return 1.0 if idx < 0 else float(iso_prefix[idx])

    results = []
    for x in sorted({mass for mass, _ in ratios}):
        lam = lam_prof.evaluate(x)
        phi = phi_star(x)
        results.append(CheegerThresholdResult(
            threshold=x, lam=lam, phi_star=phi,
            lower_ok=0.25 * phi * phi <= lam + slack,
            upper_ok=lam <= 2.0 * phi + slack,
            upper_single_ok=lam <= phi + slack,
        ))
    return CheegerReport(
        subset_ratios=ratios, thresholds=results,
        passed=all(r.lower_ok and r.upper_ok for r in results))


# ---------------------------------------------------------------------------
# gap vs profile lower bound (unconditional, any nonnegative test function)


@dataclass(frozen=True)
class GapProfileBoundReport:
    lhs: float          # Rayleigh quotient of phi
    rhs: float          # (1/2) Lambda(4 ||phi||_1^2 / ||phi||_2^2)
    argument: float
    passed: bool
    slack: float


def gap_profile_bound_check(g: Graph, A: Domain, phi: np.ndarray,
                            profile: SpectralProfile,
                            slack: float = 1e-9) -> GapProfileBoundReport:
    """Check E_A(phi)/||phi||^2 >= (1/2) Lambda(4 ||phi||_1^2 / ||phi||_2^2).

    Holds for every nonzero nonnegative phi supported on A when Lambda is
    the exhaustive profile; both sides are invariant under scaling phi.
    """
    if profile.mode != "exhaustive":
        raise PreconditionError("gap-profile bound requires an exhaustive profile")
    lhs = rayleigh_quotient(g, A, phi)
    arg = 4.0 * pi_norm1(g, phi) ** 2 / pi_norm2_sq(g, phi)
    rhs = 0.5 * profile.evaluate(arg)
    return GapProfileBoundReport(lhs=lhs, rhs=rhs, argument=arg,
                                 passed=lhs >= rhs - slack, slack=slack)


# ---------------------------------------------------------------------------
# decay thresholds (measure version and set-escape version)


def _ladder_threshold(profile: SpectralProfile, ell: int, base_arg: float):
    """ell + 1 + sum_{i=1..ell} 2 log 4 / Lambda(4^{i+1} * base_arg).

    Returns (k_star, arguments, profile values); k_star is None when some
    profile value is 0, i.e. the ladder leaves the graph's mass range.
    """
    args = [4.0 ** (i + 1) * base_arg for i in range(1, ell + 1)]
    vals = [profile.evaluate(a) for a in args]
    if any(v <= 0.0 for v in vals):
        return None, args, vals
    return math.ceil(ell + 1 + sum(2.0 * LOG4 / v for v in vals)), args, vals


def _check_profile_usable(profile: SpectralProfile, diagnostic: bool) -> bool:
    """True when the report is rigorous; raises on upper-bound profiles
    outside diagnostic mode."""
    if profile.is_lower_bound:
        return True
    if not diagnostic:
        raise PreconditionError(
            "ball_family profiles are upper bounds; decay assertions refuse "
            "them outside diagnostic mode")
    return False


@dataclass(frozen=True)
class DecayReport:
    ell: int
    k_star: int | None
    lhs: float | None
    rhs: float | None
    passed: bool
    feasible: bool
    rigorous: bool
    arguments: list
    profile_values: list


def l2_decay_check(g: Graph, mu: np.ndarray, ell: int,
                   profile: SpectralProfile, diagnostic: bool = False,
                   slack: float = 1e-12) -> DecayReport:
    """Threshold k*(ell) from the profile ladder, then the exact check
    ||mu P^{k*}||_{2,1/pi} <= 2^{-ell} ||mu||_{2,1/pi}.

    mu must be a nonnegative measure of total mass at most 1.  An
    infeasible ladder (profile value 0) yields a vacuous pass.
    """
    rigorous = _check_profile_usable(profile, diagnostic)
    mu = np.asarray(mu, dtype=float)
    if np.any(mu < 0):
        raise PreconditionError("measure must be nonnegative")
    if mu.sum() > 1.0 + 1e-12:
        raise PreconditionError("measure must have total mass at most 1")
    if ell < 0:
        raise PreconditionError("ell must be >= 0")
    norm_sq = inv_pi_norm2_sq(g, mu)
    if norm_sq == 0.0:
        return DecayReport(ell, 1, 0.0, 0.0, True, True, rigorous, [], [])
    k_star, args, vals = _ladder_threshold(profile, ell, 1.0 / norm_sq)
    if k_star is None:
        return DecayReport(ell, None, None, None, True, False, rigorous, args, vals)
    lhs = math.sqrt(inv_pi_norm2_sq(g, evolve(g, mu, k_star)))
    rhs = 2.0 ** -ell * math.sqrt(norm_sq)
    return DecayReport(ell, k_star, lhs, rhs, lhs <= rhs + slack, True,
                       rigorous, args, vals)


@dataclass(frozen=True)
class EscapeThresholdReport:
    ell: int
    variant: str
    k_star: int | None
    escape: float | None
    bound: float | None
    passed: bool
    feasible: bool
    rigorous: bool
    arguments: list
    profile_values: list


def escape_threshold(g: Graph, D: Domain, ell: int, profile: SpectralProfile,
                     variant: str = "uniform", diagnostic: bool = False,
                     slack: float = 1e-12) -> EscapeThresholdReport:
    """Smallest ladder step k* for the chosen start distribution, paired
    with the exact-evolution assertion Pr(X_{k*} in D) <= bound.

    uniform start: ladder argument 4^{i+1} max_{v in D} pi(v) |D| and bound
    ratio^{1/2} 2^{-ell} with ratio the extreme degree ratio over D.
    pi start: argument 4^{i+1} pi(D) and bound 2^{-ell}.
    """
    rigorous = _check_profile_usable(profile, diagnostic)
    if len(D) == 0:
        raise PreconditionError("escape threshold needs a nonempty domain")
    if ell < 0:
        raise PreconditionError("ell must be >= 0")
    degs = g.degrees[D.members].astype(float)
    if variant == "uniform":
        base = float(degs.max()) * len(D)
        bound = math.sqrt(float(degs.max()) / float(degs.min())) * 2.0 ** -ell
        start = "uniform_on_D"
    elif variant == "pi":
        base = pi_mass(g, D)
        bound = 2.0 ** -ell
        start = "pi_on_D"
    else:
        raise PreconditionError(f"unknown escape variant {variant!r}")
    k_star, args, vals = _ladder_threshold(profile, ell, base)
    if k_star is None:
        return EscapeThresholdReport(ell, variant, None, None, None, True,
                                     False, rigorous, args, vals)
    esc = escape_probability(g, D, k_star, start=start)
    return EscapeThresholdReport(ell, variant, k_star, esc, bound,
                                 esc <= bound + slack, True, rigorous, args, vals)


def escape_envelope(d_size: int, k: float, alpha: float, c1: float,
                    degree_ratio: float = 1.0) -> float:
    """Analytic escape envelope
    ratio^{1/2} exp[-c1 min{k / log^alpha |D|, k^{1/(1+alpha)}}].

    With alpha > 0 and |D| = 1 the first term is +inf and the power term
    wins; with alpha = 0 both terms equal k.
    """
    if d_size < 1 or k < 0 or c1 <= 0 or alpha < 0 or degree_ratio < 1:
        raise PreconditionError("escape envelope needs d_size>=1, k>=0, c1>0, "
                                "alpha>=0, degree_ratio>=1")
    if alpha == 0:
        first = float(k)
    else:
        log_d = math.log(d_size)
        first = math.inf if log_d == 0.0 else k / log_d ** alpha
    rate = min(first, k ** (1.0 / (1.0 + alpha)))
    return math.sqrt(degree_ratio) * math.exp(-c1 * rate)
