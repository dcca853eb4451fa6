"""Neighbor-hitting probabilities of the killed walk on the biregular tree.

A walker dies with probability 1 - p before each step and otherwise jumps
to a uniform neighbor.  alpha(t, p) is the probability that a walker
started at an even-level (type 1) vertex ever sits on a fixed neighbor;
beta(t, p) the same from an odd-level (type 2) vertex.  The pair solves

    alpha = p/(d1+1) + d1/(d1+1) p alpha beta
    beta  = p/(d2+1) + d2/(d2+1) p alpha beta

and the closed forms used here are the rationalized solutions

    alpha = 2 kappa p / ((d1+1) (kappa + p^2 (d2-d1) + sqrt(D)))
    beta  = 2 kappa p / ((d2+1) (kappa + p^2 (d1-d2) + sqrt(D)))
    D     = kappa^2 - 2 kappa (d1+d2) p^2 + (d2-d1)^2 p^4,

algebraically equal to the textbook quadratic-root expressions but free of
the small-p cancellation (and exact at p = 0 and p = 1).

edge_open_prob gives the probability that a frog placed at one end of a
fixed geodesic of length k ever reaches the far end, with the number of
frogs drawn from an initial law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .laws import InitLaw
from .tree import TreeParams


class HittingPair(NamedTuple):
    alpha: float
    beta: float


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"survival parameter p must lie in [0, 1], got {p!r}")
    return p


def hitting_pair(t: TreeParams, p: float) -> HittingPair:
    p = _check_p(p)
    d1, d2 = t.d1, t.d2
    k = t.kappa
    disc = k * k - 2.0 * k * (d1 + d2) * p * p + (d2 - d1) ** 2 * p ** 4
    # disc >= 0 on [0,1]: its smaller root in p^2 is kappa/(sqrt(d1)+sqrt(d2))^2 >= 1
    assert disc >= -1e-12 * k * k, (t, p, disc)
    root = math.sqrt(max(disc, 0.0))
    a = 2.0 * k * p / ((d1 + 1) * (k + p * p * (d2 - d1) + root))
    b = 2.0 * k * p / ((d2 + 1) * (k + p * p * (d1 - d2) + root))
    return HittingPair(a, b)


def alpha(t: TreeParams, p: float) -> float:
    return hitting_pair(t, p).alpha


def beta(t: TreeParams, p: float) -> float:
    return hitting_pair(t, p).beta


def system_residuals(t: TreeParams, p: float, pair: HittingPair) -> tuple:
    """Defects of the two fixed-point equations at the given pair."""
    p = _check_p(p)
    a, b = pair
    d1, d2 = t.d1, t.d2
    r1 = a - (p / (d1 + 1) + d1 / (d1 + 1) * p * a * b)
    r2 = b - (p / (d2 + 1) + d2 / (d2 + 1) * p * a * b)
    return (r1, r2)


def edge_exponents(i: int, j: int, k: int) -> tuple:
    """Powers (ea, eb) with P[end-to-end reach | one frog] = alpha^ea beta^eb.

    A geodesic of length k from a type-i to a type-j vertex alternates
    vertex types, so i == j forces k even and i != j forces k odd.
    """
    if i not in (1, 2) or j not in (1, 2):
        raise ValueError(f"vertex types must be 1 or 2, got ({i}, {j})")
    if k < 1:
        raise ValueError(f"path length k must be >= 1, got {k}")
    if (i == j) != (k % 2 == 0):
        raise ValueError(f"no geodesic of length {k} joins type {i} to type {j}")
    n = (k + 1) // 2
    if i == j:
        return (n, n)
    if i == 1:
        return (n, n - 1)
    return (n - 1, n)


def edge_open_from_pair(law: InitLaw, pair: HittingPair, i: int, j: int, k: int) -> float:
    ea, eb = edge_exponents(i, j, k)
    reach = pair.alpha ** ea * pair.beta ** eb
    return 1.0 - law.pgf(1.0 - reach)


def edge_open_prob(t: TreeParams, law: InitLaw, p: float, i: int, j: int, k: int) -> float:
    """P[some frog placed by the law at a type-i vertex reaches a fixed
    vertex at distance k of type j]."""
    return edge_open_from_pair(law, hitting_pair(t, p), i, j, k)


@dataclass(frozen=True)
class HitEstimate:
    prob: float
    stderr: float
    trials: int
    hits: int


def _auto_escape_radius(p: float) -> int:
    if p >= 1.0:
        return 300
    # beyond this distance the walk would need p^radius luck to matter
    return max(64, int(math.ceil(math.log(1e-15) / math.log(p))) if p > 0 else 64)


def mc_hit_neighbor(t: TreeParams, p: float, start_type: int, trials: int,
                    seed: int = 0, escape_radius: int | None = None,
                    step_cap: int = 10 ** 6) -> HitEstimate:
    """Monte Carlo estimate of alpha (start_type 1) or beta (start_type 2).

    Tracks only the distance to the target neighbor: from distance m the
    walk steps to m - 1 with probability 1/deg and to m + 1 otherwise,
    where deg alternates with the parity of the current vertex.  Walkers
    past escape_radius are retired as misses; at p = 1 this undercounts
    hits by a one-sided, exponentially small amount (and is the only
    reason the loop terminates there).
    """
    p = _check_p(p)
    if start_type not in (1, 2):
        raise ValueError(f"start_type must be 1 or 2, got {start_type}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if escape_radius is None:
        escape_radius = _auto_escape_radius(p)

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, 0x48495421))))
    degs = (t.d1 + 1, t.d2 + 1)
    m = np.ones(trials, dtype=np.int64)
    hits = 0
    step = 0
    while m.size and step < step_cap:
        # walkers jump in lockstep, so they share one vertex parity per step
        cur_deg = degs[(start_type - 1 + step) % 2]
        m = m[rng.random(m.size) < p]
        if not m.size:
            break
        toward = rng.random(m.size) < 1.0 / cur_deg
        m = np.where(toward, m - 1, m + 1)
        hit_now = m == 0
        hits += int(hit_now.sum())
        m = m[~hit_now & (m <= escape_radius)]
        step += 1

    prob = hits / trials
    stderr = math.sqrt(max(prob * (1.0 - prob), 1e-300) / trials)
    return HitEstimate(prob=prob, stderr=stderr, trials=trials, hits=hits)
