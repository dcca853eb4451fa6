"""Monte Carlo simulation of the frog model with death on T_{d1,d2}.

run_frog advances the full particle system in vectorized time steps: every
awake frog first survives with probability p, then jumps to a uniform
neighbor; first visits to a vertex wake the frogs sleeping there, whose
count is sampled exactly once per vertex.  Vertices are registered on
first visit (the visited cluster stays connected, so a fresh vertex is
always entered from its parent) and the registry is shared by the coupled
sweep, which re-evaluates survival across an ascending p grid on one
realization per replica so that the survival indicator is provably
nondecreasing in p.

Randomness is Philox counter-based: one stream per (seed, replica) for the
uncoupled runs, and per-(vertex, frog, purpose) substreams for the coupled
runs so a frog's lifetime uniforms and jump uniforms do not depend on p.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .hitting import _auto_escape_radius, _check_p, edge_open_prob
from .laws import InitLaw
from .tree import TreeParams

DENSE_CHILD_LIMIT = 64
ACTIVATED_HARD_CAP = 10 ** 7
_MAX_WALK_STEPS = 10 ** 6
_EMPTY = np.empty(0, dtype=np.int64)

_PUR_ETA, _PUR_LIFE, _PUR_JUMP = 1, 2, 3


class SimResourceError(RuntimeError):
    """The run touched more vertices than the hard safety cap."""


class _TreeTable:
    """Registry of visited vertices, grown on first visit.

    Ids are dense ints in visit order with the root at 0.  Child links are
    a dense (n, width) array for small degrees and an int-keyed dict
    otherwise; parent links and the level parity bit are flat arrays.
    """

    def __init__(self, t: TreeParams):
        self.t = t
        self.width = max(t.d1 + 1, t.d2)
        self.dense = self.width <= DENSE_CHILD_LIMIT
        cap = 1024
        self.parent = np.full(cap, -1, dtype=np.int64)
        self.level_odd = np.zeros(cap, dtype=np.uint8)
        self.child = (np.full((cap, self.width), -1, dtype=np.int64)
                      if self.dense else {})
        self.n = 1

    def _grow(self, need: int) -> None:
        if need > ACTIVATED_HARD_CAP:
            raise SimResourceError(
                f"run would activate more than {ACTIVATED_HARD_CAP} vertices; "
                f"lower the horizon or awake_cap")
        cap = self.parent.size
        if need <= cap:
            return
        new_cap = min(max(need, 2 * cap), ACTIVATED_HARD_CAP)
        self.parent = np.concatenate(
            [self.parent, np.full(new_cap - cap, -1, dtype=np.int64)])
        self.level_odd = np.concatenate(
            [self.level_odd, np.zeros(new_cap - cap, dtype=np.uint8)])
        if self.dense:
            pad = np.full((new_cap - cap, self.width), -1, dtype=np.int64)
            self.child = np.concatenate([self.child, pad])

    def degrees(self, vids: np.ndarray) -> np.ndarray:
        return np.where(self.level_odd[vids] == 0, self.t.d1 + 1, self.t.d2 + 1)

    def degree_at(self, vid: int) -> int:
        return self.t.d1 + 1 if self.level_odd[vid] == 0 else self.t.d2 + 1

    def move(self, movers: np.ndarray, slot: np.ndarray):
        """One jump per mover; returns (targets, fresh ids in alloc order).

        slot is uniform on [0, degree); at the root every slot is a child
        index, elsewhere slot 0 is the parent and slot - 1 the child index.
        """
        targets = np.empty_like(movers)
        to_parent = (slot == 0) & (movers != 0)
        targets[to_parent] = self.parent[movers[to_parent]]
        cm = ~to_parent
        cpos = movers[cm]
        cidx = slot[cm] - (cpos != 0)
        if self.dense:
            got = self.child[cpos, cidx]
            fresh = _EMPTY
            miss = got < 0
            if miss.any():
                keys = cpos[miss] * self.width + cidx[miss]
                uniq = np.unique(keys)
                fresh = np.arange(self.n, self.n + uniq.size, dtype=np.int64)
                self._grow(self.n + uniq.size)
                pv, ci = uniq // self.width, uniq % self.width
                self.child[pv, ci] = fresh
                self.parent[fresh] = pv
                self.level_odd[fresh] = 1 - self.level_odd[pv]
                self.n += uniq.size
                got = self.child[cpos, cidx]
        else:
            got = np.empty(cpos.size, dtype=np.int64)
            fresh_ids = []
            for i in range(cpos.size):
                got[i] = self._child_scalar(int(cpos[i]), int(cidx[i]), fresh_ids)
            fresh = np.asarray(fresh_ids, dtype=np.int64)
        targets[cm] = got
        return targets, fresh

    def _child_scalar(self, vid: int, cidx: int, fresh_ids=None) -> int:
        if self.dense:
            known = int(self.child[vid, cidx])
            if known >= 0:
                return known
        else:
            known = self.child.get(vid * self.width + cidx)
            if known is not None:
                return known
        new = self.n
        self._grow(new + 1)
        self.parent[new] = vid
        self.level_odd[new] = 1 - self.level_odd[vid]
        if self.dense:
            self.child[vid, cidx] = new
        else:
            self.child[vid * self.width + cidx] = new
        self.n = new + 1
        if fresh_ids is not None:
            fresh_ids.append(new)
        return new

    def step_scalar(self, vid: int, slot: int) -> int:
        if vid != 0 and slot == 0:
            return int(self.parent[vid])
        return self._child_scalar(vid, slot - (vid != 0))


@dataclass(frozen=True)
class SimConfig:
    tree: TreeParams
    law: InitLaw
    p: float
    horizon: int = 10_000
    awake_cap: int = 100_000
    seed: int = 0
    replica_index: int = 0


@dataclass(frozen=True)
class SimOutcome:
    """survived means censored survival (horizon or awake_cap reached);
    otherwise at_time is the last time with an awake frog."""

    survived: bool
    at_time: int | None
    censor_reason: str | None
    max_awake: int
    vertices_activated: int


def _replica_rng(seed: int, replica_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence((seed, replica_index))
    return np.random.Generator(np.random.Philox(ss))


def run_frog(config: SimConfig) -> SimOutcome:
    p = _check_p(config.p)
    law, tree = config.law, config.tree
    if config.horizon < 1 or config.awake_cap < 1:
        raise ValueError("horizon and awake_cap must be >= 1")
    rng = _replica_rng(config.seed, config.replica_index)
    table = _TreeTable(tree)
    eta_root = int(law.sample(rng, 1)[0])
    if eta_root == 0:
        return SimOutcome(survived=False, at_time=0, censor_reason=None,
                          max_awake=0, vertices_activated=1)
    pos = np.zeros(eta_root, dtype=np.int64)
    max_awake = eta_root
    for now in range(config.horizon):
        pos = pos[rng.random(pos.size) < p]
        survivors = pos.size
        woken = 0
        if survivors:
            deg = table.degrees(pos)
            slot = rng.integers(0, deg)
            targets, fresh = table.move(pos, slot)
            if fresh.size:
                counts = law.sample(rng, fresh.size)
                woken = int(counts.sum())
                pos = np.concatenate([targets, np.repeat(fresh, counts)])
            else:
                pos = targets
        assert pos.size == survivors + woken, "awake count must be conserved"
        if pos.size == 0:
            return SimOutcome(survived=False, at_time=now, censor_reason=None,
                              max_awake=max_awake, vertices_activated=table.n)
        max_awake = max(max_awake, pos.size)
        if pos.size > config.awake_cap:
            return SimOutcome(survived=True, at_time=None, censor_reason="awake_cap",
                              max_awake=max_awake, vertices_activated=table.n)
    return SimOutcome(survived=True, at_time=None, censor_reason="horizon",
                      max_awake=max_awake, vertices_activated=table.n)


_Z95 = 1.959963984540054


def wilson_interval(successes: int, n: int, z: float = _Z95) -> tuple:
    if n <= 0:
        return (0.0, 1.0)
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class SurvivalEstimate:
    p: float
    replicas: int
    survived: int
    fraction: float
    ci_low: float
    ci_high: float


def _map_replicas(fn, indices, workers: int):
    if workers <= 1:
        return [fn(i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, indices))


def estimate_survival(config: SimConfig, replicas: int,
                      workers: int = 1) -> SurvivalEstimate:
    """Censored-survival fraction over replicas with a Wilson 95% interval.

    Replica r uses the substream keyed (seed, replica_index + r), so the
    estimate is bitwise identical for any workers value.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    base = config.replica_index
    outcomes = _map_replicas(
        lambda r: run_frog(replace(config, replica_index=r)),
        range(base, base + replicas), workers)
    s = sum(o.survived for o in outcomes)
    lo, hi = wilson_interval(s, replicas)
    return SurvivalEstimate(p=config.p, replicas=replicas, survived=s,
                            fraction=s / replicas, ci_low=lo, ci_high=hi)


def _counter_rng(key: np.ndarray, purpose: int, vid: int, frog: int) -> np.random.Generator:
    bits = np.random.Philox(counter=[0, frog, purpose, vid], key=key)
    return np.random.Generator(bits)


def _walk_range(table: _TreeTable, key: np.ndarray, vid: int, frog: int, p: float):
    """Vertices visited by one frog's killed walk, in order.

    The lifetime and jump uniforms come from fixed substreams read as
    prefixes, so raising p extends the same walk instead of resampling it.
    """
    life = _counter_rng(key, _PUR_LIFE, vid, frog)
    jumps = None
    offset = 0
    while jumps is None:
        block = life.random(64 if offset == 0 else 1024)
        failed = np.nonzero(block >= p)[0]
        if failed.size:
            jumps = offset + int(failed[0])
        else:
            offset += block.size
            if offset >= _MAX_WALK_STEPS:
                jumps = _MAX_WALK_STEPS
    if jumps == 0:
        return ()
    u = _counter_rng(key, _PUR_JUMP, vid, frog).random(jumps)
    cur = vid
    out = []
    for uu in u:
        deg = table.degree_at(cur)
        slot = min(int(uu * deg), deg - 1)
        cur = table.step_scalar(cur, slot)
        out.append(cur)
    return out


def _cluster_survives(config: SimConfig, table: _TreeTable, eta: dict,
                      key: np.ndarray, p: float) -> bool:
    """Time-free survival evaluation at one p on a shared realization.

    Explores the activation cluster of the root: waking a vertex releases
    its frogs, whose realized ranges wake every vertex they touch.  The
    replica survives when the cumulative number of woken frogs exceeds
    awake_cap; with shared substreams this indicator is nondecreasing in p
    because ranges only extend as p grows and the running total crosses
    the cap at the larger p whenever it did at the smaller.
    """
    law = config.law

    def eta_of(v: int) -> int:
        if v not in eta:
            eta[v] = int(law.sample(_counter_rng(key, _PUR_ETA, v, 0), 1)[0])
        return eta[v]

    if p >= 1.0:
        return eta_of(0) >= 1
    cap = config.awake_cap
    woken = eta_of(0)
    if woken == 0:
        return False
    if woken > cap:
        return True
    activated = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for frog in range(eta_of(v)):
            for y in _walk_range(table, key, v, frog, p):
                if y not in activated:
                    activated.add(y)
                    queue.append(y)
                    woken += eta_of(y)
                    if woken > cap:
                        return True
    return False


def _coupled_replica(config: SimConfig, ps_sorted, replica: int):
    table = _TreeTable(config.tree)
    eta: dict = {}
    key = np.random.SeedSequence((config.seed, replica, 0xC0FFEE)).generate_state(2, np.uint64)
    inds = [_cluster_survives(config, table, eta, key, p) for p in ps_sorted]
    assert all(a <= b for a, b in zip(inds, inds[1:])), \
        "coupled survival indicator must be nondecreasing in p"
    return inds


def sweep(config: SimConfig, p_values, replicas: int, coupled: bool = False,
          workers: int = 1) -> list:
    """Survival estimates over a p grid.

    Uncoupled (default): each grid point is exactly estimate_survival at
    that p.  Coupled: every replica shares one realization (frog counts,
    walk steps, lifetime uniforms) across all grid points, survival is
    evaluated time-free as activation-cluster percolation with awake_cap
    as the total-woken-frogs cutoff, and the per-replica indicator is
    asserted nondecreasing in p.
    """
    ps = [_check_p(x) for x in p_values]
    if not ps:
        raise ValueError("p grid must be non-empty")
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    if not coupled:
        return [estimate_survival(replace(config, p=x), replicas, workers=workers)
                for x in ps]
    order = sorted(set(ps))
    base = config.replica_index
    per_replica = _map_replicas(
        lambda r: _coupled_replica(config, order, r),
        range(base, base + replicas), workers)
    survived = {x: sum(ind[i] for ind in per_replica)
                for i, x in enumerate(order)}
    out = []
    for x in ps:
        s = survived[x]
        lo, hi = wilson_interval(s, replicas)
        out.append(SurvivalEstimate(p=x, replicas=replicas, survived=s,
                                    fraction=s / replicas, ci_low=lo, ci_high=hi))
    return out


@dataclass(frozen=True)
class GwOutcome:
    extinct: bool
    at_generation: int | None
    population_trace: list


def _progeny_total(rng: np.random.Generator, n: int, p: float, d: int,
                   law: InitLaw) -> int:
    """Total offspring of n same-type particles, sampled by decomposition:
    die (1-p); else one child, plus a full pile of size eta with the
    wake-a-new-vertex probability d/(d+1)."""
    if n == 0:
        return 0
    surv = int((rng.random(n) < p).sum())
    if surv == 0:
        return 0
    piles = int((rng.random(surv) >= 1.0 / (d + 1)).sum())
    total = surv
    if piles:
        total += int(law.sample(rng, piles).sum())
    return total


def run_multitype_gw(t: TreeParams, law: InitLaw, p: float,
                     max_generations: int = 10_000, seed: int = 0,
                     replica_index: int = 0,
                     population_cap: int = 10 ** 7) -> GwOutcome:
    """Two-type branching process that dominates the early frog cloud.

    Generation 0 holds no type-1 particles and the sum of d1 + 2 draws of
    the law as type-2 particles; type-i particles reproduce into the other
    type with the progeny law of gw_progeny_masses.
    """
    p = _check_p(p)
    rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence((seed, replica_index, 0x475721))))
    n1 = 0
    n2 = int(law.sample(rng, t.d1 + 2).sum())
    trace = [(n1, n2)]
    if n2 == 0:
        return GwOutcome(extinct=True, at_generation=0, population_trace=trace)
    for gen in range(1, max_generations + 1):
        new2 = _progeny_total(rng, n1, p, t.d1, law)
        new1 = _progeny_total(rng, n2, p, t.d2, law)
        n1, n2 = new1, new2
        trace.append((n1, n2))
        if n1 + n2 == 0:
            return GwOutcome(extinct=True, at_generation=gen, population_trace=trace)
        if n1 + n2 > population_cap:
            return GwOutcome(extinct=False, at_generation=None, population_trace=trace)
    return GwOutcome(extinct=False, at_generation=None, population_trace=trace)


def gw_progeny_masses(t: TreeParams, law: InitLaw, p: float, parent_type: int,
                      k_cap: int | None = None) -> np.ndarray:
    """Progeny masses P[k children] for k = 0..k_cap of one particle.

    P[0] = 1 - p, P[1] = p (1 + d rho_0) / (d + 1), and for k >= 2
    P[k] = p d rho_{k-1} / (d + 1), with d = d1 for type-1 parents and d2
    for type-2.
    """
    p = _check_p(p)
    if parent_type not in (1, 2):
        raise ValueError(f"parent_type must be 1 or 2, got {parent_type}")
    d = t.d1 if parent_type == 1 else t.d2
    if k_cap is None:
        k_cap = law.support_max + 1 if law.support_max is not None else 256
    m = np.zeros(k_cap + 1)
    m[0] = 1.0 - p
    if k_cap >= 1:
        m[1] = p * (1.0 + d * law.p0) / (d + 1)
    for k in range(2, k_cap + 1):
        m[k] = p * d * law.pmf(k - 1) / (d + 1)
    return m


@dataclass(frozen=True)
class RangeDiskReport:
    trials: int
    k: int
    range_prob: float
    range_se: float
    range_ref: float
    ball_prob: float
    ball_se: float
    ball_ref: float


def mc_range_vs_disk(t: TreeParams, law: InitLaw, p: float, k: int,
                     trials: int, seed: int = 0,
                     start_type: int = 1) -> RangeDiskReport:
    """One realization drives both events for a target y at distance k:
    y in range(x) (some frog's walk visits y) and y in ball(x) (some
    frog's lifetime reaches k).  The walk cannot visit y without making k
    jumps, so range containment in ball is asserted pathwise; the ball
    estimate is checked against 1 - pgf(1 - p^k) and the range estimate
    against edge_open_prob.
    """
    p = _check_p(p)
    if k < 1:
        raise ValueError("k must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if start_type not in (1, 2):
        raise ValueError(f"start_type must be 1 or 2, got {start_type}")
    radius = _auto_escape_radius(p) + k
    rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence((seed, 0x52414E47))))
    degs = (t.d1 + 1, t.d2 + 1)
    counts = law.sample(rng, trials)
    trial_idx = np.repeat(np.arange(trials, dtype=np.int64), counts)
    n = trial_idx.size
    m = np.full(n, k, dtype=np.int64)
    jumps = np.zeros(n, dtype=np.int64)
    hit = np.zeros(n, dtype=bool)
    alive = np.ones(n, dtype=bool)
    # vertex parity at distance m from y: start parity + (k - m) flips
    base = start_type - 1 + k
    step = 0
    while alive.any() and step < 10 ** 6:
        ii = np.nonzero(alive)[0]
        u = rng.random(ii.size)
        dead = ii[u >= p]
        alive[dead] = False
        movers = ii[u < p]
        if movers.size:
            deg = np.where((base + m[movers]) % 2 == 0, degs[0], degs[1])
            toward = rng.random(movers.size) < 1.0 / deg
            m[movers] += np.where(toward, -1, 1)
            jumps[movers] += 1
            arrived = movers[m[movers] == 0]
            hit[arrived] = True
            alive[arrived] = False
            gone = movers[m[movers] > radius]
            alive[gone] = False
        step += 1

    ball = jumps >= k
    assert not np.any(hit & ~ball), "a walk visit implies a lifetime of at least k"
    hit_t = np.bincount(trial_idx[hit], minlength=trials) > 0
    ball_t = np.bincount(trial_idx[ball], minlength=trials) > 0
    end_type = 1 + (base % 2)
    r_est, b_est = float(hit_t.mean()), float(ball_t.mean())
    return RangeDiskReport(
        trials=trials, k=k,
        range_prob=r_est,
        range_se=math.sqrt(max(r_est * (1 - r_est), 1e-300) / trials),
        range_ref=edge_open_prob(t, law, p, start_type, end_type, k),
        ball_prob=b_est,
        ball_se=math.sqrt(max(b_est * (1 - b_est), 1e-300) / trials),
        ball_ref=1.0 - law.pgf(1.0 - p ** k))
