"""Bounds on the critical survival parameter of the frog model on T_{d1,d2}.

Lower bounds dominate the process by a two-type branching process whose
mean matrix has spectral radius p sqrt((1 + d1(E+1))(1 + d2(E+1)) / kappa)
with E the mean frog count; the process cannot survive while the radius
stays below 1, which pins p_c above

    lb = sqrt( (d1+1)(d2+1) / ((d1(E+1)+1)(d2(E+1)+1)) ).

The upper bound is the unique root in (0, 1) of the increasing function

    f(p) = alpha beta (1 + q(1-alpha)) (1 + q(1-beta)) - 1/(d1 d2),

with q the activation probability of the law; f_n is the finite-path
refinement whose root decreases to the same limit as n grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .hitting import _check_p, hitting_pair
from .laws import Constant, InitLaw, describe_law
from .tree import TreeParams

#: rows of the standard reference grid, all with eta == 1
TABLE_ROWS = ((1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (2, 4),
              (3, 100), (3, 1000), (4, 10000))

#: four-decimal reference values (lb_alves, lb_biregular, ub_root) per row
TABLE_REFERENCE = {
    (1, 2): (0.6000, 0.6325, 0.8588),
    (1, 3): (0.5714, 0.6172, 0.8039),
    (1, 4): (0.5556, 0.6086, 0.7749),
    (2, 2): (0.6000, 0.6000, 0.7500),
    (2, 3): (0.5714, 0.5855, 0.7063),
    (2, 4): (0.5556, 0.5774, 0.6828),
    (3, 100): (0.5025, 0.5359, 0.5771),
    (3, 1000): (0.5002, 0.5347, 0.5743),
    (4, 10000): (0.5000, 0.5271, 0.5572),
}


class NoRootError(ValueError):
    """The bracketing function does not change sign on (0, 1)."""


def _check_q(q: float) -> float:
    q = float(q)
    if not 0.0 < q <= 1.0:
        raise ValueError(f"activation probability q must lie in (0, 1], got {q!r}")
    return q


def _check_mean(mean_eta: float) -> float:
    mean_eta = float(mean_eta)
    if not mean_eta > 0.0:
        raise ValueError(f"mean frog count must be positive, got {mean_eta!r}")
    return mean_eta


def _check_not_11(t: TreeParams) -> None:
    if max(t.d1, t.d2) < 2:
        raise ValueError("T_{1,1} is the line; these bounds need d1 >= 2 or d2 >= 2")


def lb_biregular(t: TreeParams, mean_eta: float) -> float:
    """Lower bound on p_c from the two-type first-moment matrix."""
    _check_not_11(t)
    e = _check_mean(mean_eta)
    d1, d2 = t.d1, t.d2
    return math.sqrt((d1 + 1) * (d2 + 1) /
                     ((d1 * (e + 1) + 1) * (d2 * (e + 1) + 1)))


def lb_alves(big_d: int, mean_eta: float) -> float:
    """Single-type lower bound using only the maximum degree big_d + 1."""
    if not isinstance(big_d, int) or big_d < 2:
        raise ValueError(f"max branching number must be an integer >= 2, got {big_d!r}")
    e = _check_mean(mean_eta)
    return (big_d + 1) / (big_d * (e + 1) + 1)


@dataclass(frozen=True)
class MomentMatrix:
    """Mean offspring matrix of the embedded two-type process at p.

    Type 1 particles produce only type 2 and vice versa, so the matrix is
    anti-diagonal and its spectral radius is sqrt(m12 * m21).
    """

    m12: float
    m21: float

    @property
    def spectral_radius(self) -> float:
        return math.sqrt(self.m12 * self.m21)


def moment_matrix(t: TreeParams, mean_eta: float, p: float) -> MomentMatrix:
    p = _check_p(p)
    e = _check_mean(mean_eta)
    m12 = p * (1.0 + t.d1 * (e + 1.0)) / (t.d1 + 1)
    m21 = p * (1.0 + t.d2 * (e + 1.0)) / (t.d2 + 1)
    return MomentMatrix(m12=m12, m21=m21)


def spectral_radius(t: TreeParams, mean_eta: float, p: float) -> float:
    """p sqrt((1 + d1(E+1))(1 + d2(E+1)) / kappa); equals 1 at lb_biregular."""
    return moment_matrix(t, mean_eta, p).spectral_radius


def f_value(t: TreeParams, q: float, p: float) -> float:
    """Criticality gap whose positive sign certifies survival is possible."""
    q = _check_q(q)
    a, b = hitting_pair(t, p)
    return a * b * (1.0 + q * (1.0 - a)) * (1.0 + q * (1.0 - b)) - 1.0 / (t.d1 * t.d2)


def f_n_value(t: TreeParams, q: float, n: int, p: float) -> float:
    """Finite-n refinement phi_n(p)^{1/n} - 1/(d1 d2), evaluated in log space.

    phi_n = q [a b (1 + q(1-b))]^n [1 + q(1-a)]^{n-1} underflows long before
    its n-th root does, so the root is taken on logarithms.
    """
    q = _check_q(q)
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n!r}")
    p = _check_p(p)
    if p == 0.0:
        return -1.0 / (t.d1 * t.d2)
    a, b = hitting_pair(t, p)
    lg = (math.log(q) + n * math.log(a * b * (1.0 + q * (1.0 - b)))
          + (n - 1) * math.log(1.0 + q * (1.0 - a)))
    return math.exp(lg / n) - 1.0 / (t.d1 * t.d2)


@dataclass(frozen=True)
class RootResult:
    value: float
    iterations: int
    tol: float


def _bisect_increasing(f, tol: float, lo: float = 1e-9, hi: float = 1.0 - 1e-9,
                       max_iter: int = 200, what: str = "f") -> RootResult:
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must lie in (0, 1), got {tol!r}")
    flo, fhi = f(lo), f(hi)
    if not (flo < 0.0 < fhi):
        raise NoRootError(f"{what} does not change sign on ({lo:g}, {hi:g}): "
                          f"endpoint values are {flo:.6g} and {fhi:.6g}")
    iters = 0
    while hi - lo > tol and iters < max_iter:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        iters += 1
    return RootResult(value=0.5 * (lo + hi), iterations=iters, tol=tol)


def ub_root(t: TreeParams, q: float = 1.0, tol: float = 1e-12) -> RootResult:
    """Upper bound on p_c: the root of f(t, q, .) in (0, 1)."""
    _check_not_11(t)
    q = _check_q(q)
    return _bisect_increasing(lambda p: f_value(t, q, p), tol, what="f")


def ub_root_n(t: TreeParams, q: float, n: int, tol: float = 1e-12) -> RootResult:
    """Root of the finite-n refinement f_n; decreases toward ub_root in n.

    For small q and small n, f_n stays negative on all of (0, 1) and no
    root below 1 exists; a NoRootError names that condition rather than
    inventing a value.
    """
    _check_not_11(t)
    q = _check_q(q)
    return _bisect_increasing(lambda p: f_n_value(t, q, n, p), tol,
                              what=f"f_n (q={q:g}, n={n})")


def ub_closed(t: TreeParams) -> float:
    """Closed-form upper bound (1/2) sqrt(kappa / (d1 d2)), valid for q = 1."""
    _check_not_11(t)
    return 0.5 * math.sqrt(t.kappa / (t.d1 * t.d2))


@dataclass(frozen=True)
class DiskSeries:
    """Truncated mean offspring of the activation-ball process.

    value is the partial sum over shell radius k <= k_terms and frog count
    i <= i_terms; remainder is a certified upper bound on everything cut
    off, so value + remainder brackets the true mean from above.
    """

    value: float
    remainder: float
    k_terms: int
    i_terms: int


def disk_mean_offspring(law: InitLaw, big_d: int, p: float,
                        k_max: int = 400, i_max: int = 256) -> DiskSeries:
    """Mean number of vertices whose lifetime-ball covers a fixed vertex.

    The series sums (big_d+1) big_d^{k-1} P[ball radius >= k] over shells
    k >= 1, where P[ball radius >= k] = sum_i rho_i (1 - (1 - p^k)^i).
    Requires big_d * p < 1, otherwise the series diverges.
    """
    if not isinstance(big_d, int) or big_d < 1:
        raise ValueError(f"big_d must be an integer >= 1, got {big_d!r}")
    p = _check_p(p)
    if big_d * p >= 1.0:
        raise ValueError(f"series needs p < 1/big_d = {1 / big_d:.6g}, got p = {p:g}")
    if law.support_max is not None:
        i_max = min(i_max, law.support_max)
    masses = [law.pmf(i) for i in range(1, i_max + 1)]

    total = 0.0
    shell = float(big_d + 1)
    k_done = 0
    for k in range(1, k_max + 1):
        pk = p ** k
        if pk == 0.0:
            break
        lg = math.log1p(-pk)
        inner = math.fsum(rho * -math.expm1(i * lg)
                          for i, rho in enumerate(masses, start=1) if rho > 0.0)
        total += shell * inner
        shell *= big_d
        k_done = k
    geom = (big_d + 1) * p / (1.0 - big_d * p)
    k_tail = law.mean * geom * (big_d * p) ** k_done
    i_tail = geom * law.tail_mean(i_max)
    return DiskSeries(value=total, remainder=k_tail + i_tail,
                      k_terms=k_done, i_terms=i_max)


@dataclass(frozen=True)
class BoundsReport:
    d1: int
    d2: int
    eta: str
    mean_eta: float
    q: float
    lb_alves: float
    lb_biregular: float
    ub_root: float
    ub_closed: float | None
    root_iterations: int
    tol: float


def bounds_report(t: TreeParams, law: InitLaw, tol: float = 1e-12) -> BoundsReport:
    _check_not_11(t)
    root = ub_root(t, q=law.q, tol=tol)
    return BoundsReport(
        d1=t.d1, d2=t.d2, eta=describe_law(law),
        mean_eta=law.mean, q=law.q,
        lb_alves=lb_alves(max(t.d1, t.d2), law.mean),
        lb_biregular=lb_biregular(t, law.mean),
        ub_root=root.value,
        ub_closed=ub_closed(t) if law.q == 1.0 else None,
        root_iterations=root.iterations, tol=tol)


def table1(tol: float = 1e-12) -> list:
    """Bounds for the nine standard rows with eta == 1."""
    one = Constant(1)
    return [bounds_report(TreeParams(d1, d2), one, tol=tol) for d1, d2 in TABLE_ROWS]


@dataclass(frozen=True)
class AsymptoticRow:
    d: int
    lb_scaled: float
    ub_scaled: float


def asymptotic_check(d_list) -> list:
    """Scaled gaps (bound - 1/2) * d for d1 = d2 = d and eta == 1.

    The lower-bound gap tends to 1/4 and the closed-form upper-bound gap
    is 1/2 exactly for every d.
    """
    out = []
    for d in d_list:
        t = TreeParams(d, d)
        out.append(AsymptoticRow(d=d,
                                 lb_scaled=(lb_biregular(t, 1.0) - 0.5) * d,
                                 ub_scaled=(ub_closed(t) - 0.5) * d))
    return out
