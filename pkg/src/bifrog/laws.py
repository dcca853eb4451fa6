"""Laws for the number of sleeping frogs placed on each vertex.

Every law exposes the probability generating function, the mean, point
masses, the activation probability q = P[eta >= 1], a vectorized sampler,
and the truncated tail mean E[eta; eta > m] used to certify series
remainders.  Laws with eta == 0 almost surely are rejected: the process
would be empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class InitLaw:
    """Base class for per-vertex frog-count distributions."""

    #: largest k with P[eta = k] > 0, or None for unbounded support
    support_max: int | None = None

    def pgf(self, s: float) -> float:
        raise NotImplementedError

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def p0(self) -> float:
        """Mass at zero, P[eta = 0]."""
        raise NotImplementedError

    @property
    def q(self) -> float:
        """Activation probability P[eta >= 1]."""
        return 1.0 - self.p0

    def pmf(self, k: int) -> float:
        raise NotImplementedError

    def tail_mean(self, m: int) -> float:
        """E[eta; eta > m], exact."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(InitLaw):
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"Constant law needs an integer k >= 1, got {self.k!r}")
        object.__setattr__(self, "support_max", self.k)

    def pgf(self, s):
        return s ** self.k

    @property
    def mean(self):
        return float(self.k)

    @property
    def p0(self):
        return 0.0

    def pmf(self, k):
        return 1.0 if k == self.k else 0.0

    def tail_mean(self, m):
        return float(self.k) if m < self.k else 0.0

    def sample(self, rng, size):
        return np.full(size, self.k, dtype=np.int64)


@dataclass(frozen=True)
class Bernoulli(InitLaw):
    prob: float

    def __post_init__(self):
        if not 0.0 < self.prob <= 1.0:
            raise ValueError(f"Bernoulli law needs prob in (0, 1], got {self.prob!r}")
        object.__setattr__(self, "support_max", 1)

    def pgf(self, s):
        return 1.0 - self.prob * (1.0 - s)

    @property
    def mean(self):
        return self.prob

    @property
    def p0(self):
        return 1.0 - self.prob

    def pmf(self, k):
        if k == 0:
            return 1.0 - self.prob
        if k == 1:
            return self.prob
        return 0.0

    def tail_mean(self, m):
        return self.prob if m < 1 else 0.0

    def sample(self, rng, size):
        return (rng.random(size) < self.prob).astype(np.int64)


@dataclass(frozen=True)
class Poisson(InitLaw):
    mu: float

    def __post_init__(self):
        if not self.mu > 0.0:
            raise ValueError(f"Poisson law needs mu > 0, got {self.mu!r}")

    def pgf(self, s):
        return math.exp(self.mu * (s - 1.0))

    @property
    def mean(self):
        return self.mu

    @property
    def p0(self):
        return math.exp(-self.mu)

    def pmf(self, k):
        if k < 0:
            return 0.0
        return math.exp(k * math.log(self.mu) - self.mu - math.lgamma(k + 1))

    def tail_mean(self, m):
        # E[X; X > m] = mu P[X >= m] by the shift identity for Poisson
        if m < 0:
            return self.mu
        cdf = math.fsum(self.pmf(k) for k in range(m))
        return self.mu * max(0.0, 1.0 - cdf)

    def sample(self, rng, size):
        return rng.poisson(self.mu, size).astype(np.int64)


@dataclass(frozen=True)
class Geometric(InitLaw):
    """P[eta = k] = (1 - r) r^k on {0, 1, 2, ...}."""

    r: float

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"Geometric law needs r in (0, 1), got {self.r!r}")

    def pgf(self, s):
        return (1.0 - self.r) / (1.0 - self.r * s)

    @property
    def mean(self):
        return self.r / (1.0 - self.r)

    @property
    def p0(self):
        return 1.0 - self.r

    def pmf(self, k):
        if k < 0:
            return 0.0
        return (1.0 - self.r) * self.r ** k

    def tail_mean(self, m):
        # sum_{k>m} k (1-r) r^k = r^{m+1} ((m+1) - m r) / (1 - r)
        if m < 0:
            return self.mean
        r = self.r
        return r ** (m + 1) * ((m + 1) - m * r) / (1.0 - r)

    def sample(self, rng, size):
        # numpy's geometric counts trials to first success on {1, 2, ...}
        return rng.geometric(1.0 - self.r, size).astype(np.int64) - 1


_LAW_NAMES = "const:k | bernoulli:q | poisson:mu | geometric:r"


def parse_law(text: str) -> InitLaw:
    """Parse a law spec string such as 'const:2' or 'poisson:1.5'."""
    name, sep, arg = text.partition(":")
    if not sep or not arg:
        raise ValueError(f"malformed law spec {text!r}; expected one of {_LAW_NAMES}")
    name = name.strip().lower()
    try:
        if name == "const":
            return Constant(int(arg))
        if name == "bernoulli":
            return Bernoulli(float(arg))
        if name == "poisson":
            return Poisson(float(arg))
        if name == "geometric":
            return Geometric(float(arg))
    except ValueError as exc:
        raise ValueError(f"bad law spec {text!r}: {exc}") from None
    raise ValueError(f"unknown law {name!r}; expected one of {_LAW_NAMES}")


def describe_law(law: InitLaw) -> str:
    if isinstance(law, Constant):
        return f"const:{law.k}"
    if isinstance(law, Bernoulli):
        return f"bernoulli:{law.prob:g}"
    if isinstance(law, Poisson):
        return f"poisson:{law.mu:g}"
    if isinstance(law, Geometric):
        return f"geometric:{law.r:g}"
    return type(law).__name__
