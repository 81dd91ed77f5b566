"""The innovation law rho_{q,r}: the value of Y at the first jump time of N.

rho puts mass p at 0 and q**(k-1) * (r + q p) at k >= 1 (Bernoulli(r) when
q = 0). This module evaluates its pmf, characteristic function and entropy,
and the convolution powers rho^{t*} when rho is infinitely divisible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import kernels
from .errors import NotInfinitelyDivisible
from .params import ModelParams

TAIL_EPS = 1e-14
KMAX_CAP = 1 << 20

__all__ = [
    "DiscretePmf",
    "PowerEntropy",
    "default_kmax",
    "entropy_of",
    "rho_cf",
    "rho_entropy",
    "rho_mean",
    "rho_pmf",
    "rho_power_entropy",
    "rho_power_pmf",
]


@dataclass(frozen=True)
class DiscretePmf:
    """Masses at ``offset + ks`` plus the probability left out of the enumeration."""

    ks: np.ndarray
    masses: np.ndarray
    truncation_tail: float
    offset: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.ks.shape != self.masses.shape:
            raise ValueError("ks and masses differ in length")
        if np.any(np.diff(self.ks) <= 0):
            raise ValueError("ks must be strictly increasing")
        if np.any(self.masses < 0):
            raise ValueError("negative mass")

    def mass(self, k: int) -> float:
        i = np.searchsorted(self.ks, k)
        if i < self.ks.size and self.ks[i] == k:
            return float(self.masses[i])
        return 0.0

    def dense(self, kmax: Optional[int] = None) -> np.ndarray:
        """Masses on 0..kmax as a flat array (zeros where nothing is enumerated)."""
        top = int(self.ks[-1]) if kmax is None else int(kmax)
        out = np.zeros(top + 1)
        keep = self.ks <= top
        out[self.ks[keep]] = self.masses[keep]
        return out

    @property
    def total(self) -> float:
        return float(self.masses.sum()) + self.truncation_tail

    def mean(self) -> float:
        return float(np.dot(self.ks, self.masses)) + self.offset * float(self.masses.sum())


def default_kmax(q: float, eps: float = TAIL_EPS) -> int:
    """Smallest k with q**k < eps."""
    if q <= 0.0:
        return 1
    return max(1, int(math.ceil(math.log(eps) / math.log(q))))


def rho_pmf(params: ModelParams, kmax: Optional[int] = None) -> DiscretePmf:
    p, q, r = params.p, params.q, params.r
    if q == 0.0:
        return DiscretePmf(np.array([0, 1]), np.array([p, r]), 0.0)
    if kmax is None:
        kmax = default_kmax(q)
    ks = np.arange(kmax + 1)
    masses = np.empty(kmax + 1)
    masses[0] = p
    masses[1:] = q ** (ks[1:] - 1.0) * (r + q * p)
    # P(U > kmax) = (q + r) q**kmax
    tail = (q + r) * q ** kmax
    return DiscretePmf(ks, masses, tail)


def rho_cf(params: ModelParams) -> Callable:
    """z -> (p + r e^{iz}) / (1 - q e^{iz}), vectorised over numpy arrays."""
    p, q, r = params.p, params.q, params.r

    def cf(z):
        e = np.exp(1j * np.asarray(z, dtype=float))
        return (p + r * e) / (1.0 - q * e)

    return cf


def rho_mean(params: ModelParams) -> float:
    q, r = params.q, params.r
    if q == 0.0:
        return r
    return (1.0 + r / q) * q / (1.0 - q)


def _xlogx(x: float) -> float:
    return x * math.log(x) if x > 0.0 else 0.0


def rho_entropy(params: ModelParams) -> float:
    """Shannon entropy (natural log) of rho_{q,r} in closed form."""
    p, q, r = params.p, params.q, params.r
    if q == 0.0:
        return -_xlogx(p) - _xlogx(r)
    # log(1/q)/(1-q) - log((q+r)/q) rewritten without 1/q, so tiny q stays finite
    return (q + r) * (-math.log1p(-q) - math.log(q + r) - _xlogx(q) / (1.0 - q)) - _xlogx(p)


def entropy_of(pmf: DiscretePmf) -> float:
    m = pmf.masses[pmf.masses > 0]
    return float(-np.sum(m * np.log(m)))


# --- convolution powers -----------------------------------------------------

def _neg_binomial(succ: float, q: float, t: float, kmax: Optional[int]) -> np.ndarray:
    """binom(-t, k) succ**t (-q)**k via the product prod_{j<k} (t + j) q / (j + 1)."""
    if kmax is not None:
        j = np.arange(kmax)
        ratios = (t + j) * q / (j + 1.0)
        return succ ** t * np.concatenate(([1.0], np.cumprod(ratios)))
    top = max(64, 2 * default_kmax(q))
    while True:
        out = _neg_binomial(succ, q, t, top)
        bound_ratio = max((t + top) * q / (top + 1.0), q)
        if bound_ratio < 1.0 and out[-1] * bound_ratio / (1.0 - bound_ratio) < TAIL_EPS * 0.1:
            return out
        if top >= KMAX_CAP:
            return out
        top *= 2


def _compound_poisson(params: ModelParams, t: float, kmax: Optional[int]) -> np.ndarray:
    p, q, r = params.p, params.q, params.r
    ratio = r / (p * q)
    p0 = p ** t

    def run(top):
        k = np.arange(top + 1, dtype=float)
        lam = np.zeros(top + 1)
        lam[1:] = t * q ** k[1:] * (1.0 - (-ratio) ** k[1:])
        return kernels.cp_recursion(p0, lam, top)

    if kmax is not None:
        return run(kmax)
    top = max(64, 2 * default_kmax(q))
    while True:
        out = run(top)
        if 1.0 - out.sum() < TAIL_EPS or top >= KMAX_CAP:
            return out
        top *= 2


def rho_power_pmf(params: ModelParams, t: float, kmax: Optional[int] = None) -> DiscretePmf:
    """pmf of rho^{t*}; defined only when rho is infinitely divisible.

    r = 0 uses the negative binomial closed form, general r <= pq the
    compound-Poisson recursion with the (nonnegative) Levy weights of rho.
    For p = 0, rho is a geometric law shifted by one, so rho^{t*} is negative
    binomial shifted by t (reported through ``offset``).
    """
    from .divisibility import rho_is_id

    if not t > 0:
        raise ValueError(f"t must be positive, got {t!r}")
    if not rho_is_id(params):
        raise NotInfinitelyDivisible(
            f"rho is not infinitely divisible (r={params.r:g} > pq={params.pq:g})"
        )
    p, q = params.p, params.q
    offset = 0.0
    if p == 0.0:
        masses = _neg_binomial(1.0 - q, q, t, kmax)
        offset = t
        branch = "shifted-negative-binomial"
    elif params.r == 0.0:
        masses = _neg_binomial(p, q, t, kmax)
        branch = "negative-binomial"
    else:
        masses = _compound_poisson(params, t, kmax)
        branch = "compound-poisson"
    masses = np.maximum(masses, 0.0)
    tail = max(0.0, 1.0 - float(masses.sum()))
    return DiscretePmf(np.arange(masses.size), masses, tail, offset, meta={"branch": branch, "t": t})


class PowerEntropy(NamedTuple):
    entropy: float
    bound: Optional[float]


def power_entropy_bound(q: float, t: float) -> float:
    """Upper bound on H(rho_{q,0}^{t*}) valid for 0 < t <= 1."""
    p = 1.0 - q
    return t * ((1.0 + 2.0 * math.log(1.0 / p)) / p + (q / p) * math.log(1.0 / t))


def rho_power_entropy(params: ModelParams, t: float) -> PowerEntropy:
    """Entropy of rho^{t*}; ``bound`` is filled when r = 0 and t <= 1."""
    pmf = rho_power_pmf(params, t)
    bound = None
    if params.r == 0.0 and params.p > 0.0 and t <= 1.0:
        bound = power_entropy_bound(params.q, t)
    return PowerEntropy(entropy_of(pmf), bound)
