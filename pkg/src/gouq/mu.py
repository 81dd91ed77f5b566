"""The stationary law mu_{c,q,r}: the law of sum_n c**-n U_n with U_n i.i.d. rho.

Characteristic function as an infinite product, the modulus through the
double Levy series, the (signed) Levy measure with exact collision handling
for rational c, moments, and Monte Carlo draws of the truncated series.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Union

import numpy as np

from . import kernels
from .divisibility import _pqr, levy_coefficients_a, rho_is_id
from .errors import NotApplicable, PZero, TruncationTooSmall
from .params import ModelParams
from .rho import rho_cf, rho_mean

DEFAULT_SAMPLE_EPS = 1e-12


def _truncation_depth(params: ModelParams, zmax: float, tol: float) -> int:
    """N with E[rho] |z| c**-N / (1 - 1/c) < tol."""
    c = params.c.value
    scale = rho_mean(params) * zmax / ((1.0 - 1.0 / c) * tol)
    if scale <= 1.0:
        return 0
    return int(math.ceil(math.log(scale) / math.log(c)))


def mu_cf(params: ModelParams, z, tol: float = 1e-12):
    """prod_{n=0}^{N} rho^(c**-n z), N chosen so the omitted factors are within ``tol`` of 1."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    cf = rho_cf(params)
    c = params.c.value
    depth = _truncation_depth(params, float(np.max(np.abs(z), initial=0.0)), tol)
    out = np.ones(z.shape, dtype=complex)
    scale = 1.0
    for _ in range(depth + 1):
        out *= cf(z * scale)
        scale /= c
    return complex(out[0]) if scalar else out


def _modulus_weights(params: ModelParams, mmax: int) -> np.ndarray:
    p, q, r = _pqr(params)
    if float(p) == 0.0:
        m = np.arange(1, mmax + 1, dtype=float)
        return params.q ** m / m
    if not rho_is_id(params):
        raise NotApplicable("a_m change sign when r > pq; evaluate mu_cf directly")
    return levy_coefficients_a(params, mmax)


def modulus_truncation(params: ModelParams, zmax: float, tol: float = 1e-13):
    """(nmax, mmax) so that the double series for log|mu^| is accurate to ``tol``."""
    c, q = params.c.value, params.q
    if q == 0.0:
        raise NotApplicable("q = 0: rho is Bernoulli and has no Levy weights")
    # sum_m a_m m**2 <= 2 q / (1-q)**2, and 1 - cos x <= x**2 / 2
    second = 2.0 * q / (1.0 - q) ** 2
    nmax = 1
    while 0.5 * zmax ** 2 * second * c ** (-2.0 * nmax) / (1.0 - c ** -2.0) >= tol / 2:
        nmax += 1
    # sum_{m>M} a_m <= 2 q**(M+1) / ((M+1)(1-q)); each level contributes at most twice that
    mmax = 1
    while nmax * 4.0 * q ** (mmax + 1) / ((mmax + 1) * (1.0 - q)) >= tol / 2:
        mmax += 1
    return nmax, mmax


def mu_cf_modulus_exp(params: ModelParams, z, nmax: Optional[int] = None, mmax: Optional[int] = None):
    """|mu^(z)| = exp(-sum_n sum_m (1 - cos(m c**-n z)) a_m); needs nonnegative a_m."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if nmax is None or mmax is None:
        auto_n, auto_m = modulus_truncation(params, float(np.max(np.abs(z), initial=0.0)) or 1.0)
        nmax = auto_n if nmax is None else nmax
        mmax = auto_m if mmax is None else mmax
    a = _modulus_weights(params, mmax)
    m = np.arange(1, mmax + 1, dtype=float)
    c = params.c.value
    expo = np.zeros(z.shape)
    scale = 1.0
    for _ in range(nmax):
        expo += (1.0 - np.cos(np.outer(z * scale, m))) @ a
        scale /= c
    out = np.exp(-expo)
    return float(out[0]) if scalar else out


# --- signed Levy measure ------------------------------------------------------

Location = Union[Fraction, float]


@dataclass(frozen=True)
class SignedPointMeasure:
    """Atoms (location, weight); ``mode`` is ``"exact-rational"`` or ``"float-distinct"``."""

    locations: List[Location]
    weights: np.ndarray
    mode: str

    def __len__(self):
        return len(self.locations)

    def weight_at(self, x) -> float:
        key = Fraction(x) if self.mode == "exact-rational" else float(x)
        for loc, w in zip(self.locations, self.weights):
            if loc == key:
                return float(w)
        return 0.0

    @property
    def total_variation(self) -> float:
        return float(np.abs(self.weights).sum())

    def negative_atoms(self):
        return [(loc, float(w)) for loc, w in zip(self.locations, self.weights) if w < 0]

    def float_locations(self) -> np.ndarray:
        return np.array([float(x) for x in self.locations])

    def cf(self, z) -> np.ndarray:
        """exp(sum_x w_x (e^{ixz} - 1)), the compound-Poisson transform of the atoms."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        x = self.float_locations()
        return np.exp((np.exp(1j * np.outer(z, x)) - 1.0) @ self.weights)

    def to_records(self) -> list:
        out = []
        for loc, w in zip(self.locations, self.weights):
            if isinstance(loc, Fraction):
                out.append({"location_num": loc.numerator, "location_den": loc.denominator, "weight": float(w)})
            else:
                out.append({"location_float": float(loc), "weight": float(w)})
        return out

    def to_json(self, **kw) -> str:
        return json.dumps({"mode": self.mode, "atoms": self.to_records()}, **kw)


def _check_levy_applicable(params: ModelParams):
    p, q, r = _pqr(params)
    if p == 0:
        raise PZero("p = 0: mu is a drifted compound Poisson law with weights q**m/m")
    if not r < p:
        raise NotApplicable("r >= p: the weights (r/p)**m/m are not summable")


def mu_levy_measure(params: ModelParams, nmax: int, mmax: int) -> SignedPointMeasure:
    """Atoms a_m at c**-n m for 0 <= n < nmax, 1 <= m <= mmax, merged where locations coincide.

    Rational c = alpha/beta merges exactly on the key m beta**n / alpha**n.
    Any other c is assumed to have no rational power, so every location is
    kept as a separate atom.
    """
    _check_levy_applicable(params)
    a = levy_coefficients_a(params, mmax)
    c = params.c
    if c.exact is not None:
        alpha, beta = c.exact.numerator, c.exact.denominator
        acc = {}
        for n in range(nmax):
            num_scale, den = beta ** n, alpha ** n
            for m in range(1, mmax + 1):
                key = Fraction(m * num_scale, den)
                acc[key] = acc.get(key, 0.0) + a[m - 1]
        locs = sorted(acc)
        return SignedPointMeasure(locs, np.array([acc[x] for x in locs]), "exact-rational")
    locs, weights = [], []
    for n in range(nmax):
        scale = c.value ** -n
        for m in range(1, mmax + 1):
            locs.append(m * scale)
            weights.append(a[m - 1])
    order = np.argsort(locs, kind="stable")
    return SignedPointMeasure([locs[i] for i in order], np.asarray(weights)[order], "float-distinct")


@dataclass(frozen=True)
class AtomCertificate:
    location: Location
    weight: float
    tail_bound: float

    @property
    def certified_negative(self) -> bool:
        return self.weight + self.tail_bound < 0

    def to_dict(self) -> dict:
        return {
            "location": str(self.location),
            "weight": self.weight,
            "tail_bound": self.tail_bound,
            "certified_negative": self.certified_negative,
        }


def certify_negative_atom(params: ModelParams, location, nmax: int, mmax: int, strict: bool = True) -> AtomCertificate:
    """Weight of the Levy measure at ``location`` with a bound on what truncation left out.

    Contributions missing from the truncated sum come from pairs (n, m) with
    m = location * c**n and either n >= nmax or m > mmax; each m occurs at
    most once for a fixed location, so the omitted mass is bounded by
    sum_{m >= m0} (q**m + (r/p)**m) / m. With ``strict`` an inconclusive sign
    raises :class:`TruncationTooSmall`.
    """
    measure = mu_levy_measure(params, nmax, mmax)
    w = measure.weight_at(location)
    c = params.c.value
    q, s = params.q, params.r / params.p
    m0 = int(min(mmax + 1, math.ceil(float(location) * c ** nmax)))
    m0 = max(m0, 1)
    tail = 0.0
    for x in (q, s):
        if x > 0:
            tail += x ** m0 / (m0 * (1.0 - x))
    loc = Fraction(location) if measure.mode == "exact-rational" else float(location)
    cert = AtomCertificate(loc, w, tail)
    if strict and abs(w) <= tail:
        raise TruncationTooSmall(
            f"weight {w:.3g} at {location} is within the tail bound {tail:.3g}; raise nmax/mmax"
        )
    return cert


# --- moments and sampling ------------------------------------------------------

def mu_mean(params: ModelParams) -> float:
    c = params.c.value
    return rho_mean(params) * c / (c - 1.0)


def default_depth(c: float, eps: float = DEFAULT_SAMPLE_EPS) -> int:
    return int(math.ceil(math.log(1.0 / eps) / math.log(c)))


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator; ``stream`` selects an independent substream."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class SeriesSampler:
    params: ModelParams
    depth: Optional[int] = None
    seed: int = 0
    stream: int = 0

    @property
    def n_terms(self) -> int:
        """Number of summands U_0..U_N actually drawn."""
        depth = default_depth(self.params.c.value) if self.depth is None else self.depth
        if depth < 1:
            raise ValueError("truncation depth must be at least 1")
        return depth + 1

    def truncation_bound(self) -> float:
        """Size of the omitted remainder c**-(N+1) * (copy of mu).

        For q = 0 the remainder lies in [0, bound] surely; otherwise the bound
        is on its expectation.
        """
        c = self.params.c.value
        factor = c ** (-self.n_terms)
        if self.params.q == 0.0:
            return factor * c / (c - 1.0)
        return factor * mu_mean(self.params)

    def split(self, stream: int) -> "SeriesSampler":
        return SeriesSampler(self.params, self.depth, self.seed, stream)


def draw_series(p: float, q: float, r: float, c: float, terms: int, n: int, rng) -> np.ndarray:
    """Core of :func:`mu_sample` on raw probabilities (also serves the r = 1 diagnostic)."""
    pw = c ** -np.arange(terms, dtype=float)
    rows = max(1, (1 << 21) // terms)
    out = np.empty(n)
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        v = 1.0 - rng.random((stop - start, terms))
        out[start:stop] = kernels.series_draws(v, p, q, r, pw)
    return out


def mu_sample(sampler: SeriesSampler, n: int) -> np.ndarray:
    """``n`` draws of sum_{j<=N} c**-j U_j; reproducible for a given (seed, stream)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    params = sampler.params
    rng = make_rng(sampler.seed, sampler.stream)
    return draw_series(params.p, params.q, params.r, params.c.value, sampler.n_terms, n, rng)
