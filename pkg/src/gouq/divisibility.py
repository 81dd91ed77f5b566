"""Infinite divisibility of rho, mu and their symmetrisations.

Closed-form threshold tests (r <= pq for rho and mu, p <= qr for the
symmetrisations when r > pq), Katti's recursion as a model-free check on a
lattice pmf, the Levy weights a_m, and the coefficients D_k, E_m of log|rho^|^2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import DegenerateAB, PZero, ZeroAtOrigin
from .params import ModelParams

KATTI_NEG_TOL = 1e-12
BOUNDARY_TOL = 1e-12
SYM_KMAX_CAP = 200_000


class Decision(str, enum.Enum):
    YES = "Yes"
    NO = "No"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class Verdict:
    decision: Decision
    rule: str
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"decision": self.decision.value, "rule": self.rule, "witness": self.witness}


def _le(a, b) -> bool:
    """a <= b, exactly for Fractions, with a 1e-12 slack for floats (boundary counts as <=)."""
    if isinstance(a, float) or isinstance(b, float):
        return a - b <= BOUNDARY_TOL
    return a <= b


def _pqr(params: ModelParams):
    return params.exact if params.exact is not None else (params.p, params.q, params.r)


def _num(x):
    return float(x) if isinstance(x, float) else str(x)


def rho_is_id(params: ModelParams) -> bool:
    p, q, r = _pqr(params)
    if q == 0:
        return False
    return p == 0 or _le(r, p * q)


def classify_rho_id(params: ModelParams) -> Verdict:
    p, q, r = _pqr(params)
    witness = {"r": _num(r), "pq": _num(p * q)}
    if q == 0:
        return Verdict(Decision.NO, "q-zero-bernoulli", witness)
    if p == 0:
        return Verdict(Decision.YES, "p-zero-shifted-geometric", witness)
    if _le(r, p * q):
        return Verdict(Decision.YES, "r-le-pq", witness)
    return Verdict(Decision.NO, "r-gt-pq", witness)


def classify_mu_id(params: ModelParams) -> Verdict:
    """Same decision as for rho; the answer does not depend on c."""
    v = classify_rho_id(params)
    witness = dict(v.witness, c_independent=True)
    return Verdict(v.decision, "mu-iff-rho:" + v.rule, witness)


def classify_sym_id(params: ModelParams) -> Verdict:
    """Infinite divisibility of rho^sym and mu^sym (same answer for both)."""
    p, q, r = _pqr(params)
    witness = {"r": _num(r), "pq": _num(p * q), "p": _num(p), "qr": _num(q * r)}
    if rho_is_id(params):
        return Verdict(Decision.YES, "id-implies-sym-id", witness)
    if q == 0:
        return Verdict(Decision.NO, "q-zero-bounded-support", witness)
    if p == r:
        return Verdict(Decision.NO, "p-eq-r-real-zero", witness)
    if _le(p, q * r):
        return Verdict(Decision.YES, "p-le-qr", witness)
    return Verdict(Decision.NO, "p-gt-qr", witness)


# --- Katti recursion ---------------------------------------------------------

@dataclass(frozen=True)
class KattiSequence:
    """Canonical coefficients q_1..q_nmax (stored 0-based) of a lattice pmf."""

    coefficients: np.ndarray
    first_negative_index: Optional[int]
    residual: float

    def q(self, k: int) -> float:
        return float(self.coefficients[k - 1])

    def to_dict(self) -> dict:
        return {
            "q": self.coefficients.tolist(),
            "first_negative_index": self.first_negative_index,
            "residual": self.residual,
        }


def katti(pmf, nmax: int) -> KattiSequence:
    """Solve n p_n = sum_{k<=n} k q_k p_{n-k} for q_1..q_nmax by forward substitution."""
    if nmax < 1:
        raise ValueError("nmax must be at least 1")
    p = pmf.dense(nmax)
    if int(pmf.ks[-1]) < nmax and pmf.truncation_tail > 0:
        raise ValueError(f"pmf enumerated only up to {int(pmf.ks[-1])} < nmax={nmax}")
    p0 = p[0]
    if not p0 > 0:
        raise ZeroAtOrigin("Katti recursion needs positive mass at 0")
    kq = np.zeros(nmax + 1)  # kq[k] = k * q_k
    for n in range(1, nmax + 1):
        acc = np.dot(kq[1:n], p[n - 1:0:-1]) if n > 1 else 0.0
        kq[n] = (n * p[n] - acc) / p0
    coeffs = kq[1:] / np.arange(1, nmax + 1)
    resid = 0.0
    for n in range(1, nmax + 1):
        lhs = n * p[n]
        rhs = np.dot(kq[1:n + 1], p[n - 1::-1])
        resid = max(resid, abs(lhs - rhs))
    neg = np.flatnonzero(coeffs < -KATTI_NEG_TOL)
    first = int(neg[0]) + 1 if neg.size else None
    return KattiSequence(coeffs, first, float(resid))


# --- Levy weights ------------------------------------------------------------

def levy_coefficients_a(params: ModelParams, mmax: int) -> np.ndarray:
    """a_m = (q**m - (-r/p)**m) / m for m = 1..mmax.

    These are the Levy weights of rho when r <= pq (all nonnegative then) and
    the signed weights of the formal log-expansion otherwise.
    """
    p, q, r = params.p, params.q, params.r
    if p == 0.0:
        raise PZero("a_m needs p > 0; for p = 0 rho is a shifted geometric law")
    m = np.arange(1, mmax + 1, dtype=float)
    return (q ** m - (-r / p) ** m) / m


# --- symmetrisation ---------------------------------------------------------

@dataclass(frozen=True)
class SymCoefficients:
    A: float
    B: float
    C: float
    D: np.ndarray
    E: np.ndarray
    truncation_error: float
    kmax: int

    def E_m(self, m: int) -> float:
        return float(self.E[m - 1])

    def log_modulus_sq(self, z) -> np.ndarray:
        """2 sum_m E_m (cos mz - 1), i.e. log|rho^(z)|^2 up to truncation."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        m = np.arange(1, self.E.size + 1)
        return 2.0 * (np.cos(np.outer(z, m)) - 1.0) @ self.E


def _tailsum(x: float, n: int) -> float:
    """Upper bound on sum_{k>n} x**k / k."""
    if x <= 0.0:
        return 0.0
    return x ** (n + 1) / ((n + 1) * (1.0 - x))


def sym_coefficients(params: ModelParams, mmax: Optional[int] = None, tol: float = 1e-12) -> SymCoefficients:
    """A, B, C, D_k and E_m for log|rho^(z)|^2 = 2 sum_m E_m (cos mz - 1).

    All the D_k with k <= kmax are used, kmax being the first index with
    4 * sum_{k>kmax} (A**k + B**k) / k below ``tol``; since
    sum_m binom(k, (k-m)/2) <= 2**k, that bounds the total error of the
    reconstructed log|rho^|^2. ``truncation_error`` also covers dropping
    E_m for m > mmax.
    """
    p, q, r = _pqr(params)
    if not q > 0 or not p > 0:
        raise ValueError("symmetrisation coefficients need p > 0 and q > 0")
    if p == r:
        raise DegenerateAB("p = r gives A = 1: log(1 + A cos z) is singular at z = pi")
    p, q, r = float(p), float(q), float(r)
    A = 2.0 * p * r / (p * p + r * r)
    B = 2.0 * q / (1.0 + q * q)
    C = (p * p + r * r) / (1.0 + q * q)

    def bound(n):
        return 4.0 * (_tailsum(A, n) + _tailsum(B, n))

    kmax = 8
    while bound(kmax) >= tol and kmax < SYM_KMAX_CAP:
        kmax = int(kmax * 1.25) + 1
    if mmax is None:
        mmax = kmax
    kmax = max(kmax, mmax)
    E = kernels.sym_series(A, B, kmax, mmax)
    k = np.arange(1, kmax + 1, dtype=float)
    with np.errstate(under="ignore", over="ignore"):
        D = (-((-A) ** k) + B ** k) / (k * 2.0 ** k)
    err = bound(kmax) if mmax >= kmax else bound(kmax) + bound(mmax)
    # weight of the (k, m) pairs the kernel skips, summed over m
    err += 2.0 * math.exp(-kernels.SKIP_LOG) * (1.0 / (1.0 - A) + 1.0 / (1.0 - B))
    # rounding in the log-space terms, relative to sum_k (A**k + B**k) / k
    err += 64.0 * np.finfo(float).eps * (math.log1p(1.0 / (1.0 - A)) + math.log1p(1.0 / (1.0 - B)))
    return SymCoefficients(A, B, C, D, E, float(err), kmax)
