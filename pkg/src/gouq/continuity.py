"""Continuous-singular versus absolutely continuous.

Pisot certification of c, the entropy bound dim(mu) <= H(rho) / log c, the
verdict that combines them, the time threshold below which mu^{t*} is
certainly singular, and the Erdos-style non-decay witness for |mu^(2 pi c^k)|.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import mpmath
import numpy as np

from .divisibility import _pqr, rho_is_id, sym_coefficients
from .errors import NotInfinitelyDivisible, NotPisot, QZero, UncertifiedRoots
from .params import CValue, ModelParams, as_c
from .rho import rho_cf, rho_entropy, rho_mean, rho_power_entropy

MP_DPS = 50
C_MATCH_TOL = 1e-9
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
PLASTIC = 1.3247179572447460
T_LOW_FLOOR = 1e-6
T_HI_CAP = 2.0 ** 16


# --- Pisot certificates --------------------------------------------------------

def _normalise_poly(poly: Sequence[int]) -> List[int]:
    coeffs = [int(a) for a in poly]
    if any(a != b for a, b in zip(coeffs, poly)):
        raise ValueError("polynomial coefficients must be integers")
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if len(coeffs) < 2:
        raise ValueError("polynomial must have degree at least 1")
    g = 0
    for a in coeffs:
        g = math.gcd(g, a)
    coeffs = [a // g for a in coeffs]
    if coeffs[0] < 0:
        coeffs = [-a for a in coeffs]
    return coeffs


def _radius(coeffs, z) -> float:
    """Inclusion radius deg * |F(z)| / |F'(z)|: some root of F lies within it of z."""
    with mpmath.workdps(MP_DPS):
        zz = mpmath.mpc(z.real, z.imag)
        val = mpmath.polyval(coeffs, zz)
        der = mpmath.polyval([a * (len(coeffs) - 1 - i) for i, a in enumerate(coeffs[:-1])], zz)
        if der == 0:
            return math.inf
        return float((len(coeffs) - 1) * abs(val) / abs(der)) + 1e-300


def _polish(coeffs, z0: complex, steps: int = 8) -> complex:
    with mpmath.workdps(MP_DPS):
        z = mpmath.mpc(z0.real, z0.imag)
        dcoeffs = [a * (len(coeffs) - 1 - i) for i, a in enumerate(coeffs[:-1])]
        for _ in range(steps):
            d = mpmath.polyval(dcoeffs, z)
            if d == 0:
                break
            z = z - mpmath.polyval(coeffs, z) / d
        return complex(z)


@dataclass(frozen=True)
class PisotCertificate:
    """Monic integer polynomial with c as its only root outside the open unit disc.

    ``radii[j]`` bounds the distance from ``roots[j]`` to a true root; the
    discs are pairwise disjoint, so each holds exactly one simple root.
    ``delta`` is the largest certified modulus among the conjugates.
    """

    c: float
    poly: tuple
    roots: tuple
    radii: tuple
    principal_root_index: int
    delta: float

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    def conjugates(self):
        return [z for j, z in enumerate(self.roots) if j != self.principal_root_index]

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "poly": list(self.poly),
            "roots": [[z.real, z.imag] for z in self.roots],
            "radii": list(self.radii),
            "principal_root_index": self.principal_root_index,
            "delta": self.delta,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def certify_pisot(c, poly: Sequence[int]) -> PisotCertificate:
    """Certify that c is a Pisot (P.V.) number using the monic integer polynomial ``poly``.

    ``poly`` lists coefficients from the highest degree down. Roots come from
    the companion matrix, are Newton-polished at 50 digits, and get a
    posteriori inclusion radii. Thin margins raise :class:`UncertifiedRoots`
    rather than guessing.
    """
    exact = None
    if isinstance(c, CValue):
        exact, c = c.exact, c.value
    elif isinstance(c, (int, Fraction)):
        exact = Fraction(c)
    coeffs = _normalise_poly(poly)
    if coeffs[0] != 1:
        raise NotPisot(f"polynomial {coeffs} is not monic after removing its content")
    if exact is not None and exact.denominator != 1:
        raise NotPisot(f"{exact} is rational but not an integer, hence not an algebraic integer")
    c = float(c)
    deg = len(coeffs) - 1
    if deg == 1:
        raw = [complex(-coeffs[1], 0.0)]
    else:
        comp = np.zeros((deg, deg))
        comp[0, :] = -np.array(coeffs[1:], dtype=float)
        comp[1:, :-1] = np.eye(deg - 1)
        raw = list(np.linalg.eigvals(comp))
    roots = [_polish(coeffs, complex(z)) for z in raw]
    radii = [_radius(coeffs, z) for z in roots]
    for i in range(deg):
        for j in range(i + 1, deg):
            if abs(roots[i] - roots[j]) <= radii[i] + radii[j]:
                raise UncertifiedRoots("root inclusion discs overlap (multiple or clustered roots)")
    match = [
        j for j, z in enumerate(roots)
        if abs(z - c) <= radii[j] + C_MATCH_TOL * max(1.0, abs(c))
    ]
    if not match:
        raise NotPisot(f"c = {c!r} is not a root of {coeffs}")
    principal = match[0]
    z = roots[principal]
    if abs(z.imag) > radii[principal] or not z.real - radii[principal] > 1.0:
        raise NotPisot("the matching root is not a real number greater than 1")
    delta = 0.0
    for j, (w, rad) in enumerate(zip(roots, radii)):
        if j == principal:
            continue
        if abs(w) - rad >= 1.0:
            raise NotPisot(f"conjugate {w} has modulus >= 1")
        if abs(w) + rad >= 1.0:
            raise UncertifiedRoots(f"conjugate {w} is within its error radius of the unit circle")
        delta = max(delta, abs(w) + rad)
    # the real conjugate pair structure makes the principal root real; store it as such
    roots[principal] = complex(z.real, 0.0)
    return PisotCertificate(c, tuple(coeffs), tuple(roots), tuple(radii), principal, delta)


def exact_power_sums(poly: Sequence[int], nmax: int) -> List[int]:
    """sum_j alpha_j**n for n = 1..nmax over the roots of a monic integer polynomial (Newton's identities)."""
    coeffs = _normalise_poly(poly)
    if coeffs[0] != 1:
        raise ValueError("polynomial must be monic")
    d = len(coeffs) - 1
    e = coeffs[1:]  # e[i] multiplies x**(d-1-i)
    sums = [0] * (nmax + 1)
    for n in range(1, nmax + 1):
        s = 0
        for i in range(1, min(n - 1, d) + 1):
            s += e[i - 1] * sums[n - i]
        if n <= d:
            s += n * e[n - 1]
        sums[n] = -s
    return sums[1:]


def trace_identity_check(cert: PisotCertificate, nmax: int = 30):
    """Compare numerical power sums of the certified roots with the exact integers.

    Returns ``(n, exact, numeric, bound, ok)`` rows, where ``bound`` is the
    worst-case change of sum_j z_j**n when every root moves within its radius.
    """
    exact = exact_power_sums(cert.poly, nmax)
    rows = []
    with mpmath.workdps(MP_DPS):
        zs = [mpmath.mpc(z.real, z.imag) for z in cert.roots]
        for n in range(1, nmax + 1):
            num = sum(z ** n for z in zs)
            # (a + h)**n - a**n <= n h (a + h)**(n-1)
            bound = sum(n * rad * (abs(z) + rad) ** (n - 1) for z, rad in zip(cert.roots, cert.radii))
            err = float(abs(num - exact[n - 1]))
            rows.append((n, exact[n - 1], complex(num), bound, err <= bound + 1e-30))
    return rows


def catalog_certificate(c) -> Optional[PisotCertificate]:
    """Certificate for integers >= 2, for c carrying its own polynomial, or for the golden ratio and plastic number."""
    c = as_c(c)
    try:
        if c.kind == "integer":
            return certify_pisot(c, [1, -int(c.exact)])
        if c.kind == "algebraic":
            return certify_pisot(c.value, c.poly)
        if c.kind == "float":
            if abs(c.value - GOLDEN) < 1e-12:
                return certify_pisot(c.value, [1, -1, -1])
            if abs(c.value - PLASTIC) < 1e-12:
                return certify_pisot(c.value, [1, 0, -1, -1])
    except (NotPisot, UncertifiedRoots):
        return None
    return None


# --- entropy bound and verdict ---------------------------------------------------

class ContinuityDecision(str, enum.Enum):
    CONTINUOUS_SINGULAR = "ContinuousSingular"
    ABSOLUTELY_CONTINUOUS = "AbsolutelyContinuous"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class ContinuityVerdict:
    decision: ContinuityDecision
    rule: str
    numbers: dict
    reasons: tuple = ()

    def to_dict(self) -> dict:
        return {
            "decision": self.decision.value,
            "rule": self.rule,
            "numbers": self.numbers,
            "reasons": list(self.reasons),
        }


def dim_bound(params: ModelParams) -> float:
    """H(rho) / log c, an upper bound on the Hausdorff dimension of mu."""
    if params.q == 0.0:
        raise QZero("q = 0 is the Bernoulli convolution case; the bound does not apply")
    return rho_entropy(params) / params.c.log


def small_q_threshold(c) -> float:
    """1 - log 2 / log c: for r = 0 and 0 < q below this, mu is singular."""
    return 1.0 - math.log(2.0) / as_c(c).log


def classify_continuity(params: ModelParams, pisot: Optional[PisotCertificate] = None,
                        ps_assumption: bool = False) -> ContinuityVerdict:
    """Rule order: Pisot c, then the entropy bound, then (optionally) the P.S. hypothesis shape.

    Without a passed certificate the small built-in catalog is consulted.
    Absolute continuity is never concluded: the P.S. route needs an explicit
    P.S. number, and none is known.
    """
    c = params.c
    H = rho_entropy(params)
    numbers = {"entropy": H, "log_c": c.log, "dim_bound": H / c.log if params.q > 0 else None}
    if params.q == 0.0:
        return ContinuityVerdict(ContinuityDecision.UNDETERMINED, "bernoulli-convolution-open", numbers)
    if pisot is not None:
        if abs(pisot.c - c.value) > C_MATCH_TOL * c.value:
            raise ValueError(f"certificate is for c={pisot.c}, not {c.value}")
    else:
        pisot = catalog_certificate(c)
    if pisot is not None:
        numbers["pisot_poly"] = list(pisot.poly)
        return ContinuityVerdict(ContinuityDecision.CONTINUOUS_SINGULAR, "pisot", numbers)
    if numbers["dim_bound"] < 1.0:
        reasons = []
        if params.r == 0.0 and params.q <= small_q_threshold(c):
            reasons.append("small-q")
        return ContinuityVerdict(ContinuityDecision.CONTINUOUS_SINGULAR, "dim-bound", numbers, tuple(reasons))
    if ps_assumption and rho_is_id(params):
        return ContinuityVerdict(
            ContinuityDecision.UNDETERMINED,
            "ps-assumption-consistent",
            numbers,
            ("absolutely continuous for q close enough to 1 if 1/c is a P.S. number; the margin is not computable",),
        )
    return ContinuityVerdict(ContinuityDecision.UNDETERMINED, "no-criterion", numbers)


# --- time evolution ----------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdResult:
    """``t_low``: mu^{t*} is continuous-singular for every t < t_low."""

    t_low: float
    rule: str
    trace: tuple = field(default=(), compare=False)

    def to_dict(self) -> dict:
        return {"t_low": self.t_low, "rule": self.rule, "trace": [list(x) for x in self.trace]}


def power_singularity_threshold(params: ModelParams, pisot: Optional[PisotCertificate] = None,
                                tol: float = 1e-11) -> ThresholdResult:
    """Largest t with H(rho^{t*}) < log c, by bisection on the increasing entropy.

    With an explicit Pisot certificate every t qualifies and +inf is returned.
    If H stays below log c up to t = 2**16 the result is +inf with rule
    ``"cap-reached"`` (inconclusive beyond the cap).
    """
    if not rho_is_id(params):
        raise NotInfinitelyDivisible("mu^{t*} is only defined when mu is infinitely divisible")
    if pisot is not None:
        return ThresholdResult(math.inf, "pisot")
    target = params.c.log
    trace = []

    def H(t):
        h = rho_power_entropy(params, t).entropy
        trace.append((t, h))
        return h

    lo = T_LOW_FLOOR
    while H(lo) >= target:
        lo /= 2.0
        if lo < 1e-300:
            return ThresholdResult(0.0, "no-singular-range", tuple(trace))
    hi = 1.0
    while H(hi) < target:
        lo = hi
        hi *= 2.0
        if hi > T_HI_CAP:
            return ThresholdResult(math.inf, "cap-reached", tuple(trace))
    while hi - lo > 1e-15 * hi:
        mid = 0.5 * (lo + hi)
        h = H(mid)
        if h < target:
            lo = mid
        else:
            hi = mid
        if abs(h - target) <= tol:
            if h < target:
                lo = mid
            break
    return ThresholdResult(lo, "entropy-bisection", tuple(trace))


# --- Erdos non-decay witness -----------------------------------------------------------

@dataclass(frozen=True)
class WitnessPoint:
    k: int
    z: float
    value: float
    lower_bound: Optional[float]


def _reduced_angles(c: float, k: int, cert: Optional[PisotCertificate]) -> np.ndarray:
    """Angles 2 pi c**j for j = k, k-1, ..., 0 reduced mod 2 pi.

    For Pisot c, c**j = trace_j - sum of conjugate powers, so the angle is
    -2 pi times that (small) conjugate sum: no catastrophic cancellation.
    """
    if cert is None:
        return 2.0 * math.pi * c ** np.arange(k, -1, -1, dtype=float)
    conj = np.array(cert.conjugates(), dtype=complex)
    out = np.empty(k + 1)
    for idx, j in enumerate(range(k, -1, -1)):
        eps = float(np.sum(conj ** j).real) if conj.size else 0.0
        out[idx] = -2.0 * math.pi * eps
    return out


def _abs_cf_at(params: ModelParams, angles_pos: np.ndarray, c: float) -> float:
    cf = rho_cf(params)
    val = np.prod(cf(angles_pos))
    # levels below zero: arguments 2 pi c**-j, j >= 1
    mean = rho_mean(params)
    j = 1
    while True:
        x = 2.0 * math.pi * c ** -j
        if mean * x / (1.0 - 1.0 / c) < 1e-16:
            break
        val *= cf(x)
        j += 1
    return float(abs(val))


def _second_moment_weight(params: ModelParams) -> float:
    """sum_m w_m m**2 for the weights controlling |mu^|: a_m, or E_m^+ when r > pq."""
    p, q, r = params.p, params.q, params.r
    if p == 0.0:
        return q / (1.0 - q) ** 2
    if rho_is_id(params):
        s = r / p
        return q / (1.0 - q) ** 2 + s / (1.0 + s) ** 2
    sym = sym_coefficients(params)
    m = np.arange(1, sym.E.size + 1, dtype=float)
    head = float(np.sum(np.maximum(sym.E, 0.0) * m * m))
    tail = 0.0
    K = sym.kmax
    for x in (sym.A, sym.B):
        # sum_{k>K} (k/2) x**k
        tail += 0.5 * x ** (K + 1) * ((K + 1) / (1.0 - x) + x / (1.0 - x) ** 2)
    return head + 2.0 * tail


def erdos_witness(params: ModelParams, cert: Optional[PisotCertificate], kmax: int = 12) -> List[WitnessPoint]:
    """|mu^(2 pi c**k)| for k = 1..kmax, with the uniform lower bound when c is certified Pisot.

    The bound is exp(-2 pi**2 W ((d-1)**2 / (1 - delta**2) + 1 / (c**2 - 1))),
    W = sum_m w_m m**2, from 1 - cos x <= x**2 / 2 and
    |c**n - trace_n| <= (d-1) delta**n.
    """
    if params.q == 0.0:
        raise QZero("the witness needs q > 0")
    p, _, r = _pqr(params)
    c = params.c.value
    lower = None
    if cert is not None:
        if not rho_is_id(params) and p == r:
            lower = None
        else:
            W = _second_moment_weight(params)
            d = cert.degree
            geo = (d - 1) ** 2 / (1.0 - cert.delta ** 2) if d > 1 else 0.0
            lower = math.exp(-2.0 * math.pi ** 2 * W * (geo + 1.0 / (c * c - 1.0)))
    out = []
    for k in range(1, kmax + 1):
        angles = _reduced_angles(c, k, cert)
        value = _abs_cf_at(params, angles, c)
        out.append(WitnessPoint(k, 2.0 * math.pi * c ** k, value, lower))
    return out
