"""Validated model parameters and the rate normalisation (u, v, w) -> (p, q, r)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Tuple, Union

from .errors import DegenerateModel, InvalidC, InvalidRate

Number = Union[int, float, Fraction, str]

SUM_TOL = 1e-12

__all__ = [
    "CValue",
    "ModelParams",
    "RawRates",
    "as_c",
    "degenerate_value",
    "normalize",
]


def _exact(x: Number) -> Optional[Fraction]:
    """Exact rational for ints, Fractions and decimal strings; None for floats."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    return None


@dataclass(frozen=True)
class CValue:
    """The scale c > 1 together with how exactly it is known.

    ``kind`` is one of ``"integer"``, ``"rational"``, ``"float"`` or
    ``"algebraic"``. Integer and rational values carry ``exact``; algebraic
    values carry ``poly``, integer coefficients of a monic polynomial with c as
    a root (highest degree first).
    """

    value: float
    kind: str
    exact: Optional[Fraction] = None
    poly: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if not self.value > 1.0:
            raise InvalidC(f"c must exceed 1, got {self.value!r}")
        if self.kind not in ("integer", "rational", "float", "algebraic"):
            raise ValueError(f"unknown exactness tag {self.kind!r}")

    @classmethod
    def rational(cls, num: int, den: int = 1) -> "CValue":
        if den == 0:
            raise InvalidC("zero denominator")
        frac = Fraction(num, den)
        if frac <= 1:
            raise InvalidC(f"c must exceed 1, got {frac}")
        kind = "integer" if frac.denominator == 1 else "rational"
        return cls(float(frac), kind, exact=frac)

    @classmethod
    def algebraic(cls, value: float, poly) -> "CValue":
        return cls(float(value), "algebraic", poly=tuple(int(a) for a in poly))

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    @property
    def log(self) -> float:
        return math.log(self.value)

    def to_dict(self) -> dict:
        out = {"value": self.value, "kind": self.kind}
        if self.exact is not None:
            out["num"] = self.exact.numerator
            out["den"] = self.exact.denominator
        if self.poly is not None:
            out["poly"] = list(self.poly)
        return out


def as_c(c) -> CValue:
    """Coerce ints, Fractions, floats and strings to a tagged :class:`CValue`.

    Strings holding an integer are exact; other decimal strings are taken as
    float approximations, since a typed-in decimal usually stands for an
    irrational scale such as e.
    """
    if isinstance(c, CValue):
        return c
    if isinstance(c, bool):
        raise TypeError("c must be numeric")
    if isinstance(c, Rational):
        frac = Fraction(c)
        return CValue.rational(frac.numerator, frac.denominator)
    if isinstance(c, str):
        s = c.strip()
        try:
            return CValue.rational(int(s))
        except ValueError:
            return CValue(float(s), "float")
    return CValue(float(c), "float")


def degenerate_value(c) -> float:
    """Point mass location c/(c-1) of the law when every jump is joint."""
    c = as_c(c)
    if c.exact is not None:
        return float(c.exact / (c.exact - 1))
    return c.value / (c.value - 1.0)


@dataclass(frozen=True)
class RawRates:
    """Jump intensities: u for (1,0), v for (0,1), w for (1,1) jumps."""

    u: Number
    v: Number
    w: Number

    def __post_init__(self):
        vals = [self.u, self.v, self.w]
        exact = [_exact(x) for x in vals]
        nums = [float(e) if e is not None else float(x) for e, x in zip(exact, vals)]
        if any(not math.isfinite(x) or x < 0 for x in nums):
            raise InvalidRate(f"rates must be finite and nonnegative, got {nums}")
        u, v, w = nums
        if u + w <= 0:
            raise InvalidRate("u + w must be positive (N needs jumps)")
        if v + w <= 0:
            raise InvalidRate("v + w must be positive (Y needs jumps)")

    @property
    def total(self) -> float:
        return float(self.u) + float(self.v) + float(self.w)

    def probabilities(self) -> Tuple[float, float, float]:
        """(p, q, r) without the non-degeneracy check; used by simulation diagnostics."""
        s = self.total
        return float(self.u) / s, float(self.v) / s, float(self.w) / s


@dataclass(frozen=True)
class ModelParams:
    """Validated (c, p, q, r).

    ``exact`` holds (p, q, r) as Fractions when every input was rational, so
    threshold comparisons can be made without rounding.
    """

    c: CValue
    p: float
    q: float
    r: float
    exact: Optional[Tuple[Fraction, Fraction, Fraction]] = None

    @classmethod
    def create(cls, c, *, p: Number = None, q: Number = None, r: Number = None) -> "ModelParams":
        """Build from any two (or all three) of p, q, r."""
        c = as_c(c)
        given = {"p": p, "q": q, "r": r}
        missing = [k for k, x in given.items() if x is None]
        if len(missing) > 1:
            raise InvalidRate("need at least two of p, q, r")
        exact = {k: _exact(x) for k, x in given.items() if x is not None}
        if all(e is not None for e in exact.values()):
            if missing:
                exact[missing[0]] = 1 - sum(exact.values())
            trip = (exact["p"], exact["q"], exact["r"])
            if sum(trip) != 1:
                raise InvalidRate(f"p + q + r must equal 1, got {sum(trip)}")
            _check(*(float(x) for x in trip), exact=trip)
            return cls(c, *(float(x) for x in trip), exact=trip)
        vals = {k: float(x) for k, x in given.items() if x is not None}
        if missing:
            vals[missing[0]] = 1.0 - sum(vals.values())
        trip = [vals["p"], vals["q"], vals["r"]]
        if any(not math.isfinite(x) for x in trip):
            raise InvalidRate("p, q, r must be finite")
        if any(x < -SUM_TOL for x in trip):
            raise InvalidRate(f"p, q, r must be nonnegative, got {trip}")
        trip = [max(x, 0.0) for x in trip]
        total = sum(trip)
        if abs(total - 1.0) > SUM_TOL:
            raise InvalidRate(f"p + q + r must equal 1, got {total!r}")
        trip = [x / total for x in trip]
        _check(*trip)
        return cls(c, *trip)

    @property
    def pq(self) -> float:
        return self.p * self.q

    def with_c(self, c) -> "ModelParams":
        return ModelParams(as_c(c), self.p, self.q, self.r, self.exact)

    def to_dict(self) -> dict:
        out = {"c": self.c.to_dict(), "p": self.p, "q": self.q, "r": self.r}
        if self.exact is not None:
            out["exact"] = [str(x) for x in self.exact]
        return out


def _check(p: float, q: float, r: float, exact=None) -> None:
    vals = exact if exact is not None else (p, q, r)
    ep, eq, er = vals
    if any(x < 0 or x > 1 for x in vals):
        raise InvalidRate(f"p, q, r must lie in [0, 1], got {(p, q, r)}")
    if ep + er <= 0:
        raise InvalidRate("p + r must be positive")
    if eq + er <= 0:
        raise InvalidRate("q + r must be positive")
    if ep + eq <= 0:
        raise DegenerateModel("r = 1: the stationary law is a point mass at c/(c-1)")


def normalize(raw: RawRates, c) -> ModelParams:
    """Convert jump intensities to probabilities (p, q, r) = (u, v, w) / (u + v + w)."""
    c = as_c(c)
    exact = [_exact(x) for x in (raw.u, raw.v, raw.w)]
    if all(e is not None for e in exact):
        s = sum(exact)
        trip = tuple(e / s for e in exact)
        _check(*(float(x) for x in trip), exact=trip)
        return ModelParams(c, *(float(x) for x in trip), exact=trip)
    s = raw.total
    trip = (float(raw.u) / s, float(raw.v) / s, float(raw.w) / s)
    _check(*trip)
    return ModelParams(c, *trip)
