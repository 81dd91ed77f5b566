"""Jump-by-jump simulation of the bivariate compound Poisson process (N_t, Y_t).

Jumps arrive at rate u + v + w with i.i.d. marks (1,0), (0,1), (1,1) of
probabilities (p, q, r). Y at the first N-jump has law rho, and
sum over Y-jumps of c**-N_{s-} has law mu; the validators check both claims
against the analytic side.
"""

from __future__ import annotations

import io
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import stats

from . import kernels
from .mu import default_depth, draw_series, make_rng, mu_mean
from .params import RawRates, as_c, normalize
from .rho import default_kmax, rho_mean, rho_pmf

MARKS = ((1, 0), (0, 1), (1, 1))

# Acceptance thresholds for the stochastic validators. At the default sample
# sizes the TV check fails with probability far below 1e-6; the KS and mean
# checks fail with probability about 1e-3 and 6e-5 respectively under the null.
STOCHASTIC_THRESHOLDS = {
    "tv_max": 0.005,
    "ks_pvalue_min": 1e-3,
    "mean_z_max": 4.0,
}

PATH_CHUNK = 1 << 16
INNOVATION_STREAM = 1
SERIES_PATH_STREAM = 2
SERIES_MU_STREAM = 3


@dataclass(frozen=True)
class JumpRecord:
    time: float
    mark: Tuple[int, int]


@dataclass(frozen=True)
class PathResult:
    y_at_T: int
    partial_integral: float
    jumps_used: int
    truncation_bound: float
    jumps: tuple = field(default=(), repr=False)

    def to_csv(self, c) -> str:
        """One row per jump: time, mark, N, Y, running integral."""
        c = as_c(c).value
        buf = io.StringIO()
        buf.write("time,mark,N,Y,integral\n")
        n = y = 0
        integral = 0.0
        for j in self.jumps:
            dn, dy = j.mark
            if dy:
                integral += c ** -n
            n += dn
            y += dy
            buf.write(f"{j.time!r},{dn}{dy},{n},{y},{integral!r}\n")
        return buf.getvalue()


def _mark_probs(raw: RawRates):
    return raw.probabilities()


def _codes(rng, size: int, p: float, q: float) -> np.ndarray:
    u = rng.random(size)
    return np.where(u < p, 0, np.where(u < p + q, 1, 2)).astype(np.int8)


def _remainder_bound(p, q, r, c, horizon) -> float:
    mean = r if q == 0.0 else (1.0 + r / q) * q / (1.0 - q)
    return c ** -horizon * mean * c / (c - 1.0)


def simulate_path(raw: RawRates, c, n_jump_horizon: int, seed: int, record: bool = True) -> PathResult:
    """One path, event by event, until N has jumped ``n_jump_horizon`` times.

    Works for r = 1 (every jump joint) as a diagnostic, although that law is
    degenerate and rejected by :class:`~gouq.params.ModelParams`.
    """
    if n_jump_horizon < 1:
        raise ValueError("horizon must be at least one N-jump")
    c = as_c(c).value
    p, q, r = _mark_probs(raw)
    rate = raw.total
    rng = make_rng(seed)
    t = 0.0
    n = y = used = 0
    y_at_T = None
    integral = 0.0
    jumps = []
    while n < n_jump_horizon:
        t += rng.exponential(1.0 / rate)
        u = rng.random()
        code = 0 if u < p else (1 if u < p + q else 2)
        dn, dy = MARKS[code]
        if dy:
            integral += c ** -n
            y += 1
        n += dn
        used += 1
        if dn and y_at_T is None:
            y_at_T = y
        if record:
            jumps.append(JumpRecord(t, MARKS[code]))
    return PathResult(y_at_T, integral, used, _remainder_bound(p, q, r, c, n_jump_horizon), tuple(jumps))


def simulate_batch(raw: RawRates, c, horizon: int, npaths: int, seed: int, stream: int = 0):
    """Y_T and the partial integral for ``npaths`` independent paths (times are not needed)."""
    c = as_c(c).value
    p, q, r = _mark_probs(raw)
    rng = make_rng(seed, stream)
    pw = c ** -np.arange(horizon, dtype=float)
    y_out = np.empty(npaths, dtype=np.int64)
    i_out = np.empty(npaths)
    per_path = horizon / (p + r)
    for start in range(0, npaths, PATH_CHUNK):
        count = min(PATH_CHUNK, npaths - start)
        expect = count * per_path
        codes = _codes(rng, int(expect + 6.0 * math.sqrt(expect * (1.0 + 1.0 / (p + r))) + 64), p, q)
        while True:
            y_t, integ, _, done = kernels.paths_from_marks(codes, horizon, pw, count)
            if done == count:
                break
            codes = np.concatenate([codes, _codes(rng, max(64, codes.size // 4), p, q)])
        y_out[start:start + count] = y_t
        i_out[start:start + count] = integ
    return y_out, i_out


@dataclass(frozen=True)
class InnovationReport:
    n: int
    tv: float
    chi2: float
    dof: int
    chi2_pvalue: float
    mass0: float
    p: float
    mass0_z: float
    max_y: int
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _chi2_cells(counts: np.ndarray, probs: np.ndarray, n: int):
    """Pool neighbouring cells until each expects at least 5; the tail beyond probs is one more cell."""
    obs, exp = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(counts[: probs.size], n * probs):
        acc_o += o
        acc_e += e
        if acc_e >= 5.0:
            obs.append(acc_o)
            exp.append(acc_e)
            acc_o = acc_e = 0.0
    acc_o += n - sum(obs) - acc_o
    acc_e += n - sum(exp) - acc_e
    if obs and acc_e < 5.0:
        obs[-1] += acc_o
        exp[-1] += acc_e
    else:
        obs.append(acc_o)
        exp.append(acc_e)
    return np.array(obs, dtype=float), np.array(exp)


def validate_innovation_law(raw: RawRates, c, nsamples: int, seed: int) -> InnovationReport:
    """Empirical law of Y_T from simulated paths against the pmf of rho."""
    params = normalize(raw, c)
    y_t, _ = simulate_batch(raw, c, 1, nsamples, seed, INNOVATION_STREAM)
    max_y = int(y_t.max())
    kmax = max(max_y, default_kmax(params.q))
    pmf = rho_pmf(params, kmax)
    probs = pmf.dense(kmax)
    counts = np.bincount(y_t, minlength=kmax + 1).astype(float)
    emp = counts / nsamples
    tv = 0.5 * (float(np.abs(emp - probs).sum()) + pmf.truncation_tail)
    obs, exp = _chi2_cells(counts, probs, nsamples)
    if obs.size > 1:
        chi2, pval = stats.chisquare(obs, exp)
    else:
        chi2, pval = 0.0, 1.0
    p = params.p
    se = math.sqrt(p * (1.0 - p) / nsamples) if 0.0 < p < 1.0 else 0.0
    z = (emp[0] - p) / se if se > 0 else (0.0 if emp[0] == p else math.inf)
    passed = bool(tv < STOCHASTIC_THRESHOLDS["tv_max"] and abs(z) <= STOCHASTIC_THRESHOLDS["mean_z_max"])
    return InnovationReport(nsamples, tv, float(chi2), int(obs.size - 1), float(pval), float(emp[0]), p, float(z), max_y, passed)


@dataclass(frozen=True)
class SeriesReport:
    n: int
    horizon: int
    ks_statistic: float
    ks_pvalue: float
    mean_paths: float
    mean_series: float
    mu_mean: float
    z_paths: float
    z_series: float
    degenerate: bool
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def validate_series_equivalence(raw: RawRates, c, nsamples: int, seed: int) -> SeriesReport:
    """Two-sample KS between path integrals and direct series draws, plus mean checks."""
    cval = as_c(c).value
    p, q, r = _mark_probs(raw)
    degenerate = p + q == 0.0
    horizon = default_depth(cval) + 1
    _, paths = simulate_batch(raw, c, horizon, nsamples, seed, SERIES_PATH_STREAM)
    series = draw_series(p, q, r, cval, horizon, nsamples, make_rng(seed, SERIES_MU_STREAM))
    ks = stats.ks_2samp(paths, series)
    if degenerate:
        target = cval / (cval - 1.0)
    else:
        target = mu_mean(normalize(raw, c))

    def z(x):
        se = float(np.std(x, ddof=1)) / math.sqrt(x.size)
        diff = float(np.mean(x)) - target
        if se == 0.0:
            return 0.0 if abs(diff) < 1e-9 * max(1.0, target) else math.inf
        return diff / se

    zp, zs = z(paths), z(series)
    pval = float(ks.pvalue)
    passed = bool(
        pval > STOCHASTIC_THRESHOLDS["ks_pvalue_min"]
        and abs(zp) <= STOCHASTIC_THRESHOLDS["mean_z_max"]
        and abs(zs) <= STOCHASTIC_THRESHOLDS["mean_z_max"]
    )
    return SeriesReport(nsamples, horizon, float(ks.statistic), pval, float(np.mean(paths)),
                        float(np.mean(series)), target, zp, zs, degenerate, passed)
