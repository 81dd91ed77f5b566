"""Hot inner loops, each in a numba and a pure-numpy flavour.

The public functions dispatch on :func:`gouq._accel.backend`. Both flavours
consume identical inputs (random numbers are drawn by the callers), so they
agree to rounding.
"""

import math

import numpy as np

from . import _accel
from ._accel import njit

LN2 = math.log(2.0)
# binom(k, (k-m)/2) / 2**k <= exp(-m**2 / (2k)) (Hoeffding), so pairs with
# m**2 > 2 * SKIP_LOG * k carry relative weight below exp(-SKIP_LOG) and are skipped
SKIP_LOG = 60.0


# --- symmetrisation coefficients -------------------------------------------

def _log_fact_table(kmax):
    out = np.empty(kmax + 1)
    for n in range(kmax + 1):
        out[n] = math.lgamma(n + 1.0)
    return out


@njit
def _first_k(m):
    k = max(m, int(math.ceil(m * m / (2.0 * SKIP_LOG))))
    return k + ((k - m) % 2)


@njit
def _sym_series_nb(A, B, kmax, mmax, lf):
    lnA = math.log(A) if A > 0.0 else -np.inf
    lnB = math.log(B)
    E = np.zeros(mmax)
    for m in range(1, mmax + 1):
        s = 0.0
        k = _first_k(m)
        h = (k - m) // 2
        while k <= kmax:
            lw = lf[k] - lf[h] - lf[k - h] - k * LN2 - math.log(k)
            tb = math.exp(lw + k * lnB)
            ta = math.exp(lw + k * lnA) if A > 0.0 else 0.0
            if k % 2 == 1:
                s += tb + ta
            else:
                s += tb - ta
            k += 2
            h += 1
        E[m - 1] = s
    return E


def _sym_series_np(A, B, kmax, mmax, lf):
    lnA = math.log(A) if A > 0.0 else -np.inf
    lnB = math.log(B)
    E = np.zeros(mmax)
    for m in range(1, mmax + 1):
        k = np.arange(_first_k(m), kmax + 1, 2)
        if k.size == 0:
            continue
        h = (k - m) // 2
        lw = lf[k] - lf[h] - lf[k - h] - k * LN2 - np.log(k)
        tb = np.exp(lw + k * lnB)
        ta = np.exp(lw + k * lnA) if A > 0.0 else np.zeros_like(tb)
        E[m - 1] = np.sum(tb + ta) if m % 2 == 1 else np.sum(tb - ta)
    return E


def sym_series(A: float, B: float, kmax: int, mmax: int) -> np.ndarray:
    """E_m for m = 1..mmax from the binomially weighted D_k, k <= kmax.

    Each term D_k * binom(k, (k-m)/2) is formed in log space; direct evaluation
    overflows the binomial long before the power of A or B underflows.
    """
    lf = _log_fact_table(kmax)
    if _accel.backend() == "numba":
        return _sym_series_nb(float(A), float(B), int(kmax), int(mmax), lf)
    return _sym_series_np(float(A), float(B), int(kmax), int(mmax), lf)


# --- mark streams -> per-path Y_T and partial integral ----------------------
# mark codes: 0 = (1,0), 1 = (0,1), 2 = (1,1)

@njit
def _paths_from_marks_nb(codes, horizon, pw, npaths):
    y_t = np.zeros(npaths, dtype=np.int64)
    integ = np.zeros(npaths)
    path = 0
    n = 0
    i = 0
    size = codes.shape[0]
    while path < npaths and i < size:
        cd = codes[i]
        if cd != 0:
            integ[path] += pw[n]
            if n == 0:
                y_t[path] += 1
        if cd != 1:
            n += 1
            if n == horizon:
                path += 1
                n = 0
        i += 1
    return y_t, integ, i, path


def _paths_from_marks_np(codes, horizon, pw, npaths):
    is_y = codes != 0
    is_n = codes != 1
    cum_n = np.cumsum(is_n, dtype=np.int64)
    need = npaths * horizon
    if cum_n.size == 0 or cum_n[-1] < need:
        done = int(cum_n[-1] // horizon) if cum_n.size else 0
        return np.zeros(npaths, dtype=np.int64), np.zeros(npaths), codes.shape[0], done
    end = int(np.searchsorted(cum_n, need)) + 1
    is_y, is_n, cum_n = is_y[:end], is_n[:end], cum_n[:end]
    before = cum_n - is_n
    path = before // horizon
    level = before - path * horizon
    y_path = path[is_y]
    y_level = level[is_y]
    y_t = np.bincount(y_path[y_level == 0], minlength=npaths).astype(np.int64)
    integ = np.bincount(y_path, weights=pw[y_level], minlength=npaths)
    return y_t, integ, end, npaths


def paths_from_marks(codes, horizon, pw, npaths):
    """Split a stream of jump marks into paths of ``horizon`` N-jumps each.

    Returns ``(y_at_T, integral, marks_used, paths_completed)``. ``y_at_T``
    counts Y-jumps up to and including the first N-jump; ``integral`` sums
    ``pw[N_before]`` over Y-jumps, ``pw[j] = c**-j``.
    """
    codes = np.ascontiguousarray(codes, dtype=np.int8)
    pw = np.ascontiguousarray(pw, dtype=np.float64)
    if _accel.backend() == "numba":
        return _paths_from_marks_nb(codes, int(horizon), pw, int(npaths))
    return _paths_from_marks_np(codes, int(horizon), pw, int(npaths))


# --- random series draws ----------------------------------------------------

@njit
def _series_draws_nb(v, p, q, r, pw):
    n, depth = v.shape
    out = np.zeros(n)
    tail = q + r
    lq = math.log(q) if q > 0.0 else 0.0
    for i in range(n):
        s = 0.0
        for j in range(depth):
            x = v[i, j]
            if x <= tail:
                if q > 0.0:
                    k = 1.0 + math.floor(math.log(x / tail) / lq)
                else:
                    k = 1.0
                s += pw[j] * k
        out[i] = s
    return out


def _series_draws_np(v, p, q, r, pw):
    tail = q + r
    hit = v <= tail
    if q > 0.0:
        with np.errstate(divide="ignore"):
            k = 1.0 + np.floor(np.log(v / tail) / math.log(q))
        u = np.where(hit, k, 0.0)
    else:
        u = hit.astype(np.float64)
    return u @ pw


def series_draws(v, p, q, r, pw):
    """Rows of ``sum_j pw[j] * U_j`` where U_j is the inverse-cdf image of ``v[:, j]``.

    ``v`` holds uniforms on (0, 1]. ``U >= k`` (k >= 1) has probability
    ``(q + r) * q**(k-1)``, so the inversion lands exactly on the lattice.
    """
    v = np.ascontiguousarray(v, dtype=np.float64)
    pw = np.ascontiguousarray(pw, dtype=np.float64)
    if _accel.backend() == "numba":
        return _series_draws_nb(v, float(p), float(q), float(r), pw)
    return _series_draws_np(v, float(p), float(q), float(r), pw)


# --- compound Poisson pmf recursion -----------------------------------------

@njit
def _cp_recursion_nb(p0, lam, kmax):
    out = np.zeros(kmax + 1)
    out[0] = p0
    for n in range(1, kmax + 1):
        s = 0.0
        for k in range(1, n + 1):
            s += lam[k] * out[n - k]
        out[n] = s / n
    return out


def _cp_recursion_np(p0, lam, kmax):
    out = np.zeros(kmax + 1)
    out[0] = p0
    for n in range(1, kmax + 1):
        out[n] = np.dot(lam[1:n + 1], out[n - 1::-1]) / n
    return out


def cp_recursion(p0: float, lam, kmax: int) -> np.ndarray:
    """pmf of a compound Poisson law on 0..kmax from ``n p_n = sum_k lam[k] p_{n-k}``.

    ``lam[k]`` is ``k`` times the Levy weight at k (``lam[0]`` is ignored).
    """
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    if lam.shape[0] < kmax + 1:
        raise ValueError("lam too short for kmax")
    if _accel.backend() == "numba":
        return _cp_recursion_nb(float(p0), lam, int(kmax))
    return _cp_recursion_np(float(p0), lam, int(kmax))
