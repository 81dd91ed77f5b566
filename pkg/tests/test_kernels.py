"""The numba and pure-numpy kernels must agree."""

import numpy as np
import pytest

from gouq import _accel, kernels
from gouq.divisibility import sym_coefficients
from gouq.params import ModelParams, RawRates
from gouq.rho import rho_power_pmf
from gouq.simulate import simulate_batch, validate_innovation_law

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def both(fn):
    out = {}
    for name in ("numba", "numpy"):
        prev = _accel.set_backend(name)
        try:
            out[name] = fn()
        finally:
            _accel.set_backend(prev)
    return out["numba"], out["numpy"]


@needs_numba
@pytest.mark.parametrize("A,B", [(0.3, 0.8), (0.0, 0.5), (0.99, 0.2)])
def test_sym_series_agree(A, B):
    a, b = both(lambda: kernels.sym_series(A, B, 600, 300))
    assert np.max(np.abs(a - b)) < 1e-14


@needs_numba
def test_paths_from_marks_agree():
    rng = np.random.default_rng(0)
    codes = rng.integers(0, 3, 100_000).astype(np.int8)
    pw = 2.0 ** -np.arange(7)
    (y1, i1, u1, d1), (y2, i2, u2, d2) = both(lambda: kernels.paths_from_marks(codes, 7, pw, 5000))
    assert np.array_equal(y1, y2) and u1 == u2 and d1 == d2
    assert np.allclose(i1, i2, rtol=0, atol=1e-12)


def test_paths_from_marks_short_stream():
    codes = np.array([0, 1, 2], dtype=np.int8)
    _, _, _, done = kernels.paths_from_marks(codes, 5, np.ones(5), 3)
    assert done == 0


@needs_numba
def test_series_draws_agree():
    v = 1.0 - np.random.default_rng(1).random((2000, 30))
    pw = 3.0 ** -np.arange(30)
    a, b = both(lambda: kernels.series_draws(v, 0.3, 0.5, 0.2, pw))
    assert np.max(np.abs(a - b)) < 1e-12


@needs_numba
def test_cp_recursion_agree():
    lam = 0.7 * 0.4 ** np.arange(1, 200)
    a, b = both(lambda: kernels.cp_recursion(0.3, lam, 150))
    assert np.max(np.abs(a - b)) < 1e-15


@needs_numba
def test_high_level_results_identical():
    par = ModelParams.create(2, p=0.5, q=0.4, r=0.1)
    a, b = both(lambda: rho_power_pmf(par, 0.7).masses)
    assert np.max(np.abs(a - b)) < 1e-15
    a, b = both(lambda: sym_coefficients(ModelParams.create(2, p=0.3, q=0.5, r=0.2)).E)
    assert np.max(np.abs(a - b)) < 1e-14
    a, b = both(lambda: simulate_batch(RawRates(1, 2, 1), 2, 12, 3000, seed=5))
    assert np.array_equal(a[0], b[0]) and np.allclose(a[1], b[1], atol=1e-12)
    a, b = both(lambda: validate_innovation_law(RawRates(1, 2, 1), 2, 20000, 8).tv)
    assert a == b


def test_backend_switch():
    prev = _accel.set_backend("numpy")
    assert _accel.backend() == "numpy"
    _accel.set_backend(prev)
    with pytest.raises(ValueError):
        _accel.set_backend("cuda")
