import math
from fractions import Fraction

import numpy as np
import pytest

from gouq.continuity import (
    GOLDEN,
    PLASTIC,
    ContinuityDecision,
    catalog_certificate,
    certify_pisot,
    classify_continuity,
    dim_bound,
    erdos_witness,
    exact_power_sums,
    power_singularity_threshold,
    small_q_threshold,
    trace_identity_check,
)
from gouq.errors import NotInfinitelyDivisible, NotPisot, QZero
from gouq.mu import mu_cf
from gouq.params import CValue, ModelParams
from gouq.rho import rho_power_entropy

CS = ContinuityDecision.CONTINUOUS_SINGULAR
UND = ContinuityDecision.UNDETERMINED


@pytest.mark.parametrize("c,poly", [(2, [1, -2]), (3, [1, -3]), (GOLDEN, [1, -1, -1]), (PLASTIC, [1, 0, -1, -1])])
def test_pisot_accepts(c, poly):
    cert = certify_pisot(c, poly)
    assert cert.delta < 1
    assert all(abs(z) < 1 for z in cert.conjugates())
    assert all(row[-1] for row in trace_identity_check(cert, 30))


@pytest.mark.parametrize(
    "c,poly",
    [
        (Fraction(3, 2), [1, -2]),
        (Fraction(3, 2), [2, -3]),
        (1.5, [1, -3, 2]),
        (math.sqrt(2), [1, 0, -2]),
        (2.0, [1, -3]),
    ],
)
def test_pisot_rejects(c, poly):
    with pytest.raises(NotPisot):
        certify_pisot(c, poly)


def test_pisot_content_is_removed():
    assert certify_pisot(GOLDEN, [2, -2, -2]).poly == (1, -1, -1)


def test_salem_like_rejected():
    # 1.1762808... Lehmer's number: conjugates on the unit circle
    poly = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]
    roots = np.roots(poly)
    lam = float(max(roots, key=abs).real)
    with pytest.raises(Exception):
        certify_pisot(lam, poly)


def test_power_sums_fibonacci_like():
    assert exact_power_sums([1, -1, -1], 6) == [1, 3, 4, 7, 11, 18]
    assert exact_power_sums([1, -2], 4) == [2, 4, 8, 16]


def test_catalog():
    assert catalog_certificate(2) is not None
    assert catalog_certificate(GOLDEN) is not None
    assert catalog_certificate(CValue.algebraic(PLASTIC, [1, 0, -1, -1])) is not None
    assert catalog_certificate(math.e) is None
    assert catalog_certificate(Fraction(5, 2)) is None


def test_verdicts():
    v = classify_continuity(ModelParams.create(3, q=0.5, r=0))
    assert (v.decision, v.rule) == (CS, "pisot")
    v = classify_continuity(ModelParams.create(math.e, q=0.3, r=0))
    assert v.decision == CS and "small-q" in v.reasons
    v = classify_continuity(ModelParams.create(4.1, q=0.5, r=0))
    assert (v.decision, v.rule) == (CS, "dim-bound")
    assert v.numbers["dim_bound"] == pytest.approx(2 * math.log(2) / math.log(4.1))
    assert classify_continuity(ModelParams.create(1.5, q=0.9, r=0)).decision == UND
    assert classify_continuity(ModelParams.create(3, q=0, r=0.5)).rule == "bernoulli-convolution-open"


def test_ps_assumption_never_concludes():
    v = classify_continuity(ModelParams.create(1.5, q=0.9, r=0), ps_assumption=True)
    assert v.decision == UND and v.rule == "ps-assumption-consistent"


def test_mismatched_certificate():
    with pytest.raises(ValueError):
        classify_continuity(ModelParams.create(3, q=0.5, r=0), certify_pisot(2, [1, -2]))


def test_dim_bound_and_threshold():
    with pytest.raises(QZero):
        dim_bound(ModelParams.create(2, q=0, r=0.5))
    assert small_q_threshold(math.e) == pytest.approx(1 - math.log(2))
    # below the threshold the entropy bound itself is < 1
    for q in (0.05, 0.2, 0.3):
        assert dim_bound(ModelParams.create(math.e, q=q, r=0)) < 1


def test_threshold_bisection():
    par = ModelParams.create(3, q=0.5, r=0)
    res = power_singularity_threshold(par)
    assert res.rule == "entropy-bisection"
    assert 0 < res.t_low < 1
    assert rho_power_entropy(par, res.t_low).entropy == pytest.approx(math.log(3), abs=1e-9)
    assert len(res.trace) > 10


def test_threshold_with_certificate_and_non_id():
    par = ModelParams.create(3, q=0.5, r=0)
    assert power_singularity_threshold(par, certify_pisot(3, [1, -3])).t_low == math.inf
    with pytest.raises(NotInfinitelyDivisible):
        power_singularity_threshold(ModelParams.create(3, q="0.4", r="0.2"))


def test_threshold_grows_with_c():
    a = power_singularity_threshold(ModelParams.create(3, q=0.5, r=0)).t_low
    b = power_singularity_threshold(ModelParams.create(5, q=0.5, r=0)).t_low
    assert b > a


@pytest.mark.parametrize("c,poly,kw", [
    (2, [1, -2], dict(q=0.5, r=0)),
    (GOLDEN, [1, -1, -1], dict(q=0.3, r=0.1)),
    (2, [1, -2], dict(p=0.3, q=0.5, r=0.2)),
])
def test_erdos_witness(c, poly, kw):
    par = ModelParams.create(c, **kw)
    cert = certify_pisot(c, poly)
    pts = erdos_witness(par, cert, kmax=12)
    vals = np.array([w.value for w in pts])
    assert np.all(vals >= pts[0].lower_bound)
    assert pts[0].lower_bound > 0
    direct = np.abs(mu_cf(par, np.array([w.z for w in pts[:6]])))
    assert np.max(np.abs(direct - vals[:6])) < 1e-6


def test_erdos_witness_without_certificate():
    pts = erdos_witness(ModelParams.create(2, q=0.5, r=0), None, kmax=4)
    assert all(w.lower_bound is None for w in pts)


def test_small_q_region_matches_dim_bound():
    for c in (1.5, 2.0, math.e, 4.0, 10.0):
        thr = small_q_threshold(c)
        for q in np.linspace(0.01, 0.99, 50):
            if q <= thr:
                assert dim_bound(ModelParams.create(c, q=float(q), r=0)) <= 1 + 1e-12


def test_threshold_half_is_below_log_c():
    for c in (3, 5, 2.5):
        par = ModelParams.create(c, q=0.4, r=0.1)
        t = power_singularity_threshold(par).t_low
        assert rho_power_entropy(par, t / 2).entropy < math.log(c)


def test_certificate_json_round_trip():
    import json
    cert = certify_pisot(GOLDEN, [1, -1, -1])
    data = json.loads(cert.to_json())
    assert data["poly"] == [1, -1, -1]
    assert len(data["roots"]) == 2
