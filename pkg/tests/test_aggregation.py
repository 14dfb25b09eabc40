import math

import numpy as np
import pytest
import scipy.stats

from simcal.aggregation import (
    AggregationReport,
    FeatureMatrix,
    bonferroni_mean_test_type2,
    esmd_decide,
    gaussian_type2_curves,
    sks_decide,
    ssmd_decide,
)
from simcal.eligibility import decide_candidate
from simcal.errors import InvalidInputError
from simcal.stats_core import ThresholdSpec


def gaussian_pair(K, n, N, shift=None, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((N, K))
    Y = rng.standard_normal((n, K))
    if shift is not None:
        Y = Y + np.asarray(shift)
    return X, Y


# ---------------------------------------------------------------------------
# FeatureMatrix
# ---------------------------------------------------------------------------


def test_feature_matrix_validation():
    with pytest.raises(InvalidInputError):
        FeatureMatrix(np.array([[np.nan]]))
    with pytest.raises(InvalidInputError):
        FeatureMatrix(np.empty((0, 3)))
    fm = FeatureMatrix(np.ones((4, 2)))
    assert fm.rows == 4 and fm.cols == 2


def test_column_mismatch_rejected():
    with pytest.raises(InvalidInputError):
        sks_decide(np.ones((5, 2)), np.ones((5, 3)), 0.05)


# ---------------------------------------------------------------------------
# identical inputs are always eligible
# ---------------------------------------------------------------------------


def test_identical_inputs_eligible_all_methods():
    X, _ = gaussian_pair(4, 50, 50, seed=1)
    assert sks_decide(X, X, 0.05).eligible
    assert ssmd_decide(X, X, 0.05).eligible
    rep = esmd_decide(X, X, 0.05, mc_draws=20_000, seed=0)
    assert rep.eligible and rep.statistic == 0.0


# ---------------------------------------------------------------------------
# SKS
# ---------------------------------------------------------------------------


def test_sks_k1_reduces_to_scalar_decision():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(300)
    y = rng.standard_normal(250) + 0.1
    for mode in ("one_sample", "two_sample"):
        rep = sks_decide(x[:, None], y[:, None], 0.05, mode=mode)
        scalar = decide_candidate(x, y, ThresholdSpec(0.05, mode, 1))
        assert rep.statistic == pytest.approx(scalar.statistic)
        assert rep.threshold == pytest.approx(scalar.threshold)
        assert rep.eligible == scalar.eligible


def test_sks_power_one_shifted_feature():
    rejected = 0
    reps = 200
    for r in range(reps):
        shift = np.zeros(10)
        shift[3] = 5.0
        X, Y = gaussian_pair(10, 1000, 1000, shift=shift, seed=100 + r)
        if not sks_decide(X, Y, 0.05, mode="two_sample").eligible:
            rejected += 1
    assert rejected / reps >= 0.99


def test_sks_invariant_under_monotone_transform():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    Y = np.array([[101.0], [102.0], [103.0], [104.0]])

    def squash(v):  # strictly increasing on the pooled values
        return np.where(v < 100.0, v, 4.0 + (v - 100.0) * 1e-6)

    before = sks_decide(X, Y, 0.05)
    after = sks_decide(squash(X), squash(Y), 0.05)
    assert before.statistic == after.statistic == 1.0
    assert before.eligible == after.eligible == False


# ---------------------------------------------------------------------------
# SSMD
# ---------------------------------------------------------------------------


def test_ssmd_z_multiplier_k1():
    X, Y = gaussian_pair(1, 100, 100, seed=3)
    rep = ssmd_decide(X, Y, 0.05)
    assert rep.threshold == pytest.approx(1.95996, abs=1e-4)


def test_ssmd_power_two_features():
    rejected = 0
    reps = 200
    for r in range(reps):
        X, Y = gaussian_pair(2, 10_000, 10_000, shift=[1.0, 0.0], seed=300 + r)
        if not ssmd_decide(X, Y, 0.05).eligible:
            rejected += 1
    assert rejected / reps >= 0.99


def test_ssmd_degenerate_variance_flags():
    X = np.zeros((10, 1))
    Y_same = np.zeros((10, 1))
    Y_diff = np.ones((10, 1))
    same = ssmd_decide(X, Y_same, 0.05)
    assert same.eligible and same.degenerate_features == (0,)
    diff = ssmd_decide(X, Y_diff, 0.05)
    assert not diff.eligible and diff.degenerate_features == (0,)
    assert diff.statistic == math.inf


def test_ssmd_not_invariant_under_monotone_transform():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    Y = np.array([[101.0], [102.0], [103.0], [104.0]])

    def squash(v):
        return np.where(v < 100.0, v, 4.0 + (v - 100.0) * 1e-6)

    assert not ssmd_decide(X, Y, 0.05).eligible
    assert ssmd_decide(squash(X), squash(Y), 0.05).eligible  # decision flips


# ---------------------------------------------------------------------------
# ESMD
# ---------------------------------------------------------------------------


def test_esmd_threshold_identity_covariance():
    # exact unit sample variance makes the threshold the scaled chi2 quantile
    rng = np.random.default_rng(4)
    x = rng.standard_normal(1000)
    x = (x - x.mean()) / x.std(ddof=1)
    rep = esmd_decide(x[:, None], x[:, None] * 1.0, 0.05,
                      mc_draws=200_000, seed=9)
    assert rep.threshold == pytest.approx(0.0076829, rel=0.02)


def test_esmd_requires_enough_rows():
    with pytest.raises(InvalidInputError):
        esmd_decide(np.ones((3, 3)), np.ones((5, 3)), 0.05, mc_draws=10_000)


def test_esmd_not_invariant_under_monotone_transform():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    Y = np.array([[101.0], [102.0], [103.0], [104.0]])

    def squash(v):
        return np.where(v < 100.0, v, 4.0 + (v - 100.0) * 1e-6)

    assert not esmd_decide(X, Y, 0.05, mc_draws=10_000, seed=1).eligible
    assert esmd_decide(squash(X), squash(Y), 0.05, mc_draws=10_000, seed=1).eligible


def test_esmd_beats_single_feature_ssmd_when_all_shifted():
    # every coordinate is informative, so pooling them detects better than
    # testing the first coordinate alone
    reps = 150
    esmd_rej = ssmd1_rej = 0
    for r in range(reps):
        X, Y = gaussian_pair(10, 1500, 1500, shift=np.full(10, 0.1), seed=700 + r)
        if not esmd_decide(X, Y, 0.05, mc_draws=20_000, seed=r).eligible:
            esmd_rej += 1
        if not ssmd_decide(X[:, :1], Y[:, :1], 0.05).eligible:
            ssmd1_rej += 1
    assert esmd_rej > ssmd1_rej


# ---------------------------------------------------------------------------
# Type I calibration, all three methods
# ---------------------------------------------------------------------------


def test_type1_calibration_within_two_se():
    reps = 500
    counts = {"SKS": 0, "SSMD": 0, "ESMD": 0}
    for r in range(reps):
        X, Y = gaussian_pair(10, 1000, 1000, seed=2000 + r)
        if not sks_decide(X, Y, 0.05, mode="two_sample").eligible:
            counts["SKS"] += 1
        if not ssmd_decide(X, Y, 0.05).eligible:
            counts["SSMD"] += 1
        if not esmd_decide(X, Y, 0.05, mc_draws=20_000, seed=r).eligible:
            counts["ESMD"] += 1
    band = 2 * math.sqrt(0.05 * 0.95 / reps)
    for method, cnt in counts.items():
        rate = cnt / reps
        assert abs(rate - 0.05) <= band, (method, rate)


# ---------------------------------------------------------------------------
# Gaussian Type II curves
# ---------------------------------------------------------------------------


def test_noncentrality_and_p2_match_closed_form_oracle():
    K, n = 10, 1000
    delta = np.full(K, 0.1)
    s2 = 2.0 / n
    nu = float(np.sum(delta**2) / s2)
    assert nu == pytest.approx(50.0)
    p1, p2 = gaussian_type2_curves(K, 1, delta, n, n, 0.05,
                                   mc_draws=200_000, seed=5)
    thr = scipy.stats.chi2.ppf(0.95, df=K)
    p2_exact = scipy.stats.ncx2.cdf(thr, df=K, nc=nu)
    se = math.sqrt(p2_exact * (1 - p2_exact) / 200_000) + 1e-4
    assert p2 == pytest.approx(p2_exact, abs=3 * se + 0.003)
    p1_exact = scipy.stats.norm.cdf((thr_eta(0.05, s2) - 0.1) / math.sqrt(s2)) - \
        scipy.stats.norm.cdf((-thr_eta(0.05, s2) - 0.1) / math.sqrt(s2))
    assert p1 == pytest.approx(p1_exact, abs=1e-9)


def thr_eta(alpha, s2):
    return scipy.stats.norm.ppf(1 - alpha / 2) * math.sqrt(s2)


def test_all_features_shifted_favors_pooling():
    p1, p2 = gaussian_type2_curves(10, 1, np.full(10, 0.1), 4000, 4000, 0.05,
                                   mc_draws=100_000, seed=6)
    assert p2 < p1


def test_single_feature_shifted_favors_single_test():
    delta = np.zeros(10)
    delta[0] = 0.1
    p1, p2 = gaussian_type2_curves(10, 1, delta, 4000, 4000, 0.05,
                                   mc_draws=100_000, seed=7)
    assert p2 > p1


def test_p2_monotone_in_k_both_regimes():
    ks = (2, 5, 10, 20, 40)
    dense = []
    sparse = []
    for K in ks:
        _, p2d = gaussian_type2_curves(K, 1, np.full(K, 0.1), 1000, 1000, 0.05,
                                       mc_draws=100_000, seed=8)
        delta = np.zeros(K)
        delta[0] = 0.1
        _, p2s = gaussian_type2_curves(K, 1, delta, 1000, 1000, 0.05,
                                       mc_draws=100_000, seed=9)
        dense.append(p2d)
        sparse.append(p2s)

    def mc_se(p):
        return math.sqrt(max(p * (1 - p), 1e-6) / 100_000)

    # monotone within 3 MC standard errors, strictly so end to end
    assert all(b <= a + 3 * mc_se(a) for a, b in zip(dense, dense[1:]))
    assert all(b >= a - 3 * mc_se(a) for a, b in zip(sparse, sparse[1:]))
    assert dense[-1] < dense[0]
    assert sparse[-1] > sparse[0]


def test_log_type2_ratio_grows_superlinearly():
    sizes = (500, 1000, 2000, 4000)
    logs = []
    for n in sizes:
        p1, p2 = bonferroni_mean_test_type2(10, 0.1, n, n, 0.05)
        logs.append(math.log(p2 / p1))
    increments = [b - a for a, b in zip(logs, logs[1:])]
    assert all(x > 0 for x in increments)
    assert all(b > a for a, b in zip(increments, increments[1:]))
