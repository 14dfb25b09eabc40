"""Feature-aggregation eligibility tests: SKS, SSMD and ESMD.

All three compare an N x K matrix of real-data features against an n x K
matrix of simulated features at familywise level alpha:

* SKS: per-feature KS distances against the Bonferroni-corrected KS
  threshold; eligible only if every feature passes.
* SSMD: per-feature |mean difference| against
  z_{1-alpha/(2K)} * sqrt((1/N + 1/n) * var_k), where var_k is the sample
  variance of the real data's k-th feature.
* ESMD: the summed squared mean difference against the Monte Carlo
  (1-alpha)-quantile of (1/N + 1/n) * Z^T Sigma_hat Z.

``pseudo_p`` rescales each statistic onto a p-value-like [0, 1] axis using
the same reference distribution as the threshold; it is reported for
plotting parity only and never drives the decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericError
from .stats_core import (
    ThresholdSpec,
    bb_sup_cdf,
    gen_chisq_samples,
    ks_distance,
    normal_cdf,
    normal_quantile,
)
from .eligibility import threshold_for


@dataclass(frozen=True)
class FeatureMatrix:
    """Rows are samples, columns are the K extracted features."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.atleast_2d(np.asarray(self.values, dtype=float))
        if arr.size == 0 or arr.shape[1] < 1:
            raise InvalidInputError("feature matrix must be nonempty")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("feature matrix entries must be finite")
        object.__setattr__(self, "values", arr)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def as_features(x) -> FeatureMatrix:
    return x if isinstance(x, FeatureMatrix) else FeatureMatrix(x)


@dataclass(frozen=True)
class AggregationReport:
    method: str
    eligible: bool
    statistic: float
    threshold: float
    pseudo_p: float
    per_feature_stats: np.ndarray | None = None
    per_feature_thresholds: np.ndarray | None = None
    degenerate_features: tuple[int, ...] = ()


def _check_columns(X: FeatureMatrix, Y: FeatureMatrix):
    if X.cols != Y.cols:
        raise InvalidInputError(
            f"feature count mismatch: {X.cols} vs {Y.cols}")


def sks_decide(X, Y, alpha: float, mode: str = "two_sample") -> AggregationReport:
    """Supremum of per-feature KS statistics with the Bonferroni threshold."""
    X, Y = as_features(X), as_features(Y)
    _check_columns(X, Y)
    K = X.cols
    N, n = X.rows, Y.rows
    spec = ThresholdSpec(alpha=alpha, mode=mode, bonferroni_k=K)
    thr = threshold_for(spec, n=n, N=N)
    dists = np.array([ks_distance(X.values[:, k], Y.values[:, k])
                      for k in range(K)])
    scale = math.sqrt(N) if mode == "one_sample" else math.sqrt(n * N / (n + N))
    pvals = np.array([1.0 - bb_sup_cdf(scale * d) for d in dists])
    return AggregationReport(
        method="SKS",
        eligible=bool(np.all(dists <= thr)),
        statistic=float(np.max(dists)),
        threshold=thr,
        pseudo_p=float(np.min(pvals)),
        per_feature_stats=dists,
        per_feature_thresholds=np.full(K, thr),
    )


def ssmd_decide(X, Y, alpha: float) -> AggregationReport:
    """Supremum of standardized sample-mean differences.

    The variance is estimated from the real data only.  A zero-variance
    feature with differing means is flagged degenerate and ineligible; with
    equal means it passes.
    """
    X, Y = as_features(X), as_features(Y)
    _check_columns(X, Y)
    if X.rows < 2:
        raise InvalidInputError("need at least 2 real rows for a sample variance")
    K = X.cols
    N, n = X.rows, Y.rows
    diff = np.abs(X.values.mean(axis=0) - Y.values.mean(axis=0))
    var = X.values.var(axis=0, ddof=1)
    scale = np.sqrt((1.0 / N + 1.0 / n) * var)
    z_mult = normal_quantile(1.0 - alpha / (2.0 * K))
    degenerate = tuple(int(k) for k in np.flatnonzero(scale == 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        zstats = np.where(scale > 0, diff / np.where(scale > 0, scale, 1.0),
                          np.where(diff > 0, np.inf, 0.0))
    pvals = np.array([2.0 * (1.0 - normal_cdf(z)) if math.isfinite(z) else 0.0
                      for z in zstats])
    return AggregationReport(
        method="SSMD",
        eligible=bool(np.all(zstats <= z_mult)),
        statistic=float(np.max(zstats)),
        threshold=z_mult,
        pseudo_p=float(np.min(pvals)),
        per_feature_stats=zstats,
        per_feature_thresholds=np.full(K, z_mult),
        degenerate_features=degenerate,
    )


def esmd_decide(X, Y, alpha: float, mc_draws: int = 200_000,
                seed: int = 0) -> AggregationReport:
    """Summed squared mean difference against a generalized chi-square quantile."""
    X, Y = as_features(X), as_features(Y)
    _check_columns(X, Y)
    K = X.cols
    if X.rows < K + 1:
        raise InvalidInputError(
            f"need at least K+1 = {K + 1} real rows for the sample covariance")
    N, n = X.rows, Y.rows
    diff = X.values.mean(axis=0) - Y.values.mean(axis=0)
    stat = float(np.dot(diff, diff))
    cov = np.cov(X.values, rowvar=False, ddof=1)
    cov = np.atleast_2d(cov)
    cov = 0.5 * (cov + cov.T)
    eigvals = np.linalg.eigvalsh(cov)
    floor = -1e-9 * max(1.0, float(np.max(np.abs(eigvals))))
    if np.min(eigvals) < floor:
        raise NumericError(
            f"sample covariance not PSD (min eigenvalue {np.min(eigvals):.3e})")
    scale = 1.0 / N + 1.0 / n
    samples = gen_chisq_samples(cov, scale, mc_draws, seed)
    thr = float(np.quantile(samples, 1.0 - alpha))
    return AggregationReport(
        method="ESMD",
        eligible=stat <= thr,
        statistic=stat,
        threshold=thr,
        pseudo_p=float(np.mean(samples >= stat)),
    )


def gaussian_type2_curves(K: int, k: int, delta, n: int, N: int, alpha: float,
                          mc_draws: int = 100_000, seed: int = 0
                          ) -> tuple[float, float]:
    """Type II error of a single-feature mean test versus the sum-of-squares test.

    For independent unit-variance Gaussian features with mean shift
    ``delta``: p1 is the closed-form probability that the k-th feature's
    mean difference stays inside its two-sided acceptance band, and p2 is
    the Monte Carlo probability that the summed squared difference (a
    noncentral chi-square with noncentrality sum(delta^2) / (1/N + 1/n))
    stays below the central chi-square acceptance threshold.
    """
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (K,):
        raise InvalidInputError(f"delta must have shape ({K},)")
    if not 1 <= k <= K:
        raise InvalidInputError(f"k must be in [1, {K}]")
    if n < 1 or N < 1:
        raise InvalidInputError("n and N must be >= 1")
    s = math.sqrt(1.0 / N + 1.0 / n)
    dk = delta[k - 1]
    eta = normal_quantile(1.0 - alpha / 2.0) * s
    p1 = normal_cdf((eta - dk) / s) - normal_cdf((-eta - dk) / s)

    rng = np.random.default_rng(seed)
    z_central = rng.standard_normal((mc_draws, K))
    central = np.einsum("ij,ij->i", z_central, z_central)
    thr = np.quantile(central, 1.0 - alpha)
    z_nc = rng.standard_normal((mc_draws, K)) + delta / s
    noncentral = np.einsum("ij,ij->i", z_nc, z_nc)
    p2 = float(np.mean(noncentral <= thr))
    return float(p1), p2


def bonferroni_mean_test_type2(K: int, delta1: float, n: int, N: int,
                               alpha: float) -> tuple[float, float]:
    """Closed-form Type II pair (p1, p2) for the mean test on unit-variance
    Gaussian features when only the first coordinate is shifted by delta1.

    p1 uses the single-feature band z_{1-alpha/2}; p2 uses all K features
    with the Bonferroni band z_{1-alpha/(2K)}, so
    p2 = (1 - alpha/K)^(K-1) * P(|N(delta1, s^2)| <= z_{1-alpha/(2K)} * s).
    """
    if K < 1:
        raise InvalidInputError("K must be >= 1")
    s = math.sqrt(1.0 / N + 1.0 / n)
    q1 = normal_quantile(1.0 - alpha / 2.0)
    q2 = normal_quantile(1.0 - alpha / (2.0 * K))
    band = lambda q: normal_cdf(q - delta1 / s) - normal_cdf(-q - delta1 / s)
    p1 = band(q1)
    p2 = (1.0 - alpha / K) ** (K - 1) * band(q2)
    return p1, p2
