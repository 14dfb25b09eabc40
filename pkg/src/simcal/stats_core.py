"""Distribution-free statistics: empirical CDFs, KS distances and thresholds.

Conventions used throughout:

* Empirical CDFs are right-continuous with jumps at the sample points,
  i.e. F(x) = (1/n) * #{i : X_i <= x}.  Ties are merged before evaluation.
* The sup-of-|Brownian-bridge| CDF is the classical alternating series
  ``1 - 2 * sum_{v>=1} (-1)^(v-1) exp(-2 v^2 z^2)``, truncated once the next
  term drops below 1e-12 (or after 100 terms) and clamped to [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

_FELLER_TOL = 1e-12
_FELLER_MAX_TERMS = 100


@dataclass(frozen=True)
class EmpiricalSample:
    """A sorted sample of real-valued observations."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidInputError("sample must be a nonempty 1-D array")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("sample values must be finite")
        if np.any(np.diff(arr) < 0):
            raise InvalidInputError("sample values must be nondecreasing")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_data(cls, data) -> "EmpiricalSample":
        """Build a sample from unsorted raw observations."""
        arr = np.sort(np.asarray(data, dtype=float).ravel())
        return cls(arr)

    @property
    def size(self) -> int:
        return int(self.values.size)

    def cdf(self, x) -> np.ndarray:
        """Right-continuous empirical CDF evaluated at the points ``x``."""
        x = np.asarray(x, dtype=float)
        return np.searchsorted(self.values, x, side="right") / self.size


def as_sample(data) -> EmpiricalSample:
    """Coerce raw data or an existing sample to :class:`EmpiricalSample`."""
    if isinstance(data, EmpiricalSample):
        return data
    return EmpiricalSample.from_data(data)


@dataclass(frozen=True)
class ThresholdSpec:
    """Confidence parameter, test mode and Bonferroni feature count."""

    alpha: float
    mode: str = "two_sample"
    bonferroni_k: int = 1

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.mode not in ("one_sample", "two_sample"):
            raise InvalidInputError(f"unknown mode {self.mode!r}")
        if self.bonferroni_k < 1:
            raise InvalidInputError("bonferroni_k must be >= 1")


def ks_distance(a, b) -> float:
    """Exact sup-norm distance between two empirical CDFs.

    Evaluated over the pooled jump points, which is where the sup of the
    difference of two step functions is attained.
    """
    a = as_sample(a)
    b = as_sample(b)
    pooled = np.concatenate([a.values, b.values])
    pooled = np.unique(pooled)
    return float(np.max(np.abs(a.cdf(pooled) - b.cdf(pooled))))


def bb_sup_cdf(z: float) -> float:
    """P(sup_{t in [0,1]} |BB(t)| <= z) for a standard Brownian bridge."""
    if z < 0:
        raise InvalidInputError("z must be nonnegative")
    if z == 0.0:
        return 0.0
    acc = 0.0
    a = 2.0 * z * z
    for v in range(1, _FELLER_MAX_TERMS + 1):
        term = math.exp(-a * v * v)
        acc += term if v % 2 == 1 else -term
        nxt = math.exp(-a * (v + 1) * (v + 1))
        if nxt < _FELLER_TOL:
            break
    return min(1.0, max(0.0, 1.0 - 2.0 * acc))


def bb_sup_quantile(p: float) -> float:
    """Inverse of :func:`bb_sup_cdf` by bisection on [0, 5]."""
    if not 0.0 < p < 1.0:
        raise InvalidInputError(f"p must be in (0, 1), got {p}")
    lo, hi = 0.0, 5.0
    while hi - lo > 1e-8:
        mid = 0.5 * (lo + hi)
        if bb_sup_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def two_sample_threshold(n: int, N: int, alpha: float) -> float:
    """Two-sample KS acceptance threshold sqrt((n+N)/(nN)) * sqrt(-log(alpha/2)/2)."""
    if n < 1 or N < 1:
        raise InvalidInputError("sample sizes must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must be in (0, 1), got {alpha}")
    return math.sqrt((n + N) / (n * N)) * math.sqrt(-0.5 * math.log(alpha / 2.0))


# Coefficients of the Wichura AS241 (PPND16) rational approximation of the
# standard normal quantile; absolute error below 1e-8 on (0, 1).
_PPND_A = (
    3.3871328727963666080, 1.3314166789178437745e2, 1.9715909503065514427e3,
    1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
    3.3430575583588128105e4, 2.5090809287301226727e3,
)
_PPND_B = (
    1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
    5.3941960214247511077e3, 2.1213794301586595867e4, 3.9307895800092710610e4,
    2.8729085735721942674e4, 5.2264952788528545610e3,
)
_PPND_C = (
    1.42343711074968357734, 4.63033784615654529590, 5.76949722146069140550,
    3.64784832476320460504, 1.27045825245236838258, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4,
)
_PPND_D = (
    1.0, 2.05319162663775882187, 1.67638483018380384940,
    6.89767334985100004550e-1, 1.48103976427480074590e-1,
    1.51986665636164571966e-2, 5.47593808499534494600e-4,
    1.05075007164441684324e-9,
)
_PPND_E = (
    6.65790464350110377720, 5.46378491116411436990, 1.78482653991729133580,
    2.96560571828504891230e-1, 2.65321895265761230930e-2,
    1.24266094738807843860e-3, 2.71155556874348757815e-5,
    2.01033439929228813265e-7,
)
_PPND_F = (
    1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
    1.48753612908506148525e-2, 7.86869131145613259100e-4,
    1.84631831751005468180e-5, 1.42151175831644588870e-7,
    2.04426310338993978564e-15,
)


def _poly(coeffs, x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def normal_quantile(p: float) -> float:
    """Standard normal quantile (Wichura's AS241 rational approximation)."""
    if not 0.0 < p < 1.0:
        raise InvalidInputError(f"p must be in (0, 1), got {p}")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_PPND_A, r) / _poly(_PPND_B, r)
    r = p if q < 0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        val = _poly(_PPND_C, r) / _poly(_PPND_D, r)
    else:
        r -= 5.0
        val = _poly(_PPND_E, r) / _poly(_PPND_F, r)
    return -val if q < 0 else val


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the error function."""
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def _psd_factor(cov: np.ndarray) -> np.ndarray:
    """Factor L with L L^T = cov, rejecting matrices with eigenvalues < -1e-9."""
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise InvalidInputError("covariance must be a square matrix")
    if not np.allclose(cov, cov.T, atol=1e-8):
        raise InvalidInputError("covariance must be symmetric")
    w, v = np.linalg.eigh(0.5 * (cov + cov.T))
    if np.min(w) < -1e-9:
        raise InvalidInputError(f"covariance not PSD (min eigenvalue {np.min(w):.3e})")
    w = np.clip(w, 0.0, None)
    return v * np.sqrt(w)


def gen_chisq_samples(cov, scale: float, draws: int, seed) -> np.ndarray:
    """Monte Carlo sample of scale * Z^T cov Z with Z standard normal."""
    if scale < 0:
        raise InvalidInputError("scale must be nonnegative")
    L = _psd_factor(cov)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((int(draws), L.shape[0]))
    return scale * np.einsum("ij,ij->i", g @ L, g @ L)


def gen_chisq_quantile(cov, scale: float, alpha: float, draws: int = 200_000,
                       seed=0) -> float:
    """Empirical (1-alpha)-quantile of the generalized chi-square scale * Z^T cov Z.

    Deterministic for a given seed; ``draws`` >= 10_000 keeps the Monte Carlo
    error of the quantile well below typical decision tolerances.
    """
    if draws < 10_000:
        raise InvalidInputError("draws must be >= 10000")
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must be in (0, 1), got {alpha}")
    samples = gen_chisq_samples(cov, scale, draws, seed)
    return float(np.quantile(samples, 1.0 - alpha))
