"""Eligibility sets over finite candidate sets.

A candidate parameter value is eligible when the KS distance between its
simulated output sample and the real output sample stays below a
distribution-free threshold:

* one-sample rule: statistic <= q_{1-alpha/K} / sqrt(N)
* two-sample rule: statistic <= sqrt((n+N)/(nN)) * sqrt(-log((alpha/K)/2)/2)

The module also provides min/max confidence bounds of a performance value
over the eligible set, and Monte Carlo error harnesses for the decision rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import EmptyEligibilitySetError, InvalidInputError
from .seeding import REAL_STREAM, SIM_STREAM, child_seed, derived_rng
from .stats_core import (
    EmpiricalSample,
    ThresholdSpec,
    as_sample,
    bb_sup_quantile,
    ks_distance,
    two_sample_threshold,
)


@dataclass(frozen=True)
class ParameterSpace:
    """A box in R^d with named dimensions."""

    names: tuple[str, ...]
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if len(self.names) < 1 or lower.shape != (len(self.names),) \
                or upper.shape != (len(self.names),):
            raise InvalidInputError("names, lower and upper must share a length >= 1")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise InvalidInputError("bounds must be finite")
        if not np.all(lower < upper):
            raise InvalidInputError("every lower bound must be < its upper bound")
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def from_bounds(cls, bounds: Mapping[str, tuple[float, float]]) -> "ParameterSpace":
        names = tuple(bounds)
        lo = np.array([bounds[k][0] for k in names], dtype=float)
        hi = np.array([bounds[k][1] for k in names], dtype=float)
        return cls(names, lo, hi)

    @property
    def dim(self) -> int:
        return len(self.names)

    def contains(self, theta: np.ndarray) -> bool:
        theta = np.asarray(theta, dtype=float)
        return bool(np.all(theta >= self.lower) and np.all(theta <= self.upper))


@dataclass(frozen=True)
class CandidatePoint:
    id: int
    theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))


@dataclass(frozen=True)
class EligibilityDecision:
    candidate: CandidatePoint
    statistic: float
    threshold: float
    eligible: bool
    error: str | None = None


@dataclass(frozen=True)
class EligibilitySetResult:
    decisions: tuple[EligibilityDecision, ...]
    alpha: float
    mode: str
    n: int
    N: int
    seed: int | None = None

    @property
    def m(self) -> int:
        return len(self.decisions)

    def eligible_decisions(self) -> list[EligibilityDecision]:
        return [d for d in self.decisions if d.eligible]

    def eligible_thetas(self) -> np.ndarray:
        kept = self.eligible_decisions()
        if not kept:
            return np.empty((0,))
        return np.stack([d.candidate.theta for d in kept])


def generate_candidates(space: ParameterSpace, m: int, mode: str, seed: int = 0
                        ) -> list[CandidatePoint]:
    """Deterministic interior grid or uniform random points inside the box.

    Grid mode uses round(m ** (1/d)) points per dimension, so it returns
    exactly m points only when m is a d-th power; the lattice excludes the
    box boundary.
    """
    if m < 1:
        raise InvalidInputError("m must be >= 1")
    if mode == "grid":
        per_dim = max(1, round(m ** (1.0 / space.dim)))
        axes = [
            space.lower[i] + (np.arange(1, per_dim + 1) / (per_dim + 1))
            * (space.upper[i] - space.lower[i])
            for i in range(space.dim)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        thetas = np.stack([g.ravel() for g in mesh], axis=1)
    elif mode == "uniform_random":
        rng = derived_rng(seed, 0)
        thetas = rng.uniform(space.lower, space.upper, size=(m, space.dim))
    else:
        raise InvalidInputError(f"unknown candidate mode {mode!r}")
    return [CandidatePoint(i, t) for i, t in enumerate(thetas)]


def threshold_for(spec: ThresholdSpec, n: int, N: int) -> float:
    """Per-feature acceptance threshold under the Bonferroni correction."""
    alpha_k = spec.alpha / spec.bonferroni_k
    if spec.mode == "one_sample":
        return bb_sup_quantile(1.0 - alpha_k) / math.sqrt(N)
    return two_sample_threshold(n, N, alpha_k)


def decide_candidate(real_data, sim_data, spec: ThresholdSpec,
                     candidate: CandidatePoint | None = None) -> EligibilityDecision:
    """KS statistic versus the mode's threshold; ties count as eligible."""
    real = as_sample(real_data)
    sim = as_sample(sim_data)
    stat = ks_distance(real, sim)
    thr = threshold_for(spec, n=sim.size, N=real.size)
    if candidate is None:
        candidate = CandidatePoint(0, np.empty(0))
    return EligibilityDecision(candidate, stat, thr, eligible=stat <= thr)


def _evaluate_candidate(real, simulator, cand, n, spec, seed, decide):
    try:
        out = np.asarray(simulator(cand.theta, n, child_seed(seed, SIM_STREAM, cand.id)),
                         dtype=float)
        if out.shape[0] != n:
            raise InvalidInputError(
                f"simulator returned {out.shape[0]} outputs, expected {n}")
        return decide(real, out, spec, cand)
    except Exception as exc:  # failures are recorded, never silently eligible
        return EligibilityDecision(cand, float("nan"), float("nan"),
                                   eligible=False, error=str(exc))


def build_eligibility_set(real_data, simulator: Callable, candidates: Sequence[CandidatePoint],
                          n: int, spec: ThresholdSpec, seed: int,
                          decide: Callable = decide_candidate) -> EligibilitySetResult:
    """Evaluate every candidate against the real data.

    ``simulator(theta, n, seed_seq)`` must return n outputs; its seed is
    derived from (master seed, candidate id), so results do not depend on
    evaluation order.  A failing candidate yields an error-marked,
    ineligible decision.
    """
    real = as_sample(real_data) if decide is decide_candidate else real_data
    N = real.size if isinstance(real, EmpiricalSample) else len(real)
    decisions = tuple(
        _evaluate_candidate(real, simulator, cand, n, spec, seed, decide)
        for cand in candidates
    )
    return EligibilitySetResult(decisions, spec.alpha, spec.mode, n=n, N=N, seed=seed)


def ro_bounds(result: EligibilitySetResult,
              psi_values: Mapping[int, float]) -> tuple[float, float]:
    """Min and max of a performance value over the eligible candidates."""
    kept = result.eligible_decisions()
    if not kept:
        raise EmptyEligibilitySetError("empty eligibility set: no bounds available")
    try:
        vals = [psi_values[d.candidate.id] for d in kept]
    except KeyError as exc:
        raise InvalidInputError(f"psi value missing for candidate {exc}") from exc
    return (min(vals), max(vals))


@dataclass(frozen=True)
class Type1Estimate:
    rate: float
    rejections: int
    reps: int
    failures: int
    # mean and standard deviation of (threshold - statistic) across reps
    gap_mean: float = float("nan")
    gap_std: float = float("nan")

    @property
    def std_error(self) -> float | None:
        k = self.reps - self.failures
        if k <= 1:
            return None
        return math.sqrt(self.rate * (1.0 - self.rate) / k)


def type1_error_estimate(simulator: Callable, theta0, n: int, N: int,
                         spec: ThresholdSpec, reps: int, seed: int,
                         decide: Callable = decide_candidate) -> Type1Estimate:
    """Fraction of replications in which the truth is rejected.

    Each replication draws fresh real and simulated data from ``theta0``.
    Simulator failures are excluded from the rate and counted separately.
    """
    if reps < 1:
        raise InvalidInputError("reps must be >= 1")
    theta0 = np.asarray(theta0, dtype=float)
    rejections = 0
    failures = 0
    gaps = []
    cand = CandidatePoint(0, theta0)
    for r in range(reps):
        try:
            real = simulator(theta0, N, child_seed(seed, REAL_STREAM, r))
            sim = simulator(theta0, n, child_seed(seed, SIM_STREAM, r))
            decision = decide(real, sim, spec, cand)
        except Exception:
            failures += 1
            continue
        if not decision.eligible:
            rejections += 1
        gaps.append(decision.threshold - decision.statistic)
    ok = reps - failures
    rate = rejections / ok if ok else float("nan")
    gap_mean = float(np.mean(gaps)) if gaps else float("nan")
    gap_std = float(np.std(gaps)) if gaps else float("nan")
    return Type1Estimate(rate, rejections, reps, failures, gap_mean, gap_std)


def type2_bound(n: int, N: int, m: int, eps1: float, eps2: float) -> float:
    """Finite-sample bound 2m(exp(-2n*eps1^2) + exp(-2N*eps2^2)), clamped to [0,1]."""
    if eps1 <= 0 or eps2 <= 0:
        raise InvalidInputError("eps1 and eps2 must be positive")
    if m < 0 or n < 0 or N < 0:
        raise InvalidInputError("m, n and N must be nonnegative")
    raw = 2.0 * m * (math.exp(-2.0 * n * eps1 * eps1)
                     + math.exp(-2.0 * N * eps2 * eps2))
    return min(1.0, raw)


def min_real_data_size(gap: float, eps1: float, eps2: float, alpha: float,
                       K: int = 1) -> int:
    """Smallest N with N > (q_{1-alpha/K} / (gap - eps1 - eps2))^2."""
    if eps1 <= 0 or eps2 <= 0:
        raise InvalidInputError("eps1 and eps2 must be positive")
    if not eps1 + eps2 < gap <= 1.0:
        raise InvalidInputError("need eps1 + eps2 < gap <= 1")
    if K < 1:
        raise InvalidInputError("K must be >= 1")
    q = bb_sup_quantile(1.0 - alpha / K)
    x = (q / (gap - eps1 - eps2)) ** 2
    return math.floor(x) + 1
