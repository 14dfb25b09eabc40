"""Single-server FCFS queues: M/M/1 and G/G/1 sojourn-time simulators.

Both queues start empty and are driven by the Lindley recursion for waiting
times, W_{j+1} = max(0, W_j + S_j - A_{j+1}), with sojourn T_j = W_j + S_j.
The first interarrival is irrelevant for sojourns of a queue that starts
empty, so only A_2, ..., A_J enter the recursion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError


@dataclass(frozen=True)
class Mm1Params:
    """Exponential interarrival rate, exponential service rate, horizon."""

    lam: float
    mu: float
    num_customers: int = 100

    def __post_init__(self):
        if self.lam <= 0 or self.mu <= 0:
            raise InvalidInputError("lam and mu must be positive")
        if self.num_customers < 1:
            raise InvalidInputError("num_customers must be >= 1")


@dataclass(frozen=True)
class Gg1Params:
    """Gamma(k, theta) interarrivals, Lognormal(mu, sigma^2) services."""

    k: float
    theta: float
    mu: float
    sigma: float
    num_customers: int = 10

    def __post_init__(self):
        if self.k <= 0 or self.theta <= 0 or self.sigma <= 0:
            raise InvalidInputError("k, theta and sigma must be positive")
        if self.num_customers < 1:
            raise InvalidInputError("num_customers must be >= 1")


def lindley_sojourns(interarrivals: np.ndarray, services: np.ndarray) -> np.ndarray:
    """Sojourn times of the first J customers of an initially empty queue.

    ``services`` has shape (R, J); ``interarrivals`` has shape (R, J-1) and
    holds the gaps A_2..A_J between consecutive arrivals.
    """
    services = np.atleast_2d(np.asarray(services, dtype=float))
    interarrivals = np.atleast_2d(np.asarray(interarrivals, dtype=float))
    reps, j_max = services.shape
    if j_max >= 2 and interarrivals.shape != (reps, j_max - 1):
        raise InvalidInputError("interarrivals must have shape (R, J-1)")
    sojourns = np.empty_like(services)
    wait = np.zeros(reps)
    sojourns[:, 0] = services[:, 0]
    for j in range(1, j_max):
        wait = np.maximum(0.0, wait + services[:, j - 1] - interarrivals[:, j - 1])
        sojourns[:, j] = wait + services[:, j]
    return sojourns


def _mm1_sojourn_matrix(p: Mm1Params, reps: int, rng: np.random.Generator):
    gaps = rng.exponential(1.0 / p.lam, size=(reps, max(p.num_customers - 1, 0)))
    services = rng.exponential(1.0 / p.mu, size=(reps, p.num_customers))
    return lindley_sojourns(gaps, services)


def simulate_mm1_batch(p: Mm1Params, reps: int, seed) -> np.ndarray:
    """Average sojourn time of the first ``num_customers`` customers, per run."""
    if reps < 1:
        raise InvalidInputError("reps must be >= 1")
    rng = np.random.default_rng(seed)
    return _mm1_sojourn_matrix(p, reps, rng).mean(axis=1)


def simulate_mm1(p: Mm1Params, seed) -> float:
    return float(simulate_mm1_batch(p, 1, seed)[0])


def simulate_gg1_batch(p: Gg1Params, reps: int, seed) -> np.ndarray:
    """Sojourn vectors of the first ``num_customers`` customers, one run per row."""
    if reps < 1:
        raise InvalidInputError("reps must be >= 1")
    rng = np.random.default_rng(seed)
    gaps = rng.gamma(p.k, p.theta, size=(reps, max(p.num_customers - 1, 0)))
    services = np.exp(p.mu + p.sigma * rng.standard_normal((reps, p.num_customers)))
    return lindley_sojourns(gaps, services)


def simulate_gg1(p: Gg1Params, seed) -> np.ndarray:
    return simulate_gg1_batch(p, 1, seed)[0]
