"""Event-driven agent-based limit-order-book market.

One session simulates a fixed number of seconds of trading on a single
security.  Three agent populations interact through the book:

* a market maker that wakes at a constant rate, cancels its previous quotes
  and posts symmetric limit orders around the current mid;
* noise agents, each arriving once at a uniformly random time and sending a
  market order of random size in a random direction;
* value agents whose wakeups form a Poisson process (rate ``lambda_a`` per
  nanosecond per agent).  On wakeup an agent observes the mean-reverting
  fundamental plus Gaussian noise and posts a one-tick-inside-the-touch
  limit order toward its perceived mispricing.

The session timebase is nanoseconds.  The output is the per-second log
return series of the mid price; the mid falls back to its last valid value
(initially ``r_bar``) whenever one book side is empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError
from .orderbook import BUY, SELL, OrderBook

NS_PER_SECOND = 1_000_000_000


@dataclass(frozen=True)
class MarketConfig:
    num_value_agents: int = 100
    num_noise_agents: int = 1000
    r_bar: float = 1e5            # mean fundamental, in ticks
    kappa: float = 1.67e-12       # mean reversion rate, 1/ns
    lambda_a: float = 1e-13       # value-agent wakeup rate, 1/ns per agent
    session_seconds: int = 1800
    fundamental_vol: float = 1e-3  # ticks per sqrt(ns)
    obs_noise_sd: float = 10.0     # ticks, value-agent observation noise
    mm_spread: int = 2             # ticks between the market maker's quotes
    mm_size: int = 100
    mm_wake_seconds: float = 10.0
    noise_size_max: int = 100
    value_size: int = 100
    tick: int = 1

    def __post_init__(self):
        if self.num_value_agents < 0 or self.num_noise_agents < 0:
            raise InvalidInputError("agent counts must be nonnegative")
        if self.r_bar <= 0:
            raise InvalidInputError("r_bar must be positive")
        if self.kappa < 0 or self.lambda_a < 0:
            raise InvalidInputError("kappa and lambda_a must be nonnegative")
        if self.session_seconds < 2:
            raise InvalidInputError("session_seconds must be >= 2")
        if self.mm_spread < 2 or self.mm_spread % 2:
            raise InvalidInputError("mm_spread must be an even number of ticks >= 2")
        if self.mm_size < 1 or self.noise_size_max < 1 or self.value_size < 1:
            raise InvalidInputError("order sizes must be positive")


def ou_fundamental_step(r_prev: float, r_bar: float, kappa: float,
                        dt_ns: float, vol: float, noise: float) -> float:
    """One discrete step of the mean-reverting fundamental."""
    if dt_ns < 0:
        raise InvalidInputError("dt_ns must be nonnegative")
    return r_bar + math.exp(-kappa * dt_ns) * (r_prev - r_bar) \
        + vol * math.sqrt(dt_ns) * noise


# event stream tags; ties in time resolve in this priority order
_MM, _NOISE, _VALUE = 0, 1, 2


def simulate_market(config: MarketConfig, seed) -> np.ndarray:
    """Run one session and return the per-second mid-price log returns.

    The output has length ``session_seconds - 1`` (1799 by default) and is
    bit-identical across calls with the same (config, seed).
    """
    rng = np.random.default_rng(seed)
    horizon = config.session_seconds * NS_PER_SECOND

    mm_times = np.arange(0, horizon,
                         int(config.mm_wake_seconds * NS_PER_SECOND), dtype=np.int64)
    noise_times = np.sort(rng.integers(0, horizon, size=config.num_noise_agents))
    noise_sizes = rng.integers(1, config.noise_size_max + 1,
                               size=config.num_noise_agents)
    noise_buys = rng.integers(0, 2, size=config.num_noise_agents)
    n_value = rng.poisson(config.num_value_agents * config.lambda_a * horizon)
    value_times = np.sort(rng.integers(0, horizon, size=n_value))
    value_obs_noise = rng.standard_normal(n_value) * config.obs_noise_sd
    value_ou_noise = rng.standard_normal(n_value)

    times = np.concatenate([mm_times, noise_times, value_times])
    tags = np.concatenate([
        np.full(mm_times.size, _MM, dtype=np.int8),
        np.full(noise_times.size, _NOISE, dtype=np.int8),
        np.full(value_times.size, _VALUE, dtype=np.int8),
    ])
    stream_idx = np.concatenate([
        np.arange(mm_times.size), np.arange(noise_times.size), np.arange(n_value)
    ])
    order = np.lexsort((tags, times))
    times, tags, stream_idx = times[order], tags[order], stream_idx[order]

    book = OrderBook(tick=config.tick, record_trades=False)
    tick = config.tick
    half_spread = (config.mm_spread // 2) * tick
    last_mid = float(config.r_bar)
    fundamental = float(config.r_bar)
    fundamental_t = 0
    mm_bid_id = mm_ask_id = None
    change_t = [0]
    change_mid = [last_mid]

    def on_grid(x: float) -> int:
        return tick * round(x / tick)

    for t, tag, k in zip(times.tolist(), tags.tolist(), stream_idx.tolist()):
        if tag == _MM:
            center = on_grid(last_mid)
            if mm_bid_id is not None:
                book.cancel(mm_bid_id)
                book.cancel(mm_ask_id)
            bid_px = max(tick, center - half_spread)
            mm_bid_id = book.add_limit(BUY, bid_px, config.mm_size)
            mm_ask_id = book.add_limit(SELL, bid_px + config.mm_spread * tick,
                                       config.mm_size)
        elif tag == _NOISE:
            book.add_market(BUY if noise_buys[k] else SELL, int(noise_sizes[k]))
        else:
            fundamental = ou_fundamental_step(
                fundamental, config.r_bar, config.kappa, t - fundamental_t,
                config.fundamental_vol, float(value_ou_noise[k]))
            fundamental_t = t
            observed = fundamental + float(value_obs_noise[k])
            bid, ask = book.best_bid(), book.best_ask()
            if observed > last_mid:
                px = bid + tick if bid is not None else on_grid(last_mid)
                if ask is not None:
                    px = min(px, ask)
                book.add_limit(BUY, max(tick, px), config.value_size)
            elif observed < last_mid:
                px = ask - tick if ask is not None else on_grid(last_mid)
                if bid is not None:
                    px = max(px, bid)
                book.add_limit(SELL, max(tick, px), config.value_size)
        mid = book.mid_price()
        if mid is not None and mid != last_mid:
            last_mid = mid
            change_t.append(t)
            change_mid.append(mid)

    sample_times = np.arange(1, config.session_seconds + 1, dtype=np.int64) \
        * NS_PER_SECOND
    idx = np.searchsorted(np.asarray(change_t, dtype=np.int64), sample_times,
                          side="right") - 1
    mids = np.asarray(change_mid)[idx]
    return np.diff(np.log(mids))


def simulate_market_batch(config: MarketConfig, reps: int, seed) -> np.ndarray:
    """Stack of return series, one session per row, seeded per row."""
    if reps < 1:
        raise InvalidInputError("reps must be >= 1")
    root = seed if isinstance(seed, np.random.SeedSequence) \
        else np.random.SeedSequence(seed)
    children = root.spawn(reps)
    return np.stack([simulate_market(config, s) for s in children])


def appendix_configs() -> dict[int, MarketConfig]:
    """The 17 benchmark agent configurations; entry 1 is the ground truth."""
    rows = {
        1: (100, 1000, 1e5, 1.67e-12, 1e-13),
        2: (105, 1050, 1e5, 1.67e-12, 1e-14),
        3: (90, 900, 1e5, 1.67e-12, 1e-13),
        4: (70, 700, 1e5, 1.67e-12, 1e-13),
        5: (95, 950, 1.1e5, 1.5e-12, 1.1e-13),
        6: (500, 1000, 1e5, 1.67e-12, 1e-13),
        7: (70, 700, 1e5, 8e-1, 1e-12),
        8: (100, 1000, 1e5, 5e-2, 1e-12),
        9: (200, 2000, 1e5, 1.67e-12, 1e-13),
        10: (10, 100, 1e5, 1.67e-12, 1e-13),
        11: (50, 500, 1e5, 1.67e-12, 1e-13),
        12: (105, 1050, 9e4, 1.8e-12, 8e-14),
        13: (100, 3000, 1e5, 1.67e-12, 1e-13),
        14: (10, 10, 1e5, 1.67e-12, 1e-12),
        15: (200, 1500, 1e5, 1.67e-12, 1e-12),
        16: (10, 10, 1e5, 1.67e-12, 1e-13),
        17: (50, 500, 1e5, 1.67e-12, 1e-11),
    }
    return {
        no: MarketConfig(num_value_agents=m, num_noise_agents=n, r_bar=r,
                         kappa=kappa, lambda_a=lam)
        for no, (m, n, r, kappa, lam) in rows.items()
    }
