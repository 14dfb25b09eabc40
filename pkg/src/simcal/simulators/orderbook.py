"""A limit order book with price-then-FIFO matching on integer tick prices.

Resting orders queue per price level in arrival order.  Incoming limit
orders first trade against the opposite side at prices that cross, then any
remainder rests.  Market orders trade against the opposite side until filled
or the book side empties; unfilled remainder is dropped.  Cancellation is
lazy: cancelled orders are skipped when they reach the front of their queue.
"""

from __future__ import annotations

import bisect
from collections import deque
from dataclasses import dataclass

from ..errors import InvalidInputError

BUY = "buy"
SELL = "sell"


@dataclass(frozen=True)
class Order:
    id: int
    side: str
    price: int
    size: int
    timestamp: int


@dataclass(frozen=True)
class Trade:
    maker_id: int
    taker_id: int
    price: int
    size: int


class OrderBook:
    def __init__(self, tick: int = 1, record_trades: bool = True):
        self.tick = tick
        self.record_trades = record_trades
        self.trades: list[Trade] = []
        self._bids: dict[int, deque] = {}   # price -> deque of [id, size]
        self._asks: dict[int, deque] = {}
        self._bid_prices: list[int] = []    # ascending; best bid is last
        self._ask_prices: list[int] = []    # ascending; best ask is first
        self._orders: dict[int, list] = {}  # id -> [price, side, live]
        self._next_id = 0
        self._clock = 0

    # -- book inspection ----------------------------------------------------

    def _purge_front(self, q) -> None:
        while q and not self._orders[q[0][0]][2]:
            q.popleft()

    def best_bid(self) -> int | None:
        while self._bid_prices:
            px = self._bid_prices[-1]
            q = self._bids.get(px)
            if q is not None:
                self._purge_front(q)
            if q:
                return px
            self._bid_prices.pop()
            self._bids.pop(px, None)
        return None

    def best_ask(self) -> int | None:
        while self._ask_prices:
            px = self._ask_prices[0]
            q = self._asks.get(px)
            if q is not None:
                self._purge_front(q)
            if q:
                return px
            self._ask_prices.pop(0)
            self._asks.pop(px, None)
        return None

    def mid_price(self) -> float | None:
        bid, ask = self.best_bid(), self.best_ask()
        if bid is None or ask is None:
            return None
        return 0.5 * (bid + ask)

    def depth(self, side: str, price: int) -> int:
        levels = self._bids if side == BUY else self._asks
        return sum(entry[1] for entry in levels.get(price, ())
                   if self._orders[entry[0]][2])

    def open_orders(self) -> list[Order]:
        out = []
        for side, levels in ((BUY, self._bids), (SELL, self._asks)):
            for px, q in levels.items():
                for oid, size in q:
                    if self._orders[oid][2]:
                        out.append(Order(oid, side, px, size, self._orders[oid][3]))
        return sorted(out, key=lambda o: o.timestamp)

    # -- order entry ---------------------------------------------------------

    def _tick_time(self) -> int:
        self._clock += 1
        return self._clock

    def _insert_price(self, prices: list[int], px: int):
        i = bisect.bisect_left(prices, px)
        if i == len(prices) or prices[i] != px:
            prices.insert(i, px)

    def _record(self, maker_id: int, taker_id: int, price: int, size: int):
        if self.record_trades:
            self.trades.append(Trade(maker_id, taker_id, price, size))

    def _match(self, side: str, size: int, taker_id: int, limit_price=None) -> int:
        """Trade ``size`` against the opposite side; returns unfilled size."""
        opposite = self._asks if side == BUY else self._bids
        while size > 0:
            best = self.best_ask() if side == BUY else self.best_bid()
            if best is None:
                break
            if limit_price is not None:
                if side == BUY and best > limit_price:
                    break
                if side == SELL and best < limit_price:
                    break
            q = opposite[best]
            while q and size > 0:
                entry = q[0]
                if not self._orders[entry[0]][2]:
                    q.popleft()
                    continue
                fill = entry[1] if entry[1] < size else size
                entry[1] -= fill
                size -= fill
                self._record(entry[0], taker_id, best, fill)
                if entry[1] == 0:
                    self._orders[entry[0]][2] = False
                    q.popleft()
            if not q:
                opposite.pop(best, None)
        return size

    def add_limit(self, side: str, price: int, size: int) -> int:
        if side not in (BUY, SELL):
            raise InvalidInputError(f"unknown side {side!r}")
        if size <= 0 or price <= 0:
            raise InvalidInputError("price and size must be positive")
        if price % self.tick:
            raise InvalidInputError(f"price {price} is not a multiple of tick {self.tick}")
        oid = self._next_id
        self._next_id += 1
        ts = self._tick_time()
        self._orders[oid] = [price, side, True, ts]
        remaining = self._match(side, size, oid, limit_price=price)
        if remaining > 0:
            levels = self._bids if side == BUY else self._asks
            prices = self._bid_prices if side == BUY else self._ask_prices
            if price not in levels:
                levels[price] = deque()
                self._insert_price(prices, price)
            levels[price].append([oid, remaining])
        else:
            self._orders[oid][2] = False
        return oid

    def add_market(self, side: str, size: int) -> int:
        if side not in (BUY, SELL):
            raise InvalidInputError(f"unknown side {side!r}")
        if size <= 0:
            raise InvalidInputError("size must be positive")
        oid = self._next_id
        self._next_id += 1
        self._orders[oid] = [0, side, False, self._tick_time()]
        self._match(side, size, oid, limit_price=None)
        return oid

    def cancel(self, order_id: int) -> bool:
        rec = self._orders.get(order_id)
        if rec is None or not rec[2]:
            return False
        rec[2] = False
        return True
