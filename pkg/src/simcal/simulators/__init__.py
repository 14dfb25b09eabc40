from .queues import (
    Gg1Params,
    Mm1Params,
    lindley_sojourns,
    simulate_gg1,
    simulate_gg1_batch,
    simulate_mm1,
    simulate_mm1_batch,
)
from .orderbook import Order, OrderBook, Trade
from .market import (
    MarketConfig,
    appendix_configs,
    ou_fundamental_step,
    simulate_market,
    simulate_market_batch,
)

__all__ = [
    "Mm1Params",
    "Gg1Params",
    "lindley_sojourns",
    "simulate_mm1",
    "simulate_mm1_batch",
    "simulate_gg1",
    "simulate_gg1_batch",
    "Order",
    "OrderBook",
    "Trade",
    "MarketConfig",
    "appendix_configs",
    "ou_fundamental_step",
    "simulate_market",
    "simulate_market_batch",
]
