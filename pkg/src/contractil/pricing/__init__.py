"""Monte Carlo pricing of payoff kernels under correlated geometric Brownian motion."""

from .black_scholes import black_scholes_call
from .engine import (
    PriceResult,
    cut_versus_reduction,
    dumps_results,
    path_payoffs,
    price_across_time,
    price_mc,
)
from .model import ModelSpec, simulate_path, simulate_paths

__all__ = [
    "black_scholes_call", "PriceResult", "cut_versus_reduction", "dumps_results", "path_payoffs",
    "price_across_time", "price_mc", "ModelSpec", "simulate_path", "simulate_paths",
]
