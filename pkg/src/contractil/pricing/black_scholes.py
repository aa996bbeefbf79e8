"""Closed-form European call price, the reference for Monte Carlo checks."""

from __future__ import annotations

import math

from scipy.special import ndtr


def black_scholes_call(spot: float, strike: float, rate: float, vol: float,
                       years: float) -> float:
    """Black-Scholes value of a European call.

    With no volatility or no time left the value is the discounted intrinsic
    value ``max(S - K e^{-rT}, 0)``.
    """
    if not spot > 0 or not strike > 0:
        raise ValueError("spot and strike must be positive")
    if vol < 0 or years < 0:
        raise ValueError("volatility and time must be non-negative")
    disc_strike = strike * math.exp(-rate * years)
    if vol == 0.0 or years == 0.0:
        return max(spot - disc_strike, 0.0)
    sd = vol * math.sqrt(years)
    d1 = (math.log(spot / strike) + (rate + 0.5 * vol * vol) * years) / sd
    d2 = d1 - sd
    return float(spot * ndtr(d1) - disc_strike * ndtr(d2))
