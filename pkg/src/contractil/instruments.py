"""Ready-made contracts: the worked examples and the three benchmark instruments.

The benchmark instruments (vanilla call, discrete barrier, double option) are
parameterized; their default parameters are our own choice.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .syntax import (
    Both,
    Contr,
    IfWithin,
    Obs,
    Op,
    OpE,
    RealLit,
    Scale,
    Tnum,
    Transfer,
    Translate,
    Tvar,
    Zero,
    all_of,
    as_texpr,
)

EXAMPLE_OPTION_TEXT = """\
translate(90,
  if(obs(AAPL,0) > 100.0,
     scale(obs(AAPL,0) - 100.0, transfer(you, me, USD)),
     zero))
"""

FX_SWAP_TEXT = """\
scale(1.000.000,
  both(
     all[translate(22, transfer(me, you, EUR)),
         translate(52, transfer(me, you, EUR)),
         translate(83, transfer(me, you, EUR))],
     scale(7.21,
      all[translate(22, transfer(you, me, DKK)),
          translate(52, transfer(you, me, DKK)),
          translate(83, transfer(you, me, DKK))])))
"""

TEMPLATED_TEXT = """\
translate(t0,
  both(scale(100.0, transfer(you, me)),
       translate(t1,
         if(obs(AAPL,0) > 100.0,
            scale(obs(AAPL,0) - 100.0, transfer(you, me)),
            zero))))
"""


def _gt(a, b) -> OpE:
    return OpE(Op.LT, (b, a))


def _call_payout(label: str, strike: float) -> OpE:
    s = Obs(label, 0)
    return OpE(Op.SUB, (s, RealLit(strike)))


def european_option(label: str = "AAPL", strike: float = 100.0, maturity: "int | str" = 90,
                    writer: str = "you", holder: str = "me", asset: str = "USD") -> Contr:
    """Cash-settled call: at ``maturity`` the writer pays ``max(S - K, 0)``."""
    return Translate(as_texpr(maturity), IfWithin(
        _gt(Obs(label, 0), RealLit(strike)), Tnum(0),
        Scale(_call_payout(label, strike), Transfer(writer, holder, asset)),
        Zero()))


def example_option() -> Contr:
    return european_option()


def fx_swap() -> Contr:
    eur = all_of(Translate(Tnum(d), Transfer("me", "you", "EUR")) for d in (22, 52, 83))
    dkk = all_of(Translate(Tnum(d), Transfer("you", "me", "DKK")) for d in (22, 52, 83))
    return Scale(RealLit(1_000_000.0), Both(eur, Scale(RealLit(7.21), dkk)))


def templated_example() -> Contr:
    """Fixed payment after ``t0`` days, then a call on AAPL ``t1`` days later."""
    cur = "CUR"
    return Translate(Tvar("t0"), Both(
        Scale(RealLit(100.0), Transfer("you", "me", cur)),
        Translate(Tvar("t1"), IfWithin(
            _gt(Obs("AAPL", 0), RealLit(100.0)), Tnum(0),
            Scale(_call_payout("AAPL", 100.0), Transfer("you", "me", cur)),
            Zero()))))


def barrier_option(levels: Mapping[str, float] | None = None,
                   windows: Sequence[tuple[int, int]] = ((5, 10), (25, 10)),
                   maturity: int = 60, rebate: float = 10.0,
                   label: str = "AAPL", strike: float = 100.0,
                   writer: str = "you", holder: str = "me", asset: str = "USD") -> Contr:
    """Discrete knock-out barrier on three underlyings with a rebate.

    During each monitoring window ``(start, length)`` the contract watches
    whether any underlying reaches its level. The first such day pays
    ``rebate`` and ends the contract; if no window triggers, a call on
    ``label`` is settled at ``maturity``.
    """
    levels = dict(levels or {"AAPL": 110.0, "MSFT": 112.0, "GOOG": 108.0})
    crossed = None
    for lab, lvl in levels.items():
        hit = OpE(Op.LEQ, (RealLit(lvl), Obs(lab, 0)))
        crossed = hit if crossed is None else OpE(Op.OR, (crossed, hit))
    pay_rebate = Scale(RealLit(rebate), Transfer(writer, holder, asset))

    stops = [start + length for start, length in windows]
    if any(s < p for s, p in zip([w[0] for w in windows[1:]], stops)) or maturity < stops[-1]:
        raise ValueError("monitoring windows must be ordered and end before maturity")
    contract: Contr = Translate(Tnum(maturity - stops[-1]), european_option(
        label, strike, 0, writer, holder, asset).body)
    for i in range(len(windows) - 1, -1, -1):
        start, length = windows[i]
        prev_stop = stops[i - 1] if i > 0 else 0
        contract = Translate(Tnum(start - prev_stop),
                             IfWithin(crossed, Tnum(length), pay_rebate, contract))
    return contract


def double_option(calls: Sequence[tuple[str, float]] = (("AAPL", 100.0), ("MSFT", 100.0)),
                  maturity: int = 90, writer: str = "you", holder: str = "me",
                  asset: str = "USD") -> Contr:
    """Two European calls on different underlyings, exercised independently."""
    return all_of(european_option(lab, k, maturity, writer, holder, asset) for lab, k in calls)


def instrument_names() -> list[str]:
    return sorted(_INSTRUMENTS)


def instrument(name: str) -> Contr:
    try:
        return _INSTRUMENTS[name]()
    except KeyError:
        raise KeyError(f"unknown instrument {name!r}; choose from {instrument_names()}") from None


_INSTRUMENTS = {
    "option": example_option,
    "fx-swap": fx_swap,
    "templated": templated_example,
    "vanilla": lambda: european_option(maturity="T"),
    "barrier": barrier_option,
    "double": double_option,
}

