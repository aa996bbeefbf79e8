"""Random well-typed contracts, environments and discount curves for the
property-based soundness checks.

Everything is driven by an explicit ``random.Random`` so a case is fully
reproducible from its seed.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field

from .env import ExtEnv
from .il.semantics import Discount
from .syntax import (
    Acc,
    BoolLit,
    Both,
    Contr,
    Exp,
    IfWithin,
    Let,
    Obs,
    Op,
    OpE,
    RealLit,
    Scale,
    TExpr,
    Tnum,
    Transfer,
    Translate,
    Tvar,
    VarE,
    Zero,
)

LABELS = ("AAPL", "MSFT", "GOOG")
PARTIES = ("me", "you", "bank")
TEMPLATE_VARS = ("T1", "T2", "T3")


@dataclass
class GenConfig:
    max_depth: int = 6
    max_window: int = 10
    max_exp_depth: int = 3
    labels: tuple[str, ...] = LABELS
    parties: tuple[str, ...] = PARTIES
    assets: tuple[str, ...] = ("USD",)
    template_vars: tuple[str, ...] = ()
    allow_let: bool = False
    allow_acc: bool = False
    bound_vars: tuple[str, ...] = field(default=())


def _lit(rng: random.Random) -> RealLit:
    return RealLit(round(rng.uniform(50.0, 150.0), 2))


def random_real_exp(rng: random.Random, cfg: GenConfig, depth: int,
                    bound: tuple[str, ...] = ()) -> Exp:
    if depth <= 0 or rng.random() < 0.3:
        r = rng.random()
        if bound and r < 0.25:
            return VarE(rng.choice(bound))
        if r < 0.6:
            return Obs(rng.choice(cfg.labels), rng.randint(-3, 3))
        if r < 0.8:
            return _lit(rng)
        return RealLit(round(rng.uniform(0.0, 2.0), 3))
    choice = rng.random()
    if choice < 0.45:
        o = rng.choice((Op.ADD, Op.SUB, Op.MULT))
        return OpE(o, (random_real_exp(rng, cfg, depth - 1, bound),
                       random_real_exp(rng, cfg, depth - 1, bound)))
    if choice < 0.6:
        # denominators are observables or positive literals, never zero
        den = (Obs(rng.choice(cfg.labels), rng.randint(-3, 3)) if rng.random() < 0.5
               else RealLit(round(rng.uniform(0.5, 10.0), 2)))
        return OpE(Op.DIV, (random_real_exp(rng, cfg, depth - 1, bound), den))
    if choice < 0.7:
        return OpE(Op.NEG, (random_real_exp(rng, cfg, depth - 1, bound),))
    if choice < 0.85:
        return OpE(Op.COND, (random_bool_exp(rng, cfg, depth - 1, bound),
                             random_real_exp(rng, cfg, depth - 1, bound),
                             random_real_exp(rng, cfg, depth - 1, bound)))
    if cfg.allow_acc:
        var = f"a{depth}"
        return Acc(var, OpE(Op.ADD, (VarE(var), random_real_exp(rng, cfg, depth - 1, bound))),
                   rng.randint(0, 3), random_real_exp(rng, cfg, depth - 1, bound))
    return random_real_exp(rng, cfg, depth - 1, bound)


def random_bool_exp(rng: random.Random, cfg: GenConfig, depth: int,
                    bound: tuple[str, ...] = ()) -> Exp:
    if depth <= 0 or rng.random() < 0.2:
        if rng.random() < 0.15:
            return BoolLit(rng.random() < 0.5)
        return OpE(rng.choice((Op.LT, Op.LEQ)),
                   (Obs(rng.choice(cfg.labels), rng.randint(-3, 3)), _lit(rng)))
    choice = rng.random()
    if choice < 0.55:
        return OpE(rng.choice((Op.LT, Op.LEQ, Op.EQ)),
                   (random_real_exp(rng, cfg, depth - 1, bound),
                    random_real_exp(rng, cfg, depth - 1, bound)))
    if choice < 0.8:
        return OpE(rng.choice((Op.AND, Op.OR)),
                   (random_bool_exp(rng, cfg, depth - 1, bound),
                    random_bool_exp(rng, cfg, depth - 1, bound)))
    if choice < 0.9:
        return OpE(Op.NOT, (random_bool_exp(rng, cfg, depth - 1, bound),))
    return OpE(Op.COND, (random_bool_exp(rng, cfg, depth - 1, bound),
                         random_bool_exp(rng, cfg, depth - 1, bound),
                         random_bool_exp(rng, cfg, depth - 1, bound)))


def _window(rng: random.Random, cfg: GenConfig, low: int = 0) -> TExpr:
    if cfg.template_vars and rng.random() < 0.5:
        return Tvar(rng.choice(cfg.template_vars))
    return Tnum(rng.randint(low, cfg.max_window))


def random_contract(rng: random.Random, cfg: GenConfig | None = None,
                    depth: int | None = None, bound: tuple[str, ...] = ()) -> Contr:
    cfg = cfg or GenConfig()
    depth = cfg.max_depth if depth is None else depth
    if depth <= 0 or rng.random() < 0.15:
        if rng.random() < 0.2:
            return Zero()
        src, dst = rng.sample(cfg.parties, 2)
        return Transfer(src, dst, rng.choice(cfg.assets))
    ed = min(cfg.max_exp_depth, depth)
    choice = rng.random()
    if choice < 0.2:
        return Scale(random_real_exp(rng, cfg, ed, bound),
                     random_contract(rng, cfg, depth - 1, bound))
    if choice < 0.45:
        return Translate(_window(rng, cfg), random_contract(rng, cfg, depth - 1, bound))
    if choice < 0.7:
        return Both(random_contract(rng, cfg, depth - 1, bound),
                    random_contract(rng, cfg, depth - 1, bound))
    if choice < 0.9 or not cfg.allow_let:
        return IfWithin(random_bool_exp(rng, cfg, ed, bound), _window(rng, cfg),
                        random_contract(rng, cfg, depth - 1, bound),
                        random_contract(rng, cfg, depth - 1, bound))
    var = f"x{depth}"
    return Let(var, random_real_exp(rng, cfg, ed, bound),
               random_contract(rng, cfg, depth - 1, bound + (var,)))


def random_tenv(rng: random.Random, names=TEMPLATE_VARS, max_value: int = 10) -> dict[str, int]:
    return {n: rng.randint(0, max_value) for n in names}


def random_env(seed: int, labels=LABELS, low: float = 50.0, high: float = 150.0) -> ExtEnv:
    """A total environment: a pure function of ``(seed, label, day)``."""

    @functools.lru_cache(maxsize=None)
    def lookup(label: str, day: int) -> float:
        return round(random.Random(f"{seed}/{label}/{day}").uniform(low, high), 2)

    return ExtEnv.total(lookup)


def random_discount(rng: random.Random, length: int = 256) -> Discount:
    if rng.random() < 0.5:
        return Discount.from_rate(rng.uniform(0.0, 0.1))
    factors, f = [], 1.0
    for _ in range(length):
        factors.append(f)
        f *= rng.uniform(0.995, 1.0)
    return Discount.from_table(factors)


@dataclass(frozen=True)
class Case:
    """One generated soundness-check input."""

    seed: int
    contract: Contr
    rho: ExtEnv
    disc: Discount
    p1: str
    p2: str


def random_case(seed: int, cfg: GenConfig | None = None) -> Case:
    rng = random.Random(seed)
    cfg = cfg or GenConfig()
    c = random_contract(rng, cfg)
    p1, p2 = rng.sample(cfg.parties, 2)
    return Case(seed, c, random_env(rng.randrange(2**31), cfg.labels), random_discount(rng), p1, p2)
