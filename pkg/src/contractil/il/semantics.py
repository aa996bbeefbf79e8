"""Evaluation of payoff expressions.

Values are tagged by their Python type: ``bool`` (Bool), ``int`` (natural
times) and ``float`` (Real). Mixing tags in an operator is an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

from ..env import ExtEnv, TEnv, t_sem
from ..errors import EvalError, ILTypeError, NonRealResult
from .syntax import (
    BinOp,
    ILBinExpr,
    ILBool,
    ILExpr,
    ILFloat,
    ILIf,
    ILLoopIf,
    ILModel,
    ILNat,
    ILNow,
    ILPayoff,
    ILTexpr,
    ILTExpr,
    ILTExprZ,
    ILUnExpr,
    Texpr,
    TexprZ,
    TnumZ,
    Tplus,
    TplusZ,
    UnOp,
)

ILVal = Union[int, float, bool]


@dataclass(frozen=True)
class Discount:
    """Discount function ``day -> factor``.

    Either a flat continuous rate (``exp(-rate * day / day_count)``), an
    explicit per-day table, or an arbitrary callable. ``shift(n)`` is the
    curve seen ``n`` days later: ``d.shift(n)(t) == d(t + n)``.
    """

    rate: float | None = None
    table: tuple[float, ...] | None = None
    fn: Callable[[int], float] | None = None
    offset: int = 0
    day_count: float = 365.0

    @classmethod
    def flat(cls) -> "Discount":
        return cls(rate=0.0)

    @classmethod
    def from_rate(cls, rate: float, day_count: float = 365.0) -> "Discount":
        return cls(rate=float(rate), day_count=float(day_count))

    @classmethod
    def from_table(cls, factors: Sequence[float]) -> "Discount":
        return cls(table=tuple(float(f) for f in factors))

    @classmethod
    def from_function(cls, fn: Callable[[int], float]) -> "Discount":
        return cls(fn=fn)

    def __call__(self, day: int) -> float:
        t = day + self.offset
        if self.rate is not None:
            if self.rate == 0.0:
                return 1.0
            return math.exp(-self.rate * t / self.day_count)
        if self.table is not None:
            if 0 <= t < len(self.table):
                return self.table[t]
            raise EvalError(f"discount table has no factor for day {t}")
        if self.fn is not None:
            return float(self.fn(t))
        raise EvalError("empty discount function")

    def shift(self, n: int) -> "Discount":
        if n == 0:
            return self
        return Discount(self.rate, self.table, self.fn, self.offset + n, self.day_count)

    def to_json(self) -> dict:
        if self.fn is not None:
            raise TypeError("callable discount functions are not serializable")
        if self.rate is not None:
            return {"rate": self.rate, "day_count": self.day_count, "offset": self.offset}
        return {"table": list(self.table), "offset": self.offset}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Discount":
        offset = int(obj.get("offset", 0))
        if "table" in obj:
            return cls(table=tuple(float(f) for f in obj["table"]), offset=offset)
        return cls(rate=float(obj.get("rate", 0.0)), offset=offset,
                   day_count=float(obj.get("day_count", 365.0)))


def texpr_sem(te: ILTExpr, tenv: TEnv) -> int:
    if isinstance(te, Texpr):
        return t_sem(te.texpr, tenv)
    if isinstance(te, Tplus):
        return texpr_sem(te.left, tenv) + texpr_sem(te.right, tenv)
    raise TypeError(f"not an ILTExpr: {te!r}")


def texpr_z_sem(te: ILTExprZ, tenv: TEnv) -> int:
    if isinstance(te, TnumZ):
        return te.value
    if isinstance(te, TexprZ):
        return texpr_sem(te.texpr, tenv)
    if isinstance(te, TplusZ):
        return texpr_z_sem(te.left, tenv) + texpr_z_sem(te.right, tenv)
    raise TypeError(f"not an ILTExprZ: {te!r}")


@dataclass(frozen=True)
class EvalArgs:
    """Everything a payoff expression is evaluated against (besides ``t0``)."""

    rho: ExtEnv
    tenv: TEnv
    now: int
    disc: Discount
    p1: str
    p2: str


def _tag(v: ILVal) -> str:
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "nat"
    return "real"


def apply_binop(op: BinOp, a: ILVal, b: ILVal) -> ILVal:
    ta, tb = _tag(a), _tag(b)
    if ta != tb:
        raise ILTypeError(f"{op.value} applied to {ta} and {tb}")
    if op in (BinOp.AND, BinOp.OR):
        if ta != "bool":
            raise ILTypeError(f"{op.value} needs bools, got {ta}")
        return (a and b) if op is BinOp.AND else (a or b)
    if op is BinOp.EQ:
        return a == b
    if ta == "bool":
        raise ILTypeError(f"{op.value} applied to bools")
    if op is BinOp.LT:
        return a < b
    if op is BinOp.LEQ:
        return a <= b
    if ta == "nat" and op is not BinOp.ADD:
        raise ILTypeError(f"{op.value} is not defined on naturals")
    if op is BinOp.ADD:
        return a + b
    if op is BinOp.SUB:
        return a - b
    if op is BinOp.MULT:
        return a * b
    if op is BinOp.DIV:
        if b == 0.0:
            raise EvalError("division by zero")
        return a / b
    raise ILTypeError(f"unknown operator {op!r}")


def apply_unop(op: UnOp, a: ILVal) -> ILVal:
    t = _tag(a)
    if op is UnOp.NOT:
        if t != "bool":
            raise ILTypeError(f"not applied to {t}")
        return not a
    if t != "real":
        raise ILTypeError(f"neg applied to {t}")
    return -a


def _bilateral_sign(party: str) -> Callable[[str, str], int]:
    def sign(src: str, dst: str) -> int:
        if dst == party:
            return 1
        if src == party:
            return -1
        return 0
    return sign


def _pair_sign(p1: str, p2: str) -> Callable[[str, str], int]:
    def sign(src: str, dst: str) -> int:
        if src == p1 and dst == p2:
            return 1
        if src == p2 and dst == p1:
            return -1
        return 0
    return sign


class _Evaluator:
    def __init__(self, rho: ExtEnv, tenv: TEnv, now: int, disc: Discount,
                 sign: Callable[[str, str], int]):
        self.rho = rho
        self.tenv = tenv
        self.now = now
        self.disc = disc
        self.sign = sign

    def _as_bool(self, v: ILVal, where: str) -> bool:
        if not isinstance(v, bool):
            raise ILTypeError(f"{where} scrutinee is {_tag(v)}, not bool")
        return v

    def ev(self, il: ILExpr, t0: int) -> ILVal:
        if isinstance(il, ILFloat):
            return il.value
        if isinstance(il, ILNat):
            return il.value
        if isinstance(il, ILBool):
            return il.value
        if isinstance(il, ILNow):
            return self.now
        if isinstance(il, ILTexpr):
            return texpr_sem(il.texpr, self.tenv) + t0
        if isinstance(il, ILModel):
            v = self.rho(il.label, texpr_z_sem(il.time, self.tenv) + t0)
            return v if isinstance(v, bool) else float(v)
        if isinstance(il, ILPayoff):
            s = self.sign(il.src, il.dst)
            if s == 0:
                return 0.0
            d = self.disc(texpr_sem(il.time, self.tenv) + t0)
            return d if s > 0 else -d
        if isinstance(il, ILUnExpr):
            return apply_unop(il.op, self.ev(il.arg, t0))
        if isinstance(il, ILBinExpr):
            return apply_binop(il.op, self.ev(il.left, t0), self.ev(il.right, t0))
        if isinstance(il, ILIf):
            if self._as_bool(self.ev(il.cond, t0), "if"):
                return self.ev(il.then, t0)
            return self.ev(il.orelse, t0)
        if isinstance(il, ILLoopIf):
            n = t_sem(il.window, self.tenv)
            shift = t0
            while True:
                if self._as_bool(self.ev(il.cond, shift), "loopif"):
                    return self.ev(il.then, shift)
                if n == 0:
                    return self.ev(il.orelse, shift)
                n -= 1
                shift += 1
        raise TypeError(f"not a payoff expression: {il!r}")


def il_sem(il: ILExpr, args: EvalArgs, t0: int = 0) -> ILVal:
    """Value of ``il``; payoffs from ``p1`` to ``p2`` count positive."""
    ev = _Evaluator(args.rho, args.tenv, args.now, args.disc, _pair_sign(args.p1, args.p2))
    return ev.ev(il, t0)


def il_sem_bilateral(il: ILExpr, rho: ExtEnv, tenv: TEnv, now: int, disc: Discount,
                     party: str, t0: int = 0) -> ILVal:
    """Value of ``il`` seen from ``party``: incoming payoffs positive, outgoing negative."""
    return _Evaluator(rho, tenv, now, disc, _bilateral_sign(party)).ev(il, t0)


def eval_at(t: int, il: ILExpr, rho: ExtEnv, disc: Discount, p1: str, p2: str,
            tenv: TEnv | None = None) -> float:
    """Evaluate ``il`` with current time ``t`` and no accumulated shift."""
    v = il_sem(il, EvalArgs(rho, tenv or {}, t, disc, p1, p2))
    if isinstance(v, bool) or not isinstance(v, float):
        raise NonRealResult(f"payoff expression evaluated to {_tag(v)} {v!r}")
    return v
