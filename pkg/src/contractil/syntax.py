"""Abstract syntax of the contract language: template expressions, expressions, contracts.

All nodes are frozen dataclasses, so structural equality and hashing come for
free and trees can be shared between threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import ClassVar, Iterable, Union


class Ty(enum.Enum):
    REAL = "Real"
    BOOL = "Bool"


class Op(enum.Enum):
    ADD = "add"
    SUB = "sub"
    MULT = "mult"
    DIV = "div"
    LT = "lt"
    LEQ = "leq"
    EQ = "eq"
    AND = "and"
    OR = "or"
    NOT = "not"
    NEG = "neg"
    COND = "cond"

    @property
    def arity(self) -> int:
        if self is Op.COND:
            return 3
        if self in (Op.NOT, Op.NEG):
            return 1
        return 2


# (argument types, result type); cond is polymorphic and handled separately
OP_SIGNATURES: dict[Op, tuple[tuple[Ty, ...], Ty]] = {
    Op.ADD: ((Ty.REAL, Ty.REAL), Ty.REAL),
    Op.SUB: ((Ty.REAL, Ty.REAL), Ty.REAL),
    Op.MULT: ((Ty.REAL, Ty.REAL), Ty.REAL),
    Op.DIV: ((Ty.REAL, Ty.REAL), Ty.REAL),
    Op.LT: ((Ty.REAL, Ty.REAL), Ty.BOOL),
    Op.LEQ: ((Ty.REAL, Ty.REAL), Ty.BOOL),
    Op.EQ: ((Ty.REAL, Ty.REAL), Ty.BOOL),
    Op.AND: ((Ty.BOOL, Ty.BOOL), Ty.BOOL),
    Op.OR: ((Ty.BOOL, Ty.BOOL), Ty.BOOL),
    Op.NOT: ((Ty.BOOL,), Ty.BOOL),
    Op.NEG: ((Ty.REAL,), Ty.REAL),
}


# --- template expressions -------------------------------------------------


@dataclass(frozen=True)
class Tnum:
    value: int
    kind: ClassVar[str] = "tnum"

    def __post_init__(self):
        if isinstance(self.value, bool) or not isinstance(self.value, int):
            raise TypeError(f"template numeral must be an int, got {self.value!r}")
        if self.value < 0:
            raise ValueError(f"template numeral must be >= 0, got {self.value}")


@dataclass(frozen=True)
class Tvar:
    name: str
    kind: ClassVar[str] = "tvar"


TExpr = Union[Tnum, Tvar]


def as_texpr(t: "TExpr | int | str") -> TExpr:
    if isinstance(t, (Tnum, Tvar)):
        return t
    if isinstance(t, str):
        return Tvar(t)
    return Tnum(t)


# --- expressions ----------------------------------------------------------


@dataclass(frozen=True)
class OpE:
    op: Op
    args: tuple["Exp", ...]
    kind: ClassVar[str] = "op"

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.op.arity:
            raise ValueError(
                f"{self.op.value} expects {self.op.arity} arguments, got {len(self.args)}"
            )


@dataclass(frozen=True)
class Obs:
    label: str
    offset: int
    kind: ClassVar[str] = "obs"


@dataclass(frozen=True)
class RealLit:
    value: float
    kind: ClassVar[str] = "real"

    def __post_init__(self):
        if isinstance(self.value, bool):
            raise TypeError("RealLit needs a number, not a bool")
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class BoolLit:
    value: bool
    kind: ClassVar[str] = "bool"

    def __post_init__(self):
        if not isinstance(self.value, bool):
            raise TypeError(f"BoolLit needs a bool, got {self.value!r}")


@dataclass(frozen=True)
class VarE:
    name: str
    kind: ClassVar[str] = "var"


@dataclass(frozen=True)
class Acc:
    """Accumulator: fold ``body`` (with ``var`` bound to the running value)
    forward over the last ``days`` days, starting from ``init``."""

    var: str
    body: "Exp"
    days: int
    init: "Exp"
    kind: ClassVar[str] = "acc"

    def __post_init__(self):
        if self.days < 0:
            raise ValueError("Acc days must be >= 0")


Exp = Union[OpE, Obs, RealLit, BoolLit, VarE, Acc]


# --- contracts ------------------------------------------------------------


@dataclass(frozen=True)
class Zero:
    kind: ClassVar[str] = "zero"


@dataclass(frozen=True)
class Let:
    var: str
    bound: Exp
    body: "Contr"
    kind: ClassVar[str] = "let"


@dataclass(frozen=True)
class Transfer:
    src: str
    dst: str
    asset: str
    kind: ClassVar[str] = "transfer"

    def __post_init__(self):
        for name in (self.src, self.dst, self.asset):
            if not name:
                raise ValueError("parties and assets must be nonempty")


@dataclass(frozen=True)
class Scale:
    factor: Exp
    body: "Contr"
    kind: ClassVar[str] = "scale"


@dataclass(frozen=True)
class Translate:
    shift: TExpr
    body: "Contr"
    kind: ClassVar[str] = "translate"


@dataclass(frozen=True)
class Both:
    left: "Contr"
    right: "Contr"
    kind: ClassVar[str] = "both"


@dataclass(frozen=True)
class IfWithin:
    cond: Exp
    window: TExpr
    then: "Contr"
    orelse: "Contr"
    kind: ClassVar[str] = "if_within"


Contr = Union[Zero, Let, Transfer, Scale, Translate, Both, IfWithin]


# --- builders -------------------------------------------------------------


def op(o: Op, *args: Exp) -> OpE:
    return OpE(o, tuple(args))


def all_of(contracts: Iterable[Contr]) -> Contr:
    """``all[c1, ..., cn]`` is right-nested ``both``; the empty list is zero."""
    cs = list(contracts)
    if not cs:
        return Zero()
    result = cs[-1]
    for c in reversed(cs[:-1]):
        result = Both(c, result)
    return result


def translate(t: "TExpr | int | str", c: Contr) -> Translate:
    return Translate(as_texpr(t), c)


def if_within(cond: Exp, window: "TExpr | int | str", then: Contr, orelse: Contr) -> IfWithin:
    return IfWithin(cond, as_texpr(window), then, orelse)
