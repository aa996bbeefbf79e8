"""Payoff intermediate language: template arithmetic and payoff expressions."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import ClassVar, Union

from ..syntax import TExpr, Tnum, Tvar


# --- template arithmetic -------------------------------------------------


@dataclass(frozen=True)
class Tplus:
    left: "ILTExpr"
    right: "ILTExpr"
    kind: ClassVar[str] = "tplus"


@dataclass(frozen=True)
class Texpr:
    texpr: TExpr
    kind: ClassVar[str] = "texpr"


ILTExpr = Union[Tplus, Texpr]


@dataclass(frozen=True)
class TplusZ:
    left: "ILTExprZ"
    right: "ILTExprZ"
    kind: ClassVar[str] = "tplus_z"


@dataclass(frozen=True)
class TexprZ:
    texpr: ILTExpr
    kind: ClassVar[str] = "texpr_z"


@dataclass(frozen=True)
class TnumZ:
    value: int
    kind: ClassVar[str] = "tnum_z"

    def __post_init__(self):
        if isinstance(self.value, bool) or not isinstance(self.value, int):
            raise TypeError(f"TnumZ needs an int, got {self.value!r}")


ILTExprZ = Union[TplusZ, TexprZ, TnumZ]


def tnum(n: int) -> Texpr:
    return Texpr(Tnum(n))


def tvar(name: str) -> Texpr:
    return Texpr(Tvar(name))


# --- payoff expressions ----------------------------------------------------


class BinOp(enum.Enum):
    ADD = "add"
    SUB = "sub"
    MULT = "mult"
    DIV = "div"
    LT = "lt"
    LEQ = "leq"
    EQ = "eq"
    AND = "and"
    OR = "or"


class UnOp(enum.Enum):
    NEG = "neg"
    NOT = "not"


@dataclass(frozen=True)
class ILIf:
    cond: "ILExpr"
    then: "ILExpr"
    orelse: "ILExpr"
    kind: ClassVar[str] = "if"


@dataclass(frozen=True)
class ILFloat:
    value: float
    kind: ClassVar[str] = "float"

    def __post_init__(self):
        if isinstance(self.value, bool):
            raise TypeError("ILFloat needs a number")
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class ILNat:
    value: int
    kind: ClassVar[str] = "nat"

    def __post_init__(self):
        if isinstance(self.value, bool) or not isinstance(self.value, int) or self.value < 0:
            raise ValueError(f"ILNat needs a natural, got {self.value!r}")


@dataclass(frozen=True)
class ILBool:
    value: bool
    kind: ClassVar[str] = "boolean"

    def __post_init__(self):
        if not isinstance(self.value, bool):
            raise TypeError(f"ILBool needs a bool, got {self.value!r}")


@dataclass(frozen=True)
class ILTexpr:
    """A template expression used as a (natural) value; reads ``te + t0``."""

    texpr: ILTExpr
    kind: ClassVar[str] = "texpr_val"


@dataclass(frozen=True)
class ILNow:
    kind: ClassVar[str] = "now"


@dataclass(frozen=True)
class ILModel:
    label: str
    time: ILTExprZ
    kind: ClassVar[str] = "model"


@dataclass(frozen=True)
class ILUnExpr:
    op: UnOp
    arg: "ILExpr"
    kind: ClassVar[str] = "unop"


@dataclass(frozen=True)
class ILBinExpr:
    op: BinOp
    left: "ILExpr"
    right: "ILExpr"
    kind: ClassVar[str] = "binop"


@dataclass(frozen=True)
class ILLoopIf:
    cond: "ILExpr"
    then: "ILExpr"
    orelse: "ILExpr"
    window: TExpr
    kind: ClassVar[str] = "loopif"


@dataclass(frozen=True)
class ILPayoff:
    time: ILTExpr
    src: str
    dst: str
    kind: ClassVar[str] = "payoff"


ILExpr = Union[ILIf, ILFloat, ILNat, ILBool, ILTexpr, ILNow, ILModel, ILUnExpr,
               ILBinExpr, ILLoopIf, ILPayoff]


# --- infix rendering -------------------------------------------------------

_INFIX = {
    BinOp.ADD: "+", BinOp.SUB: "-", BinOp.MULT: "*", BinOp.DIV: "/",
    BinOp.LT: "<", BinOp.LEQ: "<=", BinOp.EQ: "==", BinOp.AND: "&&", BinOp.OR: "||",
}


def show_t(t) -> str:
    """Render any template expression (contract, IL, or IL-Z level)."""
    if isinstance(t, Tnum):
        return str(t.value)
    if isinstance(t, Tvar):
        return t.name
    if isinstance(t, Texpr):
        return show_t(t.texpr)
    if isinstance(t, TexprZ):
        return show_t(t.texpr)
    if isinstance(t, TnumZ):
        return str(t.value)
    if isinstance(t, (Tplus, TplusZ)):
        return f"{show_t(t.left)}+{show_t(t.right)}"
    raise TypeError(f"not a template expression: {t!r}")


def show(il: ILExpr) -> str:
    """Compact infix rendering, e.g. ``(100.0 * payoff(0+t0,you,me))``."""
    if isinstance(il, ILFloat):
        return repr(il.value)
    if isinstance(il, ILNat):
        return str(il.value)
    if isinstance(il, ILBool):
        return "true" if il.value else "false"
    if isinstance(il, ILTexpr):
        return show_t(il.texpr)
    if isinstance(il, ILNow):
        return "now"
    if isinstance(il, ILModel):
        return f"model({il.label},{show_t(il.time)})"
    if isinstance(il, ILPayoff):
        return f"payoff({show_t(il.time)},{il.src},{il.dst})"
    if isinstance(il, ILUnExpr):
        return f"{'-' if il.op is UnOp.NEG else '!'}({show(il.arg)})"
    if isinstance(il, ILBinExpr):
        return f"({show(il.left)} {_INFIX[il.op]} {show(il.right)})"
    if isinstance(il, ILIf):
        return f"if({show(il.cond)}, {show(il.then)}, {show(il.orelse)})"
    if isinstance(il, ILLoopIf):
        return (f"loopif({show(il.cond)}, {show(il.then)}, {show(il.orelse)}, "
                f"{show_t(il.window)})")
    raise TypeError(f"not a payoff expression: {il!r}")
