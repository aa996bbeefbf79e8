"""Readable functional-style source for payoff expressions.

The output is for inspection and golden files only. Environments are keyed
maps (``ext Map.! (label, day)``, ``tenv Map.! name``), ``loopif`` is a
higher-order function over the loop counter, and payments carry an explicit
sign conditional on the party pair.
"""

from __future__ import annotations

from ..il.syntax import (
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
    ILUnExpr,
    Texpr,
    TexprZ,
    TnumZ,
    Tplus,
    TplusZ,
    UnOp,
)
from ..il.transform import simplify_loopif0
from ..syntax import Tnum, Tvar

_SYM = {
    BinOp.ADD: "+", BinOp.SUB: "-", BinOp.MULT: "*", BinOp.DIV: "/",
    BinOp.LT: "<", BinOp.LEQ: "<=", BinOp.EQ: "==", BinOp.AND: "&&", BinOp.OR: "||",
}

PRELUDE = """\
loopif :: Int -> Int -> (Int -> Bool) -> (Int -> a) -> (Int -> a) -> a
loopif n t0 b e1 e2 = if b t0 then e1 t0
                      else if n == 0 then e2 t0
                      else loopif (n - 1) (t0 + 1) b e1 e2
"""


def _time(t) -> str:
    if isinstance(t, Tnum):
        return str(t.value)
    if isinstance(t, Tvar):
        return f'(tenv Map.! "{t.name}")'
    if isinstance(t, (Texpr, TexprZ)):
        return _time(t.texpr)
    if isinstance(t, TnumZ):
        return str(t.value) if t.value >= 0 else f"({t.value})"
    if isinstance(t, (Tplus, TplusZ)):
        return f"{_time(t.left)} + {_time(t.right)}"
    raise TypeError(f"not a template expression: {t!r}")


def _sign(src: str, dst: str) -> str:
    return (f'(if ("{src}" == p1 && "{dst}" == p2) then 1 '
            f'else if ("{src}" == p2 && "{dst}" == p1) then -1 else 0)')


def _expr(e: ILExpr, t0: str, ind: str) -> str:
    nxt = ind + "  "
    if isinstance(e, ILFloat):
        return repr(e.value)
    if isinstance(e, ILNat):
        return str(e.value)
    if isinstance(e, ILBool):
        return "True" if e.value else "False"
    if isinstance(e, ILNow):
        return "t_now"
    if isinstance(e, ILTexpr):
        return f"({_time(e.texpr)} + {t0})"
    if isinstance(e, ILModel):
        return f'(ext Map.! ("{e.label}", {_time(e.time)} + {t0}))'
    if isinstance(e, ILPayoff):
        return f"(disc ({_time(e.time)} + {t0}) * {_sign(e.src, e.dst)})"
    if isinstance(e, ILUnExpr):
        fn = "negate" if e.op is UnOp.NEG else "not"
        return f"({fn} {_expr(e.arg, t0, ind)})"
    if isinstance(e, ILBinExpr):
        return f"({_expr(e.left, t0, ind)} {_SYM[e.op]} {_expr(e.right, t0, ind)})"
    if isinstance(e, ILIf):
        return (f"(if {_expr(e.cond, t0, nxt)}\n"
                f"{nxt}then {_expr(e.then, t0, nxt)}\n"
                f"{nxt}else {_expr(e.orelse, t0, nxt)})")
    if isinstance(e, ILLoopIf):
        # each lambda rebinds t0 to the loop counter
        return (f"(loopif {_time(e.window)} {t0}\n"
                f"{nxt}(\\t0 -> {_expr(e.cond, 't0', nxt)})\n"
                f"{nxt}(\\t0 -> {_expr(e.then, 't0', nxt)})\n"
                f"{nxt}(\\t0 -> {_expr(e.orelse, 't0', nxt)}))")
    raise TypeError(f"not a payoff expression: {e!r}")


def emit_functional(il: ILExpr, simplify: bool = True) -> str:
    """Functional source defining ``payoffInternal`` and ``payoff``.

    With ``simplify`` (the default) zero-window loops are printed as plain
    conditionals.
    """
    if simplify:
        il = simplify_loopif0(il)
    return (
        PRELUDE
        + "\n"
        + "payoffInternal ext tenv disc t0 t_now p1 p2 =\n"
        + f"  {_expr(il, 't0', '  ')}\n"
        + "\n"
        + "payoff ext tenv disc t_now p1 p2 = payoffInternal ext tenv disc 0 t_now p1 p2\n"
    )
