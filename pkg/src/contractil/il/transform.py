"""IL-to-IL rewrites: payoff cutting and the zero-window loop simplification."""

from __future__ import annotations

from ..syntax import Tnum
from .syntax import (
    BinOp,
    ILBinExpr,
    ILExpr,
    ILFloat,
    ILIf,
    ILLoopIf,
    ILNow,
    ILPayoff,
    ILTexpr,
    ILUnExpr,
)


def cut_payoff(il: ILExpr) -> ILExpr:
    """Guard every payoff with ``if(time < now, 0, payoff)``.

    Evaluating the result at current time ``n`` drops all cashflows dated
    strictly before ``n``; a payoff dated exactly ``n`` is kept.
    """
    if isinstance(il, ILPayoff):
        return ILIf(ILBinExpr(BinOp.LT, ILTexpr(il.time), ILNow()), ILFloat(0.0), il)
    if isinstance(il, ILUnExpr):
        return ILUnExpr(il.op, cut_payoff(il.arg))
    if isinstance(il, ILBinExpr):
        return ILBinExpr(il.op, cut_payoff(il.left), cut_payoff(il.right))
    if isinstance(il, ILIf):
        return ILIf(cut_payoff(il.cond), cut_payoff(il.then), cut_payoff(il.orelse))
    if isinstance(il, ILLoopIf):
        return ILLoopIf(cut_payoff(il.cond), cut_payoff(il.then), cut_payoff(il.orelse),
                        il.window)
    return il


def simplify_loopif0(il: ILExpr) -> ILExpr:
    """Rewrite ``loopif(c, a, b, 0)`` to ``if(c, a, b)`` everywhere."""
    if isinstance(il, ILLoopIf):
        cond, then, orelse = (simplify_loopif0(il.cond), simplify_loopif0(il.then),
                              simplify_loopif0(il.orelse))
        if il.window == Tnum(0):
            return ILIf(cond, then, orelse)
        return ILLoopIf(cond, then, orelse, il.window)
    if isinstance(il, ILUnExpr):
        return ILUnExpr(il.op, simplify_loopif0(il.arg))
    if isinstance(il, ILBinExpr):
        return ILBinExpr(il.op, simplify_loopif0(il.left), simplify_loopif0(il.right))
    if isinstance(il, ILIf):
        return ILIf(simplify_loopif0(il.cond), simplify_loopif0(il.then),
                    simplify_loopif0(il.orelse))
    return il


def payoff_nodes(il: ILExpr) -> list[ILPayoff]:
    """All payoff nodes, left to right."""
    out: list[ILPayoff] = []

    def walk(e: ILExpr) -> None:
        if isinstance(e, ILPayoff):
            out.append(e)
        elif isinstance(e, ILUnExpr):
            walk(e.arg)
        elif isinstance(e, ILBinExpr):
            walk(e.left)
            walk(e.right)
        elif isinstance(e, (ILIf, ILLoopIf)):
            walk(e.cond)
            walk(e.then)
            walk(e.orelse)

    walk(il)
    return out
