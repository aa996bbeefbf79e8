"""Compilation of contracts and contract expressions into payoff expressions.

Relative time shifts introduced by ``translate`` are accumulated into the
start time ``t0``, so the output only contains absolute observation and
payment times.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from typing import Iterator, Union

from .errors import Unsupported
from .il.syntax import (
    BinOp,
    ILBinExpr,
    ILBool,
    ILExpr,
    ILFloat,
    ILIf,
    ILLoopIf,
    ILModel,
    ILPayoff,
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
    Tnum,
    Transfer,
    Translate,
    VarE,
    Zero,
)

_BINOPS = {
    Op.ADD: BinOp.ADD, Op.SUB: BinOp.SUB, Op.MULT: BinOp.MULT, Op.DIV: BinOp.DIV,
    Op.LT: BinOp.LT, Op.LEQ: BinOp.LEQ, Op.EQ: BinOp.EQ, Op.AND: BinOp.AND, Op.OR: BinOp.OR,
}
_UNOPS = {Op.NEG: UnOp.NEG, Op.NOT: UnOp.NOT}


# --- smart template addition ----------------------------------------------------


def _numeral(t: ILTExpr) -> int | None:
    if isinstance(t, Texpr) and isinstance(t.texpr, Tnum):
        return t.texpr.value
    return None


def _numeral_z(t: ILTExprZ) -> int | None:
    if isinstance(t, TnumZ):
        return t.value
    if isinstance(t, TexprZ):
        return _numeral(t.texpr)
    return None


def _is_z(t) -> bool:
    return isinstance(t, (TplusZ, TexprZ, TnumZ))


def tplus_smart(t1: Union[ILTExpr, ILTExprZ], t2: Union[ILTExpr, ILTExprZ]):
    """Add two template expressions, folding when both are numerals.

    Works on natural (ILTExpr) and signed (ILTExprZ) template expressions;
    mixing the two lifts the natural one to the signed level.
    """
    if _is_z(t1) or _is_z(t2):
        z1 = t1 if _is_z(t1) else TexprZ(t1)
        z2 = t2 if _is_z(t2) else TexprZ(t2)
        n1, n2 = _numeral_z(z1), _numeral_z(z2)
        if n1 is not None and n2 is not None:
            return TnumZ(n1 + n2)
        return TplusZ(z1, z2)
    n1, n2 = _numeral(t1), _numeral(t2)
    if n1 is not None and n2 is not None:
        return Texpr(Tnum(n1 + n2))
    return Tplus(t1, t2)


# --- instrumentation ---------------------------------------------------------------


class _Counter:
    def __init__(self):
        self._lock = threading.Lock()
        self.value = 0

    def bump(self) -> None:
        with self._lock:
            self.value += 1


_from_contr_calls = _Counter()


def compile_count() -> int:
    """Number of top-level :func:`from_contr` calls since import."""
    return _from_contr_calls.value


class CompileTally:
    def __init__(self, start: int):
        self._start = start
        self.calls = 0

    def _update(self) -> None:
        self.calls = _from_contr_calls.value - self._start


@contextmanager
def count_compilations() -> Iterator[CompileTally]:
    """Count top-level contract compilations inside the ``with`` block."""
    tally = CompileTally(_from_contr_calls.value)
    try:
        yield tally
    finally:
        tally._update()


# --- compilation -------------------------------------------------------------------


def from_exp(e: Exp, t0: ILTExprZ = TnumZ(0), path: tuple = ()) -> ILExpr:
    if isinstance(e, RealLit):
        return ILFloat(e.value)
    if isinstance(e, BoolLit):
        return ILBool(e.value)
    if isinstance(e, Obs):
        return ILModel(e.label, tplus_smart(t0, TnumZ(e.offset)))
    if isinstance(e, OpE):
        args = [from_exp(a, t0, path + (e.op.value, i)) for i, a in enumerate(e.args)]
        if e.op is Op.COND:
            return ILIf(*args)
        if e.op in _UNOPS:
            return ILUnExpr(_UNOPS[e.op], args[0])
        return ILBinExpr(_BINOPS[e.op], args[0], args[1])
    if isinstance(e, VarE):
        raise Unsupported("variable", path)
    if isinstance(e, Acc):
        raise Unsupported("acc", path)
    raise TypeError(f"not an expression: {e!r}")


def from_contr(c: Contr, t0: "ILTExpr | int" = 0) -> ILExpr:
    """Compile ``c`` starting at time ``t0`` (0 by default)."""
    _from_contr_calls.bump()
    if isinstance(t0, int):
        t0 = Texpr(Tnum(t0))
    return _contr(c, t0, ())


def _contr(c: Contr, t0: ILTExpr, path: tuple) -> ILExpr:
    if isinstance(c, Zero):
        return ILFloat(0.0)
    if isinstance(c, Transfer):
        if c.src == c.dst:
            return ILFloat(0.0)
        return ILPayoff(t0, c.src, c.dst)
    if isinstance(c, Scale):
        return ILBinExpr(BinOp.MULT, from_exp(c.factor, TexprZ(t0), path + ("scale",)),
                         _contr(c.body, t0, path + ("scale", "body")))
    if isinstance(c, Translate):
        return _contr(c.body, tplus_smart(t0, Texpr(c.shift)), path + ("translate",))
    if isinstance(c, Both):
        return ILBinExpr(BinOp.ADD, _contr(c.left, t0, path + ("both", 0)),
                         _contr(c.right, t0, path + ("both", 1)))
    if isinstance(c, IfWithin):
        return ILLoopIf(from_exp(c.cond, TexprZ(t0), path + ("if",)),
                        _contr(c.then, t0, path + ("if", "then")),
                        _contr(c.orelse, t0, path + ("if", "else")),
                        c.window)
    if isinstance(c, Let):
        raise Unsupported("let", path)
    raise TypeError(f"not a contract: {c!r}")


def is_supported(c: Contr) -> bool:
    try:
        _contr(c, Texpr(Tnum(0)), ())
    except Unsupported:
        return False
    return True
