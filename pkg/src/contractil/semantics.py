"""Denotational semantics of contracts plus the template-level operations:
instantiation, the template-closed predicate, and the horizon bound."""

from __future__ import annotations

from typing import Mapping

from .env import ExtEnv, TEnv, Trace, Trans, Value, t_sem
from .errors import EvalError, UnboundVar
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

VarEnv = Mapping[str, Value]


def _real(v: Value, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, float):
        raise EvalError(f"{where}: expected a Real, got {v!r}")
    return v


def _bool(v: Value, where: str) -> bool:
    if not isinstance(v, bool):
        raise EvalError(f"{where}: expected a Bool, got {v!r}")
    return v


def apply_op(op: Op, args: list[Value]) -> Value:
    """Strict application of a primitive operator to evaluated arguments."""
    name = op.value
    if op is Op.COND:
        return args[1] if _bool(args[0], name) else args[2]
    if op is Op.NOT:
        return not _bool(args[0], name)
    if op is Op.NEG:
        return -_real(args[0], name)
    if op in (Op.AND, Op.OR):
        a, b = _bool(args[0], name), _bool(args[1], name)
        return (a and b) if op is Op.AND else (a or b)
    a, b = _real(args[0], name), _real(args[1], name)
    if op is Op.ADD:
        return a + b
    if op is Op.SUB:
        return a - b
    if op is Op.MULT:
        return a * b
    if op is Op.DIV:
        if b == 0.0:
            raise EvalError("division by zero")
        return a / b
    if op is Op.LT:
        return a < b
    if op is Op.LEQ:
        return a <= b
    if op is Op.EQ:
        return a == b
    raise EvalError(f"unknown operator {op!r}")


def eval_exp(e: Exp, gamma: VarEnv, rho: ExtEnv) -> Value:
    if isinstance(e, RealLit):
        return e.value
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, Obs):
        v = rho(e.label, e.offset)
        return v if isinstance(v, bool) else float(v)
    if isinstance(e, VarE):
        try:
            return gamma[e.name]
        except KeyError:
            raise UnboundVar(e.name) from None
    if isinstance(e, OpE):
        if e.op is Op.COND:
            # strict in the scrutinee only; the untaken branch may be undefined
            test = _bool(eval_exp(e.args[0], gamma, rho), "cond")
            return eval_exp(e.args[1] if test else e.args[2], gamma, rho)
        return apply_op(e.op, [eval_exp(a, gamma, rho) for a in e.args])
    if isinstance(e, Acc):
        # Acc(f, 0, z) = z;  Acc(f, d, z) = f[x := Acc(f, d-1, z) one day earlier]
        acc = eval_exp(e.init, gamma, rho.shift(-e.days))
        for back in range(e.days - 1, -1, -1):
            acc = eval_exp(e.body, {**gamma, e.var: acc}, rho.shift(-back))
        return acc
    raise EvalError(f"not an expression: {e!r}")


def contract_trace(c: Contr, rho: ExtEnv, tenv: TEnv | None = None,
                   gamma: VarEnv | None = None) -> Trace:
    """The trace of ``c``: transfers due on each day, relative to today."""
    return _trace(c, gamma or {}, rho, tenv or {})


def _trace(c: Contr, gamma: VarEnv, rho: ExtEnv, tenv: TEnv) -> Trace:
    if isinstance(c, Zero):
        return Trace()
    if isinstance(c, Transfer):
        return Trace((Trans.unit(c.src, c.dst, c.asset),))
    if isinstance(c, Scale):
        k = _real(eval_exp(c.factor, gamma, rho), "scale")
        return _trace(c.body, gamma, rho, tenv).scale(k)
    if isinstance(c, Translate):
        n = t_sem(c.shift, tenv)
        return _trace(c.body, gamma, rho.shift(n), tenv).delay(n)
    if isinstance(c, Both):
        return _trace(c.left, gamma, rho, tenv) + _trace(c.right, gamma, rho, tenv)
    if isinstance(c, Let):
        v = eval_exp(c.bound, gamma, rho)
        return _trace(c.body, {**gamma, c.var: v}, rho, tenv)
    if isinstance(c, IfWithin):
        window = t_sem(c.window, tenv)
        for day in range(window + 1):
            here = rho.shift(day)
            if _bool(eval_exp(c.cond, gamma, here), "if"):
                return _trace(c.then, gamma, here, tenv).delay(day)
        return _trace(c.orelse, gamma, rho.shift(window), tenv).delay(window)
    raise EvalError(f"not a contract: {c!r}")


# --- templates -------------------------------------------------------------


def instantiate(c: Contr, tenv: TEnv) -> Contr:
    """Replace every template variable in ``c`` by its value in ``tenv``.

    Scale and Let nodes are kept (dropping them would change the meaning).
    """
    if isinstance(c, (Zero, Transfer)):
        return c
    if isinstance(c, Scale):
        return Scale(c.factor, instantiate(c.body, tenv))
    if isinstance(c, Let):
        return Let(c.var, c.bound, instantiate(c.body, tenv))
    if isinstance(c, Translate):
        return Translate(Tnum(t_sem(c.shift, tenv)), instantiate(c.body, tenv))
    if isinstance(c, Both):
        return Both(instantiate(c.left, tenv), instantiate(c.right, tenv))
    if isinstance(c, IfWithin):
        return IfWithin(c.cond, Tnum(t_sem(c.window, tenv)),
                        instantiate(c.then, tenv), instantiate(c.orelse, tenv))
    raise TypeError(f"not a contract: {c!r}")


def is_template_closed(c: Contr) -> bool:
    if isinstance(c, (Zero, Transfer)):
        return True
    if isinstance(c, (Scale, Let)):
        return is_template_closed(c.body)
    if isinstance(c, Translate):
        return isinstance(c.shift, Tnum) and is_template_closed(c.body)
    if isinstance(c, Both):
        return is_template_closed(c.left) and is_template_closed(c.right)
    if isinstance(c, IfWithin):
        return (isinstance(c.window, Tnum) and is_template_closed(c.then)
                and is_template_closed(c.orelse))
    raise TypeError(f"not a contract: {c!r}")


def template_vars(c: Contr) -> list[str]:
    """Template variables of ``c`` in first-occurrence order."""
    seen: dict[str, None] = {}

    def note(t: TExpr) -> None:
        if isinstance(t, Tvar):
            seen.setdefault(t.name, None)

    def walk(c: Contr) -> None:
        if isinstance(c, (Scale, Let)):
            walk(c.body)
        elif isinstance(c, Translate):
            note(c.shift)
            walk(c.body)
        elif isinstance(c, Both):
            walk(c.left)
            walk(c.right)
        elif isinstance(c, IfWithin):
            note(c.window)
            walk(c.then)
            walk(c.orelse)

    walk(c)
    return list(seen)


def horizon(c: Contr, tenv: TEnv | None = None) -> int:
    """Conservative bound H: the trace of ``c`` is empty on every day >= H."""
    tenv = tenv or {}
    if isinstance(c, Zero):
        return 0
    if isinstance(c, Transfer):
        return 1
    if isinstance(c, (Scale, Let)):
        return horizon(c.body, tenv)
    if isinstance(c, Translate):
        h = horizon(c.body, tenv)
        return 0 if h == 0 else t_sem(c.shift, tenv) + h
    if isinstance(c, Both):
        return max(horizon(c.left, tenv), horizon(c.right, tenv))
    if isinstance(c, IfWithin):
        h = max(horizon(c.then, tenv), horizon(c.orelse, tenv))
        return 0 if h == 0 else t_sem(c.window, tenv) + h
    raise TypeError(f"not a contract: {c!r}")
