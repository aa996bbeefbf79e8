"""One-day reduction of template-closed contracts."""

from __future__ import annotations

from .env import EMPTY, ExtEnv, Trans
from .errors import NotTemplateClosed
from .semantics import VarEnv, _bool, _real, eval_exp, is_template_closed
from .syntax import (
    BoolLit,
    Both,
    Contr,
    IfWithin,
    Let,
    RealLit,
    Scale,
    Tnum,
    Transfer,
    Translate,
    Zero,
)


def reduce_step(c: Contr, rho: ExtEnv, gamma: VarEnv | None = None) -> tuple[Contr, Trans]:
    """Advance ``c`` by one day under ``rho``.

    Returns the residual contract (to be read under ``rho.shift(1)``) and the
    transfers due today.
    """
    if not is_template_closed(c):
        raise NotTemplateClosed("reduction needs a template-closed contract; instantiate it first")
    return _step(c, rho, gamma or {})


def _window(t) -> int:
    if not isinstance(t, Tnum):
        raise NotTemplateClosed(f"cannot reduce a contract with template variable {t!r}")
    return t.value


def _step(c: Contr, rho: ExtEnv, gamma: VarEnv) -> tuple[Contr, Trans]:
    if isinstance(c, Zero):
        return c, EMPTY
    if isinstance(c, Transfer):
        return Zero(), Trans.unit(c.src, c.dst, c.asset)
    if isinstance(c, Scale):
        k = _real(eval_exp(c.factor, gamma, rho), "scale")
        body, tr = _step(c.body, rho, gamma)
        return Scale(RealLit(k), body), tr.scale(k)
    if isinstance(c, Translate):
        n = _window(c.shift)
        if n == 0:
            return _step(c.body, rho, gamma)
        return Translate(Tnum(n - 1), c.body), EMPTY
    if isinstance(c, Both):
        left, tl = _step(c.left, rho, gamma)
        right, tr = _step(c.right, rho, gamma)
        return Both(left, right), tl + tr
    if isinstance(c, IfWithin):
        n = _window(c.window)
        if _bool(eval_exp(c.cond, gamma, rho), "if"):
            return _step(c.then, rho, gamma)
        if n == 0:
            return _step(c.orelse, rho, gamma)
        return IfWithin(c.cond, Tnum(n - 1), c.then, c.orelse), EMPTY
    if isinstance(c, Let):
        v = eval_exp(c.bound, gamma, rho)
        body, tr = _step(c.body, rho, {**gamma, c.var: v})
        lit = BoolLit(v) if isinstance(v, bool) else RealLit(v)
        return Let(c.var, lit, body), tr
    raise TypeError(f"not a contract: {c!r}")


def advance(c: Contr, rho: ExtEnv, n: int) -> tuple[Contr, list[Trans]]:
    """Apply :func:`reduce_step` ``n`` times, shifting ``rho`` after each day."""
    if n < 0:
        raise ValueError("cannot advance by a negative number of days")
    emitted = []
    for day in range(n):
        c, tr = reduce_step(c, rho.shift(day))
        emitted.append(tr)
    return c, emitted
