"""Flattened payoff kernels.

``reindex`` turns a payoff expression into a :class:`Kernel` whose leaves read
dense arrays by row: every observation or payment day is assigned a row in
first-occurrence order, and observables become columns. A kernel is evaluated
against a :class:`KernelInput` holding ``ext[row][col]``, the loop-window
values, per-row discount factors and the current time.

Lookups under a ``loopif`` move with the loop counter, so they are given a
contiguous block of rows ``day, day+1, ..., day+W`` where ``W`` is the sum of
the enclosing window bounds. Outside loops each distinct day gets one row.
The else branch of a loop with a numeral window always runs exactly
``window`` days later, so it is laid out at that fixed offset instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, ClassVar, Mapping, Sequence

import numpy as np

from .. import serialize
from ..env import ExtEnv, TEnv, t_sem
from ..errors import IndexOutOfRange, KernelError, ShapeMismatch, UnsupportedDynamicRow
from ..il.semantics import (
    Discount,
    ILTypeError,
    apply_binop,
    apply_unop,
    texpr_sem,
    texpr_z_sem,
)
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
    UnOp,
)
from ..syntax import TExpr, Tnum, Tvar

# --- kernel leaves ---------------------------------------------------------------------


@dataclass(frozen=True)
class KObs:
    """``ext[row + k, col]`` where ``k`` is the current loop shift."""

    row: int
    col: int
    kind: ClassVar[str] = "k_obs"


@dataclass(frozen=True)
class KPay:
    """Discounted unit payment ``disc[row + k]`` signed by the party pair."""

    row: int
    src: str
    dst: str
    kind: ClassVar[str] = "k_pay"


@dataclass(frozen=True)
class KDay:
    """The day number of ``row + k`` (a natural)."""

    row: int
    kind: ClassVar[str] = "k_day"


@dataclass(frozen=True)
class KLoop:
    """Bounded search over ``k .. k + window``; ``bound`` is the window used for layout.

    With ``fixed_else`` the else branch is read at the loop's starting shift,
    its rows already accounting for the full window.
    """

    cond: Any
    then: Any
    orelse: Any
    window: TExpr
    bound: int
    fixed_else: bool = False
    kind: ClassVar[str] = "k_loop"


serialize.register(KObs, KPay, KDay, KLoop)


@dataclass(frozen=True)
class Kernel:
    body: Any
    rows: tuple[int, ...]
    cols: tuple[str, ...]
    tvars: tuple[str, ...] = ()
    tenv: tuple[int, ...] = ()
    layout_vars: tuple[str, ...] = ()
    parties: tuple[str, ...] = ()
    horizon: int = 0
    cells: tuple[tuple[int, int], ...] = field(default=(), compare=False)
    pay_rows: tuple[int, ...] = field(default=(), compare=False)

    def to_json(self) -> dict:
        return {
            "body": serialize.to_obj(self.body),
            "rows": list(self.rows),
            "cols": list(self.cols),
            "tvars": list(self.tvars),
            "tenv": list(self.tenv),
            "layout_vars": list(self.layout_vars),
            "parties": list(self.parties),
            "horizon": self.horizon,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: Mapping) -> "Kernel":
        body = serialize.from_obj(obj["body"])
        base = cls(body, tuple(obj["rows"]), tuple(obj["cols"]), tuple(obj["tvars"]),
                   tuple(obj["tenv"]), tuple(obj["layout_vars"]), tuple(obj["parties"]),
                   int(obj["horizon"]))
        cells, pay_rows = _usage(base)
        return cls(**{**base.__dict__, "cells": cells, "pay_rows": pay_rows})

    @classmethod
    def loads(cls, text: str) -> "Kernel":
        return cls.from_json(json.loads(text))

    def tenv_dict(self) -> dict[str, int]:
        return dict(zip(self.tvars, self.tenv))


# --- reindexing ---------------------------------------------------------------------------


class _Layout:
    def __init__(self, tenv: TEnv):
        self.tenv = tenv
        self.rows: list[int] = []
        self.single: dict[int, int] = {}
        self.blocks: dict[tuple[int, int], int] = {}
        self.cols: list[str] = []
        self.parties: list[str] = []
        self.tvars: list[str] = []
        self.layout_vars: list[str] = []

    def row(self, day: int, span: int) -> int:
        if span == 0:
            if day not in self.single:
                self.single[day] = len(self.rows)
                self.rows.append(day)
            return self.single[day]
        key = (day, span)
        if key not in self.blocks:
            self.blocks[key] = len(self.rows)
            self.rows.extend(range(day, day + span + 1))
        return self.blocks[key]

    def col(self, label: str) -> int:
        if label not in self.cols:
            self.cols.append(label)
        return self.cols.index(label)

    def note_vars(self, t, layout: bool) -> None:
        for name in _tvar_names(t):
            if name not in self.tvars:
                self.tvars.append(name)
            if layout and name not in self.layout_vars:
                self.layout_vars.append(name)

    def party(self, p: str) -> None:
        if p not in self.parties:
            self.parties.append(p)


def _tvar_names(t) -> list[str]:
    if isinstance(t, Tvar):
        return [t.name]
    if isinstance(t, Tnum):
        return []
    out = []
    for f in ("texpr", "left", "right"):
        if hasattr(t, f):
            out += _tvar_names(getattr(t, f))
    return out


def reindex(il: ILExpr, tenv: TEnv | None = None) -> Kernel:
    """Flatten ``il`` into a kernel laid out for the template values ``tenv``."""
    tenv = dict(tenv or {})
    lay = _Layout(tenv)

    # span: how far the loop shift may move a lookup; off: days already
    # folded into rows by fixed else branches
    def walk(e, span: int, off: int):
        if isinstance(e, (ILFloat, ILBool, ILNat, ILNow)):
            return e
        if isinstance(e, ILModel):
            lay.note_vars(e.time, True)
            return KObs(lay.row(texpr_z_sem(e.time, tenv) + off, span), lay.col(e.label))
        if isinstance(e, ILPayoff):
            lay.note_vars(e.time, True)
            lay.party(e.src)
            lay.party(e.dst)
            return KPay(lay.row(texpr_sem(e.time, tenv) + off, span), e.src, e.dst)
        if isinstance(e, ILTexpr):
            lay.note_vars(e.texpr, True)
            return KDay(lay.row(texpr_sem(e.texpr, tenv) + off, span))
        if isinstance(e, ILUnExpr):
            return ILUnExpr(e.op, walk(e.arg, span, off))
        if isinstance(e, ILBinExpr):
            return ILBinExpr(e.op, walk(e.left, span, off), walk(e.right, span, off))
        if isinstance(e, ILIf):
            return ILIf(walk(e.cond, span, off), walk(e.then, span, off),
                        walk(e.orelse, span, off))
        if isinstance(e, ILLoopIf):
            lay.note_vars(e.window, False)
            bound = t_sem(e.window, tenv)
            inner = span + bound
            cond, then = walk(e.cond, inner, off), walk(e.then, inner, off)
            if isinstance(e.window, Tnum):
                return KLoop(cond, then, walk(e.orelse, span, off + bound), e.window, bound, True)
            return KLoop(cond, then, walk(e.orelse, inner, off), e.window, bound)
        raise TypeError(f"not a payoff expression: {e!r}")

    body = walk(il, 0, 0)
    tvars = tuple(lay.tvars)
    partial = Kernel(body, tuple(lay.rows), tuple(lay.cols), tvars,
                     tuple(tenv[v] for v in tvars), tuple(lay.layout_vars),
                     tuple(lay.parties))
    cells, pay_rows = _usage(partial)
    hor = 1 + max((partial.rows[r] for r in pay_rows), default=-1)
    return Kernel(**{**partial.__dict__, "horizon": hor, "cells": cells, "pay_rows": pay_rows})


def _usage(k: Kernel) -> tuple[tuple[tuple[int, int], ...], tuple[int, ...]]:
    """Every ``(row, col)`` the body may read, and every row that may be paid on."""
    cells: set[tuple[int, int]] = set()
    pays: set[int] = set()

    def walk(e, span: int) -> None:
        if isinstance(e, KObs):
            cells.update((e.row + j, e.col) for j in range(span + 1))
        elif isinstance(e, KPay):
            pays.update(e.row + j for j in range(span + 1))
        elif isinstance(e, ILUnExpr):
            walk(e.arg, span)
        elif isinstance(e, ILBinExpr):
            walk(e.left, span)
            walk(e.right, span)
        elif isinstance(e, ILIf):
            walk(e.cond, span)
            walk(e.then, span)
            walk(e.orelse, span)
        elif isinstance(e, KLoop):
            walk(e.cond, span + e.bound)
            walk(e.then, span + e.bound)
            walk(e.orelse, span if e.fixed_else else span + e.bound)

    walk(k.body, 0)
    return tuple(sorted(cells)), tuple(sorted(pays))


# --- inputs ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelInput:
    ext: np.ndarray
    tenv: tuple[int, ...]
    disc: np.ndarray
    t_now: int = 0

    def check(self, k: Kernel) -> None:
        if self.ext.shape[-2:] != (len(k.rows), len(k.cols)):
            raise ShapeMismatch(f"ext has shape {self.ext.shape}, kernel needs "
                                f"(…, {len(k.rows)}, {len(k.cols)})")
        if self.disc.shape != (len(k.rows),):
            raise ShapeMismatch(f"disc has shape {self.disc.shape}, kernel needs ({len(k.rows)},)")
        if len(self.tenv) != len(k.tvars):
            raise ShapeMismatch(f"tenv has {len(self.tenv)} values, kernel needs {len(k.tvars)}")


def discount_rows(k: Kernel, disc: Discount) -> np.ndarray:
    """Per-row discount factors; rows nobody pays on are NaN."""
    out = np.full(len(k.rows), np.nan)
    for r in k.pay_rows:
        out[r] = disc(k.rows[r])
    return out


def sample_input(k: Kernel, rho: ExtEnv, disc: Discount, t_now: int = 0,
                 tenv: TEnv | None = None) -> KernelInput:
    """Sample ``rho`` and ``disc`` at the kernel's rows. Unread cells are NaN."""
    ext = np.full((len(k.rows), len(k.cols)), np.nan)
    for r, c in k.cells:
        v = rho(k.cols[c], k.rows[r])
        if isinstance(v, bool):
            raise KernelError(f"observable {k.cols[c]} is boolean; kernels read reals only")
        ext[r, c] = v
    values = k.tenv if tenv is None else tuple(int(tenv[v]) for v in k.tvars)
    return KernelInput(ext, values, discount_rows(k, disc), t_now)


def _windows(k: Kernel, tenv: Sequence[int]) -> dict[str, int]:
    given = dict(zip(k.tvars, (int(v) for v in tenv)))
    for name, laid in zip(k.tvars, k.tenv):
        if name in k.layout_vars and given[name] != laid:
            raise UnsupportedDynamicRow(
                f"template variable {name}={given[name]} moves rows laid out for {name}={laid}")
        if given[name] > laid:
            raise UnsupportedDynamicRow(
                f"loop window {name}={given[name]} exceeds the laid-out bound {laid}")
    return given


def _window_value(w: TExpr, tenv: Mapping[str, int]) -> int:
    return w.value if isinstance(w, Tnum) else tenv[w.name]


# --- scalar evaluation ------------------------------------------------------------------


def _sign(src: str, dst: str, p1: str, p2: str) -> int:
    if src == p1 and dst == p2:
        return 1
    if src == p2 and dst == p1:
        return -1
    return 0


def eval_kernel(k: Kernel, inp: KernelInput, p1: str, p2: str) -> float:
    """Reference interpreter: the value of the kernel for one input."""
    inp.check(k)
    if inp.ext.ndim != 2:
        raise ShapeMismatch("eval_kernel takes a single (rows, cols) input; use eval_kernel_batch")
    tenv = _windows(k, inp.tenv)
    ext, disc, rows, nrows = inp.ext, inp.disc, k.rows, len(k.rows)

    def at(row: int) -> int:
        if not 0 <= row < nrows:
            raise IndexOutOfRange(f"row {row} outside 0..{nrows - 1}")
        return row

    def ev(e, s: int):
        if isinstance(e, KObs):
            return float(ext[at(e.row + s), e.col])
        if isinstance(e, KPay):
            sg = _sign(e.src, e.dst, p1, p2)
            if sg == 0:
                return 0.0
            d = float(disc[at(e.row + s)])
            return d if sg > 0 else -d
        if isinstance(e, KDay):
            return rows[at(e.row + s)]
        if isinstance(e, ILFloat):
            return e.value
        if isinstance(e, (ILBool, ILNat)):
            return e.value
        if isinstance(e, ILNow):
            return inp.t_now
        if isinstance(e, ILUnExpr):
            return apply_unop(e.op, ev(e.arg, s))
        if isinstance(e, ILBinExpr):
            return apply_binop(e.op, ev(e.left, s), ev(e.right, s))
        if isinstance(e, ILIf):
            return ev(e.then, s) if _truth(ev(e.cond, s)) else ev(e.orelse, s)
        if isinstance(e, KLoop):
            last = s + _window_value(e.window, tenv)
            j = s
            while not _truth(ev(e.cond, j)) and j < last:
                j += 1
            if _truth(ev(e.cond, j)):
                return ev(e.then, j)
            return ev(e.orelse, s if e.fixed_else else j)
        raise TypeError(f"not a kernel expression: {e!r}")

    v = ev(k.body, 0)
    if isinstance(v, bool) or not isinstance(v, float):
        raise ILTypeError(f"kernel evaluated to {v!r}, not a real")
    return v


def _truth(v) -> bool:
    if not isinstance(v, bool):
        raise ILTypeError(f"condition evaluated to {v!r}, not a bool")
    return v


# --- batch evaluation ---------------------------------------------------------------------

_NP_BIN = {
    BinOp.ADD: np.add, BinOp.SUB: np.subtract, BinOp.MULT: np.multiply,
    BinOp.DIV: np.divide, BinOp.LT: np.less, BinOp.LEQ: np.less_equal, BinOp.EQ: np.equal,
    BinOp.AND: np.logical_and, BinOp.OR: np.logical_or,
}


def eval_kernel_batch(k: Kernel, ext: np.ndarray, disc: np.ndarray, tenv: Sequence[int],
                      t_now: int, p1: str, p2: str) -> np.ndarray:
    """Evaluate over many inputs at once: ``ext`` is ``(paths, rows, cols)``.

    Each path's value equals :func:`eval_kernel` on that path bit for bit;
    conditionals evaluate both branches and select, so division by zero in an
    unselected branch is harmless and a selected one yields a non-finite value.
    """
    KernelInput(ext, tuple(tenv), disc, t_now).check(k)
    if ext.ndim != 3:
        raise ShapeMismatch("eval_kernel_batch needs ext of shape (paths, rows, cols)")
    windows = _windows(k, tenv)
    npaths, nrows = ext.shape[0], len(k.rows)
    rows = k.rows

    def at(row: int) -> int:
        if not 0 <= row < nrows:
            raise IndexOutOfRange(f"row {row} outside 0..{nrows - 1}")
        return row

    def ev(e, s: int):
        if isinstance(e, KObs):
            return ext[:, at(e.row + s), e.col]
        if isinstance(e, KPay):
            sg = _sign(e.src, e.dst, p1, p2)
            if sg == 0:
                return 0.0
            d = float(disc[at(e.row + s)])
            return d if sg > 0 else -d
        if isinstance(e, KDay):
            return rows[at(e.row + s)]
        if isinstance(e, (ILFloat, ILBool, ILNat)):
            return e.value
        if isinstance(e, ILNow):
            return t_now
        if isinstance(e, ILUnExpr):
            a = ev(e.arg, s)
            if isinstance(a, np.ndarray):
                return np.negative(a) if e.op is UnOp.NEG else np.logical_not(a)
            return apply_unop(e.op, a)
        if isinstance(e, ILBinExpr):
            a, b = ev(e.left, s), ev(e.right, s)
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                return _NP_BIN[e.op](a, b)
            return apply_binop(e.op, a, b)
        if isinstance(e, ILIf):
            c = ev(e.cond, s)
            if not isinstance(c, np.ndarray):
                return ev(e.then, s) if _truth(c) else ev(e.orelse, s)
            return _select(c, ev(e.then, s), ev(e.orelse, s))
        if isinstance(e, KLoop):
            n = _window_value(e.window, windows)
            res = ev(e.orelse, s if e.fixed_else else s + n)
            for j in range(s + n, s - 1, -1):
                c = ev(e.cond, j)
                if not isinstance(c, np.ndarray):
                    if _truth(c):
                        res = ev(e.then, j)
                    continue
                res = _select(c, ev(e.then, j), res)
            return res
        raise TypeError(f"not a kernel expression: {e!r}")

    with np.errstate(all="ignore"):
        v = ev(k.body, 0)
    if isinstance(v, np.ndarray) and v.dtype == bool or isinstance(v, (bool, np.bool_)):
        raise ILTypeError("kernel evaluated to a bool, not a real")
    return np.broadcast_to(np.asarray(v, dtype=float), (npaths,)).copy()


def _select(c: np.ndarray, a, b):
    return np.where(c, a, b)

