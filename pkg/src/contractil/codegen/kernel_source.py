"""Kernel source text: a small pure language for flattened payoff kernels.

``emit`` pretty-prints a :class:`Kernel` as source, ``parse`` reads it back
into a syntax tree and ``interpret`` runs it. The interpreter is independent
of :func:`eval_kernel`, which makes the pair a differential test of the
emitter. The grammar lives in ``docs/kernel_grammar.md``.

The top-level ``t0`` parameter is a row offset. A ``loopif`` becomes a
bounded while-loop over a fresh row counter that starts at the enclosing
counter. Lookups in the condition and then branch are relative to that
counter; a fixed else branch stays relative to the enclosing one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from ..errors import EvalError, IndexOutOfRange, ParseError
from ..il.syntax import BinOp, ILBinExpr, ILBool, ILFloat, ILIf, ILNat, ILNow, ILUnExpr, UnOp
from ..syntax import Tnum
from .kernel import KDay, Kernel, KLoop, KObs, KPay

_SYM = {
    BinOp.ADD: "+", BinOp.SUB: "-", BinOp.MULT: "*", BinOp.DIV: "/",
    BinOp.LT: "<", BinOp.LEQ: "<=", BinOp.EQ: "==", BinOp.AND: "&&", BinOp.OR: "||",
}

INTERNAL = "payoff_internal"
ENTRY = "payoff"


# --- emission ---------------------------------------------------------------------------------


def _idx(counter: str, row: int) -> str:
    return f"{counter} + {row}" if row else counter


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _emit(e, k: Kernel, counter: str, depth: int, ind: str) -> str:
    if isinstance(e, KObs):
        return f"ext[{_idx(counter, e.row)}, {e.col}]"
    if isinstance(e, KDay):
        return f"days[{_idx(counter, e.row)}]"
    if isinstance(e, KPay):
        d = f"disc[{_idx(counter, e.row)}]"
        src, dst = _quote(e.src), _quote(e.dst)
        return (f"(if ({src} == p1 && {dst} == p2) then {d} "
                f"else if ({src} == p2 && {dst} == p1) then -{d} else 0.0)")
    if isinstance(e, ILFloat):
        return repr(e.value)
    if isinstance(e, ILBool):
        return "true" if e.value else "false"
    if isinstance(e, ILNat):
        return str(e.value)
    if isinstance(e, ILNow):
        return "t_now"
    if isinstance(e, ILUnExpr):
        sym = "-" if e.op is UnOp.NEG else "!"
        return f"{sym}({_emit(e.arg, k, counter, depth, ind)})"
    if isinstance(e, ILBinExpr):
        return (f"({_emit(e.left, k, counter, depth, ind)} {_SYM[e.op]} "
                f"{_emit(e.right, k, counter, depth, ind)})")
    nxt = ind + "  "
    if isinstance(e, ILIf):
        return (f"(if {_emit(e.cond, k, counter, depth, nxt)}\n"
                f"{nxt}then {_emit(e.then, k, counter, depth, nxt)}\n"
                f"{nxt}else {_emit(e.orelse, k, counter, depth, nxt)})")
    if isinstance(e, KLoop):
        var = f"t{depth + 1}"
        if isinstance(e.window, Tnum):
            window = str(e.window.value)
        else:
            window = f"tenv[{k.tvars.index(e.window.name)}]"
        cond = _emit(e.cond, k, var, depth + 1, nxt)
        if e.fixed_else:
            orelse = _emit(e.orelse, k, counter, depth, nxt)
        else:
            orelse = _emit(e.orelse, k, var, depth + 1, nxt)
        return (f"(let {var} = loop {var} = {counter}\n"
                f"{nxt}while (!({cond}) && ({var} < {counter} + {window})) do {var} + 1\n"
                f"{ind}in if {cond}\n"
                f"{nxt}then {_emit(e.then, k, var, depth + 1, nxt)}\n"
                f"{nxt}else {orelse})")
    raise TypeError(f"not a kernel expression: {e!r}")


def emit(k: Kernel) -> str:
    """Deterministic source text for ``k``."""
    cols = ", ".join(_quote(c) for c in k.cols)
    tvars = ", ".join(_quote(v) for v in k.tvars)
    body = _emit(k.body, k, "t0", 0, "  ")
    return (
        "-- payoff kernel\n"
        f"days = [{', '.join(str(d) for d in k.rows)}]\n"
        f"cols = [{cols}]\n"
        f"tvars = [{tvars}]\n"
        f"layout = [{', '.join(str(v) for v in k.tenv)}]\n"
        "\n"
        f"let {INTERNAL}(ext, tenv, disc, t0, t_now, p1, p2) =\n"
        f"  {body}\n"
        "\n"
        f"let {ENTRY}(ext, tenv, disc, t_now, p1, p2) =\n"
        f"  {INTERNAL}(ext, tenv, disc, 0, t_now, p1, p2)\n"
    )


# --- syntax tree ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Any


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Index:
    array: str
    indices: tuple


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple


@dataclass(frozen=True)
class Unary:
    op: str
    arg: Any


@dataclass(frozen=True)
class Binary:
    op: str
    left: Any
    right: Any


@dataclass(frozen=True)
class Cond:
    cond: Any
    then: Any
    orelse: Any


@dataclass(frozen=True)
class LetLoop:
    """``let var = loop var = init while test do step in body``."""

    var: str
    init: Any
    test: Any
    step: Any
    body: Any


@dataclass(frozen=True)
class Function:
    name: str
    params: tuple[str, ...]
    body: Any


@dataclass(frozen=True)
class Program:
    headers: dict
    functions: dict


# --- parsing -------------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<float>\d+\.\d*(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>&&|\|\||==|<=|[-+*/<!()\[\],=])
""", re.VERBOSE)

_KEYWORDS = {"let", "loop", "while", "do", "in", "if", "then", "else", "true", "false"}


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    out, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind, val = m.lastgroup, m.group()
        if kind != "ws":
            out.append((kind, val, line, m.start() - line_start + 1))
        for i, ch in enumerate(val):
            if ch == "\n":
                line, line_start = line + 1, m.start() + i + 1
        pos = m.end()
    out.append(("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg: str) -> ParseError:
        _, val, line, col = self.tok
        return ParseError(f"{msg}, found {val or 'end of input'!r}", line, col)

    def at(self, val: str) -> bool:
        kind, v, _, _ = self.tok
        return v == val and kind in ("op", "ident")

    def accept(self, val: str) -> bool:
        if self.at(val):
            self.i += 1
            return True
        return False

    def expect(self, val: str) -> None:
        if not self.accept(val):
            raise self.error(f"expected {val!r}")

    def ident(self) -> str:
        kind, val, _, _ = self.tok
        if kind != "ident" or val in _KEYWORDS:
            raise self.error("expected an identifier")
        self.i += 1
        return val

    def program(self) -> Program:
        headers, functions = {}, {}
        while not self.at("let") and self.tok[0] != "eof":
            name = self.ident()
            self.expect("=")
            headers[name] = self.literal_list()
        while self.accept("let"):
            name = self.ident()
            self.expect("(")
            params = [self.ident()]
            while self.accept(","):
                params.append(self.ident())
            self.expect(")")
            self.expect("=")
            functions[name] = Function(name, tuple(params), self.expr())
        if self.tok[0] != "eof":
            raise self.error("expected 'let' or end of input")
        return Program(headers, functions)

    def literal_list(self) -> list:
        self.expect("[")
        items = []
        if not self.at("]"):
            items.append(self.literal())
            while self.accept(","):
                items.append(self.literal())
        self.expect("]")
        return items

    def literal(self):
        neg = self.accept("-")
        kind, val, _, _ = self.tok
        if kind == "int":
            self.i += 1
            return -int(val) if neg else int(val)
        if kind == "str" and not neg:
            self.i += 1
            return _unquote(val)
        raise self.error("expected an integer or string literal")

    def expr(self):
        if self.at("if"):
            self.i += 1
            c = self.expr()
            self.expect("then")
            a = self.expr()
            self.expect("else")
            return Cond(c, a, self.expr())
        if self.at("let"):
            self.i += 1
            var = self.ident()
            self.expect("=")
            self.expect("loop")
            if self.ident() != var:
                raise self.error(f"loop variable must be {var!r}")
            self.expect("=")
            init = self.expr()
            self.expect("while")
            test = self.expr()
            self.expect("do")
            step = self.expr()
            self.expect("in")
            return LetLoop(var, init, test, step, self.expr())
        return self.disj()

    def _binary(self, ops: tuple[str, ...], sub):
        left = sub()
        while any(self.at(o) for o in ops):
            op = self.tok[1]
            self.i += 1
            left = Binary(op, left, sub())
        return left

    def disj(self):
        return self._binary(("||",), self.conj)

    def conj(self):
        return self._binary(("&&",), self.comparison)

    def comparison(self):
        left = self.additive()
        for op in ("<=", "<", "=="):
            if self.accept(op):
                return Binary(op, left, self.additive())
        return left

    def additive(self):
        return self._binary(("+", "-"), self.term)

    def term(self):
        return self._binary(("*", "/"), self.unary)

    def unary(self):
        for op in ("-", "!"):
            if self.accept(op):
                return Unary(op, self.unary())
        return self.primary()

    def primary(self):
        kind, val, _, _ = self.tok
        if kind == "float":
            self.i += 1
            return Num(float(val))
        if kind == "int":
            self.i += 1
            return Num(int(val))
        if kind == "str":
            self.i += 1
            return Str(_unquote(val))
        if self.accept("true"):
            return Num(True)
        if self.accept("false"):
            return Num(False)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if kind == "ident" and val not in _KEYWORDS:
            name = self.ident()
            if self.accept("["):
                idx = [self.expr()]
                while self.accept(","):
                    idx.append(self.expr())
                self.expect("]")
                return Index(name, tuple(idx))
            if self.accept("("):
                args = [self.expr()]
                while self.accept(","):
                    args.append(self.expr())
                self.expect(")")
                return Call(name, tuple(args))
            return Var(name)
        raise self.error("expected an expression")


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


def parse(text: str) -> Program:
    return _Parser(text).program()


# --- interpretation ----------------------------------------------------------------------------


class _Interp:
    def __init__(self, prog: Program):
        self.prog = prog
        self.arrays = {"days": list(prog.headers.get("days", []))}

    def call(self, name: str, args: Sequence) -> Any:
        try:
            fn = self.prog.functions[name]
        except KeyError:
            raise EvalError(f"undefined function {name!r}") from None
        if len(args) != len(fn.params):
            raise EvalError(f"{name} takes {len(fn.params)} arguments, got {len(args)}")
        return self.ev(fn.body, dict(zip(fn.params, args)))

    def ev(self, e, env: dict):
        if isinstance(e, Num):
            return e.value
        if isinstance(e, Str):
            return e.value
        if isinstance(e, Var):
            try:
                return env[e.name]
            except KeyError:
                raise EvalError(f"unbound name {e.name!r}") from None
        if isinstance(e, Index):
            arr = env[e.array] if e.array in env else self.arrays.get(e.array)
            if arr is None:
                raise EvalError(f"unknown array {e.array!r}")
            idx = tuple(self.ev(i, env) for i in e.indices)
            shape = np.shape(arr)
            if len(idx) != len(shape) or any(not 0 <= i < n for i, n in zip(idx, shape)):
                raise IndexOutOfRange(f"{e.array}{list(idx)} outside shape {shape}")
            v = arr[idx] if len(idx) > 1 else arr[idx[0]]
            if isinstance(v, np.generic):
                v = v.item()
            return v
        if isinstance(e, Call):
            return self.call(e.fn, [self.ev(a, env) for a in e.args])
        if isinstance(e, Unary):
            a = self.ev(e.arg, env)
            return (not a) if e.op == "!" else -a
        if isinstance(e, Binary):
            if e.op == "&&":
                return self.ev(e.left, env) and self.ev(e.right, env)
            if e.op == "||":
                return self.ev(e.left, env) or self.ev(e.right, env)
            a, b = self.ev(e.left, env), self.ev(e.right, env)
            if e.op == "/" and b == 0:
                raise EvalError("division by zero")
            return _BIN[e.op](a, b)
        if isinstance(e, Cond):
            return self.ev(e.then if self.ev(e.cond, env) else e.orelse, env)
        if isinstance(e, LetLoop):
            inner = dict(env)
            inner[e.var] = self.ev(e.init, env)
            while self.ev(e.test, inner):
                inner[e.var] = self.ev(e.step, inner)
            return self.ev(e.body, inner)
        raise TypeError(f"not a kernel source node: {e!r}")


_BIN = {
    "+": lambda a, b: a + b, "-": lambda a, b: a - b, "*": lambda a, b: a * b,
    "/": lambda a, b: a / b, "<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
}


def interpret(source: "str | Program", ext: np.ndarray, tenv: Sequence[int], disc: np.ndarray,
              t_now: int, p1: str, p2: str) -> float:
    """Run the ``payoff`` entry point of kernel source on one input."""
    prog = parse(source) if isinstance(source, str) else source
    return _Interp(prog).call(ENTRY, [ext, list(tenv), disc, t_now, p1, p2])
