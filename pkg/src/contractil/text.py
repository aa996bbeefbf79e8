"""Concrete syntax for contracts: a recursive-descent parser and a printer.

The surface syntax follows the usual listing style::

    translate(90,
      if(obs(AAPL,0) > 100.0,
         scale(obs(AAPL,0) - 100.0, transfer(you, me, USD)),
         zero))

``all[c1, ..., cn]`` is sugar for right-nested ``both``; ``if(e, c1, c2)``
is ``if`` with a zero-day window; ``a > b`` is read as ``b < a``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import ParseError
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
    all_of,
)

DEFAULT_ASSET = "CUR"

KEYWORDS = frozenset({
    "zero", "transfer", "scale", "translate", "both", "all", "if", "let", "in",
    "obs", "cond", "acc", "true", "false",
})

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|--[^\n]*)
  | (?P<thousands>\d{1,3}(?:\.\d{3}){2,}(?![\d.eE]))
  | (?P<float>\d+\.\d*(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<op><=|>=|==|&&|\|\||[()\[\],.=+\-*/<>&|!])
""", re.VERBOSE)

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers --

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        found = tok.text or "end of input"
        return ParseError(f"{msg}, found {found!r}", tok.line, tok.col)

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("op", "ident")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        tok = self.tok
        self.i += 1
        return tok

    def name(self, what: str) -> str:
        t = self.tok
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            return t.text
        if t.kind == "string":
            self.i += 1
            return json.loads(t.text)
        raise self.error(f"expected {what}")

    def integer(self, what: str) -> int:
        sign = -1 if self.accept("-") else 1
        t = self.tok
        if t.kind != "int":
            raise self.error(f"expected {what}")
        self.i += 1
        return sign * int(t.text)

    # -- contracts --

    def contract(self) -> Contr:
        t = self.tok
        if self.accept("zero"):
            return Zero()
        if self.accept("transfer"):
            self.expect("(")
            src = self.name("party")
            self.expect(",")
            dst = self.name("party")
            asset = self.name("asset") if self.accept(",") else DEFAULT_ASSET
            self.expect(")")
            return Transfer(src, dst, asset)
        if self.accept("scale"):
            self.expect("(")
            e = self.exp()
            self.expect(",")
            c = self.contract()
            self.expect(")")
            return Scale(e, c)
        if self.accept("translate"):
            self.expect("(")
            n = self.texpr()
            self.expect(",")
            c = self.contract()
            self.expect(")")
            return Translate(n, c)
        if self.accept("both"):
            self.expect("(")
            c1 = self.contract()
            self.expect(",")
            c2 = self.contract()
            self.expect(")")
            return Both(c1, c2)
        if self.accept("all"):
            self.expect("[")
            items = []
            if not self.at("]"):
                items.append(self.contract())
                while self.accept(","):
                    items.append(self.contract())
            self.expect("]")
            return all_of(items)
        if self.accept("if"):
            self.expect("(")
            nargs = self._count_args()
            e = self.exp()
            self.expect(",")
            if nargs == 4:
                window = self.texpr()
                self.expect(",")
            elif nargs == 3:
                window = Tnum(0)
            else:
                raise self.error("if takes 3 or 4 arguments", t)
            c1 = self.contract()
            self.expect(",")
            c2 = self.contract()
            self.expect(")")
            return IfWithin(e, window, c1, c2)
        if self.accept("let"):
            var = self.name("variable")
            self.expect("=")
            e = self.exp()
            self.expect("in")
            return Let(var, e, self.contract())
        if self.accept("("):
            c = self.contract()
            self.expect(")")
            return c
        raise self.error("expected a contract")

    def _count_args(self) -> int:
        depth, count, j = 0, 1, self.i
        while True:
            t = self.toks[j]
            if t.kind == "eof":
                return count
            if t.kind == "op" and t.text in "([":
                depth += 1
            elif t.kind == "op" and t.text in ")]":
                if depth == 0:
                    return count
                depth -= 1
            elif t.kind == "op" and t.text == "," and depth == 0:
                count += 1
            j += 1

    def texpr(self) -> TExpr:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Tnum(int(t.text))
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            return Tvar(t.text)
        raise self.error("expected a numeral or template variable")

    # -- expressions --

    def exp(self) -> Exp:
        left = self.conj()
        while self.at("|") or self.at("||"):
            self.i += 1
            left = OpE(Op.OR, (left, self.conj()))
        return left

    def conj(self) -> Exp:
        left = self.comparison()
        while self.at("&") or self.at("&&"):
            self.i += 1
            left = OpE(Op.AND, (left, self.comparison()))
        return left

    def comparison(self) -> Exp:
        left = self.additive()
        for sym, op, swap in (("<=", Op.LEQ, False), ("<", Op.LT, False), ("==", Op.EQ, False),
                              (">=", Op.LEQ, True), (">", Op.LT, True)):
            if self.accept(sym):
                right = self.additive()
                return OpE(op, (right, left) if swap else (left, right))
        return left

    def additive(self) -> Exp:
        left = self.term()
        while self.at("+") or self.at("-"):
            op = Op.ADD if self.tok.text == "+" else Op.SUB
            self.i += 1
            left = OpE(op, (left, self.term()))
        return left

    def term(self) -> Exp:
        left = self.unary()
        while self.at("*") or self.at("/"):
            op = Op.MULT if self.tok.text == "*" else Op.DIV
            self.i += 1
            left = OpE(op, (left, self.unary()))
        return left

    def unary(self) -> Exp:
        if self.accept("-"):
            if self.tok.kind in ("int", "float", "thousands"):
                return RealLit(-self._number())
            return OpE(Op.NEG, (self.unary(),))
        if self.accept("!"):
            return OpE(Op.NOT, (self.unary(),))
        return self.atom()

    def _number(self) -> float:
        t = self.tok
        self.i += 1
        if t.kind == "thousands":
            return float(t.text.replace(".", ""))
        return float(t.text)

    def atom(self) -> Exp:
        t = self.tok
        if t.kind in ("int", "float", "thousands"):
            return RealLit(self._number())
        if self.accept("true"):
            return BoolLit(True)
        if self.accept("false"):
            return BoolLit(False)
        if self.accept("obs"):
            self.expect("(")
            label = self.name("observable label")
            self.expect(",")
            offset = self.integer("day offset")
            self.expect(")")
            return Obs(label, offset)
        if self.accept("cond"):
            self.expect("(")
            b = self.exp()
            self.expect(",")
            e1 = self.exp()
            self.expect(",")
            e2 = self.exp()
            self.expect(")")
            return OpE(Op.COND, (b, e1, e2))
        if self.accept("acc"):
            self.expect("(")
            var = self.name("variable")
            self.expect(".")
            body = self.exp()
            self.expect(",")
            days = self.integer("day count")
            if days < 0:
                raise self.error("acc day count must be >= 0")
            self.expect(",")
            init = self.exp()
            self.expect(")")
            return Acc(var, body, days, init)
        if self.accept("("):
            e = self.exp()
            self.expect(")")
            return e
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            return VarE(t.text)
        raise self.error("expected an expression")

    def finish(self) -> None:
        if self.tok.kind != "eof":
            raise self.error("unexpected trailing input")


def parse_contract(text: str) -> Contr:
    p = _Parser(text)
    c = p.contract()
    p.finish()
    return c


def parse_exp(text: str) -> Exp:
    p = _Parser(text)
    e = p.exp()
    p.finish()
    return e


# --- printing ----------------------------------------------------------------------

_INFIX = {Op.ADD: "+", Op.SUB: "-", Op.MULT: "*", Op.DIV: "/", Op.LT: "<", Op.LEQ: "<=",
          Op.EQ: "==", Op.AND: "&", Op.OR: "|"}


def _name(s: str) -> str:
    if _IDENT_RE.match(s) and s not in KEYWORDS:
        return s
    return json.dumps(s)


def _texpr(t: TExpr) -> str:
    return str(t.value) if isinstance(t, Tnum) else t.name


def print_exp(e: Exp) -> str:
    if isinstance(e, RealLit):
        return repr(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Obs):
        return f"obs({_name(e.label)}, {e.offset})"
    if isinstance(e, VarE):
        return e.name
    if isinstance(e, Acc):
        return f"acc({e.var}. {print_exp(e.body)}, {e.days}, {print_exp(e.init)})"
    if isinstance(e, OpE):
        a = e.args
        if e.op is Op.COND:
            return f"cond({print_exp(a[0])}, {print_exp(a[1])}, {print_exp(a[2])})"
        if e.op is Op.NEG:
            return f"-({print_exp(a[0])})"
        if e.op is Op.NOT:
            return f"!({print_exp(a[0])})"
        return f"({print_exp(a[0])} {_INFIX[e.op]} {print_exp(a[1])})"
    raise TypeError(f"not an expression: {e!r}")


def print_contract(c: Contr, indent: int | None = 2, _level: int = 0) -> str:
    """Render ``c`` in the concrete syntax; ``indent=None`` gives one line."""
    if indent is None:
        first, rest = "", " "
    else:
        first = rest = "\n" + " " * (indent * (_level + 1))

    def sub(x: Contr) -> str:
        return print_contract(x, indent, _level + 1)

    if isinstance(c, Zero):
        return "zero"
    if isinstance(c, Transfer):
        return f"transfer({_name(c.src)}, {_name(c.dst)}, {_name(c.asset)})"
    if isinstance(c, Scale):
        return f"scale({print_exp(c.factor)},{rest}{sub(c.body)})"
    if isinstance(c, Translate):
        return f"translate({_texpr(c.shift)},{rest}{sub(c.body)})"
    if isinstance(c, Both):
        return f"both({first}{sub(c.left)},{rest}{sub(c.right)})"
    if isinstance(c, IfWithin):
        return (f"if({print_exp(c.cond)}, {_texpr(c.window)},{rest}{sub(c.then)},"
                f"{rest}{sub(c.orelse)})")
    if isinstance(c, Let):
        return f"let {c.var} = {print_exp(c.bound)} in{rest}{sub(c.body)}"
    raise TypeError(f"not a contract: {c!r}")
