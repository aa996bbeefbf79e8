"""Basic Real/Bool typing of expressions and contracts.

Only the value-type judgment is implemented; causality checking is not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import TypeCheckError
from .syntax import (
    OP_SIGNATURES,
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
    Transfer,
    Translate,
    Ty,
    VarE,
    Zero,
)


@dataclass(frozen=True)
class TypeContext:
    """Observable label kinds and types of bound variables.

    Labels not listed in ``observables`` are taken to be Real.
    """

    observables: Mapping[str, Ty] = field(default_factory=dict)
    variables: Mapping[str, Ty] = field(default_factory=dict)

    def bind(self, name: str, ty: Ty) -> "TypeContext":
        return TypeContext(self.observables, {**self.variables, name: ty})

    def observable(self, label: str) -> Ty:
        return self.observables.get(label, Ty.REAL)


EMPTY_CONTEXT = TypeContext()


def type_of_exp(e: Exp, ctx: TypeContext = EMPTY_CONTEXT, path: tuple = ()) -> Ty:
    if isinstance(e, RealLit):
        return Ty.REAL
    if isinstance(e, BoolLit):
        return Ty.BOOL
    if isinstance(e, Obs):
        return ctx.observable(e.label)
    if isinstance(e, VarE):
        try:
            return ctx.variables[e.name]
        except KeyError:
            raise TypeCheckError(f"unbound variable {e.name!r}", path) from None
    if isinstance(e, Acc):
        init_ty = type_of_exp(e.init, ctx, path + ("init",))
        body_ty = type_of_exp(e.body, ctx.bind(e.var, init_ty), path + ("body",))
        if body_ty is not init_ty:
            raise TypeCheckError(
                f"accumulator body has type {body_ty.value}, initial value {init_ty.value}", path
            )
        return init_ty
    if isinstance(e, OpE):
        arg_tys = [type_of_exp(a, ctx, path + (e.op.value, i)) for i, a in enumerate(e.args)]
        if e.op is Op.COND:
            if arg_tys[0] is not Ty.BOOL:
                raise TypeCheckError("cond scrutinee must be Bool", path + ("cond", 0))
            if arg_tys[1] is not arg_tys[2]:
                raise TypeCheckError(
                    f"cond branches differ: {arg_tys[1].value} vs {arg_tys[2].value}", path
                )
            return arg_tys[1]
        expected, result = OP_SIGNATURES[e.op]
        for i, (got, want) in enumerate(zip(arg_tys, expected)):
            if got is not want:
                raise TypeCheckError(
                    f"{e.op.value} argument {i} has type {got.value}, expected {want.value}",
                    path + (e.op.value, i),
                )
        return result
    raise TypeCheckError(f"not an expression: {e!r}", path)


def check_contract(c: Contr, ctx: TypeContext = EMPTY_CONTEXT, path: tuple = ()) -> None:
    """Raise :class:`TypeCheckError` unless ``c`` is well-typed."""
    if isinstance(c, (Zero, Transfer)):
        return
    if isinstance(c, Scale):
        ty = type_of_exp(c.factor, ctx, path + ("scale",))
        if ty is not Ty.REAL:
            raise TypeCheckError("scale factor must be Real", path + ("scale",))
        check_contract(c.body, ctx, path + ("scale", "body"))
        return
    if isinstance(c, Translate):
        check_contract(c.body, ctx, path + ("translate",))
        return
    if isinstance(c, Both):
        check_contract(c.left, ctx, path + ("both", 0))
        check_contract(c.right, ctx, path + ("both", 1))
        return
    if isinstance(c, IfWithin):
        ty = type_of_exp(c.cond, ctx, path + ("if",))
        if ty is not Ty.BOOL:
            raise TypeCheckError("if condition must be Bool", path + ("if",))
        check_contract(c.then, ctx, path + ("if", "then"))
        check_contract(c.orelse, ctx, path + ("if", "else"))
        return
    if isinstance(c, Let):
        ty = type_of_exp(c.bound, ctx, path + ("let",))
        check_contract(c.body, ctx.bind(c.var, ty), path + ("let", "body"))
        return
    raise TypeCheckError(f"not a contract: {c!r}", path)


def is_well_typed(c: Contr, ctx: TypeContext = EMPTY_CONTEXT) -> bool:
    try:
        check_contract(c, ctx)
    except TypeCheckError:
        return False
    return True
