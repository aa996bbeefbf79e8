"""Canonical JSON for every AST in the toolchain.

Each node becomes an object with a ``"kind"`` tag plus its fields; dumps use
sorted keys and compact separators, so ``dumps(loads(s)) == s`` for any
canonical ``s``.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from typing import Any

from . import syntax as cl
from .il import syntax as il

_REGISTRY: dict[str, type] = {}
_ENUM_FIELDS: dict[tuple[type, str], type[enum.Enum]] = {}


def register(*classes: type, enums: dict[tuple[type, str], type[enum.Enum]] | None = None) -> None:
    for cls in classes:
        kind = cls.kind
        if kind in _REGISTRY and _REGISTRY[kind] is not cls:
            raise ValueError(f"duplicate node kind {kind!r}")
        _REGISTRY[kind] = cls
    _ENUM_FIELDS.update(enums or {})


register(
    cl.Tnum, cl.Tvar, cl.OpE, cl.Obs, cl.RealLit, cl.BoolLit, cl.VarE, cl.Acc,
    cl.Zero, cl.Let, cl.Transfer, cl.Scale, cl.Translate, cl.Both, cl.IfWithin,
    il.Tplus, il.Texpr, il.TplusZ, il.TexprZ, il.TnumZ,
    il.ILIf, il.ILFloat, il.ILNat, il.ILBool, il.ILTexpr, il.ILNow, il.ILModel,
    il.ILUnExpr, il.ILBinExpr, il.ILLoopIf, il.ILPayoff,
    enums={(cl.OpE, "op"): cl.Op, (il.ILBinExpr, "op"): il.BinOp, (il.ILUnExpr, "op"): il.UnOp},
)


def to_obj(node: Any) -> Any:
    if dataclasses.is_dataclass(node) and hasattr(type(node), "kind"):
        out = {"kind": type(node).kind}
        for f in dataclasses.fields(node):
            out[f.name] = to_obj(getattr(node, f.name))
        return out
    if isinstance(node, enum.Enum):
        return node.value
    if isinstance(node, (list, tuple)):
        return [to_obj(x) for x in node]
    return node


def from_obj(obj: Any) -> Any:
    if isinstance(obj, dict):
        try:
            cls = _REGISTRY[obj["kind"]]
        except KeyError:
            raise ValueError(f"unknown or missing node kind in {obj!r}") from None
        kwargs = {}
        for f in dataclasses.fields(cls):
            if f.name not in obj:
                raise ValueError(f"{cls.kind}: missing field {f.name!r}")
            raw = obj[f.name]
            enum_cls = _ENUM_FIELDS.get((cls, f.name))
            kwargs[f.name] = enum_cls(raw) if enum_cls else from_obj(raw)
        return cls(**kwargs)
    if isinstance(obj, list):
        return tuple(from_obj(x) for x in obj)
    return obj


def dumps(node: Any) -> str:
    return json.dumps(to_obj(node), sort_keys=True, separators=(",", ":"))


def loads(text: str) -> Any:
    return from_obj(json.loads(text))
