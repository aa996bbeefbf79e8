"""Exception hierarchy shared by every stage of the toolchain."""

from __future__ import annotations


class ContractError(Exception):
    """Base class for all errors raised by contractil."""


class ParseError(ContractError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class TypeCheckError(ContractError):
    """Ill-typed contract or expression. ``path`` locates the offending subterm."""

    def __init__(self, message: str, path: tuple = ()):
        where = "/".join(str(p) for p in path) or "<root>"
        super().__init__(f"{message} at {where}")
        self.path = tuple(path)


class EvalError(ContractError):
    """Evaluation got stuck (missing data, tag mismatch, zero division...)."""


class UnboundTemplateVar(EvalError):
    def __init__(self, name: str):
        super().__init__(f"unbound template variable {name!r}")
        self.name = name


class UnboundVar(EvalError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class MissingObservable(EvalError):
    def __init__(self, label: str, day: int):
        super().__init__(f"no value for observable {label!r} at day {day}")
        self.label = label
        self.day = day


class ILTypeError(EvalError):
    pass


class NonRealResult(EvalError):
    pass


class NotTemplateClosed(ContractError):
    pass


class CompileError(ContractError):
    pass


class Unsupported(CompileError):
    def __init__(self, construct: str, path: tuple = ()):
        where = "/".join(str(p) for p in path) or "<root>"
        super().__init__(f"{construct} is not supported by the compiler (at {where})")
        self.construct = construct
        self.path = tuple(path)


class KernelError(ContractError):
    pass


class IndexOutOfRange(KernelError):
    pass


class ShapeMismatch(KernelError):
    pass


class UnsupportedDynamicRow(KernelError):
    pass


class CholeskyFailure(ContractError):
    pass


class NonfiniteAccumulation(ContractError):
    pass
