"""The payoff intermediate language."""

from .semantics import (
    Discount,
    EvalArgs,
    eval_at,
    il_sem,
    il_sem_bilateral,
    texpr_sem,
    texpr_z_sem,
)
from .syntax import (
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
    ILTExpr,
    ILTExprZ,
    ILUnExpr,
    Texpr,
    TexprZ,
    TnumZ,
    Tplus,
    TplusZ,
    UnOp,
    show,
    show_t,
    tnum,
    tvar,
)
from .transform import cut_payoff, payoff_nodes, simplify_loopif0

__all__ = [
    "Discount", "EvalArgs", "eval_at", "il_sem", "il_sem_bilateral", "texpr_sem",
    "texpr_z_sem", "cut_payoff", "payoff_nodes", "simplify_loopif0",
    "BinOp", "UnOp", "ILIf", "ILFloat", "ILNat", "ILBool", "ILTexpr", "ILNow", "ILModel",
    "ILUnExpr", "ILBinExpr", "ILLoopIf", "ILPayoff", "Tplus", "Texpr", "TplusZ", "TexprZ",
    "TnumZ", "ILExpr", "ILTExpr", "ILTExprZ", "tnum", "tvar", "show", "show_t",
]
