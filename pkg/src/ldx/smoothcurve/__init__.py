"""Expression parsing, symbolic differentiation and jet evaluation."""

from .expr import (
    Add,
    Call,
    Div,
    Expr,
    Mul,
    Neg,
    Num,
    Pow,
    Sub,
    Var,
    diff_expr,
    eval_jet,
    evaluate,
    free_vars,
    parse_expr,
    to_source,
)
from .jet import Jet, atan, cos, cosh, exp, log, sin, sinh, sqrt, tan, tanh

__all__ = [
    "Add", "Call", "Div", "Expr", "Mul", "Neg", "Num", "Pow", "Sub", "Var",
    "diff_expr", "eval_jet", "evaluate", "free_vars", "parse_expr", "to_source",
    "Jet", "atan", "cos", "cosh", "exp", "log", "sin", "sinh", "sqrt", "tan", "tanh",
]
