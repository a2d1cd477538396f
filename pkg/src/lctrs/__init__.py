"""Confluence analysis for logically constrained term rewrite systems."""

from .terms import App, BOOL, INT, FunSym, Sort, Term, Var, int_val, bool_val
from .logic import ConstraintSolver, SolverVerdict

__all__ = [
    "App",
    "BOOL",
    "INT",
    "FunSym",
    "Sort",
    "Term",
    "Var",
    "int_val",
    "bool_val",
    "ConstraintSolver",
    "SolverVerdict",
]
