"""Kleene algebra modulo theories: normalization, automata and a trace oracle."""
from .terms import Term, TermStore, nnf, is_test, show
from .theory import Theory, register_theory, theory_names, validate_theory
from .engine import KMT, load

__all__ = [
    "Term",
    "TermStore",
    "nnf",
    "is_test",
    "show",
    "Theory",
    "register_theory",
    "theory_names",
    "validate_theory",
    "KMT",
    "load",
]

__version__ = "0.1.0"
