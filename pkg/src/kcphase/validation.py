"""Input validation helpers shared by the estimators and the harness."""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from .cnf import CnfFormula, parse_dimacs

LANGUAGES = ("obdd", "dfa", "dnnf")


def check_formula(X) -> CnfFormula:
    """Coerce one instance: a CnfFormula, DIMACS text, or ``(num_vars, clauses)``."""
    if isinstance(X, CnfFormula):
        return X
    if isinstance(X, str):
        return parse_dimacs(X)
    if isinstance(X, tuple) and len(X) == 2 and isinstance(X[0], int):
        return CnfFormula(X[0], tuple(tuple(c) for c in X[1]))
    raise TypeError(f"cannot interpret {type(X).__name__} as a CNF formula")


def check_formulas(X) -> list:
    """Coerce a batch of instances; a single instance becomes a batch of one."""
    if isinstance(X, (CnfFormula, str)) or (isinstance(X, tuple) and len(X) == 2 and isinstance(X[0], int)):
        return [check_formula(X)]
    if not isinstance(X, Iterable):
        raise TypeError("expected a formula or an iterable of formulas")
    out = [check_formula(x) for x in X]
    if not out:
        raise ValueError("received an empty batch of formulas")
    return out


def check_language(language: str) -> str:
    lang = language.lower()
    if lang not in LANGUAGES:
        raise ValueError(f"unknown target language {language!r}; expected one of {LANGUAGES}")
    return lang


def check_xy(x, y, min_points: int):
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError(f"x and y differ in length: {len(x)} vs {len(y)}")
    if len(x) < min_points:
        raise ValueError(f"need at least {min_points} points, got {len(x)}")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
        raise ValueError("x and y must be finite")
    return x, y
