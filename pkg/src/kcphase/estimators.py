"""scikit-learn style front ends for the compilers and the curve analyses.

``CompiledSizeTransformer`` maps a batch of CNF instances to their compiled
sizes, so a list of formulas can flow through a Pipeline like any other
feature matrix. ``PeakLocator`` and ``GrowthRegressor`` fit the size curves.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .cnf import CnfFormula
from .dfa import accepting_path_count, compile_cnf_to_dfa, dfa_state_count, dfa_transition_count
from .dnnf import compile_cnf_to_dnnf, dnnf_model_count, dnnf_node_count
from .obdd import (DEFAULT_NODE_CAP, CompileTimeout, ObddManager, SizeCapError, compile_cnf_to_obdd,
                   obdd_model_count, obdd_node_count)
from .validation import check_formulas, check_language, check_xy


@dataclass(frozen=True)
class CompileResult:
    language: str
    nodes: int | None
    edges: int | None
    model_count: int | None
    unsat: bool | None
    compile_ms: float
    blowup: str | None = None


def compile_instance(formula: CnfFormula, language: str, node_cap: int = DEFAULT_NODE_CAP,
                     time_cap: float | None = None, order=None, branching: str = "lowest",
                     count: bool = True) -> CompileResult:
    """Compile one formula; caps produce a result with ``blowup`` set instead of raising."""
    language = check_language(language)
    start = time.perf_counter()
    deadline = None if time_cap is None else start + time_cap
    try:
        if language == "obdd":
            manager = ObddManager(formula.num_vars, order, node_cap=node_cap)
            root = compile_cnf_to_obdd(manager, formula, deadline=deadline)
            elapsed = time.perf_counter() - start
            size = obdd_node_count(manager, root)
            models = obdd_model_count(manager, root) if count else None
            nodes, edges, unsat = size.nodes, size.edges, root == 0
        elif language == "dfa":
            dfa = compile_cnf_to_dfa(formula, order, node_cap=node_cap, deadline=deadline)
            elapsed = time.perf_counter() - start
            nodes, edges = dfa_state_count(dfa), dfa_transition_count(dfa)
            models = accepting_path_count(dfa) if count else None
            unsat = dfa.is_empty
        else:
            dag = compile_cnf_to_dnnf(formula, branching=branching, node_cap=node_cap, deadline=deadline)
            elapsed = time.perf_counter() - start
            size = dnnf_node_count(dag)
            models = dnnf_model_count(dag) if count else None
            nodes, edges, unsat = size.nodes, size.edges, dag.root == 0
    except SizeCapError:
        return CompileResult(language, None, None, None, None,
                             1000 * (time.perf_counter() - start), "node-cap")
    except CompileTimeout:
        return CompileResult(language, None, None, None, None,
                             1000 * (time.perf_counter() - start), "time-cap")
    return CompileResult(language, nodes, edges, models, unsat, 1000 * elapsed)


class CompiledSizeTransformer(TransformerMixin, BaseEstimator):
    """Compile each formula into ``language`` and emit ``[nodes, edges]``.

    Instances that hit the node or time cap come out as NaN rows.
    """

    def __init__(self, language="dnnf", node_cap=DEFAULT_NODE_CAP, time_cap=None, order=None,
                 branching="lowest"):
        self.language = language
        self.node_cap = node_cap
        self.time_cap = time_cap
        self.order = order
        self.branching = branching

    def fit(self, X, y=None):
        formulas = check_formulas(X)
        self.language_ = check_language(self.language)
        if self.node_cap < 1:
            raise ValueError("node_cap must be positive")
        self.n_vars_ = sorted({f.num_vars for f in formulas})
        return self

    def compile(self, X) -> list:
        check_is_fitted(self, "language_")
        return [compile_instance(f, self.language_, self.node_cap, self.time_cap, self.order,
                                 self.branching) for f in check_formulas(X)]

    def transform(self, X):
        out = [(r.nodes, r.edges) if r.blowup is None else (math.nan, math.nan)
               for r in self.compile(X)]
        return np.asarray(out, dtype=float).reshape(-1, 2)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(["nodes", "edges"], dtype=object)


def moving_average(y, window: int = 3):
    """Centered moving average; the ends average over the points available."""
    y = np.asarray(y, dtype=float)
    half = window // 2
    return np.array([y[max(0, i - half):i + half + 1].mean() for i in range(len(y))])


class PeakLocator(BaseEstimator):
    """Locate the interior maximum of a size-vs-ratio curve."""

    def __init__(self, window=3):
        self.window = window

    def fit(self, r, sizes):
        r, sizes = check_xy(r, sizes, min_points=5)
        order = np.argsort(r)
        r, sizes = r[order], sizes[order]
        self.smoothed_ = moving_average(sizes, self.window)
        raw, smooth = int(np.argmax(sizes)), int(np.argmax(self.smoothed_))
        last = len(r) - 1
        self.raw_peak_ = float(r[raw]) if 0 < raw < last else None
        self.peak_ = float(r[smooth]) if 0 < smooth < last else None
        self.has_peak_ = self.peak_ is not None
        return self


class GrowthRegressor(RegressorMixin, BaseEstimator):
    """Least-squares fits of log(size) against n and against log(n).

    ``predict`` uses the semilog (exponential) model, the loglog (power) model,
    or whichever fitted better when ``regime="auto"``.
    """

    def __init__(self, regime="auto"):
        self.regime = regime

    def fit(self, n, sizes):
        n, sizes = check_xy(n, sizes, min_points=4)
        if len(np.unique(n)) < 4:
            raise ValueError("need at least 4 distinct n values")
        if np.any(n <= 0) or np.any(sizes <= 0):
            raise ValueError("n and sizes must be positive for logarithmic fits")
        semi = linregress(n, np.log(sizes))
        loglog = linregress(np.log(n), np.log(sizes))
        self.semilog_slope_, self.semilog_intercept_ = float(semi.slope), float(semi.intercept)
        self.semilog_r2_ = float(semi.rvalue ** 2)
        self.loglog_slope_, self.loglog_intercept_ = float(loglog.slope), float(loglog.intercept)
        self.loglog_r2_ = float(loglog.rvalue ** 2)
        if self.regime == "auto":
            self.regime_ = "semilog" if self.semilog_r2_ >= self.loglog_r2_ else "loglog"
        elif self.regime in ("semilog", "loglog"):
            self.regime_ = self.regime
        else:
            raise ValueError(f"unknown regime {self.regime!r}")
        return self

    def predict(self, n):
        check_is_fitted(self, "regime_")
        n = np.asarray(n, dtype=float).ravel()
        if self.regime_ == "semilog":
            return np.exp(self.semilog_intercept_ + self.semilog_slope_ * n)
        return np.exp(self.loglog_intercept_ + self.loglog_slope_ * np.log(n))
