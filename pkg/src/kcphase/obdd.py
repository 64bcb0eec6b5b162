"""Reduced ordered BDDs over a fixed variable order.

Nodes are integer refs into a manager. Refs 0 and 1 are the FALSE and TRUE
terminals; internal nodes are hash-consed in a unique table keyed by
``(level, lo, hi)`` so equal functions always share one ref.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .cnf import CnfFormula

FALSE = 0
TRUE = 1
DEFAULT_NODE_CAP = 5_000_000


class SizeCapError(RuntimeError):
    """Raised when a compilation exceeds its node budget."""


class CompileTimeout(RuntimeError):
    """Raised when a compilation exceeds its wall-clock budget."""


@dataclass(frozen=True)
class SizeReport:
    nodes: int
    edges: int


def natural_order(n: int) -> tuple:
    return tuple(range(1, n + 1))


def check_order(order, n: int) -> tuple:
    order = tuple(int(v) for v in order)
    if sorted(order) != list(range(1, n + 1)):
        raise ValueError(f"variable order must be a permutation of 1..{n}")
    return order


class ObddManager:
    """Owns the unique table and operation cache for one set of BDDs.

    One manager is meant for one compilation; refs are meaningless across
    managers.
    """

    def __init__(self, num_vars: int, order=None, node_cap: int = DEFAULT_NODE_CAP):
        self.num_vars = num_vars
        self.order = check_order(order if order is not None else natural_order(num_vars), num_vars)
        self.level_of = {v: i for i, v in enumerate(self.order)}
        self.node_cap = node_cap
        # terminals sit below every variable level
        self._level = [num_vars, num_vars]
        self._lo = [-1, -1]
        self._hi = [-1, -1]
        self._unique = {}
        self._cache = {}

    def __len__(self):
        return len(self._level)

    def level(self, f: int) -> int:
        return self._level[f]

    def var(self, f: int) -> int | None:
        if f <= TRUE:
            return None
        return self.order[self._level[f]]

    def low(self, f: int) -> int:
        return self._lo[f]

    def high(self, f: int) -> int:
        return self._hi[f]

    def clear_cache(self):
        self._cache.clear()

    def mk_level(self, level: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (level, lo, hi)
        ref = self._unique.get(key)
        if ref is None:
            ref = len(self._level)
            if ref - 2 >= self.node_cap:
                raise SizeCapError(f"OBDD exceeded node cap {self.node_cap}")
            self._level.append(level)
            self._lo.append(lo)
            self._hi.append(hi)
            self._unique[key] = ref
        return ref

    def mk_node(self, var: int, lo: int, hi: int) -> int:
        level = self.level_of[var]
        if self._level[lo] <= level or self._level[hi] <= level:
            raise ValueError("children must sit at later levels than their parent")
        return self.mk_level(level, lo, hi)

    def literal(self, lit: int) -> int:
        level = self.level_of[abs(lit)]
        return self.mk_level(level, FALSE, TRUE) if lit > 0 else self.mk_level(level, TRUE, FALSE)

    def negate(self, f: int) -> int:
        if f <= TRUE:
            return 1 - f
        key = ("not", f)
        r = self._cache.get(key)
        if r is None:
            r = self.mk_level(self._level[f], self.negate(self._lo[f]), self.negate(self._hi[f]))
            self._cache[key] = r
        return r

    def apply_and(self, f: int, g: int) -> int:
        if f == FALSE or g == FALSE:
            return FALSE
        if f == TRUE:
            return g
        if g == TRUE or f == g:
            return f
        if f > g:
            f, g = g, f
        key = (f, g)
        cache = self._cache
        r = cache.get(key)
        if r is not None:
            return r
        lv = self._level
        lf, lg = lv[f], lv[g]
        if lf == lg:
            r = self.mk_level(lf, self.apply_and(self._lo[f], self._lo[g]),
                              self.apply_and(self._hi[f], self._hi[g]))
        elif lf < lg:
            r = self.mk_level(lf, self.apply_and(self._lo[f], g), self.apply_and(self._hi[f], g))
        else:
            r = self.mk_level(lg, self.apply_and(f, self._lo[g]), self.apply_and(f, self._hi[g]))
        cache[key] = r
        return r

    def apply_or(self, f: int, g: int) -> int:
        if f == TRUE or g == TRUE:
            return TRUE
        if f == FALSE:
            return g
        if g == FALSE or f == g:
            return f
        if f > g:
            f, g = g, f
        key = ("or", f, g)
        r = self._cache.get(key)
        if r is not None:
            return r
        lv = self._level
        lf, lg = lv[f], lv[g]
        if lf == lg:
            r = self.mk_level(lf, self.apply_or(self._lo[f], self._lo[g]),
                              self.apply_or(self._hi[f], self._hi[g]))
        elif lf < lg:
            r = self.mk_level(lf, self.apply_or(self._lo[f], g), self.apply_or(self._hi[f], g))
        else:
            r = self.mk_level(lg, self.apply_or(f, self._lo[g]), self.apply_or(f, self._hi[g]))
        self._cache[key] = r
        return r

    def clause(self, clause) -> int:
        """BDD of a disjunction of literals, built bottom-up along the order."""
        lits = sorted(clause, key=lambda l: self.level_of[abs(l)], reverse=True)
        f = FALSE
        for lit in lits:
            level = self.level_of[abs(lit)]
            f = self.mk_level(level, f, TRUE) if lit > 0 else self.mk_level(level, TRUE, f)
        return f

    def reachable(self, f: int) -> list:
        """Internal nodes reachable from ``f`` in DFS preorder."""
        seen = set()
        out = []
        stack = [f]
        while stack:
            u = stack.pop()
            if u <= TRUE or u in seen:
                continue
            seen.add(u)
            out.append(u)
            stack.append(self._hi[u])
            stack.append(self._lo[u])
        return out

    def to_dot(self, f: int) -> str:
        lines = ["digraph obdd {"]
        internal = self.reachable(f)
        terms = {u for n in internal for u in (self._lo[n], self._hi[n]) if u <= TRUE}
        if f <= TRUE:
            terms.add(f)
        for t in sorted(terms):
            lines.append(f'  n{t} [shape=box,label="{t}"];')
        for u in internal:
            lines.append(f'  n{u} [label="x{self.var(u)}"];')
            lines.append(f"  n{u} -> n{self._hi[u]};")
            lines.append(f"  n{u} -> n{self._lo[u]} [style=dashed];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def apply_and(manager: ObddManager, f: int, g: int) -> int:
    return manager.apply_and(f, g)


def apply_or(manager: ObddManager, f: int, g: int) -> int:
    return manager.apply_or(f, g)


def mk_node(manager: ObddManager, var: int, lo: int, hi: int) -> int:
    return manager.mk_node(var, lo, hi)


def compile_cnf_to_obdd(manager: ObddManager, formula: CnfFormula, balanced: bool = False,
                        deadline: float | None = None) -> int:
    """Conjoin the formula's clauses into one BDD.

    Clauses are folded left to right in formula order; ``balanced=True``
    conjoins them pairwise as a tree instead.
    """
    if formula.num_vars != manager.num_vars:
        raise ValueError("formula and manager disagree on the number of variables")
    parts = [manager.clause(c) for c in formula.clauses]
    if not balanced:
        f = TRUE
        for g in parts:
            f = manager.apply_and(f, g)
            if f == FALSE:
                break
            if deadline is not None and time.perf_counter() > deadline:
                raise CompileTimeout("OBDD compilation exceeded its time cap")
        return f
    while len(parts) > 1:
        nxt = [manager.apply_and(parts[i], parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
        if deadline is not None and time.perf_counter() > deadline:
            raise CompileTimeout("OBDD compilation exceeded its time cap")
    return parts[0] if parts else TRUE


def obdd_node_count(manager: ObddManager, f: int) -> SizeReport:
    internal = manager.reachable(f)
    if f <= TRUE:
        return SizeReport(1, 0)
    terms = {u for n in internal for u in (manager.low(n), manager.high(n)) if u <= TRUE}
    return SizeReport(len(internal) + len(terms), 2 * len(internal))


def obdd_model_count(manager: ObddManager, f: int, n: int | None = None) -> int:
    """Satisfying assignments over ``n`` variables (default: the manager's)."""
    n = manager.num_vars if n is None else n
    if n < manager.num_vars:
        raise ValueError("n must cover every variable of the manager")
    memo = {FALSE: 0, TRUE: 1}
    lv, lo, hi = manager._level, manager._lo, manager._hi

    # counts are over the levels strictly below the node's own level
    for u in reversed(_topo(manager, f)):
        a, b = lo[u], hi[u]
        memo[u] = (memo[a] << (lv[a] - lv[u] - 1)) + (memo[b] << (lv[b] - lv[u] - 1))
    return memo[f] << (lv[f] + n - manager.num_vars)


def _topo(manager: ObddManager, f: int) -> list:
    # parents before children
    order = []
    seen = set()
    stack = [(f, False)]
    while stack:
        u, done = stack.pop()
        if u <= TRUE:
            continue
        if done:
            order.append(u)
            continue
        if u in seen:
            continue
        seen.add(u)
        stack.append((u, True))
        stack.append((manager.high(u), False))
        stack.append((manager.low(u), False))
    order.reverse()
    return order
