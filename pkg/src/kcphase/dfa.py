"""Leveled deterministic automata whose accepting paths are the models of a formula.

A :class:`LevelDfa` over ``n`` variables has levels 0..n. Level ``i`` tests
variable ``order[i]``; ``delta[i]`` is an int array of shape ``(width_i, 2)``
holding the successor index at level ``i + 1`` for bits 0 and 1, or -1 when
the transition is absent. The single level-0 state is the initial state and
the single level-n state is the accepting one. An automaton with the empty
language has no states at all.
"""

from __future__ import annotations

import numpy as np

from .cnf import CnfFormula
from .obdd import FALSE, TRUE, ObddManager, SizeCapError, check_order, compile_cnf_to_obdd, natural_order

DEFAULT_STATE_CAP = 5_000_000


class LevelDfa:
    __slots__ = ("n", "order", "delta")

    def __init__(self, n: int, delta, order=None):
        if n < 1:
            raise ValueError("a leveled automaton needs n >= 1")
        self.n = n
        self.order = check_order(order if order is not None else natural_order(n), n)
        if len(delta) != n:
            raise ValueError(f"expected {n} transition levels, got {len(delta)}")
        arrays = []
        for i, d in enumerate(delta):
            a = np.asarray(d, dtype=np.int64).reshape(-1, 2).copy()
            limit = len(delta[i + 1]) if i + 1 < n else (1 if len(a) else 0)
            if len(a) and (a.max() >= limit or a.min() < -1):
                raise ValueError(f"level {i} has a transition outside level {i + 1}")
            a.setflags(write=False)
            arrays.append(a)
        widths = [len(a) for a in arrays]
        if widths[0] > 1:
            raise ValueError("level 0 must hold a single initial state")
        if 0 in widths and any(widths):
            raise ValueError("an empty level is only allowed for the empty language")
        self.delta = tuple(arrays)

    @property
    def is_empty(self) -> bool:
        return len(self.delta[0]) == 0

    def widths(self) -> list:
        if self.is_empty:
            return [0] * (self.n + 1)
        return [len(d) for d in self.delta] + [1]

    def level_of_var(self, var: int) -> int:
        return self.order.index(var)

    def __eq__(self, other):
        return (isinstance(other, LevelDfa) and self.n == other.n and self.order == other.order
                and all(np.array_equal(a, b) for a, b in zip(self.delta, other.delta)))

    def __hash__(self):
        return hash((self.n, self.order, tuple(a.tobytes() for a in self.delta)))

    def __repr__(self):
        return f"LevelDfa(n={self.n}, states={dfa_state_count(self)})"

    def accepts(self, bits) -> bool:
        """``bits`` is a level-ordered 0/1 string of length n."""
        if self.is_empty:
            return False
        s = 0
        for i, b in enumerate(bits):
            s = self.delta[i][s, b]
            if s < 0:
                return False
        return True

    def accepts_assignment(self, assignment) -> bool:
        """``assignment`` is indexed by variable - 1."""
        return self.accepts([assignment[v - 1] for v in self.order])

    def paths(self):
        """Yield every accepting path as a level-ordered tuple of bits."""
        if self.is_empty:
            return
        stack = [(0, 0, ())]
        while stack:
            level, s, prefix = stack.pop()
            if level == self.n:
                yield prefix
                continue
            for b in (1, 0):
                t = self.delta[level][s, b]
                if t >= 0:
                    stack.append((level + 1, t, prefix + (b,)))

    def state_path(self, bits) -> list:
        """State indices visited by ``bits``, levels 0..n; raises if rejected."""
        if self.is_empty:
            raise ValueError("the empty automaton has no paths")
        states = [0]
        for i, b in enumerate(bits):
            s = int(self.delta[i][states[-1], b])
            if s < 0:
                raise ValueError("not an accepting path")
            states.append(s)
        if len(states) != self.n + 1:
            raise ValueError(f"a path needs {self.n} bits")
        return states

    def dump(self) -> str:
        """One line per transition: ``level src bit dst``."""
        lines = []
        for i, d in enumerate(self.delta):
            for s in range(len(d)):
                for b in (0, 1):
                    if d[s, b] >= 0:
                        lines.append(f"{i} {s} {b} {d[s, b]}")
        return "\n".join(lines) + ("\n" if lines else "")

    def to_dot(self) -> str:
        lines = ["digraph dfa {", "  rankdir=TB;"]
        for i, w in enumerate(self.widths()):
            names = " ".join(f"s{i}_{s};" for s in range(w))
            if names:
                lines.append(f"  {{ rank=same; {names} }}")
        for i, d in enumerate(self.delta):
            for s in range(len(d)):
                for b in (0, 1):
                    if d[s, b] >= 0:
                        lines.append(f'  s{i}_{s} -> s{i + 1}_{d[s, b]} [label="x{self.order[i]}={b}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def empty_dfa(n: int, order=None) -> LevelDfa:
    return LevelDfa(n, [np.empty((0, 2), dtype=np.int64)] * n, order)


def full_dfa(n: int, order=None) -> LevelDfa:
    return LevelDfa(n, [[[0, 0]]] * n, order)


def dfa_state_count(dfa: LevelDfa) -> int:
    return sum(dfa.widths())


def dfa_transition_count(dfa: LevelDfa) -> int:
    return int(sum(np.count_nonzero(d >= 0) for d in dfa.delta))


def _trim(n, delta, final):
    """Drop states that are unreachable or cannot reach a final level-n state."""
    alive = np.asarray(final, dtype=bool)
    kept = [None] * n
    for i in range(n - 1, -1, -1):
        d = np.array(delta[i], dtype=np.int64).reshape(-1, 2)
        dead = (d < 0) | ~alive[np.where(d < 0, 0, d)] if len(alive) else np.ones_like(d, dtype=bool)
        d[dead] = -1
        kept[i] = d
        alive = (d >= 0).any(axis=1)
    if not len(alive) or not alive[0]:
        return None
    reach = np.zeros(len(kept[0]), dtype=bool)
    reach[0] = True
    out = []
    for i in range(n):
        d = kept[i][reach]
        nxt = np.zeros(len(kept[i + 1]) if i + 1 < n else len(final), dtype=bool)
        targets = d[d >= 0]
        nxt[targets] = True
        remap = np.cumsum(nxt) - 1
        d = np.where(d >= 0, remap[np.where(d >= 0, d, 0)], -1)
        out.append(d)
        reach = nxt
    return out


def _canonical(n, delta):
    """Renumber states level by level in order of first visit (bit 0 before bit 1)."""
    out = []
    order = np.array([0])  # new index -> old index on the current level
    for i in range(n):
        d = delta[i][order]
        flat = d.reshape(-1)
        seen = flat[flat >= 0]
        _, first = np.unique(seen, return_index=True)
        nxt_order = seen[np.sort(first)]
        nxt_perm = np.full(int(flat.max()) + 1 if len(flat) else 0, -1, dtype=np.int64)
        nxt_perm[nxt_order] = np.arange(len(nxt_order))
        out.append(np.where(d >= 0, nxt_perm[np.where(d >= 0, d, 0)], -1))
        order = nxt_order
    return out


def minimize(dfa: LevelDfa) -> LevelDfa:
    """Trim, merge states with equal successor signatures bottom-up, renumber canonically."""
    if dfa.is_empty:
        return dfa
    trimmed = _trim(dfa.n, dfa.delta, [True])
    if trimmed is None:
        return empty_dfa(dfa.n, dfa.order)
    merged = [None] * dfa.n
    cls = np.array([0])
    for i in range(dfa.n - 1, -1, -1):
        d = trimmed[i]
        sig = np.where(d >= 0, cls[np.where(d >= 0, d, 0)], -1)
        rows, inverse = np.unique(sig, axis=0, return_inverse=True)
        merged[i] = rows
        cls = inverse.reshape(-1)
    return LevelDfa(dfa.n, _canonical(dfa.n, merged), dfa.order)


def _from_levels(n, delta, order, final):
    trimmed = _trim(n, delta, final)
    if trimmed is None:
        return empty_dfa(n, order)
    return minimize(LevelDfa(n, trimmed, order))


def conjoin_clause(dfa: LevelDfa, clause) -> LevelDfa:
    """Product with the clause's two-state-per-level acceptor, then trim and minimize."""
    if any(abs(l) > dfa.n for l in clause):
        raise ValueError("clause mentions a variable beyond the automaton")
    if dfa.is_empty or not clause:
        return empty_dfa(dfa.n, dfa.order)
    polarity = {abs(l): l > 0 for l in clause}
    delta = []
    for i, d in enumerate(dfa.delta):
        var = dfa.order[i]
        w = len(d)
        prod = np.full((2 * w, 2), -1, dtype=np.int64)
        for sat in (0, 1):
            for b in (0, 1):
                hit = var in polarity and (b == 1) == polarity[var]
                tgt = d[:, b]
                prod[sat::2, b] = np.where(tgt >= 0, 2 * tgt + (1 if (sat or hit) else 0), -1)
        delta.append(prod)
    return _from_levels(dfa.n, delta, dfa.order, [False, True])


def dfa_from_obdd(manager: ObddManager, f: int, state_cap: int = DEFAULT_STATE_CAP) -> LevelDfa:
    """Quasi-reduce a BDD: expand skipped levels into don't-care states."""
    n = manager.num_vars
    if f == FALSE:
        return empty_dfa(n, manager.order)
    level = [f]
    delta = []
    total = 1
    for i in range(n):
        index = {}
        nxt = []
        d = np.empty((len(level), 2), dtype=np.int64)
        for s, u in enumerate(level):
            if manager.level(u) == i:
                kids = (manager.low(u), manager.high(u))
            else:
                kids = (u, u)
            for b, c in enumerate(kids):
                if c == FALSE:
                    d[s, b] = -1
                    continue
                j = index.get(c)
                if j is None:
                    j = index[c] = len(nxt)
                    nxt.append(c)
                d[s, b] = j
        total += len(nxt)
        if total > state_cap:
            raise SizeCapError(f"DFA exceeded state cap {state_cap}")
        delta.append(d)
        level = nxt
    assert level == [TRUE]
    return LevelDfa(n, _canonical(n, delta), manager.order)


def compile_cnf_to_dfa(formula: CnfFormula, order=None, method: str = "obdd",
                       node_cap: int = DEFAULT_STATE_CAP, deadline: float | None = None) -> LevelDfa:
    """Minimal leveled automaton of the formula's models.

    ``method="obdd"`` builds the BDD and quasi-reduces it; ``"incremental"``
    conjoins clauses one at a time onto the full automaton.
    """
    n = formula.num_vars
    if method == "obdd":
        manager = ObddManager(n, order, node_cap=node_cap)
        root = compile_cnf_to_obdd(manager, formula, deadline=deadline)
        return minimize(dfa_from_obdd(manager, root, state_cap=node_cap))
    if method == "incremental":
        dfa = full_dfa(n, order)
        for clause in formula.clauses:
            dfa = conjoin_clause(dfa, clause)
            if dfa_state_count(dfa) > node_cap:
                raise SizeCapError(f"DFA exceeded state cap {node_cap}")
            if dfa.is_empty:
                break
        return dfa
    raise ValueError(f"unknown construction method {method!r}")


def accepting_path_count(dfa: LevelDfa) -> int:
    if dfa.is_empty:
        return 0
    counts = [1]
    for d in dfa.delta:
        nxt = [0] * (int(d.max()) + 1)
        for s, (a, b) in enumerate(d.tolist()):
            c = counts[s]
            if a >= 0:
                nxt[a] += c
            if b >= 0:
                nxt[b] += c
        counts = nxt
    return counts[0]


def check_invariants(dfa: LevelDfa) -> bool:
    """Leveled, deterministic, trimmed, single initial and accepting state."""
    if dfa.is_empty:
        return all(len(d) == 0 for d in dfa.delta)
    widths = dfa.widths()
    if widths[0] != 1 or widths[-1] != 1:
        return False
    for i, d in enumerate(dfa.delta):
        if d.shape != (widths[i], 2):
            return False
        if not (d >= 0).any(axis=1).all():
            return False  # dead end
        targets = np.unique(d[d >= 0])
        if len(targets) != widths[i + 1]:
            return False  # unreachable state or out-of-range target
    return True
