"""Decision-DNNF compilation by exhaustive DPLL with component caching.

The compiler branches on a variable, unit-propagates, splits the residual
clause set into connected components of its primal graph and caches each
component's compiled node by its canonical clause set. Nodes are
hash-consed, so identical sub-DAGs are stored once.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .cnf import CnfFormula
from .obdd import CompileTimeout, SizeCapError, SizeReport

DEFAULT_NODE_CAP = 5_000_000


class InvalidDagError(ValueError):
    pass


@dataclass(frozen=True)
class TrueNode:
    pass


@dataclass(frozen=True)
class FalseNode:
    pass


@dataclass(frozen=True)
class LiteralNode:
    literal: int


@dataclass(frozen=True)
class AndNode:
    children: tuple


@dataclass(frozen=True)
class DecisionNode:
    """(-var AND lo) OR (var AND hi)."""
    var: int
    lo: int
    hi: int


@dataclass(frozen=True)
class OrNode:
    """A raw disjunction; ``var`` names the decision variable (0 if none)."""
    children: tuple
    var: int = 0


def children_of(node) -> tuple:
    if isinstance(node, AndNode) or isinstance(node, OrNode):
        return node.children
    if isinstance(node, DecisionNode):
        return (node.lo, node.hi)
    return ()


@dataclass(frozen=True)
class DnnfDag:
    nodes: tuple
    root: int
    num_vars: int

    def reachable(self) -> list:
        """Reachable node ids, children before parents."""
        out, seen = [], set()
        stack = [(self.root, False)]
        while stack:
            u, done = stack.pop()
            if done:
                out.append(u)
                continue
            if u in seen:
                continue
            seen.add(u)
            stack.append((u, True))
            for c in reversed(children_of(self.nodes[u])):
                if c not in seen:
                    stack.append((c, False))
        return out

    def evaluate(self, assignment) -> bool:
        """Truth value under a total assignment (sequence indexed by var-1)."""
        val = {}
        for u in self.reachable():
            node = self.nodes[u]
            if isinstance(node, TrueNode):
                val[u] = True
            elif isinstance(node, FalseNode):
                val[u] = False
            elif isinstance(node, LiteralNode):
                val[u] = (assignment[abs(node.literal) - 1] == 1) == (node.literal > 0)
            elif isinstance(node, AndNode):
                val[u] = all(val[c] for c in node.children)
            elif isinstance(node, DecisionNode):
                val[u] = val[node.hi] if assignment[node.var - 1] == 1 else val[node.lo]
            else:
                val[u] = any(val[c] for c in node.children)
        return val[self.root]


class _Builder:
    def __init__(self, node_cap):
        self.nodes = []
        self.unique = {}
        self.node_cap = node_cap
        self.false = self.add(FalseNode())
        self.true = self.add(TrueNode())

    def add(self, node) -> int:
        ref = self.unique.get(node)
        if ref is None:
            if len(self.nodes) >= self.node_cap:
                raise SizeCapError(f"d-DNNF exceeded node cap {self.node_cap}")
            ref = len(self.nodes)
            self.nodes.append(node)
            self.unique[node] = ref
        return ref

    def conj(self, children) -> int:
        flat = []
        for c in children:
            if c == self.false:
                return self.false
            if c == self.true:
                continue
            node = self.nodes[c]
            if isinstance(node, AndNode):
                flat.extend(node.children)
            else:
                flat.append(c)
        if not flat:
            return self.true
        if len(flat) == 1:
            return flat[0]
        return self.add(AndNode(tuple(sorted(flat))))

    def decision(self, var, lo, hi) -> int:
        if lo == self.false and hi == self.false:
            return self.false
        if lo == self.false:
            return self.conj([self.add(LiteralNode(var)), hi])
        if hi == self.false:
            return self.conj([self.add(LiteralNode(-var)), lo])
        return self.add(DecisionNode(var, lo, hi))


def _condition(clauses, lit):
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = tuple(x for x in c if x != -lit)
            if not c:
                return None
        out.append(c)
    return out


def _propagate(clauses):
    """Unit propagation; returns (implied literals, residual) or None on conflict."""
    implied = []
    while True:
        units = {c[0] for c in clauses if len(c) == 1}
        if not units:
            return implied, clauses
        if any(-u in units for u in units):
            return None
        implied.extend(units)
        neg = {-u for u in units}
        out = []
        for c in clauses:
            if not units.isdisjoint(c):
                continue
            if not neg.isdisjoint(c):
                c = tuple(x for x in c if x not in neg)
                if not c:
                    return None
            out.append(c)
        clauses = out


def _components(clauses):
    """Split clauses into groups with disjoint variable sets (primal-graph components)."""
    groups = []  # [variable bitmask, clauses]
    for c in clauses:
        m = 0
        for x in c:
            m |= 1 << (x if x > 0 else -x)
        hit = None
        i = 0
        while i < len(groups):
            g = groups[i]
            if g[0] & m:
                if hit is None:
                    hit = g
                    g[0] |= m
                    g[1].append(c)
                else:
                    hit[0] |= g[0]
                    hit[1].extend(g[1])
                    groups.pop(i)
                    continue
            i += 1
        if hit is None:
            groups.append([m, [c]])
    return [g[1] for g in groups]


class DnnfCompilerState:
    def __init__(self, branching="lowest", cache=True, node_cap=DEFAULT_NODE_CAP, deadline=None):
        if branching not in ("lowest", "degree"):
            raise ValueError(f"unknown branching heuristic {branching!r}")
        self.branching = branching
        self.use_cache = cache
        self.cache = {}
        self.deadline = deadline
        self.builder = _Builder(node_cap)
        self.calls = 0

    def pick(self, clauses) -> int:
        if self.branching == "lowest":
            # literals within a clause stay sorted by variable
            return min(abs(c[0]) for c in clauses)
        degree = {}
        for c in clauses:
            for x in c:
                degree[abs(x)] = degree.get(abs(x), 0) + 1
        return max(sorted(degree), key=degree.__getitem__)

    def compile(self, clauses) -> int:
        b = self.builder
        res = _propagate(clauses)
        if res is None:
            return b.false
        implied, clauses = res
        parts = [b.add(LiteralNode(l)) for l in sorted(implied, key=abs)]
        for comp in _components(clauses):
            node = self.component(comp)
            if node == b.false:
                return b.false
            parts.append(node)
        return b.conj(parts)

    def component(self, clauses) -> int:
        self.calls += 1
        if self.deadline is not None and self.calls % 256 == 0 and time.perf_counter() > self.deadline:
            raise CompileTimeout("d-DNNF compilation exceeded its time cap")
        key = None
        if self.use_cache:
            key = tuple(sorted(clauses, key=lambda c: (len(c), c)))
            hit = self.cache.get(key)
            if hit is not None:
                return hit
        v = self.pick(clauses)
        lo_cl = _condition(clauses, -v)
        lo = self.builder.false if lo_cl is None else self.compile(lo_cl)
        hi_cl = _condition(clauses, v)
        hi = self.builder.false if hi_cl is None else self.compile(hi_cl)
        node = self.builder.decision(v, lo, hi)
        if key is not None:
            self.cache[key] = node
        return node


def compile_cnf_to_dnnf(formula: CnfFormula, branching: str = "lowest", cache: bool = True,
                        node_cap: int = DEFAULT_NODE_CAP, deadline: float | None = None) -> DnnfDag:
    state = DnnfCompilerState(branching, cache, node_cap, deadline)
    clauses = [tuple(sorted(c, key=abs)) for c in formula.clauses]
    if any(not c for c in clauses):
        root = state.builder.false
    else:
        root = state.compile(clauses)
    return DnnfDag(tuple(state.builder.nodes), root, formula.num_vars)


def dnnf_node_count(dag: DnnfDag) -> SizeReport:
    reach = dag.reachable()
    edges = sum(len(children_of(dag.nodes[u])) for u in reach)
    return SizeReport(len(reach), edges)


def _supports(dag: DnnfDag, strict: bool) -> dict:
    masks = {}
    for u in dag.reachable():
        node = dag.nodes[u]
        if isinstance(node, LiteralNode):
            masks[u] = 1 << (abs(node.literal) - 1)
        elif isinstance(node, DecisionNode):
            masks[u] = (1 << (node.var - 1)) | masks[node.lo] | masks[node.hi]
        else:
            m = 0
            for c in children_of(node):
                if strict and isinstance(node, AndNode) and m & masks[c]:
                    raise InvalidDagError(f"AND node {u} is not decomposable")
                m |= masks[c]
            masks[u] = m
    return masks


def dnnf_model_count(dag: DnnfDag, n: int | None = None) -> int:
    """Models over ``n`` variables in one bottom-up pass; free variables are weighted in."""
    n = dag.num_vars if n is None else n
    counts, masks = {}, {}
    for u in dag.reachable():
        node = dag.nodes[u]
        if isinstance(node, TrueNode):
            counts[u], masks[u] = 1, 0
        elif isinstance(node, FalseNode):
            counts[u], masks[u] = 0, 0
        elif isinstance(node, LiteralNode):
            counts[u], masks[u] = 1, 1 << (abs(node.literal) - 1)
        elif isinstance(node, AndNode):
            c, m = 1, 0
            for ch in node.children:
                if m & masks[ch]:
                    raise InvalidDagError(f"AND node {u} is not decomposable")
                c *= counts[ch]
                m |= masks[ch]
            counts[u], masks[u] = c, m
        elif isinstance(node, DecisionNode):
            bit = 1 << (node.var - 1)
            if (masks[node.lo] | masks[node.hi]) & bit:
                raise InvalidDagError(f"decision node {u} re-tests x{node.var} below itself")
            m = bit | masks[node.lo] | masks[node.hi]
            width = m.bit_count() - 1
            counts[u] = ((counts[node.lo] << (width - masks[node.lo].bit_count()))
                         + (counts[node.hi] << (width - masks[node.hi].bit_count())))
            masks[u] = m
        else:
            if not _is_decision_or(dag, node):
                raise InvalidDagError(f"OR node {u} is not a decision disjunction")
            m = 0
            for ch in node.children:
                m |= masks[ch]
            counts[u] = sum(counts[ch] << (m.bit_count() - masks[ch].bit_count())
                            for ch in node.children)
            masks[u] = m
    root_mask = masks[dag.root]
    if root_mask >> n:
        raise InvalidDagError("DAG mentions variables beyond n")
    return counts[dag.root] << (n - root_mask.bit_count())


def _direct_literals(dag, ref) -> set:
    node = dag.nodes[ref]
    if isinstance(node, LiteralNode):
        return {node.literal}
    if isinstance(node, AndNode):
        return {dag.nodes[c].literal for c in node.children if isinstance(dag.nodes[c], LiteralNode)}
    return set()


def _is_decision_or(dag, node) -> bool:
    # the only raw OR shapes accepted: "O 0 0" (false) and "O j 2 a b" with
    # a, b carrying the opposite literals of x_j as direct conjuncts
    if not node.children:
        return True
    if node.var == 0 or len(node.children) != 2:
        return False
    a, b = (_direct_literals(dag, c) for c in node.children)
    j = node.var
    return (-j in a and j in b) or (j in a and -j in b)


def check_decomposability(dag: DnnfDag) -> bool:
    try:
        _supports(dag, strict=True)
    except InvalidDagError:
        return False
    return True


def check_determinism(dag: DnnfDag) -> bool:
    masks = _supports(dag, strict=False)
    for u in dag.reachable():
        node = dag.nodes[u]
        if isinstance(node, DecisionNode):
            if (masks[node.lo] | masks[node.hi]) >> (node.var - 1) & 1:
                return False
        elif isinstance(node, OrNode) and not _is_decision_or(dag, node):
            return False
    return True


def to_nnf(dag: DnnfDag) -> str:
    """Serialize in the c2d ``nnf V E n`` text format (children before parents)."""
    lines, index = [], {}
    lit_index = {}

    def emit(line):
        lines.append(line)
        return len(lines) - 1

    def lit(l):
        if l not in lit_index:
            lit_index[l] = emit(f"L {l}")
        return lit_index[l]

    edges = 0
    for u in dag.reachable():
        node = dag.nodes[u]
        if isinstance(node, TrueNode):
            index[u] = emit("A 0")
        elif isinstance(node, FalseNode):
            index[u] = emit("O 0 0")
        elif isinstance(node, LiteralNode):
            index[u] = lit(node.literal)
        elif isinstance(node, AndNode):
            kids = [index[c] for c in node.children]
            edges += len(kids)
            index[u] = emit(f"A {len(kids)} " + " ".join(map(str, kids)))
        elif isinstance(node, DecisionNode):
            a = emit(f"A 2 {lit(-node.var)} {index[node.lo]}")
            b = emit(f"A 2 {lit(node.var)} {index[node.hi]}")
            index[u] = emit(f"O {node.var} 2 {a} {b}")
            edges += 6
        else:
            kids = [index[c] for c in node.children]
            edges += len(kids)
            index[u] = emit(f"O {node.var} {len(kids)} " + " ".join(map(str, kids)).rstrip())
    # the root must be the last line
    if index[dag.root] != len(lines) - 1:
        index[dag.root] = emit(f"A 1 {index[dag.root]}")
        edges += 1
    header = f"nnf {len(lines)} {edges} {dag.num_vars}"
    return "\n".join([header] + [l.rstrip() for l in lines]) + "\n"


def parse_nnf(text: str) -> DnnfDag:
    """Read the c2d text format; the last node line is the root."""
    rows = [l.split() for l in text.splitlines() if l.strip() and not l.startswith("c")]
    if not rows or rows[0][0] != "nnf" or len(rows[0]) != 4:
        raise ValueError("missing 'nnf V E n' header")
    _, v, _e, n = rows[0]
    body = rows[1:]
    if len(body) != int(v):
        raise ValueError(f"header declares {v} nodes, found {len(body)}")
    nodes = []
    for lineno, row in enumerate(body, start=2):
        kind, args = row[0], list(map(int, row[1:]))
        kids = [] if kind == "L" else args[1:] if kind == "A" else args[2:]
        if any(c >= len(nodes) for c in kids):
            raise ValueError(f"line {lineno}: child index must precede its parent")
        if kind == "L":
            nodes.append(LiteralNode(args[0]))
        elif kind == "A":
            nodes.append(TrueNode() if args[0] == 0 else AndNode(tuple(args[1:])))
        elif kind == "O":
            nodes.append(FalseNode() if args[1] == 0 else OrNode(tuple(args[2:]), var=args[0]))
        else:
            raise ValueError(f"line {lineno}: unknown node kind {kind!r}")
    return DnnfDag(tuple(nodes), len(nodes) - 1, int(n))
