import numpy as np
import pytest
from hypothesis import given, settings

from kcphase.cnf import CnfFormula, GenParams, brute_force_count, generate_instance
from kcphase.obdd import (FALSE, TRUE, ObddManager, SizeCapError, apply_and, apply_or, compile_cnf_to_obdd,
                          mk_node, obdd_model_count, obdd_node_count)

from conftest import cnf_formulas, formula_truth_table, random_formulas


def bdd_truth_table(manager, f, n):
    out = []
    for idx in range(1 << n):
        u = f
        while u > TRUE:
            v = manager.var(u)
            u = manager.high(u) if (idx >> (v - 1)) & 1 else manager.low(u)
        out.append(u == TRUE)
    return out


def robdd_size_oracle(tt, n):
    """Internal nodes of the ROBDD (natural order) counted from the truth table alone.

    Level i holds one node per distinct subfunction, reached by fixing x1..xi,
    that still depends on x_{i+1}.
    """
    total = 0
    for i in range(n):
        subs = set()
        for prefix in range(1 << i):
            sub = tuple(tt[prefix | (rest << i)] for rest in range(1 << (n - i)))
            if sub[0::2] != sub[1::2]:
                subs.add(sub)
        total += len(subs)
    return total


def from_truth_table(manager, tt, n, level=0, prefix=0):
    if level == n:
        return TRUE if tt[prefix] else FALSE
    lo = from_truth_table(manager, tt, n, level + 1, prefix)
    hi = from_truth_table(manager, tt, n, level + 1, prefix | (1 << level))
    return manager.mk_level(level, lo, hi)


def test_mk_node_reductions():
    m = ObddManager(3)
    x3 = mk_node(m, 3, FALSE, TRUE)
    assert mk_node(m, 1, x3, x3) == x3
    assert mk_node(m, 2, x3, TRUE) == mk_node(m, 2, x3, TRUE)
    lit = mk_node(m, 1, FALSE, TRUE)
    assert lit > TRUE and m.var(lit) == 1 and m.low(lit) == FALSE and m.high(lit) == TRUE
    with pytest.raises(ValueError):
        mk_node(m, 3, lit, TRUE)  # x1 sits above x3


def test_apply_identities():
    m = ObddManager(4)
    f = m.apply_or(m.literal(1), m.literal(-3))
    assert apply_and(m, TRUE, f) == f
    assert apply_and(m, FALSE, f) == FALSE
    assert apply_and(m, f, m.negate(f)) == FALSE
    assert apply_or(m, f, m.negate(f)) == TRUE


def test_apply_matches_truth_tables(rng):
    n = 4
    for _ in range(50):
        m = ObddManager(n)
        tf = list(rng.integers(0, 2, 1 << n).astype(bool))
        tg = list(rng.integers(0, 2, 1 << n).astype(bool))
        f, g = from_truth_table(m, tf, n), from_truth_table(m, tg, n)
        assert bdd_truth_table(m, apply_and(m, f, g), n) == [a and b for a, b in zip(tf, tg)]
        assert bdd_truth_table(m, apply_or(m, f, g), n) == [a or b for a, b in zip(tf, tg)]


def test_compile_trivial_formulas():
    m = ObddManager(3)
    assert compile_cnf_to_obdd(m, CnfFormula(3)) == TRUE
    m = ObddManager(1)
    assert compile_cnf_to_obdd(m, CnfFormula(1, ((1,), (-1,)))) == FALSE


def test_two_literal_clause_sizes():
    m = ObddManager(2)
    f = compile_cnf_to_obdd(m, CnfFormula(2, ((1, 2),)))
    tt = formula_truth_table(CnfFormula(2, ((1, 2),)))
    assert robdd_size_oracle(tt, 2) == 2
    assert len(m.reachable(f)) == 2
    assert obdd_node_count(m, f).nodes == 4 and obdd_node_count(m, f).edges == 4


def test_node_count_terminals_and_literal():
    m = ObddManager(2)
    r = obdd_node_count(m, TRUE)
    assert (r.nodes, r.edges) == (1, 0)
    r = obdd_node_count(m, m.literal(1))
    assert (r.nodes, r.edges) == (3, 2)


@settings(max_examples=60, deadline=None)
@given(cnf_formulas(max_vars=8))
def test_size_and_semantics_match_truth_table(formula):
    n = formula.num_vars
    m = ObddManager(n)
    f = compile_cnf_to_obdd(m, formula)
    tt = formula_truth_table(formula)
    assert bdd_truth_table(m, f, n) == tt
    assert len(m.reachable(f)) == robdd_size_oracle(tt, n)
    rep = obdd_node_count(m, f)
    assert rep.edges == 2 * len(m.reachable(f))


def test_model_count_trivial():
    m = ObddManager(5)
    assert obdd_model_count(m, FALSE) == 0
    assert obdd_model_count(m, TRUE) == 32
    assert obdd_model_count(m, TRUE, 7) == 128


def test_model_count_matches_brute_force():
    for formula in random_formulas(100, seed=11, ks=(3,)):
        m = ObddManager(formula.num_vars)
        f = compile_cnf_to_obdd(m, formula)
        assert obdd_model_count(m, f) == brute_force_count(formula)


def test_canonical_under_clause_shuffle():
    rng = np.random.default_rng(5)
    for formula in random_formulas(40, seed=3, n_range=(4, 10)):
        m = ObddManager(formula.num_vars)
        a = compile_cnf_to_obdd(m, formula)
        b = compile_cnf_to_obdd(m, formula.shuffled(rng))
        c = compile_cnf_to_obdd(m, formula, balanced=True)
        assert a == b == c


def test_equal_truth_tables_share_a_ref():
    # x1 & (x1 | x2) and x1 & (x1 | -x2) are both x1
    m = ObddManager(2)
    a = compile_cnf_to_obdd(m, CnfFormula(2, ((1,), (1, 2))))
    b = compile_cnf_to_obdd(m, CnfFormula(2, ((1, -2), (1,))))
    assert a == b == m.literal(1)


def test_reduced_and_ordered():
    formula = generate_instance(GenParams(3, 12, r=1.8, seed=8))
    m = ObddManager(12)
    f = compile_cnf_to_obdd(m, formula)
    nodes = m.reachable(f)
    keys = [(m.level(u), m.low(u), m.high(u)) for u in nodes]
    assert len(set(keys)) == len(keys)
    for u in nodes:
        assert m.low(u) != m.high(u)
        assert m.level(m.low(u)) > m.level(u) and m.level(m.high(u)) > m.level(u)


def test_custom_order():
    formula = generate_instance(GenParams(3, 10, r=2.0, seed=1))
    order = list(range(10, 0, -1))
    m = ObddManager(10, order=order)
    f = compile_cnf_to_obdd(m, formula)
    assert obdd_model_count(m, f) == brute_force_count(formula)
    with pytest.raises(ValueError):
        ObddManager(3, order=[1, 1, 2])


def test_node_cap():
    formula = generate_instance(GenParams(3, 16, r=1.8, seed=2))
    with pytest.raises(SizeCapError):
        compile_cnf_to_obdd(ObddManager(16, node_cap=20), formula)


def test_dot_export():
    m = ObddManager(2)
    f = compile_cnf_to_obdd(m, CnfFormula(2, ((1, 2),)))
    dot = m.to_dot(f)
    assert dot.startswith("digraph") and 'label="x1"' in dot and "style=dashed" in dot
