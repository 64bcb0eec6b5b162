import itertools

import pytest
from hypothesis import given, settings

from kcphase.cnf import CnfFormula, GenParams, brute_force_count, generate_instance
from kcphase.dnnf import (AndNode, DecisionNode, DnnfDag, FalseNode, InvalidDagError, LiteralNode, OrNode,
                          TrueNode, check_decomposability, check_determinism, compile_cnf_to_dnnf,
                          dnnf_model_count, dnnf_node_count, parse_nnf, to_nnf)
from kcphase.obdd import CompileTimeout, SizeCapError, SizeReport

from conftest import cnf_formulas, formula_truth_table, random_formulas


def dag_truth_table(dag):
    n = dag.num_vars
    return [dag.evaluate(tuple((idx >> i) & 1 for i in range(n))) for idx in range(1 << n)]


def test_trivial_compiles():
    empty = compile_cnf_to_dnnf(CnfFormula(3))
    assert isinstance(empty.nodes[empty.root], TrueNode)
    assert dnnf_model_count(empty) == 8
    assert dnnf_node_count(empty) == SizeReport(1, 0)
    unsat = compile_cnf_to_dnnf(CnfFormula(2, ((1,), (-1,))))
    assert isinstance(unsat.nodes[unsat.root], FalseNode)
    assert dnnf_model_count(unsat) == 0
    empty_clause = compile_cnf_to_dnnf(CnfFormula(2, ((),)))
    assert dnnf_model_count(empty_clause) == 0


def test_single_clause_structure():
    dag = compile_cnf_to_dnnf(CnfFormula(2, ((1, 2),)))
    root = dag.nodes[dag.root]
    assert isinstance(root, DecisionNode) and root.var == 1
    assert isinstance(dag.nodes[root.hi], TrueNode)
    assert dag.nodes[root.lo] == LiteralNode(2)
    assert dnnf_model_count(dag) == 3
    # decision, x2 and true: 3 nodes, 2 edges
    assert dnnf_node_count(dag) == SizeReport(3, 2)


def test_independent_clauses_split_into_an_and():
    dag = compile_cnf_to_dnnf(CnfFormula(4, ((1, 2), (3, 4))))
    assert isinstance(dag.nodes[dag.root], AndNode)
    assert dnnf_model_count(dag) == 9


def test_counts_match_brute_force():
    for formula in random_formulas(100, seed=51, ks=(3,)):
        dag = compile_cnf_to_dnnf(formula)
        assert dnnf_model_count(dag) == brute_force_count(formula)


def test_counts_match_across_k():
    for formula in random_formulas(60, seed=52, ks=(2, 4, 5), n_range=(5, 14)):
        assert dnnf_model_count(compile_cnf_to_dnnf(formula)) == brute_force_count(formula)


def test_evaluate_on_random_assignments(rng):
    formula = generate_instance(GenParams(3, 16, r=1.8, seed=4))
    dag = compile_cnf_to_dnnf(formula)
    for _ in range(200):
        bits = tuple(int(b) for b in rng.integers(0, 2, 16))
        sat = all(any((bits[abs(l) - 1] == 1) == (l > 0) for l in c) for c in formula.clauses)
        assert dag.evaluate(bits) == sat


@settings(max_examples=60, deadline=None)
@given(cnf_formulas(max_vars=8))
def test_semantics_and_properties(formula):
    for branching in ("lowest", "degree"):
        dag = compile_cnf_to_dnnf(formula, branching=branching)
        assert dag_truth_table(dag) == formula_truth_table(formula)
        assert check_decomposability(dag) and check_determinism(dag)


def test_cache_and_heuristic_do_not_change_counts():
    for formula in random_formulas(40, seed=53, ks=(3,), n_range=(8, 16)):
        want = brute_force_count(formula)
        assert dnnf_model_count(compile_cnf_to_dnnf(formula, cache=False)) == want
        assert dnnf_model_count(compile_cnf_to_dnnf(formula, branching="degree")) == want


def test_cache_shrinks_or_keeps_the_dag():
    formula = generate_instance(GenParams(3, 16, r=1.6, seed=9))
    cached = dnnf_node_count(compile_cnf_to_dnnf(formula)).nodes
    uncached = dnnf_node_count(compile_cnf_to_dnnf(formula, cache=False)).nodes
    assert cached <= uncached


def test_unknown_heuristic_rejected():
    with pytest.raises(ValueError):
        compile_cnf_to_dnnf(CnfFormula(2, ((1, 2),)), branching="random")


def test_caps():
    formula = generate_instance(GenParams(3, 20, r=1.8, seed=2))
    with pytest.raises(SizeCapError):
        compile_cnf_to_dnnf(formula, node_cap=10)
    with pytest.raises(CompileTimeout):
        compile_cnf_to_dnnf(formula, cache=False, deadline=0.0)


def test_overlapping_and_is_not_decomposable():
    nodes = (LiteralNode(1), LiteralNode(-1), AndNode((0, 1)))
    dag = DnnfDag(nodes, 2, 1)
    assert not check_decomposability(dag)
    with pytest.raises(InvalidDagError):
        dnnf_model_count(dag)


def test_overlapping_or_is_not_deterministic():
    # x1 OR x2: both disjuncts hold under x1=x2=1
    nodes = (LiteralNode(1), LiteralNode(2), OrNode((0, 1)))
    dag = DnnfDag(nodes, 2, 2)
    shared = [bits for bits in itertools.product((0, 1), repeat=2)
              if DnnfDag(nodes, 0, 2).evaluate(bits) and DnnfDag(nodes, 1, 2).evaluate(bits)]
    assert shared == [(1, 1)]
    assert check_decomposability(dag)
    assert not check_determinism(dag)
    with pytest.raises(InvalidDagError):
        dnnf_model_count(dag)


def test_decision_retesting_its_variable_is_rejected():
    nodes = (LiteralNode(1), TrueNode(), DecisionNode(1, 0, 1))
    dag = DnnfDag(nodes, 2, 1)
    assert not check_determinism(dag)


def test_decision_shaped_or_is_accepted():
    # O 1 2 (A -1 x2) (A 1 x3)
    nodes = (LiteralNode(-1), LiteralNode(2), LiteralNode(1), LiteralNode(3),
             AndNode((0, 1)), AndNode((2, 3)), OrNode((4, 5), var=1))
    dag = DnnfDag(nodes, 6, 3)
    assert check_determinism(dag) and check_decomposability(dag)
    assert dnnf_model_count(dag) == 4


def test_nnf_round_trip():
    for formula in random_formulas(30, seed=54, n_range=(4, 12)):
        dag = compile_cnf_to_dnnf(formula)
        text = to_nnf(dag)
        back = parse_nnf(text)
        assert text.splitlines()[0].split()[-1] == str(formula.num_vars)
        assert dnnf_model_count(back) == dnnf_model_count(dag)
        assert dag_truth_table(back) == dag_truth_table(dag)
        assert check_determinism(back) and check_decomposability(back)
        assert to_nnf(back) == to_nnf(parse_nnf(to_nnf(back)))


def test_nnf_header_counts():
    text = to_nnf(compile_cnf_to_dnnf(CnfFormula(2, ((1, 2),))))
    header, *body = text.splitlines()
    _, v, e, n = header.split()
    assert int(v) == len(body) and n == "2"
    assert int(e) == sum(int(r.split()[1]) for r in body if r[0] == "A") + \
        sum(int(r.split()[2]) for r in body if r[0] == "O")


def test_parse_nnf_errors():
    with pytest.raises(ValueError):
        parse_nnf("L 1\n")
    with pytest.raises(ValueError):
        parse_nnf("nnf 2 1 1\nA 1 1\nL 1\n")
    with pytest.raises(ValueError):
        parse_nnf("nnf 1 0 1\nX 1\n")


def test_node_count_is_reachable_only():
    dag = compile_cnf_to_dnnf(generate_instance(GenParams(3, 14, r=2.0, seed=6)))
    rep = dnnf_node_count(dag)
    assert rep.nodes <= len(dag.nodes)
    assert rep.edges == sum(len(n.children) if hasattr(n, "children") else 2 * isinstance(n, DecisionNode)
                            for n in (dag.nodes[u] for u in dag.reachable()))


def test_model_count_with_extra_variables():
    dag = compile_cnf_to_dnnf(CnfFormula(2, ((1, 2),)))
    assert dnnf_model_count(dag, 4) == 12
    with pytest.raises(InvalidDagError):
        dnnf_model_count(dag, 1)


def test_small_size_examples():
    lit = DnnfDag((LiteralNode(3),), 0, 3)
    assert dnnf_node_count(lit) == SizeReport(1, 0)
    dec = DnnfDag((LiteralNode(2), LiteralNode(-2), DecisionNode(1, 0, 1)), 2, 2)
    assert dnnf_node_count(dec).nodes >= 3
    assert dnnf_model_count(DnnfDag((TrueNode(),), 0, 6)) == 64
    assert dnnf_model_count(DnnfDag((FalseNode(),), 0, 6)) == 0
