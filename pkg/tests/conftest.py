import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from kcphase.cnf import CnfFormula, GenParams, generate_instance


def truth_table(fn, n):
    """List of fn(bits) over all assignments; bits[i] is x_{i+1}, index bit i is x_{i+1}."""
    return [bool(fn(tuple((idx >> i) & 1 for i in range(n)))) for idx in range(1 << n)]


def formula_truth_table(formula):
    def sat(bits):
        return all(any((bits[abs(l) - 1] == 1) == (l > 0) for l in c) for c in formula.clauses)
    return truth_table(sat, formula.num_vars)


def all_assignments(n):
    return itertools.product((0, 1), repeat=n)


def random_formulas(count, seed, ks=(2, 3, 4), n_range=(4, 14), ratios=(0.5, 1.8, 4.0)):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        k = int(ks[i % len(ks)])
        n = int(rng.integers(max(n_range[0], k), n_range[1] + 1))
        r = float(ratios[(i // len(ks)) % len(ratios)])
        out.append(generate_instance(GenParams(k, n, r=r, seed=(seed, i))))
    return out


@st.composite
def cnf_formulas(draw, max_vars=8, max_clauses=12, max_len=4):
    n = draw(st.integers(1, max_vars))
    clauses = []
    for _ in range(draw(st.integers(0, max_clauses))):
        size = draw(st.integers(1, min(max_len, n)))
        vs = draw(st.lists(st.integers(1, n), min_size=size, max_size=size, unique=True))
        signs = draw(st.lists(st.booleans(), min_size=size, max_size=size))
        clauses.append(tuple(v if s else -v for v, s in zip(vs, signs)))
    return CnfFormula(n, tuple(clauses))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
