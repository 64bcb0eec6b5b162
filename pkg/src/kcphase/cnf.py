"""CNF formulas, the random k-SAT generator, DIMACS I/O and a brute-force oracle.

Literals follow the DIMACS convention: a nonzero int whose absolute value is
the variable index (1-based) and whose sign is the polarity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ORACLE_CAP = 24


class InvalidParametersError(ValueError):
    pass


class DimacsParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class OracleCapError(ValueError):
    pass


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple = ()

    def __post_init__(self):
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if self.num_vars < 0:
            raise InvalidParametersError("num_vars must be nonnegative")
        for c in clauses:
            seen = set()
            for lit in c:
                v = abs(lit)
                if lit == 0 or v > self.num_vars:
                    raise InvalidParametersError(
                        f"literal {lit} out of range for {self.num_vars} variables")
                if v in seen:
                    raise InvalidParametersError(f"variable {v} repeated in clause {c}")
                seen.add(v)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def ratio(self) -> float:
        return self.num_clauses / self.num_vars if self.num_vars else 0.0

    def shuffled(self, rng) -> "CnfFormula":
        """Same formula with clause order permuted by ``rng``."""
        perm = rng.permutation(len(self.clauses))
        return CnfFormula(self.num_vars, tuple(self.clauses[i] for i in perm))


@dataclass(frozen=True)
class GenParams:
    k: int
    n: int
    m: int | None = None
    r: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.m is None and self.r is None:
            object.__setattr__(self, "m", 0)
        elif self.m is None:
            object.__setattr__(self, "m", clause_count(self.r, self.n))
        if self.k < 1 or self.k > self.n:
            raise InvalidParametersError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.m < 0:
            raise InvalidParametersError("m must be nonnegative")


def clause_count(r: float, n: int) -> int:
    """m = round(r*n), halves rounded up, robust to float noise in r."""
    return int(math.floor(round(r * n, 9) + 0.5))


def make_rng(seed) -> np.random.Generator:
    # PCG64 via numpy's SeedSequence; seed may be an int or a tuple of ints.
    if isinstance(seed, (tuple, list)):
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(seed))))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def random_clauses(rng: np.random.Generator, k: int, n: int, m: int) -> tuple:
    """Draw m independent clauses of k distinct variables with fair negation.

    Variables are chosen by a partial Fisher-Yates shuffle of 1..n.
    """
    if m == 0:
        return ()
    picks = rng.integers(np.arange(k), n, size=(m, k))
    signs = rng.integers(0, 2, size=(m, k))
    clauses = []
    for row, neg in zip(picks.tolist(), signs.tolist()):
        pool = list(range(1, n + 1))
        lits = []
        for t, j in enumerate(row):
            pool[t], pool[j] = pool[j], pool[t]
            lits.append(-pool[t] if neg[t] else pool[t])
        clauses.append(tuple(lits))
    return tuple(clauses)


def generate_instance(params: GenParams) -> CnfFormula:
    rng = make_rng(params.seed)
    return CnfFormula(params.n, random_clauses(rng, params.k, params.n, params.m))


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = num_clauses = None
    clauses = []
    current = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        last_line = lineno
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise DimacsParseError(lineno, "duplicate header")
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsParseError(lineno, f"malformed header {line!r}")
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsParseError(lineno, f"malformed header {line!r}") from None
            if num_vars < 0 or num_clauses < 0:
                raise DimacsParseError(lineno, "negative count in header")
            continue
        if num_vars is None:
            raise DimacsParseError(lineno, "clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsParseError(lineno, f"bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
                continue
            if abs(lit) > num_vars:
                raise DimacsParseError(lineno, f"literal {lit} exceeds {num_vars} variables")
            if any(abs(x) == abs(lit) for x in current):
                raise DimacsParseError(lineno, f"variable {abs(lit)} repeated in clause")
            current.append(lit)
    if num_vars is None:
        raise DimacsParseError(last_line, "missing 'p cnf' header")
    if current:
        raise DimacsParseError(last_line, "clause missing terminating 0")
    if len(clauses) != num_clauses:
        raise DimacsParseError(
            last_line, f"header declares {num_clauses} clauses, found {len(clauses)}")
    return CnfFormula(num_vars, tuple(clauses))


def emit_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {formula.num_clauses}"]
    lines += [" ".join(map(str, c)) + (" 0" if c else "0") for c in formula.clauses]
    return "\n".join(lines) + "\n"


def adjoint_nogood(clause) -> dict:
    """The partial assignment that falsifies ``clause``: var -> 0/1."""
    return {abs(lit): (0 if lit > 0 else 1) for lit in clause}


def evaluate(formula: CnfFormula, assignment) -> bool:
    """``assignment`` maps each variable 1..n to 0/1 (dict or length-n sequence)."""
    if isinstance(assignment, dict):
        if any(v not in assignment for v in range(1, formula.num_vars + 1)):
            raise ValueError("assignment does not cover every variable")
        value = assignment.__getitem__
    else:
        if len(assignment) < formula.num_vars:
            raise ValueError("assignment does not cover every variable")
        value = lambda v: assignment[v - 1]  # noqa: E731
    for clause in formula.clauses:
        if not any((value(abs(l)) == 1) == (l > 0) for l in clause):
            return False
    return True


def _check_cap(n: int, cap: int):
    if n > cap:
        raise OracleCapError(f"{n} variables exceeds the brute-force cap of {cap}")


def solution_mask(formula: CnfFormula, cap: int = ORACLE_CAP) -> np.ndarray:
    """Boolean array over all 2^n assignments; bit v-1 of the index is x_v."""
    n = formula.num_vars
    _check_cap(n, cap)
    idx = np.arange(1 << n, dtype=np.uint32)
    sat = np.ones(1 << n, dtype=bool)
    for clause in formula.clauses:
        cl = np.zeros(1 << n, dtype=bool)
        for lit in clause:
            bit = ((idx >> (abs(lit) - 1)) & 1).astype(bool)
            cl |= bit if lit > 0 else ~bit
        sat &= cl
    return sat


def brute_force_count(formula: CnfFormula, cap: int = ORACLE_CAP) -> int:
    return int(np.count_nonzero(solution_mask(formula, cap)))


def assignment_from_index(index: int, n: int) -> tuple:
    return tuple((index >> i) & 1 for i in range(n))
