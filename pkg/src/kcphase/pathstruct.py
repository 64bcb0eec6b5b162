"""Interchangeable-path analysis on leveled automata.

An adjoint edge of a path is the off-path twin of a path edge: same source,
same target, other bit. A path compatible with a clause's adjoint nogood is
*i*-interchangeable when *i* of its adjoint edges sit at nogood variables;
multi-interchangeable means i >= 2.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cnf import (ORACLE_CAP, CnfFormula, GenParams, OracleCapError, adjoint_nogood, clause_count,
                  generate_instance, make_rng, random_clauses, solution_mask)
from .dfa import LevelDfa, compile_cnf_to_dfa, dfa_state_count
from .obdd import CompileTimeout, SizeCapError

log = logging.getLogger(__name__)

PROBE_STREAM = 1  # seed suffix separating probe clauses from the instance's own clauses


class PhaseLabel(Enum):
    EASY_HARD = "EasyHard"
    HARD_EASY = "HardEasy"


@dataclass(frozen=True)
class Edge:
    level: int
    src: int
    bit: int
    dst: int


def adjoint_edges(dfa: LevelDfa, path) -> list:
    states = dfa.state_path(path)
    out = []
    for i, b in enumerate(path):
        s = states[i]
        other = int(dfa.delta[i][s, 1 - b])
        if other == states[i + 1]:
            out.append(Edge(i, s, 1 - b, other))
    return out


def _nogood_levels(dfa: LevelDfa, clause) -> dict:
    return {dfa.level_of_var(v): val for v, val in adjoint_nogood(clause).items()}


def is_compatible(dfa: LevelDfa, path, clause) -> bool:
    return all(path[lvl] == val for lvl, val in _nogood_levels(dfa, clause).items())


def classify_path(dfa: LevelDfa, path, clause) -> int:
    """Number of adjoint edges of ``path`` at levels of the clause's nogood variables."""
    nogood = _nogood_levels(dfa, clause)
    if any(path[lvl] != val for lvl, val in nogood.items()):
        raise ValueError("path is not compatible with the clause's adjoint nogood")
    return sum(1 for e in adjoint_edges(dfa, path) if e.level in nogood)


def has_multi_interchangeable_path(dfa: LevelDfa, clause) -> bool:
    """Whether some nogood-compatible accepting path has two or more qualifying adjoint edges.

    Forward dynamic programming over the levels: each state carries the best
    adjoint-edge count (capped at 2) over compatible prefixes reaching it.
    Nogood levels follow only the forced bit; free levels follow both.
    """
    if dfa.is_empty or len(clause) < 2:
        return False
    nogood = _nogood_levels(dfa, clause)
    best = np.zeros(1, dtype=np.int8)
    for i, d in enumerate(dfa.delta):
        width = len(dfa.delta[i + 1]) if i + 1 < dfa.n else 1
        nxt = np.full(width, -1, dtype=np.int8)
        b = nogood.get(i)
        if b is None:
            for bit in (0, 1):
                ok = (best >= 0) & (d[:, bit] >= 0)
                np.maximum.at(nxt, d[ok, bit], best[ok])
        else:
            ok = (best >= 0) & (d[:, b] >= 0)
            gain = (d[:, 0] == d[:, 1]).astype(np.int8)
            np.maximum.at(nxt, d[ok, b], np.minimum(best[ok] + gain[ok], 2))
        best = nxt
        if not len(best) or best.max() < 0:
            return False
    return bool(best[0] >= 2)


def multi_interchangeable_by_enumeration(dfa: LevelDfa, clause) -> bool:
    """Reference check: classify every compatible accepting path."""
    return any(classify_path(dfa, p, clause) >= 2 for p in dfa.paths() if is_compatible(dfa, p, clause))


def count_multi_probes(dfa: LevelDfa, probes) -> int:
    return sum(1 for c in probes if has_multi_interchangeable_path(dfa, c))


def label_instance(dfa: LevelDfa, probes, threshold: int) -> tuple:
    count = 0 if dfa.is_empty else count_multi_probes(dfa, probes)
    return count, PhaseLabel.EASY_HARD if count > threshold else PhaseLabel.HARD_EASY


@dataclass(frozen=True)
class PhaseExperimentConfig:
    k: int = 3
    n: int = 18
    r_grid: tuple = tuple(round(0.2 * i, 10) for i in range(1, 22))
    instances_per_r: int = 100
    probe_clauses: int = 100
    threshold: int = 50
    seed: int = 0
    node_cap: int = 5_000_000
    time_cap: float | None = None

    def __post_init__(self):
        if not 0 < self.threshold < self.probe_clauses:
            raise ValueError("threshold must lie strictly between 0 and probe_clauses")
        if not self.r_grid:
            raise ValueError("r grid is empty")
        if self.instances_per_r < 1:
            raise ValueError("instances_per_r must be positive")


@dataclass
class PhaseRow:
    r: float
    instances: int
    easy_hard_count: int
    fraction: float
    mean_dfa_states: float
    skipped: int = 0
    multi_counts: list = field(default_factory=list, repr=False)

    CSV_COLUMNS = ("r", "instances", "easy_hard_count", "fraction", "mean_dfa_states", "skipped")

    def csv_fields(self) -> list:
        return [f"{self.r:g}", str(self.instances), str(self.easy_hard_count),
                f"{self.fraction:.6f}", f"{self.mean_dfa_states:.4f}", str(self.skipped)]


def instance_seed(master: int, k: int, n: int, m: int, index: int) -> tuple:
    """Per-instance seed; shared by the size sweeps so instance sets are paired."""
    return (int(master), k, n, m, index)


def phase_instance(config: PhaseExperimentConfig, m: int, index: int):
    """(multi count, label, states) for one instance, or None if its DFA blew up."""
    seed = instance_seed(config.seed, config.k, config.n, m, index)
    formula = generate_instance(GenParams(config.k, config.n, m=m, seed=seed))
    deadline = None if config.time_cap is None else time.perf_counter() + config.time_cap
    try:
        dfa = compile_cnf_to_dfa(formula, node_cap=config.node_cap, deadline=deadline)
    except (SizeCapError, CompileTimeout) as exc:
        log.warning("skipping instance m=%d #%d: %s", m, index, exc)
        return None
    probes = random_clauses(make_rng(seed + (PROBE_STREAM,)), config.k, config.n, config.probe_clauses)
    count, label = label_instance(dfa, probes, config.threshold)
    return count, label, dfa_state_count(dfa)


def _phase_task(args):
    config, m, index = args
    return phase_instance(config, m, index)


def phase_experiment(config: PhaseExperimentConfig, jobs: int = 1) -> list:
    tasks = [(config, clause_count(r, config.n), i)
             for r in config.r_grid for i in range(config.instances_per_r)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_phase_task, tasks, chunksize=8))
    else:
        results = [_phase_task(t) for t in tasks]
    rows = []
    per = config.instances_per_r
    for j, r in enumerate(config.r_grid):
        chunk = results[j * per:(j + 1) * per]
        done = [c for c in chunk if c is not None]
        easy = sum(1 for c in done if c[1] is PhaseLabel.EASY_HARD)
        rows.append(PhaseRow(
            r=r,
            instances=len(done),
            easy_hard_count=easy,
            fraction=easy / len(done) if done else float("nan"),
            mean_dfa_states=float(np.mean([c[2] for c in done])) if done else float("nan"),
            skipped=len(chunk) - len(done),
            multi_counts=[c[0] for c in done],
        ))
    return rows


def _interchangeable_vars(formula: CnfFormula, cap: int) -> list:
    mask = solution_mask(formula, cap)
    idx = np.arange(len(mask), dtype=np.int64)
    return [v for v in range(1, formula.num_vars + 1)
            if np.array_equal(mask, mask[idx ^ (1 << (v - 1))])]


def fully_multi_interchangeable(formula: CnfFormula, cap: int = ORACLE_CAP) -> bool:
    """At least two variables whose flip maps every solution to a solution.

    Vacuously true for an unsatisfiable formula with n >= 2.
    """
    return len(_interchangeable_vars(formula, cap)) >= 2


def weak_multi_interchangeable(formula: CnfFormula, partial: dict, cap: int = ORACLE_CAP) -> bool:
    """``partial`` (var -> 0/1) has length <= n-2 and every total extension is a model."""
    n = formula.num_vars
    if n > cap:
        raise OracleCapError(f"{n} variables exceeds the brute-force cap of {cap}")
    if len(partial) > n - 2:
        return False
    mask = solution_mask(formula, cap)
    fixed = sum(1 << (v - 1) for v in partial)
    value = sum(1 << (v - 1) for v, b in partial.items() if b)
    idx = np.arange(len(mask), dtype=np.int64)
    return bool(mask[(idx & fixed) == value].all())
