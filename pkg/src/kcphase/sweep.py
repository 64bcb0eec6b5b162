"""Parameter sweeps estimating the mean compiled size per (k, n, r, language)."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, fields

import numpy as np

from .cnf import GenParams, clause_count, generate_instance
from .estimators import compile_instance
from .obdd import DEFAULT_NODE_CAP
from .pathstruct import PhaseRow, instance_seed
from .validation import check_language

SWEEP_SCHEMA = "# kcphase-sweep/1"
PHASE_SCHEMA = "# kcphase-paths/1"


def r_grid(start: float, stop: float, step: float) -> tuple:
    """Inclusive grid start, start+step, ..., stop (to within float noise)."""
    if step <= 0:
        raise ValueError("r step must be positive")
    if stop < start:
        raise ValueError("r stop must not be below r start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


@dataclass(frozen=True)
class SweepConfig:
    k: int = 3
    n_values: tuple = (20,)
    r_values: tuple = r_grid(0.2, 4.2, 0.2)
    instances_per_point: int = 200
    languages: tuple = ("dnnf",)
    seed: int = 0
    node_cap: int = DEFAULT_NODE_CAP
    time_cap: float | None = None
    timing: bool = False

    def __post_init__(self):
        if not self.r_values:
            raise ValueError("r grid is empty")
        if not self.n_values:
            raise ValueError("n list is empty")
        if self.instances_per_point < 1:
            raise ValueError("instances_per_point must be at least 1")
        langs = tuple(check_language(l) for l in self.languages)
        if not langs:
            raise ValueError("no target language selected")
        object.__setattr__(self, "languages", langs)
        for n in self.n_values:
            if not 1 <= self.k <= n:
                raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={n}")


@dataclass(frozen=True)
class SweepRow:
    k: int
    n: int
    r: float
    m: int
    language: str
    instances_completed: int
    blowups: int
    unsat_count: int
    mean_nodes: float
    median_nodes: float
    stddev_nodes: float
    mean_edges: float
    mean_compile_ms: float | None = None

    @classmethod
    def columns(cls) -> list:
        return [f.name for f in fields(cls)]

    def csv_fields(self) -> list:
        out = []
        for name in self.columns():
            v = getattr(self, name)
            if v is None:
                out.append("")
            elif isinstance(v, float) and name != "r":
                out.append(f"{v:.6f}")
            elif name == "r":
                out.append(f"{v:g}")
            else:
                out.append(str(v))
        return out


def _instance_task(args):
    k, n, m, index, config = args
    formula = generate_instance(GenParams(k, n, m=m, seed=instance_seed(config.seed, k, n, m, index)))
    return [compile_instance(formula, lang, config.node_cap, config.time_cap, count=False)
            for lang in config.languages]


def _aggregate(k, n, r, m, language, results, timing) -> SweepRow:
    done = [res for res in results if res.blowup is None]
    nodes = np.array([res.nodes for res in done], dtype=float)
    nan = float("nan")
    return SweepRow(
        k=k, n=n, r=r, m=m, language=language,
        instances_completed=len(done),
        blowups=len(results) - len(done),
        unsat_count=sum(1 for res in done if res.unsat),
        mean_nodes=float(nodes.mean()) if len(done) else nan,
        median_nodes=float(np.median(nodes)) if len(done) else nan,
        stddev_nodes=float(nodes.std()) if len(done) else nan,
        mean_edges=float(np.mean([res.edges for res in done])) if done else nan,
        mean_compile_ms=(float(np.mean([res.compile_ms for res in done])) if done else nan)
        if timing else None,
    )


def run_sweep(config: SweepConfig, jobs: int = 1, progress=None) -> list:
    """Compile every instance of the grid in every language; rows sorted by (k, n, r, language).

    All languages see the same instances: seeds depend on (seed, k, n, m, index) only.
    """
    k = config.k
    points = [(n, r, clause_count(r, n)) for n in config.n_values for r in config.r_values]
    tasks = [(k, n, m, i, config) for n, r, m in points for i in range(config.instances_per_point)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_instance_task, tasks, chunksize=4))
    else:
        results = []
        for t in tasks:
            results.append(_instance_task(t))
            if progress is not None:
                progress(len(results), len(tasks))
    rows = []
    per = config.instances_per_point
    for j, (n, r, m) in enumerate(points):
        chunk = results[j * per:(j + 1) * per]
        for li, lang in enumerate(config.languages):
            rows.append(_aggregate(k, n, r, m, lang, [res[li] for res in chunk], config.timing))
    rows.sort(key=lambda row: (row.k, row.n, row.r, row.language))
    return rows


def sweep_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(SWEEP_SCHEMA + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SweepRow.columns())
    for row in rows:
        w.writerow(row.csv_fields())
    return buf.getvalue()


def _schema_lines(text: str, schema: str) -> list:
    lines = text.splitlines()
    if not lines or lines[0].strip() != schema:
        raise ValueError(f"expected schema line {schema!r}")
    return [l for l in lines[1:] if l.strip() and not l.startswith("#")]


def sweep_from_csv(text: str) -> list:
    rows = []
    for rec in csv.DictReader(_schema_lines(text, SWEEP_SCHEMA)):
        rows.append(SweepRow(
            k=int(rec["k"]), n=int(rec["n"]), r=float(rec["r"]), m=int(rec["m"]),
            language=rec["language"],
            instances_completed=int(rec["instances_completed"]), blowups=int(rec["blowups"]),
            unsat_count=int(rec["unsat_count"]),
            mean_nodes=float(rec["mean_nodes"]), median_nodes=float(rec["median_nodes"]),
            stddev_nodes=float(rec["stddev_nodes"]), mean_edges=float(rec["mean_edges"]),
            mean_compile_ms=float(rec["mean_compile_ms"]) if rec["mean_compile_ms"] else None,
        ))
    return rows


def phase_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(PHASE_SCHEMA + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PhaseRow.CSV_COLUMNS)
    for row in rows:
        w.writerow(row.csv_fields())
    return buf.getvalue()


def phase_from_csv(text: str) -> list:
    return [PhaseRow(r=float(rec["r"]), instances=int(rec["instances"]),
                     easy_hard_count=int(rec["easy_hard_count"]), fraction=float(rec["fraction"]),
                     mean_dfa_states=float(rec["mean_dfa_states"]), skipped=int(rec.get("skipped") or 0))
            for rec in csv.DictReader(_schema_lines(text, PHASE_SCHEMA))]
