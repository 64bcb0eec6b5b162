"""Emit standalone matplotlib scripts that redraw the size and phase curves from CSV."""

from __future__ import annotations

from .pathstruct import PhaseRow
from .sweep import SweepRow

KINDS = ("size-vs-r", "log-size-vs-n", "loglog-size-vs-n", "phase-fraction-vs-r")

_READER = '''import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv_path!r}
with open(path, newline="") as fh:
    rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
'''

_SIZE_VS_R = '''
languages = {languages!r}
fig, axes = plt.subplots(1, len(languages), figsize=(5 * len(languages), 4), squeeze=False)
for ax, lang in zip(axes[0], languages):
    curves = defaultdict(list)
    for row in rows:
        if row["language"] == lang:
            curves[int(row["n"])].append((float(row["r"]), float(row["mean_nodes"])))
    for n in sorted(curves):
        pts = sorted(curves[n])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", ms=3, label=f"n={{n}}")
    ax.set_xlabel("r = m/n")
    ax.set_ylabel("average #nodes")
    ax.set_title(lang.upper())
    ax.legend()
fig.tight_layout()
plt.savefig({out!r})
'''

_SIZE_VS_N = '''
language = {language!r}
curves = defaultdict(list)
for row in rows:
    if row["language"] == language:
        curves[float(row["r"])].append((int(row["n"]), float(row["mean_nodes"])))
fig, ax = plt.subplots(figsize=(6, 4))
for r in sorted(curves):
    pts = sorted(curves[r])
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", ms=3, label=f"r={{r:g}}")
{scale}
ax.set_xlabel("n")
ax.set_ylabel("average #nodes")
ax.set_title(language.upper())
ax.legend()
fig.tight_layout()
plt.savefig({out!r})
'''

_PHASE = '''
pts = sorted((float(row["r"]), float(row["fraction"]), float(row["mean_dfa_states"])) for row in rows)
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", color="tab:blue",
        label="easy-hard fraction")
ax.set_xlabel("r = m/n")
ax.set_ylabel("fraction of instances in the easy-hard phase")
ax.set_ylim(-0.05, 1.05)
twin = ax.twinx()
twin.plot([p[0] for p in pts], [p[2] for p in pts], color="tab:gray", label="mean DFA states")
twin.set_ylabel("mean DFA states")
fig.legend(loc="upper right")
fig.tight_layout()
plt.savefig({out!r})
'''


def emit_plots(rows, kind: str, csv_path: str = "sweep.csv", out: str | None = None) -> str:
    """Return a self-contained plotting script for ``kind`` reading ``csv_path``."""
    if kind not in KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; expected one of {KINDS}")
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to plot")
    out = out or kind + ".png"
    head = _READER.format(csv_path=csv_path)
    if kind == "phase-fraction-vs-r":
        if not all(isinstance(r, PhaseRow) for r in rows):
            raise ValueError("phase-fraction-vs-r needs rows from the paths experiment")
        return head + _PHASE.format(out=out)
    if not all(isinstance(r, SweepRow) for r in rows):
        raise ValueError(f"{kind} needs sweep rows")
    languages = sorted({r.language for r in rows})
    if kind == "size-vs-r":
        return head + _SIZE_VS_R.format(languages=languages, out=out)
    scale = 'ax.set_yscale("log")' if kind == "log-size-vs-n" else 'ax.set_xscale("log")\nax.set_yscale("log")'
    return head + _SIZE_VS_N.format(language=languages[0], scale=scale, out=out)
