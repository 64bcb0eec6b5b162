"""Peak detection and growth-regime fits over sweep rows."""

from __future__ import annotations

from dataclasses import dataclass

from .estimators import GrowthRegressor, PeakLocator

# Satisfiability thresholds used to bound r grids. Only k=3 matters for
# correctness claims; the others are the usual literature values.
THRESHOLDS = {2: 1.0, 3: 4.3, 4: 9.93, 5: 21.12, 6: 43.37}


def threshold_for(k: int, table: dict | None = None) -> float:
    table = THRESHOLDS if table is None else {**THRESHOLDS, **table}
    try:
        return table[k]
    except KeyError:
        raise ValueError(f"no satisfiability threshold configured for k={k}") from None


@dataclass(frozen=True)
class PeakEstimate:
    k: int
    n: int
    language: str
    r_c: float | None
    r_c_raw: float | None

    @property
    def has_peak(self) -> bool:
        return self.r_c is not None


@dataclass(frozen=True)
class GrowthFit:
    k: int
    r: float
    language: str
    points: int
    semilog_slope: float
    semilog_r2: float
    loglog_slope: float
    loglog_r2: float


def _single_group(rows, keys):
    rows = list(rows)
    if not rows:
        raise ValueError("no rows given")
    groups = {tuple(getattr(r, k) for k in keys) for r in rows}
    if len(groups) != 1:
        raise ValueError(f"rows mix several {keys} groups: {sorted(groups)}")
    return rows


def detect_peak(rows, window: int = 3) -> PeakEstimate:
    """Smoothed and raw argmax of mean nodes over r for one (k, n, language)."""
    rows = _single_group(rows, ("k", "n", "language"))
    loc = PeakLocator(window=window).fit([r.r for r in rows], [r.mean_nodes for r in rows])
    return PeakEstimate(rows[0].k, rows[0].n, rows[0].language, loc.peak_, loc.raw_peak_)


def fit_growth(rows) -> GrowthFit:
    """Semilog and loglog least-squares fits of mean nodes over n for one (k, r, language)."""
    rows = _single_group(rows, ("k", "r", "language"))
    rows = sorted(rows, key=lambda r: r.n)
    reg = GrowthRegressor().fit([r.n for r in rows], [r.mean_nodes for r in rows])
    return GrowthFit(rows[0].k, rows[0].r, rows[0].language, len(rows),
                     reg.semilog_slope_, reg.semilog_r2_, reg.loglog_slope_, reg.loglog_r2_)


def group_rows(rows, keys) -> dict:
    out = {}
    for row in rows:
        out.setdefault(tuple(getattr(row, k) for k in keys), []).append(row)
    return out


def all_peaks(rows) -> list:
    return [detect_peak(g) for _, g in sorted(group_rows(rows, ("k", "n", "language")).items())
            if len(g) >= 5]


def all_growth_fits(rows) -> list:
    return [fit_growth(g) for _, g in sorted(group_rows(rows, ("k", "r", "language")).items())
            if len({r.n for r in g}) >= 4]
