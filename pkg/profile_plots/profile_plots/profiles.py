"""Performance profiles and runtime summaries over benchmark results CSVs.

Input files follow the benchmark runner's schema: one row per pair with at
least ``pair_id``, ``seconds`` and ``status`` columns.  A profile point
(tau, percent) states that on ``percent`` of the instances the algorithm was
within a factor ``tau`` of the per-instance best time; timed-out runs count
as infinitely slow.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple


@dataclass(frozen=True)
class ProfilePoint:
    tau: float
    percent: float


def read_times(path) -> Dict[str, Optional[float]]:
    """pair_id -> seconds, with None for timeouts/errors."""
    out: Dict[str, Optional[float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            ok = row.get("status", "ok") == "ok"
            out[row["pair_id"]] = float(row["seconds"]) if ok else None
    if not out:
        raise ValueError(f"{path}: no result rows")
    return out


def performance_ratios(
    runs: Sequence[Dict[str, Optional[float]]]
) -> Tuple[List[str], List[List[Optional[float]]]]:
    """Per-algorithm ratio to the per-instance best; None when unsolved.

    Only pair ids present in every CSV are compared; instances nobody solved
    are dropped.
    """
    common = set(runs[0])
    for r in runs[1:]:
        common &= set(r)
    if not common:
        raise ValueError("result files share no pair ids")
    pair_ids = sorted(common)
    ratios: List[List[Optional[float]]] = [[] for _ in runs]
    kept = []
    for pid in pair_ids:
        times = [r[pid] for r in runs]
        solved = [t for t in times if t is not None]
        if not solved:
            continue
        best = max(min(solved), 1e-12)  # clamp zero timings
        kept.append(pid)
        for k, t in enumerate(times):
            ratios[k].append(None if t is None else max(t, 1e-12) / best)
    return kept, ratios


def profile_points(ratios: Sequence[Optional[float]]) -> List[ProfilePoint]:
    """The cumulative step curve of one algorithm's ratios."""
    total = len(ratios)
    finite = sorted(r for r in ratios if r is not None)
    points = [ProfilePoint(1.0, 0.0)]
    solved = 0
    for i, r in enumerate(finite):
        solved = i + 1
        if i + 1 < len(finite) and finite[i + 1] == r:
            continue
        points.append(ProfilePoint(r, 100.0 * solved / total))
    if len(points) == 1:
        points.append(ProfilePoint(1.0, 0.0))
    # anchor the win rate at tau exactly 1
    at_one = 100.0 * sum(1 for r in finite if r <= 1.0) / total
    points[0] = ProfilePoint(1.0, at_one)
    return points


def dolan_more(csv_paths: Sequence[str], labels: Sequence[str]):
    """Profiles for each CSV; returns ``(labels, dict label -> points)``."""
    if len(csv_paths) != len(labels):
        raise ValueError("need one label per results file")
    runs = [read_times(p) for p in csv_paths]
    sizes = {len(r) for r in runs}
    _, ratios = performance_ratios(runs)
    if len(sizes) > 1:
        print(f"note: pair sets differ ({sorted(sizes)}); using the intersection")
    return list(labels), {lab: profile_points(r) for lab, r in zip(labels, ratios)}


def write_profile_csv(path, labels, profiles) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "tau", "percent"])
        for lab in labels:
            for pt in profiles[lab]:
                w.writerow([lab, repr(pt.tau), repr(pt.percent)])


def render_profiles(path, labels, profiles, log_tau: bool = True) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for lab in labels:
        pts = profiles[lab]
        taus = [pt.tau for pt in pts]
        pcts = [pt.percent for pt in pts]
        # extend the final plateau so every curve spans the same tau range
        ax.step(taus, pcts, where="post", label=lab)
    if log_tau:
        ax.set_xscale("log")
    ax.set_xlabel(r"slowdown factor $\tau$")
    ax.set_ylabel("% of instances solved within $\\tau\\times$ best")
    ax.set_ylim(0, 105)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


# -- runtime summary -----------------------------------------------------------

PERCENTILES = (80, 90, 95, 99)


def nearest_rank(sorted_values: Sequence[float], pct: float) -> float:
    """Nearest-rank percentile: the ceil(pct/100 * n)-th smallest value."""
    n = len(sorted_values)
    rank = max(1, math.ceil(pct / 100.0 * n))
    return sorted_values[rank - 1]


def runtime_summary(csv_path) -> dict:
    times = [t for t in read_times(csv_path).values() if t is not None]
    if not times:
        raise ValueError("no solved instances to summarize")
    times.sort()
    n = len(times)
    mean = sum(times) / n
    var = sum((t - mean) ** 2 for t in times) / n
    out = {
        "count": n,
        "max": times[-1],
        "mean": mean,
        "stddev": math.sqrt(var),
        "median": nearest_rank(times, 50),
    }
    for p in PERCENTILES:
        out[f"p{p}"] = nearest_rank(times, p)
    return out


def render_summary(path, summary: dict, title: str = "running time statistics (s)") -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.5, 1.6))
    ax.axis("off")
    cols = list(summary)
    cells = [[f"{summary[c]:.4g}" if c != "count" else str(summary[c]) for c in cols]]
    table = ax.table(cellText=cells, colLabels=cols, loc="center")
    table.scale(1.0, 1.4)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
