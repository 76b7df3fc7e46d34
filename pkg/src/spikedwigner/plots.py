"""Report figures rendered next to the delimited outputs.

All functions write PNG files and return the path; no interactive backends.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .limits import LimitLaw
from .montecarlo import TrialRecord

__all__ = ["ecdf_figure", "ks_sweep_figure"]


def _ecdf_steps(samples: Sequence[float]):
    xs = np.sort(np.asarray(samples, dtype=float))
    ys = np.arange(1, xs.size + 1) / xs.size
    return xs, ys


def ecdf_figure(records: Sequence[TrialRecord], target: Optional[LimitLaw],
                path: Path, run_id: str) -> Path:
    """Empirical CDF of lambda1 per dimension, with the target limit CDF if given."""
    path = Path(path)
    by_n: Dict[int, List[float]] = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r.lambda1)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    lo = min(min(v) for v in by_n.values())
    hi = max(max(v) for v in by_n.values())
    pad = 0.05 * (hi - lo + 1e-9)
    grid = np.linspace(lo - pad, hi + pad, 600)
    for n in sorted(by_n):
        xs, ys = _ecdf_steps(by_n[n])
        ax.step(xs, ys, where="post", label=f"empirical, n={n}")
    if target is not None:
        ax.plot(grid, [target.cdf(float(y)) for y in grid], "k--", lw=1.5,
                label=f"limit: {target.kind}")
    ax.set_xlabel(r"largest eigenvalue $\lambda_1$")
    ax.set_ylabel("CDF")
    ax.set_title(f"run {run_id}")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def ks_sweep_figure(rows: Sequence[dict], path: Path, run_id: str) -> Path:
    """KS distance to the target law versus dimension."""
    path = Path(path)
    ns = [row["n"] for row in rows]
    ks = [row["ks"] for row in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ns, ks, "o-")
    ax.set_xscale("log")
    ax.set_xlabel("dimension n")
    ax.set_ylabel("KS distance to limit law")
    ax.set_title(f"run {run_id}")
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
