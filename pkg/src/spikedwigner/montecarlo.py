"""Seeded, reproducible Monte Carlo harness for the largest-eigenvalue laws.

Each trial owns an RNG derived purely from (master_seed, n, trial_index), so
results are identical regardless of execution order or thread count.  The
asymptotic theorems carry no finite-n rates; every tolerance used downstream
is an implementation choice and is echoed in the emitted summaries.
"""

from __future__ import annotations

import concurrent.futures
import io
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .limits import LimitLaw
from .matrices import SpikedModel, SpikeVectorSpec, build_wigner, max_entry_stat, perturbed_matrix
from .tails import TailLaw, law_from_config

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "EmpiricalDistribution",
    "derive_seed",
    "run_experiment",
    "ks_distance",
    "quantile",
    "convergence_sweep",
    "trials_csv_text",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("run_id", "n", "trial_index", "seed", "lambda1", "maxA", "wall_time_ms")


# --------------------------------------------------------------------------- #
# configuration and records
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one Monte Carlo experiment."""

    law: TailLaw
    spike: SpikeVectorSpec
    theta: float
    n_list: Tuple[int, ...]
    trials: int
    master_seed: int
    scaling: str = "auto"  # 'auto' | 'sqrt_n' | 'b_n'
    statistics: Tuple[str, ...] = ("lambda1", "maxA")
    target: Optional[LimitLaw] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.n_list or list(self.n_list) != sorted(set(self.n_list)):
            raise ValueError("n_list must be nonempty and strictly ascending")
        bad = set(self.statistics) - {"lambda1", "maxA", "opnorm"}
        if bad:
            raise ValueError(f"unknown statistics {sorted(bad)}")

    def model_for(self, n: int) -> SpikedModel:
        if self.scaling == "auto":
            return SpikedModel.auto(n, self.theta, self.spike, self.law)
        return SpikedModel(n, self.scaling, self.theta, self.spike, self.law)

    @classmethod
    def from_config(cls, cfg: Dict) -> "ExperimentConfig":
        target = cfg.get("target")
        return cls(
            law=law_from_config(cfg["law"]),
            spike=SpikeVectorSpec.from_config(cfg["spike"]),
            theta=float(cfg["theta"]),
            n_list=tuple(int(n) for n in cfg["n_list"]),
            trials=int(cfg["trials"]),
            master_seed=int(cfg["master_seed"]),
            scaling=cfg.get("scaling", "auto"),
            statistics=tuple(cfg.get("statistics", ("lambda1", "maxA"))),
            target=None if target is None else LimitLaw.from_config(target),
        )

    def as_config(self) -> Dict:
        law_cfg = {"family": self.law.family, "alpha": self.law.alpha, "scale": self.law.scale}
        if self.law.family == "pareto4_unitvar":
            law_cfg = {"family": "pareto4_unitvar"}
        out = {
            "law": law_cfg,
            "spike": self.spike.as_config(),
            "theta": self.theta,
            "n_list": list(self.n_list),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "scaling": self.scaling,
            "statistics": list(self.statistics),
        }
        if self.target is not None:
            out["target"] = self.target.as_config()
        return out


@dataclass(frozen=True)
class TrialRecord:
    n: int
    trial_index: int
    seed: int
    lambda1: float
    maxA: float
    wall_time_ms: float
    opnorm: Optional[float] = None  # kept out of the CSV schema


def derive_seed(master_seed: int, n: int, trial_index: int) -> int:
    """Pure 64-bit trial seed from (master_seed, n, trial_index)."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(n, trial_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# --------------------------------------------------------------------------- #
# the runner
# --------------------------------------------------------------------------- #

def _run_trial(config: ExperimentConfig, n: int, trial_index: int) -> TrialRecord:
    seed = derive_seed(config.master_seed, n, trial_index)
    t0 = time.perf_counter()
    model = config.model_for(n)
    rng = np.random.default_rng(seed)
    A = build_wigner(n, config.law, rng)
    P = perturbed_matrix(A, model)
    try:
        w = np.linalg.eigvalsh(P)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            f"eigensolver failure at n={n} trial={trial_index} seed={seed}: {exc}") from exc
    lam1 = float(w[-1])
    maxa = max_entry_stat(A, model.scale_factor())
    opnorm = float(max(abs(w[0]), abs(w[-1]))) if "opnorm" in config.statistics else None
    wall_ms = (time.perf_counter() - t0) * 1e3
    return TrialRecord(n, trial_index, seed, lam1, maxa, wall_ms, opnorm)


def run_experiment(config: ExperimentConfig, threads: int = 1) -> List[TrialRecord]:
    """All trials of the experiment, sorted by (n, trial_index).

    The output values are a pure function of the config; threads only affect
    wall time.
    """
    tasks = [(n, t) for n in config.n_list for t in range(config.trials)]
    if threads <= 1:
        records = [_run_trial(config, n, t) for n, t in tasks]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda nt: _run_trial(config, *nt), tasks))
    records.sort(key=lambda r: (r.n, r.trial_index))
    return records


def trials_csv_text(records: Sequence[TrialRecord], run_id: str,
                    timing: str = "measured") -> str:
    """Render trial records as CSV.

    timing 'measured' writes real wall times; 'zero' writes 0 so reruns are
    byte-identical (wall time is the only physically nondeterministic column).
    """
    if timing not in ("measured", "zero"):
        raise ValueError("timing must be 'measured' or 'zero'")
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for r in records:
        wall = 0.0 if timing == "zero" else r.wall_time_ms
        buf.write(f"{run_id},{r.n},{r.trial_index},{r.seed},{r.lambda1!r},{r.maxA!r},{wall!r}\n")
    return buf.getvalue()


# --------------------------------------------------------------------------- #
# empirical distributions
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample with the right-continuous step CDF (jumps of 1/N)."""

    values: Tuple[float, ...]

    @classmethod
    def from_samples(cls, samples: Sequence[float]) -> "EmpiricalDistribution":
        if len(samples) == 0:
            raise ValueError("need at least one sample")
        return cls(tuple(sorted(float(x) for x in samples)))

    def cdf(self, y: float) -> float:
        arr = np.asarray(self.values)
        return float(np.searchsorted(arr, y, side="right")) / len(self.values)


def ks_distance(samples, cdf: Callable[[float], float]) -> float:
    """sup_y |F_N(y) - F(y)| evaluated one-sidedly at every jump point."""
    if isinstance(samples, EmpiricalDistribution):
        xs = np.asarray(samples.values)
    else:
        xs = np.sort(np.asarray(list(samples), dtype=float))
    if xs.size == 0:
        raise ValueError("need at least one sample")
    n = xs.size
    fvals = np.array([cdf(float(x)) for x in xs])
    upper = np.max(np.arange(1, n + 1) / n - fvals)   # just after each jump
    lower = np.max(fvals - np.arange(0, n) / n)       # just before each jump
    return float(max(upper, lower))


def quantile(samples, q: float) -> float:
    """Order statistic at rank ceil(qN); q = 0 gives the minimum."""
    if not (0.0 <= q <= 1.0):
        raise ValueError("q must lie in [0, 1]")
    if isinstance(samples, EmpiricalDistribution):
        xs = list(samples.values)
    else:
        xs = sorted(float(x) for x in samples)
    if not xs:
        raise ValueError("need at least one sample")
    rank = max(1, int(np.ceil(q * len(xs))))
    return xs[rank - 1]


# --------------------------------------------------------------------------- #
# convergence sweeps
# --------------------------------------------------------------------------- #

def convergence_sweep(config: ExperimentConfig, threads: int = 1,
                      records: Optional[Sequence[TrialRecord]] = None) -> List[Dict]:
    """KS distance against the target law per n, plus medians.

    A table of dicts, one per n, in ascending n order.  ``records`` may pass in
    the output of :func:`run_experiment` to avoid recomputation.
    """
    if config.target is None:
        raise ValueError("convergence_sweep needs a target limit law in the config")
    if records is None:
        records = run_experiment(config, threads)
    rows: List[Dict] = []
    for n in config.n_list:
        lam = [r.lambda1 for r in records if r.n == n]
        maxa = [r.maxA for r in records if r.n == n]
        rows.append({
            "n": n,
            "trials": len(lam),
            "ks": ks_distance(lam, config.target.cdf),
            "median_lambda1": quantile(lam, 0.5),
            "median_maxA": quantile(maxa, 0.5),
            "target_law": config.target.as_config(),
        })
    return rows
