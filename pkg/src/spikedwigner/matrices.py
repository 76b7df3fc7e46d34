"""Scaled Wigner matrices, rank-one spikes, truncation splits, trace tools.

Matrices are dense, symmetric, and immutable by convention: every constructor
returns a fresh array and no routine mutates its inputs.  Intended scale is
n up to a few thousand with full LAPACK eigensolves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .tails import TailLaw

__all__ = [
    "SpikeVectorSpec",
    "SpikedModel",
    "build_wigner",
    "realize_spike",
    "perturbed_matrix",
    "top_eigenvalues",
    "max_entry_stat",
    "TruncationSplit",
    "truncation_split",
    "admissible_x_interval",
    "trace_power",
    "SandwichReport",
    "check_sandwich_even",
    "check_sandwich_odd",
]


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _require_symmetric(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square")
    if not np.array_equal(M, M.T):
        raise ValueError(f"{name} must be symmetric")
    return M


# --------------------------------------------------------------------------- #
# spike vectors and the spiked model
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class SpikeVectorSpec:
    """Recipe for the unit spike vector v.

    kinds: 'basis' (one coordinate), 'uniform' (fully delocalized 1/sqrt(n)),
    'head' (mass on the k leading coordinates), 'explicit' (given values).
    """

    kind: str
    index: int = 1
    k: int = 1
    weights: Optional[Tuple[float, ...]] = None
    values: Optional[Tuple[float, ...]] = None

    @classmethod
    def basis(cls, index: int = 1) -> "SpikeVectorSpec":
        return cls("basis", index=index)

    @classmethod
    def uniform(cls) -> "SpikeVectorSpec":
        return cls("uniform")

    @classmethod
    def head_localized(cls, k: int, weights: Optional[Sequence[float]] = None) -> "SpikeVectorSpec":
        w = None if weights is None else tuple(float(x) for x in weights)
        if w is not None and (len(w) != k or any(x == 0.0 for x in w)):
            raise ValueError("head weights must be k nonzero numbers")
        return cls("head", k=k, weights=w)

    @classmethod
    def explicit(cls, values: Sequence[float]) -> "SpikeVectorSpec":
        return cls("explicit", values=tuple(float(x) for x in values))

    @classmethod
    def from_config(cls, cfg: Dict) -> "SpikeVectorSpec":
        kind = cfg.get("kind")
        if kind == "basis":
            return cls.basis(int(cfg.get("index", 1)))
        if kind == "uniform":
            return cls.uniform()
        if kind == "head":
            return cls.head_localized(int(cfg["k"]), cfg.get("weights"))
        if kind == "explicit":
            return cls.explicit(cfg["values"])
        raise ValueError(f"unknown spike kind {kind!r}")

    def as_config(self) -> Dict:
        if self.kind == "basis":
            return {"kind": "basis", "index": self.index}
        if self.kind == "uniform":
            return {"kind": "uniform"}
        if self.kind == "head":
            out = {"kind": "head", "k": self.k}
            if self.weights is not None:
                out["weights"] = list(self.weights)
            return out
        return {"kind": "explicit", "values": list(self.values)}

    def realize(self, n: int) -> np.ndarray:
        """The unit vector in R^n; rejects specs inconsistent with n."""
        if self.kind == "basis":
            if not (1 <= self.index <= n):
                raise ValueError(f"basis index {self.index} outside 1..{n}")
            v = np.zeros(n)
            v[self.index - 1] = 1.0
            return v
        if self.kind == "uniform":
            return np.full(n, n ** -0.5)
        if self.kind == "head":
            if not (1 <= self.k <= n):
                raise ValueError(f"head width {self.k} outside 1..{n}")
            w = np.ones(self.k) if self.weights is None else np.asarray(self.weights, dtype=float)
            v = np.zeros(n)
            v[: self.k] = w / np.linalg.norm(w)
            return v
        v = np.asarray(self.values, dtype=float)
        if v.shape != (n,):
            raise ValueError(f"explicit vector has length {v.size}, expected {n}")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > 1e-6:
            raise ValueError("explicit spike vector must be a unit vector")
        return v / norm


def realize_spike(spec: SpikeVectorSpec, n: int) -> np.ndarray:
    return spec.realize(n)


@dataclass(frozen=True)
class SpikedModel:
    """Scaled Wigner matrix plus rank-one spike theta * v v^T.

    scaling 'b_n' (alpha < 4) divides by the tail quantile b(n); 'sqrt_n'
    requires alpha = 4 with unit variance.
    """

    n: int
    scaling: str
    theta: float
    spike: SpikeVectorSpec
    law: TailLaw

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        if self.theta < 0:
            raise ValueError("theta must be nonnegative")
        if self.scaling == "b_n":
            if self.law.alpha >= 4.0:
                raise ValueError("b_n scaling requires tail index alpha < 4")
        elif self.scaling == "sqrt_n":
            if self.law.alpha != 4.0:
                raise ValueError("sqrt(n) scaling requires alpha = 4")
            if abs(self.law.second_moment() - 1.0) > 1e-12:
                raise ValueError("sqrt(n) scaling requires a unit-variance law")
        else:
            raise ValueError(f"unknown scaling {self.scaling!r}")

    @classmethod
    def auto(cls, n: int, theta: float, spike: SpikeVectorSpec, law: TailLaw) -> "SpikedModel":
        """Pick the scaling the tail index dictates."""
        scaling = "sqrt_n" if law.alpha == 4.0 else "b_n"
        return cls(n, scaling, theta, spike, law)

    def scale_factor(self) -> float:
        if self.scaling == "sqrt_n":
            return self.n ** -0.5
        return 1.0 / self.law.b_of(float(self.n))


# --------------------------------------------------------------------------- #
# constructors and spectral statistics
# --------------------------------------------------------------------------- #

def build_wigner(n: int, law: TailLaw, seed) -> np.ndarray:
    """Symmetric matrix with i.i.d. upper triangle (diagonal included).

    The upper triangle is drawn row-major in one vectorized call, so the same
    (n, law, seed) always yields the bitwise-identical matrix.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    rng = _as_rng(seed)
    iu = np.triu_indices(n)
    vals = law.sample(rng, size=iu[0].size)
    A = np.zeros((n, n))
    A[iu] = vals
    A = A + np.triu(A, 1).T
    return A


def perturbed_matrix(A: np.ndarray, model: SpikedModel) -> np.ndarray:
    """scale * A + theta * v v^T for the model's scaling and spike."""
    A = _require_symmetric(A, "A")
    if A.shape[0] != model.n:
        raise ValueError("matrix dimension does not match the model")
    v = model.spike.realize(model.n)
    return model.scale_factor() * A + model.theta * np.outer(v, v)


def top_eigenvalues(M: np.ndarray, k: int, check_variational: bool = False) -> np.ndarray:
    """k largest eigenvalues, descending, via the full symmetric eigensolver.

    With check_variational, verifies lambda_1 >= u^T M u for 100 pseudorandom
    unit vectors (a deterministic sanity check of the variational
    characterization).
    """
    M = _require_symmetric(M)
    n = M.shape[0]
    if not (1 <= k <= n):
        raise ValueError("k must lie in 1..n")
    try:
        w = np.linalg.eigvalsh(M)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed to converge: {exc}") from exc
    top = w[::-1][:k].copy()
    if check_variational:
        rng = np.random.default_rng(0x5EED)
        scale = max(1.0, float(np.abs(w).max()))
        for _ in range(100):
            u = rng.standard_normal(n)
            u /= np.linalg.norm(u)
            if u @ M @ u > top[0] + 1e-10 * scale:
                raise RuntimeError("variational lower bound exceeded lambda_1")
    return top


def max_entry_stat(A: np.ndarray, scale: float) -> float:
    """scale * max_{i <= j} |a_ij| (diagonal included)."""
    A = _require_symmetric(A, "A")
    iu = np.triu_indices(A.shape[0])
    return scale * float(np.abs(A[iu]).max())


def trace_power(M: np.ndarray, p: int) -> float:
    """tr(M^p) by repeated multiplication."""
    M = np.asarray(M, dtype=float)
    if p < 1:
        raise ValueError("p must be >= 1")
    return float(np.trace(np.linalg.matrix_power(M, p)))


# --------------------------------------------------------------------------- #
# truncation splits
# --------------------------------------------------------------------------- #

def admissible_x_interval(alpha: float) -> Tuple[float, float]:
    """Open interval of admissible small-entry exponents x for alpha < 4."""
    if not (0.0 < alpha < 4.0):
        raise ValueError("x exponent is only constrained for alpha in (0, 4)")
    if alpha <= 2.0:
        return (1.0 / alpha - 1.0 / (2.0 * alpha * alpha), 1.0 / alpha)
    lo = max((alpha - 2.0) / (alpha * (alpha - 1.0)),
             (3.0 * alpha - 8.0) / (2.0 * alpha * (alpha - 2.0)))
    return (lo, 0.25)


@dataclass(frozen=True)
class TruncationSplit:
    """Partition of the perturbed matrix by raw-entry magnitude bands.

    Bands on |a_ij|: small (0, t_small], medium (t_small, t_medium],
    big (t_medium, t_verybig), very big [t_verybig, inf).  Each part carries
    the full perturbed entry scale*a_ij + theta*v_i*v_j on its band.
    """

    small: np.ndarray
    medium: np.ndarray
    big: np.ndarray
    very_big: np.ndarray
    thresholds: Dict[str, float] = field(default_factory=dict)

    def parts(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return (self.small, self.medium, self.big, self.very_big)

    def total(self) -> np.ndarray:
        return self.small + self.medium + self.big + self.very_big


def truncation_split(A: np.ndarray, model: SpikedModel, *,
                     x: Optional[float] = None, delta: Optional[float] = None,
                     delta1: float = 0.01, delta2: float = 0.01,
                     kappa: float = 0.5) -> TruncationSplit:
    """Split scale*A + theta*v v^T into small/medium/big/very-big entry bands.

    alpha < 4 bands on |a|: n^x | n^(3/(2 alpha) + delta) | kappa * b_n, with x
    inside its admissible interval (default midpoint) and delta in
    (0, 1/(2 alpha)) (default midpoint).  alpha = 4 bands: n^(1/4 - delta1) |
    n^(3/8 + delta2) | kappa * sqrt(n), with delta1, delta2 in (0, 1/64).
    """
    A = _require_symmetric(A, "A")
    n = model.n
    if A.shape[0] != n:
        raise ValueError("matrix dimension does not match the model")
    if kappa <= 0:
        raise ValueError("kappa must be positive")

    alpha = model.law.alpha
    if model.scaling == "b_n":
        lo, hi = admissible_x_interval(alpha)
        if x is None:
            x = 0.5 * (lo + hi)
        elif not (lo < x < hi):
            raise ValueError(f"x={x} outside the admissible interval ({lo}, {hi})")
        if delta is None:
            delta = 1.0 / (4.0 * alpha)
        elif not (0.0 < delta < 1.0 / (2.0 * alpha)):
            raise ValueError("delta must lie in (0, 1/(2 alpha))")
        t_small = float(n) ** x
        t_medium = float(n) ** (1.5 / alpha + delta)
        t_verybig = kappa * model.law.b_of(float(n))
        thresholds = {"x": x, "delta": delta, "kappa": kappa}
    else:
        if not (0.0 < delta1 < 1.0 / 64.0) or not (0.0 < delta2 < 1.0 / 64.0):
            raise ValueError("delta1 and delta2 must lie in (0, 1/64)")
        t_small = float(n) ** (0.25 - delta1)
        t_medium = float(n) ** (0.375 + delta2)
        t_verybig = kappa * math.sqrt(n)
        thresholds = {"delta1": delta1, "delta2": delta2, "kappa": kappa}
    # The exponent ordering t_small < t_medium < t_verybig only kicks in for n
    # large; at desk scale the medium threshold can cross kappa*b_n.  The
    # very-big extraction [t_verybig, inf) is authoritative (it is the
    # conditioning set), so the lower cuts are nested beneath it.
    c3 = t_verybig
    c1 = min(t_small, c3)
    c2 = min(max(t_medium, c1), c3)
    thresholds.update({"t_small": t_small, "t_medium": t_medium,
                       "t_verybig": t_verybig, "cut_small": c1, "cut_medium": c2})

    v = model.spike.realize(n)
    P = model.scale_factor() * A + model.theta * np.outer(v, v)
    absA = np.abs(A)
    vb = absA >= c3
    bg = ~vb & (absA > c2)
    md = ~vb & ~bg & (absA > c1)
    sm = ~(vb | bg | md)
    small, medium, big, very_big = (np.where(msk, P, 0.0) for msk in (sm, md, bg, vb))
    return TruncationSplit(small, medium, big, very_big, thresholds)


# --------------------------------------------------------------------------- #
# deterministic trace sandwich checks
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class SandwichReport:
    """Evaluation of one trace-difference sandwich instance."""

    ok: bool
    trace_diff: float
    lower: Optional[float]
    upper: float
    lower_slack: Optional[float]
    upper_slack: float


def _rank_bound(Q: np.ndarray, max_rank: int) -> None:
    if np.linalg.matrix_rank(Q) > max_rank:
        raise ValueError(f"perturbation rank exceeds {max_rank}")


def check_sandwich_even(S: np.ndarray, Q: np.ndarray, m: int, p: int) -> SandwichReport:
    """||S+Q||^2p - 7m||S||^2p <= tr((S+Q)^2p) - tr(S^2p) <= 4m||S+Q||^2p.

    Holds for symmetric S, Q with rank(Q) <= 2m and 1 <= m <= n/6 - 1; any
    numerical violation beyond roundoff is an implementation bug.
    """
    S = _require_symmetric(S, "S")
    Q = _require_symmetric(Q, "Q")
    n = S.shape[0]
    if Q.shape[0] != n:
        raise ValueError("S and Q must have the same dimension")
    if not (1 <= m <= n / 6.0 - 1.0):
        raise ValueError("m must satisfy 1 <= m <= n/6 - 1")
    if p < 1:
        raise ValueError("p must be >= 1")
    _rank_bound(Q, 2 * m)

    w_sq = np.linalg.eigvalsh(S + Q)
    w_s = np.linalg.eigvalsh(S)
    norm_sq = float(np.abs(w_sq).max())
    norm_s = float(np.abs(w_s).max())
    diff = float(np.sum(w_sq ** (2 * p)) - np.sum(w_s ** (2 * p)))
    lower = norm_sq ** (2 * p) - 7.0 * m * norm_s ** (2 * p)
    upper = 4.0 * m * norm_sq ** (2 * p)
    tol = 1e-9 * max(1.0, abs(lower), abs(upper), abs(diff))
    ok = (lower <= diff + tol) and (diff <= upper + tol)
    return SandwichReport(ok, diff, lower, upper, diff - lower, upper - diff)


def check_sandwich_odd(S: np.ndarray, Q: np.ndarray, m: int, p: int) -> SandwichReport:
    """tr((S+Q)^(2p+1)) - tr(S^(2p+1))
       <= 2m lambda_1(S+Q)^(2p+1) + lambda_n(S+Q)^(2p+1) + 3m ||S||^(2p+1).

    Holds for symmetric S, Q with rank(Q) <= 2m and 1 <= m <= n/4 - 1.
    """
    S = _require_symmetric(S, "S")
    Q = _require_symmetric(Q, "Q")
    n = S.shape[0]
    if Q.shape[0] != n:
        raise ValueError("S and Q must have the same dimension")
    if not (1 <= m <= n / 4.0 - 1.0):
        raise ValueError("m must satisfy 1 <= m <= n/4 - 1")
    if p < 1:
        raise ValueError("p must be >= 1")
    _rank_bound(Q, 2 * m)

    w_sq = np.linalg.eigvalsh(S + Q)
    w_s = np.linalg.eigvalsh(S)
    lam_max = float(w_sq[-1])
    lam_min = float(w_sq[0])
    norm_s = float(np.abs(w_s).max())
    e = 2 * p + 1
    diff = float(np.sum(w_sq ** e) - np.sum(w_s ** e))
    upper = 2.0 * m * lam_max ** e + lam_min ** e + 3.0 * m * norm_s ** e
    tol = 1e-9 * max(1.0, abs(upper), abs(diff))
    ok = diff <= upper + tol
    return SandwichReport(ok, diff, None, upper, None, upper - diff)
