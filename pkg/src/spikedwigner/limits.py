"""Limit laws and spectral-edge functions for the spiked heavy-tailed ensemble.

The three limiting distributions of the largest eigenvalue are built from two
ingredients: the Frechet family (max-entry fluctuations) and the BBP map
f(x) = max(2, x + 1/x).  The delocalized-spike edge F(theta) has no closed
form; it is bracketed by the implicit-equation functions G1, G2 and estimated
from the finite-p generating sum s1(theta, p)^(1/(2p)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np

from .combinat import log_s1

__all__ = [
    "f_bbp",
    "f_inverse_upper",
    "frechet_E_cdf",
    "zeta_cdf",
    "f_zeta_cdf",
    "thm1_cdf",
    "thm2_cdf",
    "thm3_cdf",
    "GFunctionResult",
    "G1",
    "G2",
    "FEstimate",
    "estimate_F",
    "sup_h",
    "sup_h1",
    "sup_h2",
    "LimitLaw",
]

_RESIDUAL_TOL = 1e-10
_SUP_TOL = 1e-4


# --------------------------------------------------------------------------- #
# the BBP map and the limiting CDFs
# --------------------------------------------------------------------------- #

def f_bbp(x: float) -> float:
    """Edge map: 2 on (0, 1], x + 1/x on [1, inf); continuous at 1."""
    if x <= 0:
        raise ValueError("f_bbp requires x > 0")
    return 2.0 if x < 1.0 else x + 1.0 / x


def f_inverse_upper(y: float) -> float:
    """The x >= 1 solving x + 1/x = y, i.e. (y + sqrt(y^2 - 4))/2; needs y >= 2."""
    if y < 2.0:
        raise ValueError("f_inverse_upper requires y >= 2")
    return 0.5 * (y + math.sqrt(y * y - 4.0))


def frechet_E_cdf(alpha: float, x: float) -> float:
    """P(E_alpha < x) = exp(-x^-alpha) for x > 0, 0 otherwise."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if x <= 0:
        return 0.0
    return math.exp(-x ** -alpha)


def zeta_cdf(c: float, x: float) -> float:
    """Frechet CDF exp(-c x^-4 / 2) of the scaled max-entry statistic, x > 0."""
    if c <= 0:
        raise ValueError("c must be positive")
    if x <= 0:
        return 0.0
    return math.exp(-0.5 * c * x ** -4)


def f_zeta_cdf(c: float, y: float) -> float:
    """CDF of f(zeta_c): an atom of mass exp(-c/2) at 2, then the mapped Frechet."""
    if y < 2.0:
        return 0.0
    return zeta_cdf(c, f_inverse_upper(y))


def thm1_cdf(theta: float, alpha: float, y: float) -> float:
    """CDF of max(theta, E_alpha): heavy-tail regime, any unit spike vector."""
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    if y < theta:
        return 0.0
    return frechet_E_cdf(alpha, y)


def thm2_cdf(theta: float, c: float, f_estimate: float, y: float) -> float:
    """CDF of max(F(theta), f(zeta_c)) using a supplied value for F(theta).

    F is only bracketed, never closed-form; for theta <= 1 the exact value 2
    may be passed.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    if f_estimate < 2.0:
        raise ValueError("F(theta) >= 2 always; f_estimate below 2 is inconsistent")
    if y < f_estimate:
        return 0.0
    return f_zeta_cdf(c, y)


def thm3_cdf(theta: float, c: float, y: float) -> float:
    """CDF of max(f(theta), f(zeta_c)): localized-spike edge regime."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    if y < f_bbp(theta):
        return 0.0
    return f_zeta_cdf(c, y)


# --------------------------------------------------------------------------- #
# G1 / G2 via their strictly monotone implicit equations
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class GFunctionResult:
    value: float
    inner_root: float
    residual: float


def _solve_decreasing(g: Callable[[float], float], gprime: Callable[[float], float],
                      target: float, lo: float, hi: float) -> float:
    """Root of the strictly decreasing g on (lo, hi).

    Bisection runs in log x (the root can sit within 1e-10 of the left edge,
    where only relative resolution helps), then Newton polishes.
    """
    if not (g(lo) > target > g(hi)):
        raise RuntimeError("root bracket failure for the implicit equation")
    ta, tb = math.log(lo), math.log(hi)
    while tb - ta > 1e-12:
        tm = 0.5 * (ta + tb)
        if g(math.exp(tm)) > target:
            ta = tm
        else:
            tb = tm
    t = 0.5 * (ta + tb)
    for _ in range(3):
        x = math.exp(t)
        step = (g(x) - target) / (gprime(x) * x)
        if not math.isfinite(step):
            break
        t_new = t - step
        if math.log(lo) < t_new < math.log(hi):
            t = t_new
    return math.exp(t)


def G1(theta: float) -> GFunctionResult:
    """Upper edge bound: y(2-2x)/(2-3x) at the root of (2-3x)^3/(x(1-x)^2) = y^2."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    target = 2.0 * math.log(theta)

    def g(x):
        return 3.0 * math.log(2.0 - 3.0 * x) - math.log(x) - 2.0 * math.log1p(-x)

    def gp(x):
        return -9.0 / (2.0 - 3.0 * x) - 1.0 / x + 2.0 / (1.0 - x)

    x = _solve_decreasing(g, gp, target, 1e-300, 2.0 / 3.0 - 1e-16)
    residual = abs(g(x) - target)
    if residual > _RESIDUAL_TOL:
        raise RuntimeError(f"G1 residual {residual:.3e} exceeds tolerance")
    return GFunctionResult(theta * (2.0 - 2.0 * x) / (2.0 - 3.0 * x), x, residual)


def G2(theta: float) -> GFunctionResult:
    """Lower edge bound: y(2-2x)/(2-7x/3) at the root of
    (6-7x)^(7/3)/(x^(1/3)(1-x)^2) = 36 y^2 / 5^(2/3)."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    target = math.log(36.0) + 2.0 * math.log(theta) - (2.0 / 3.0) * math.log(5.0)

    def g(x):
        return ((7.0 / 3.0) * math.log(6.0 - 7.0 * x)
                - math.log(x) / 3.0 - 2.0 * math.log1p(-x))

    def gp(x):
        return (-(49.0 / 3.0) / (6.0 - 7.0 * x)
                - 1.0 / (3.0 * x) + 2.0 / (1.0 - x))

    x = _solve_decreasing(g, gp, target, 1e-300, 6.0 / 7.0 - 1e-16)
    residual = abs(g(x) - target)
    if residual > _RESIDUAL_TOL:
        raise RuntimeError(f"G2 residual {residual:.3e} exceeds tolerance")
    return GFunctionResult(theta * (2.0 - 2.0 * x) / (2.0 - 7.0 * x / 3.0), x, residual)


# --------------------------------------------------------------------------- #
# finite-p estimate of F(theta)
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class FEstimate:
    """Finite-p sequence s1(theta,p)^(1/(2p)) plus the G-function bracket.

    F is defined only as a limsup with no rate, so it is reported as a
    sequence and a bracket, never as a single number.
    """

    theta: float
    points: Tuple[Tuple[int, float], ...]
    bracket: Tuple[float, float]

    @property
    def value(self) -> float:
        """The sequence entry at the largest computed p."""
        return self.points[-1][1]


def estimate_F(theta: float, p_max: int, n_points: int = 40) -> FEstimate:
    """Evaluate s1(theta, p)^(1/(2p)) along p up to p_max with the bracket
    [max(2, G2(theta)), max(2, G1(theta))].

    All p are computed when p_max <= n_points, otherwise a geometric subsample
    ending exactly at p_max.
    """
    if p_max < 1 or p_max > 1000:
        raise ValueError("p_max must lie in [1, 1000]")
    if p_max <= n_points:
        ps = list(range(1, p_max + 1))
    else:
        ps = sorted({int(round(p)) for p in np.geomspace(2, p_max, n_points)} | {p_max})
    pts = []
    for p in ps:
        logv = log_s1(theta, p)
        val = 0.0 if logv == -math.inf else math.exp(logv / (2.0 * p))
        pts.append((p, val))
    bracket = (max(2.0, G2(theta).value), max(2.0, G1(theta).value))
    return FEstimate(theta, tuple(pts), bracket)


# --------------------------------------------------------------------------- #
# variational suprema (grid + refinement, cross-checked analytically)
# --------------------------------------------------------------------------- #

def _xlogx(t: np.ndarray) -> np.ndarray:
    """t log t with the boundary convention 0^0 = 1, i.e. 0 log 0 = 0."""
    t = np.maximum(t, 0.0)
    return np.where(t > 0.0, t * np.log(np.maximum(t, 1e-300)), 0.0)


def _grid_max(fn, ndim: int, coarse: int = 41, fine: int = 15,
              rounds: int = 14, shrink: float = 4.0) -> float:
    """Maximize fn over the unit cube by meshes with geometric window shrinking.

    fn receives ndim broadcastable mesh arrays and returns log-values.
    """
    lo = np.zeros(ndim)
    hi = np.ones(ndim)
    best = -math.inf
    for rnd in range(rounds + 1):
        npts = coarse if rnd == 0 else fine
        axes = [np.linspace(lo[i], hi[i], npts) for i in range(ndim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        vals = fn(*mesh)
        flat_idx = int(np.argmax(vals))
        idx = np.unravel_index(flat_idx, vals.shape)
        v = float(vals[idx])
        if v > best:
            best = v
            center = np.array([axes[i][idx[i]] for i in range(ndim)])
        width = (hi - lo) / shrink
        lo = np.clip(center - width / 2.0, 0.0, 1.0)
        hi = np.clip(center + width / 2.0, 0.0, 1.0)
    return math.exp(best)


def sup_h(theta: float) -> float:
    """Supremum of the localized-sum rate functional over its simplex domain.

    Domain D = {0 <= y <= z <= x <= 1, y <= 2-2x}; the value must equal
    f(theta)^2, which is also recovered analytically through the on-ridge
    reduction q(x) = theta^(2-2x) * 4 / (x^x (2-x)^(2-x)) with critical point
    x = 2/(theta^2+1).  Raises if grid and reduction disagree beyond 1e-4.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    logth = math.log(theta)

    def logh(u, v, w):
        x = u
        z = w * x
        ycap = np.minimum(z, 2.0 - 2.0 * x)
        y = v * ycap
        return ((2.0 - 2.0 * x) * logth
                + _xlogx(z) - _xlogx(y) - _xlogx(np.maximum(z - y, 0.0))
                + _xlogx(2.0 - 2.0 * x) - _xlogx(y)
                - _xlogx(np.maximum(2.0 - 2.0 * x - y, 0.0))
                + _xlogx(np.maximum(2.0 * x - z, 0.0)) - _xlogx(x)
                - _xlogx(np.maximum(x - z, 0.0)))

    grid_sup = _grid_max(logh, 3)

    def q(x):
        if x <= 0.0:
            return theta * theta
        return math.exp((2.0 - 2.0 * x) * logth + math.log(4.0)
                        - x * math.log(x) - (2.0 - x) * math.log(2.0 - x))

    candidates = [q(0.0), q(1.0)]
    x_crit = 2.0 / (theta * theta + 1.0)
    if x_crit <= 1.0:
        candidates.append(q(x_crit))
    analytic = max(candidates)
    if abs(grid_sup - analytic) > _SUP_TOL:
        raise RuntimeError(
            f"grid supremum {grid_sup!r} disagrees with analytic value {analytic!r}")
    return grid_sup


def _sup_h12(theta: float, slope_cap: float, extra_log4: bool) -> float:
    logth = math.log(theta)
    log54 = math.log(1.25)

    def logh(u, v):
        x = u
        ycap = np.minimum(slope_cap * x, 2.0 - 2.0 * x)
        y = v * ycap
        base = ((2.0 - 2.0 * x) * logth
                + _xlogx(2.0 - 2.0 * x) - _xlogx(y)
                - _xlogx(np.maximum(2.0 - 2.0 * x - y, 0.0)))
        if extra_log4:
            return base + x * math.log(4.0)
        return base + (x - y) * math.log(4.0) + 2.0 * y * log54

    return _grid_max(logh, 2)


def sup_h1(theta: float) -> float:
    """Supremum of the upper-bound rate functional; equals max(4, G1(theta)^2)."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    grid_sup = _sup_h12(theta, 1.0, True)
    analytic = max(4.0, G1(theta).value ** 2)
    if abs(grid_sup - analytic) > _SUP_TOL:
        raise RuntimeError(
            f"grid supremum {grid_sup!r} disagrees with analytic value {analytic!r}")
    return grid_sup


def sup_h2(theta: float) -> float:
    """Supremum of the lower-bound rate functional; equals max(4, G2(theta)^2)."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    grid_sup = _sup_h12(theta, 1.0 / 3.0, False)
    analytic = max(4.0, G2(theta).value ** 2)
    if abs(grid_sup - analytic) > _SUP_TOL:
        raise RuntimeError(
            f"grid supremum {grid_sup!r} disagrees with analytic value {analytic!r}")
    return grid_sup


# --------------------------------------------------------------------------- #
# limit-law objects for the experiment runner
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class LimitLaw:
    """Evaluable limiting CDF selected by kind.

    Kinds and parameters:
      frechet: alpha | zeta: c | f_zeta: c | thm1: theta, alpha |
      thm2: theta, c, f_estimate | thm3: theta, c
    """

    kind: str
    params: Tuple[Tuple[str, float], ...]

    @classmethod
    def make(cls, kind: str, **params: float) -> "LimitLaw":
        expected = {
            "frechet": {"alpha"},
            "zeta": {"c"},
            "f_zeta": {"c"},
            "thm1": {"theta", "alpha"},
            "thm2": {"theta", "c", "f_estimate"},
            "thm3": {"theta", "c"},
        }
        if kind not in expected:
            raise ValueError(f"unknown limit law kind {kind!r}")
        if set(params) != expected[kind]:
            raise ValueError(f"{kind} needs parameters {sorted(expected[kind])}")
        return cls(kind, tuple(sorted(params.items())))

    @classmethod
    def from_config(cls, cfg: Dict) -> "LimitLaw":
        cfg = dict(cfg)
        kind = cfg.pop("kind")
        return cls.make(kind, **{k: float(v) for k, v in cfg.items()})

    def as_config(self) -> Dict:
        out = {"kind": self.kind}
        out.update({k: v for k, v in self.params})
        return out

    def cdf(self, y: float) -> float:
        p = dict(self.params)
        if self.kind == "frechet":
            return frechet_E_cdf(p["alpha"], y)
        if self.kind == "zeta":
            return zeta_cdf(p["c"], y)
        if self.kind == "f_zeta":
            return f_zeta_cdf(p["c"], y)
        if self.kind == "thm1":
            return thm1_cdf(p["theta"], p["alpha"], y)
        if self.kind == "thm2":
            return thm2_cdf(p["theta"], p["c"], p["f_estimate"], y)
        if self.kind == "thm3":
            return thm3_cdf(p["theta"], p["c"], y)
        raise ValueError(f"unknown limit law kind {self.kind!r}")
