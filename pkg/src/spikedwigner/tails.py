"""Symmetric heavy-tailed entry laws and their normalizing sequence.

Every law here is symmetric with a pure power tail: P(|a| >= x) = (x/scale)^-alpha
for x >= scale.  The slowly varying factor is a constant, which keeps the
normalizer b(y) = inf{x > 0 : P(|a| >= x) <= 2/y^2} in closed form and makes the
alpha = 4 tail constant c = lim x^4 P(|a| > x) exact.

Families:

* ``pareto``          -- SymmetricPareto(alpha, scale), alpha in (0, 4].
* ``pareto4_unitvar`` -- the alpha = 4 Pareto rescaled so E[a^2] = 1
                         (scale = 1/sqrt(2), tail constant 1/4).
* ``explicit``        -- user-supplied survival function, inverted numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = ["TailLaw", "law_from_config"]

_BISECT_REL_TOL = 1e-10
_BRACKET_CAP = 1e30


@dataclass(frozen=True)
class TailLaw:
    """Immutable description of a symmetric regularly-varying entry law."""

    family: str
    alpha: float
    scale: float = 1.0
    survival_fn: Optional[Callable[[float], float]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.family not in ("pareto", "pareto4_unitvar", "explicit"):
            raise ValueError(f"unknown family {self.family!r}")
        if not (0.0 < self.alpha <= 4.0):
            raise ValueError(f"tail index alpha must lie in (0, 4], got {self.alpha}")
        if self.scale <= 0.0:
            raise ValueError("scale must be positive")
        if self.family == "explicit" and self.survival_fn is None:
            raise ValueError("explicit family requires a survival function")

    # ------------------------------------------------------------------ #
    # constructors
    # ------------------------------------------------------------------ #

    @classmethod
    def pareto(cls, alpha: float, scale: float = 1.0) -> "TailLaw":
        """Symmetric Pareto: P(|a| >= x) = min(1, (x/scale)^-alpha)."""
        return cls("pareto", float(alpha), float(scale))

    @classmethod
    def pareto4_unitvar(cls) -> "TailLaw":
        """alpha = 4 Pareto normalized analytically to unit second moment.

        The unit-scale Pareto-4 has E[a^2] = 2, so dividing by sqrt(2) gives
        variance one and tail constant lim x^4 P(|a| > x) = (1/sqrt(2))^4 = 1/4.
        """
        return cls("pareto4_unitvar", 4.0, 2.0 ** -0.5)

    @classmethod
    def explicit(cls, survival: Callable[[float], float], alpha: float,
                 scale: float = 1.0) -> "TailLaw":
        """Law defined by an arbitrary nonincreasing survival function."""
        return cls("explicit", float(alpha), float(scale), survival)

    # ------------------------------------------------------------------ #
    # survival function and its inverse
    # ------------------------------------------------------------------ #

    def survival(self, x):
        """P(|a| >= x) for x >= 0 (scalar or array)."""
        if self.family == "explicit":
            if np.ndim(x) == 0:
                if x < 0:
                    raise ValueError("survival requires x >= 0")
                return float(self.survival_fn(float(x)))
            flat = [self.survival(float(v)) for v in np.asarray(x).ravel()]
            return np.array(flat).reshape(np.shape(x))
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("survival requires x >= 0")
        with np.errstate(over="ignore", divide="ignore"):
            # the power overflows below scale; the min clips it to total mass 1
            out = np.minimum(1.0, (np.maximum(x, 1e-300) / self.scale) ** -self.alpha)
        out = np.where(x == 0.0, 1.0, out)
        return float(out) if out.ndim == 0 else out

    def inverse_survival(self, u):
        """Smallest x with P(|a| >= x) <= u, for u in (0, 1]."""
        if self.family == "explicit":
            if np.ndim(u) == 0:
                return self._invert_survival(float(u))
            flat = [self._invert_survival(float(v)) for v in np.asarray(u).ravel()]
            return np.array(flat).reshape(np.shape(u))
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0.0) | (u > 1.0)):
            raise ValueError("inverse_survival requires u in (0, 1]")
        out = self.scale * u ** (-1.0 / self.alpha)
        return float(out) if out.ndim == 0 else out

    def _invert_survival(self, u: float) -> float:
        if not (0.0 < u <= 1.0):
            raise ValueError("inverse_survival requires u in (0, 1]")
        lo, hi = 0.0, self.scale
        while self.survival_fn(hi) > u:
            hi *= 2.0
            if hi > _BRACKET_CAP:
                raise RuntimeError("survival never drops below the requested level")
        while hi - lo > _BISECT_REL_TOL * max(hi, 1.0):
            mid = 0.5 * (lo + hi)
            if self.survival_fn(mid) <= u:
                hi = mid
            else:
                lo = mid
        return hi

    # ------------------------------------------------------------------ #
    # sampling
    # ------------------------------------------------------------------ #

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-CDF draw of |a| with an independent fair sign bit.

        Draw order is fixed (magnitudes first, then signs) so that a given
        generator state always yields the same values.
        """
        u = 1.0 - rng.random(size)  # in (0, 1], avoids the u = 0 pole
        mag = self.inverse_survival(u)
        sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
        out = mag * sign
        return float(out) if size is None else out

    # ------------------------------------------------------------------ #
    # normalizer and tail constant
    # ------------------------------------------------------------------ #

    def b_of(self, y: float) -> float:
        """Normalizer b(y) = inf{x > 0 : P(|a| >= x) <= 2 y^-2}, y >= 2.

        Closed form scale*(y^2/2)^(1/alpha) for the Pareto families, bisection
        to relative tolerance 1e-10 otherwise.
        """
        if y < 2.0:
            raise ValueError("b_of requires y >= 2")
        if self.family == "explicit":
            return self._invert_survival(2.0 * y ** -2)
        return self.scale * (y * y / 2.0) ** (1.0 / self.alpha)

    def tail_constant(self) -> float:
        """c = lim x^4 P(|a| > x); defined only for alpha = 4."""
        if self.alpha != 4.0:
            raise ValueError("tail constant requires alpha = 4")
        if self.family == "pareto4_unitvar":
            return 0.25  # (1/sqrt(2))^4, exact by construction
        if self.family == "explicit":
            x = 1e6 * self.scale
            return x ** 4 * self.survival(x)
        return self.scale ** 4

    def second_moment(self) -> float:
        """E[a^2]; infinite for alpha <= 2."""
        if self.family == "pareto4_unitvar":
            return 1.0
        if self.family == "explicit":
            raise ValueError("second moment not available for explicit laws")
        if self.alpha <= 2.0:
            return math.inf
        return self.alpha * self.scale ** 2 / (self.alpha - 2.0)


def law_from_config(cfg: dict) -> TailLaw:
    """Build a law from its JSON description.

    Accepted shapes: {"family": "pareto", "alpha": 2.0, "scale": 1.0} and
    {"family": "pareto4_unitvar"}.
    """
    family = cfg.get("family")
    if family == "pareto":
        return TailLaw.pareto(cfg["alpha"], cfg.get("scale", 1.0))
    if family == "pareto4_unitvar":
        return TailLaw.pareto4_unitvar()
    raise ValueError(f"unknown tail-law family in config: {family!r}")
